// Copyright 2026 The hettomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hettomo/pipeline/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hettomo::pipeline {

namespace {

std::string join(const std::string &path, const std::string &key) { return path.empty() ? key : path + "." + key; }

// Field access on one JSON object that remembers which keys were consumed,
// so leftovers can be reported as unknown.
class Fields {
   public:
    Fields(const Json &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError((path_.empty() ? "config" : path_) + ": expected an object");
    }

    bool has(const std::string &key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const Json &raw(const std::string &key) {
        if (!has(key)) throw ConfigError(join(path_, key) + ": required field is missing");
        return j_.at(key);
    }

    double number(const std::string &key) {
        const Json &v = raw(key);
        if (!v.is_number()) throw ConfigError(join(path_, key) + ": expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(join(path_, key) + ": must be finite");
        return x;
    }
    double number(const std::string &key, double fallback) { return has(key) ? number(key) : fallback; }

    std::int64_t integer(const std::string &key) {
        const Json &v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(join(path_, key) + ": expected an integer");
        return v.get<std::int64_t>();
    }
    std::int64_t integer(const std::string &key, std::int64_t fallback) { return has(key) ? integer(key) : fallback; }

    std::uint64_t unsigned_integer(const std::string &key) {
        const Json &v = raw(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw ConfigError(join(path_, key) + ": expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string &key, bool fallback) {
        if (!has(key)) return fallback;
        const Json &v = raw(key);
        if (!v.is_boolean()) throw ConfigError(join(path_, key) + ": expected true or false");
        return v.get<bool>();
    }

    std::string text(const std::string &key) {
        const Json &v = raw(key);
        if (!v.is_string()) throw ConfigError(join(path_, key) + ": expected a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto &[key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError(join(path_, key) + ": unknown field");
        }
    }

    std::string path(const std::string &key) const { return join(path_, key); }

   private:
    const Json &j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string &path, const std::string &what) {
    if (!ok) throw ConfigError(path + ": " + what);
}

Complex parse_complex(const Json &j, const std::string &path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError(path + ": expected a number or an [re, im] pair");
}

std::string kind_name(StateSpec::Kind kind) {
    switch (kind) {
        case StateSpec::Kind::vacuum: return "vacuum";
        case StateSpec::Kind::fock: return "fock";
        case StateSpec::Kind::coherent: return "coherent";
        case StateSpec::Kind::superposition: return "superposition";
        case StateSpec::Kind::thermal: return "thermal";
    }
    return "vacuum";
}

AmplifierSpec parse_amplifier(const Json &j, const std::string &path) {
    Fields f(j, path);
    AmplifierSpec spec;
    spec.gain = f.number("gain", 1.0);
    require(spec.gain > 0, f.path("gain"), "must be positive");
    const bool by_photons = f.has("mean_photons");
    const bool by_temperature = f.has("temperature");
    require(!(by_photons && by_temperature), path, "give either mean_photons or temperature, not both");
    if (by_temperature) {
        spec.temperature_kelvin = f.number("temperature");
        spec.frequency_hz = f.number("frequency");
        require(*spec.temperature_kelvin >= 0, f.path("temperature"), "must be non-negative");
        require(*spec.frequency_hz > 0, f.path("frequency"), "must be positive");
        if (f.has("approximation")) {
            const auto a = f.text("approximation");
            if (a == "bose-einstein") {
                spec.approximation = ThermalApproximation::bose_einstein;
            } else if (a == "rayleigh-jeans") {
                spec.approximation = ThermalApproximation::rayleigh_jeans;
            } else {
                throw ConfigError(f.path("approximation") + ": expected \"bose-einstein\" or \"rayleigh-jeans\"");
            }
        }
        spec.mean_photons = NoiseModel::from_temperature(*spec.temperature_kelvin, *spec.frequency_hz,
                                                         spec.approximation)
                                .mean_photons();
    } else {
        spec.mean_photons = f.number("mean_photons", 0.0);
        require(spec.mean_photons >= 0, f.path("mean_photons"), "must be non-negative");
    }
    f.finish();
    return spec;
}

HistogramSpec parse_histogram(const Json &j, const std::string &path) {
    Fields f(j, path);
    HistogramSpec spec;
    spec.bins = static_cast<int>(f.integer("bins", 1024));
    require(spec.bins >= 2 && spec.bins <= 8192, f.path("bins"), "must lie in [2, 8192]");
    if (f.has("range")) {
        const Json &r = f.raw("range");
        if (r.is_string()) {
            require(r.get<std::string>() == "auto", f.path("range"), "expected a positive number or \"auto\"");
        } else {
            spec.range = f.number("range");
            require(*spec.range > 0, f.path("range"), "must be positive");
        }
    }
    f.finish();
    return spec;
}

TimeDomainSpec parse_time_domain(const Json &j, const std::string &path) {
    Fields f(j, path);
    TimeDomainSpec spec;
    spec.enabled = f.boolean("enabled", false);
    spec.kappa = f.number("kappa", spec.kappa);
    spec.dt = f.number("dt", spec.dt);
    spec.bins = static_cast<int>(f.integer("bins", spec.bins));
    require(spec.kappa > 0, f.path("kappa"), "must be positive");
    require(spec.dt > 0, f.path("dt"), "must be positive");
    require(spec.kappa * spec.dt <= 0.1 + 1e-12, f.path("dt"), "kappa * dt must not exceed 0.1");
    require(spec.bins * spec.dt >= 6.0 / spec.kappa - 1e-9, f.path("bins"), "window must span at least 6 / kappa");
    f.finish();
    return spec;
}

}  // namespace

StateSpec parse_state_spec(const Json &j, const std::string &path) {
    Fields f(j, path);
    StateSpec spec;
    const auto kind = f.text("kind");
    spec.cutoff = static_cast<int>(f.integer("cutoff", kDefaultCutoff));
    require(spec.cutoff >= 1 && spec.cutoff <= 256, f.path("cutoff"), "must lie in [1, 256]");
    if (kind == "vacuum") {
        spec.kind = StateSpec::Kind::vacuum;
    } else if (kind == "fock") {
        spec.kind = StateSpec::Kind::fock;
        spec.level = static_cast<int>(f.integer("level"));
        require(spec.level >= 0 && spec.level <= spec.cutoff, f.path("level"), "must lie in [0, cutoff]");
    } else if (kind == "coherent") {
        spec.kind = StateSpec::Kind::coherent;
        spec.alpha = parse_complex(f.raw("alpha"), f.path("alpha"));
        require(std::norm(spec.alpha) <= spec.cutoff / 4.0, f.path("alpha"), "|alpha|^2 must not exceed cutoff / 4");
    } else if (kind == "superposition") {
        spec.kind = StateSpec::Kind::superposition;
        spec.beta = f.number("beta");
        spec.phase = f.number("phase", 0.0);
        spec.admixture = f.number("admixture", 0.0);
        require(spec.beta >= 0 && spec.beta <= 1, f.path("beta"), "must lie in [0, 1]");
        require(spec.admixture >= 0 && spec.admixture <= 1, f.path("admixture"), "must lie in [0, 1]");
    } else if (kind == "thermal") {
        spec.kind = StateSpec::Kind::thermal;
        spec.mean_photons = f.number("mean_photons");
        require(spec.mean_photons >= 0, f.path("mean_photons"), "must be non-negative");
        if (!j.contains("cutoff")) spec.cutoff = thermal_cutoff(spec.mean_photons);
        require(std::pow(spec.mean_photons / (spec.mean_photons + 1.0), spec.cutoff + 1) < 1e-6, f.path("cutoff"),
                "too small for the requested thermal occupation");
    } else {
        throw ConfigError(f.path("kind") + ": expected vacuum, fock, coherent, superposition or thermal");
    }
    f.finish();
    return spec;
}

Json state_spec_to_json(const StateSpec &spec) {
    Json j{{"kind", kind_name(spec.kind)}, {"cutoff", spec.cutoff}};
    switch (spec.kind) {
        case StateSpec::Kind::vacuum: break;
        case StateSpec::Kind::fock: j["level"] = spec.level; break;
        case StateSpec::Kind::coherent: j["alpha"] = complex_to_json(spec.alpha); break;
        case StateSpec::Kind::superposition:
            j["beta"] = spec.beta;
            j["phase"] = spec.phase;
            j["admixture"] = spec.admixture;
            break;
        case StateSpec::Kind::thermal: j["mean_photons"] = spec.mean_photons; break;
    }
    return j;
}

FockState build_state(const StateSpec &spec) {
    switch (spec.kind) {
        case StateSpec::Kind::vacuum: return FockState::vacuum(spec.cutoff);
        case StateSpec::Kind::fock: return FockState::fock(spec.level, spec.cutoff);
        case StateSpec::Kind::coherent: return coherent_state(spec.alpha, spec.cutoff);
        case StateSpec::Kind::superposition:
            return prepare_superposition(std::polar(spec.beta, spec.phase), spec.admixture, spec.cutoff);
        case StateSpec::Kind::thermal: return thermal_state(spec.mean_photons, spec.cutoff);
    }
    return FockState::vacuum(spec.cutoff);
}

AmplifierChain build_chain(const AmplifierSpec &spec) { return AmplifierChain(spec.gain, NoiseModel(spec.mean_photons)); }

ExperimentConfig parse_config(const Json &document) {
    Fields f(document, "");
    ExperimentConfig c;
    c.seed = f.unsigned_integer("seed");
    c.shots = f.unsigned_integer("shots");
    require(c.shots >= 1, "shots", "must be at least 1");
    c.batches = static_cast<int>(f.integer("batches", c.batches));
    require(c.batches >= 2, "batches", "must be at least 2");
    require(c.shots >= static_cast<std::uint64_t>(c.batches), "shots", "must be at least the number of batches");
    c.order = static_cast<int>(f.integer("order", c.order));
    require(c.order >= 1 && c.order <= kMaxKernelOrder, "order", "must lie in [1, 8]");
    c.bootstrap = static_cast<int>(f.integer("bootstrap", c.bootstrap));
    require(c.bootstrap >= 0, "bootstrap", "must be non-negative");
    c.threads = static_cast<int>(f.integer("threads", c.threads));
    require(c.threads >= 1 && c.threads <= 256, "threads", "must lie in [1, 256]");
    c.save_shots = f.boolean("save_shots", false);
    c.state = parse_state_spec(f.raw("state"), "state");
    c.amplifier = f.has("amplifier") ? parse_amplifier(f.raw("amplifier"), "amplifier") : AmplifierSpec{};
    c.histogram = f.has("histogram") ? parse_histogram(f.raw("histogram"), "histogram") : HistogramSpec{};
    c.time_domain = f.has("time_domain") ? parse_time_domain(f.raw("time_domain"), "time_domain") : TimeDomainSpec{};
    if (f.has("calibration")) {
        Fields cal(f.raw("calibration"), "calibration");
        CalibrationSpec spec;
        spec.state = parse_state_spec(cal.raw("state"), "calibration.state");
        require(spec.state.kind == StateSpec::Kind::superposition, "calibration.state.kind",
                "gain calibration needs a superposition state");
        spec.shots = cal.has("shots") ? cal.unsigned_integer("shots") : c.shots;
        require(spec.shots >= static_cast<std::uint64_t>(c.batches), "calibration.shots",
                "must be at least the number of batches");
        cal.finish();
        c.calibration = spec;
    }
    if (f.has("wigner")) {
        Fields w(f.raw("wigner"), "wigner");
        c.wigner.extent = w.number("extent", c.wigner.extent);
        c.wigner.resolution = static_cast<int>(w.integer("resolution", c.wigner.resolution));
        require(c.wigner.extent > 0, "wigner.extent", "must be positive");
        require(c.wigner.resolution >= 2 && c.wigner.resolution <= 4001, "wigner.resolution", "must lie in [2, 4001]");
        w.finish();
    }
    c.output = f.text("output");
    require(!c.output.empty(), "output", "must not be empty");
    f.finish();
    return c;
}

Json config_to_json(const ExperimentConfig &c) {
    Json amplifier{{"gain", c.amplifier.gain}};
    if (c.amplifier.temperature_kelvin) {
        amplifier["temperature"] = *c.amplifier.temperature_kelvin;
        amplifier["frequency"] = *c.amplifier.frequency_hz;
        amplifier["approximation"] =
            c.amplifier.approximation == ThermalApproximation::bose_einstein ? "bose-einstein" : "rayleigh-jeans";
    } else {
        amplifier["mean_photons"] = c.amplifier.mean_photons;
    }
    Json j{
        {"seed", c.seed},
        {"shots", c.shots},
        {"batches", c.batches},
        {"order", c.order},
        {"bootstrap", c.bootstrap},
        {"threads", c.threads},
        {"save_shots", c.save_shots},
        {"state", state_spec_to_json(c.state)},
        {"amplifier", amplifier},
        {"histogram", {{"bins", c.histogram.bins}}},
        {"time_domain",
         {{"enabled", c.time_domain.enabled},
          {"kappa", c.time_domain.kappa},
          {"dt", c.time_domain.dt},
          {"bins", c.time_domain.bins}}},
        {"wigner", {{"extent", c.wigner.extent}, {"resolution", c.wigner.resolution}}},
        {"output", c.output.string()},
    };
    j["histogram"]["range"] = c.histogram.range ? Json(*c.histogram.range) : Json("auto");
    if (c.calibration) {
        j["calibration"] = {{"state", state_spec_to_json(c.calibration->state)}, {"shots", c.calibration->shots}};
    }
    return j;
}

Json load_config_document(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error &e) {
        throw ConfigError("config: '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void override_key(Json &document, const std::string &dotted, Json value) {
    if (!document.is_object()) throw ConfigError("config: expected an object at the top level");
    Json *node = &document;
    std::stringstream parts(dotted);
    std::string part;
    std::vector<std::string> keys;
    while (std::getline(parts, part, '.')) keys.push_back(part);
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
        Json &next = (*node)[keys[i]];
        if (next.is_null()) next = Json::object();
        if (!next.is_object()) throw ConfigError(dotted + ": cannot override inside a non-object field");
        node = &next;
    }
    (*node)[keys.back()] = std::move(value);
}

}  // namespace hettomo::pipeline
