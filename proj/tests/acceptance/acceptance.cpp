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

// Acceptance suite: each criterion runs at full scale and prints one line.
//   hettomo_acceptance [A1 ... A7]     (no arguments runs all of them)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hettomo/acquisition.hpp"
#include "hettomo/fock.hpp"
#include "hettomo/measurement.hpp"
#include "hettomo/pipeline/commands.hpp"
#include "hettomo/pipeline/config.hpp"
#include "hettomo/serialization.hpp"
#include "hettomo/tomography.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace hettomo;
using namespace hettomo::pipeline;
using hettomo::testing::TempDir;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // Records one check; the detail line lists every measured value.
    void check(bool ok, const std::string &what) {
        pass = pass && ok;
        if (detail.tellp() > 0) detail << "; ";
        detail << what << (ok ? "" : " [FAIL]");
    }
};

std::string fmt(const char *pattern, auto... values) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, values...);
    return buf;
}

class Clock {
   public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

   private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Json state_json(const StateSpec &s) { return state_spec_to_json(s); }

StateSpec coherent(Complex alpha) {
    StateSpec s;
    s.kind = StateSpec::Kind::coherent;
    s.alpha = alpha;
    return s;
}

StateSpec superposition(double beta, double admixture = 0.0) {
    StateSpec s;
    s.kind = StateSpec::Kind::superposition;
    s.beta = beta;
    s.admixture = admixture;
    return s;
}

StateSpec fock(int k) {
    StateSpec s;
    s.kind = StateSpec::Kind::fock;
    s.level = k;
    return s;
}

// The degraded single-photon preparation: <a^dag a> = 0.91, |<a>| = 0.044.
StateSpec degraded_single_photon() { return superposition(0.99883, 0.0879); }

ExperimentConfig make_config(std::uint64_t seed, std::uint64_t shots, double gain, double nbar,
                             const std::filesystem::path &out) {
    Json doc{{"seed", seed},
             {"shots", shots},
             {"batches", 100},
             {"bootstrap", 200},
             {"state", {{"kind", "vacuum"}}},
             {"amplifier", {{"gain", gain}, {"mean_photons", nbar}}},
             {"output", out.string()}};
    return parse_config(doc);
}

InversionReport load_report(const std::filesystem::path &dir) {
    return report_from_json(read_json_file(dir / "report.json"));
}

Outcome noise_floor() {
    TempDir tmp("hettomo_acceptance_a1");
    const Clock clock;
    const Json doc{{"seed", 101},
                   {"shots", 1'000'000},
                   {"batches", 100},
                   {"state", {{"kind", "vacuum"}}},
                   {"amplifier", {{"gain", 1.0}, {"temperature", 21.0}, {"frequency", 6.77e9}}},
                   {"histogram", {{"bins", 512}}},
                   {"output", (tmp / "run").string()}};
    const auto config = parse_config(doc);
    const auto derived = cmd_simulate(config).at("derived");
    const double seconds = clock.seconds();
    const double sigma = derived.at("sigma_vac").get<double>();
    Outcome o;
    o.check(std::abs(sigma - 5.70) <= 0.05,
            fmt("sigma = %.4f at nbar_h = %.2f (target 5.70 +- 0.05)", sigma, config.amplifier.mean_photons));
    o.check(seconds < 10.0, fmt("%.1f s (budget 10 s)", seconds));
    return o;
}

Outcome moment_recovery() {
    TempDir tmp("hettomo_acceptance_a2");
    const Clock clock;
    const std::uint64_t shots = 10'000'000;
    const auto config = make_config(202, shots, 1e4, 2.0, tmp / "unused");
    const double range = pilot_range(config);
    simulate_run(config, {"vacuum", StateSpec{}, Stage::reference, shots}, range, tmp / "vacuum");

    const std::vector<std::pair<std::string, StateSpec>> states = {
        {"fock1", fock(1)},
        {"superposition", superposition(std::sqrt(0.5))},
        {"coherent1", coherent(1.0)},
        {"coherent05", coherent(0.5)},
    };
    std::map<std::string, InversionReport> reports;
    for (const auto &[name, spec] : states) {
        simulate_run(config, {"signal", spec, Stage::signal, shots}, range, tmp / name);
        AnalyzeOptions opts{tmp / name, tmp / "vacuum", tmp / (name + "_analysis")};
        cmd_analyze(opts);
        reports.emplace(name, load_report(tmp / (name + "_analysis")));
    }
    const double seconds = clock.seconds();

    Outcome o;
    const auto &one = reports.at("fock1").moments;
    double off = 0;
    one.for_each_index([&](int n, int m) {
        if (n != m) off = std::max(off, std::abs(one(n, m)));
    });
    o.check(std::abs(one(1, 1).real() - 1.0) <= 0.02, fmt("|1>: m11 = %.4f", one(1, 1).real()));
    o.check(std::abs(one(2, 2)) <= 0.05, fmt("|m22| = %.4f", std::abs(one(2, 2))));
    o.check(off <= 0.02, fmt("max off-diagonal %.4f", off));

    const auto &sup = reports.at("superposition").moments;
    o.check(std::abs(std::abs(sup(0, 1)) - 0.5) <= 0.02 && std::abs(sup(1, 1).real() - 0.5) <= 0.02,
            fmt("superposition: |m01| = %.4f, m11 = %.4f", std::abs(sup(0, 1)), sup(1, 1).real()));

    const auto &c1 = reports.at("coherent1").moments;
    double worst1 = 0;
    c1.for_each_index([&](int n, int m) { worst1 = std::max(worst1, std::abs(std::abs(c1(n, m)) - 1.0)); });
    o.check(worst1 <= 0.05, fmt("alpha = 1: max ||m| - 1| = %.4f", worst1));

    const auto &c05 = reports.at("coherent05").moments;
    double worst05 = 0;
    c05.for_each_index(
        [&](int n, int m) { worst05 = std::max(worst05, std::abs(c05(n, m) - std::pow(0.5, n + m))); });
    o.check(worst05 <= 0.05, fmt("alpha = 0.5: max |m - 0.5^(n+m)| = %.4f", worst05));
    o.check(seconds < 300.0, fmt("%.0f s (budget 300 s)", seconds));
    return o;
}

Outcome error_scaling() {
    TempDir tmp("hettomo_acceptance_a3");
    const std::uint64_t shots = 100'000'000;
    const double target_shots = 5.4e10;
    const std::vector<double> quoted = {1.5e-3, 4.5e-3, 1.5e-2, 0.1};
    const auto config = make_config(303, shots, 1e4, 64.0, tmp / "unused");
    const double range = pilot_range(config);
    simulate_run(config, {"signal", degraded_single_photon(), Stage::signal, shots}, range, tmp / "signal");
    simulate_run(config, {"vacuum", StateSpec{}, Stage::reference, shots}, range, tmp / "vacuum");
    cmd_analyze({tmp / "signal", tmp / "vacuum", tmp / "analysis"});
    const auto report = load_report(tmp / "analysis");

    Outcome o;
    const double scale = std::sqrt(static_cast<double>(shots) / target_shots);
    for (int k = 1; k <= 4; ++k) {
        const double extrapolated = report.errors.rms_of_order(k) * scale;
        const double ratio = extrapolated / quoted[static_cast<std::size_t>(k - 1)];
        o.check(ratio >= 1.0 / 3.0 && ratio <= 3.0,
                fmt("order %d: %.2e vs %.1e (x%.2f)", k, extrapolated, quoted[static_cast<std::size_t>(k - 1)], ratio));
    }
    return o;
}

// Random physical states for the round trip: rank up to 3 on up to 5 levels.
Eigen::MatrixXcd random_state(std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> support(1, 5), rank(1, 3);
    return hettomo::testing::random_density(rng, support(rng), kDefaultCutoff, rank(rng));
}

Outcome inversion_exactness() {
    const Clock clock;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> log_gain(0.0, 4.0), nbar(0.0, 64.0);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto rho = random_state(rng);
        const auto truth = analytic_moments(FockState::mixed(rho), 4);
        const double gain = std::pow(10.0, log_gain(rng));
        const auto noise = noise_moments(NoiseModel(nbar(rng)), 4);
        const auto raw = forward_moments(truth, noise, gain, 4);
        const auto vacuum = forward_moments(MomentMatrix::vacuum(4, Ordering::normal), noise, gain, 4);
        const auto back = invert_moments(raw, vacuum, gain, 4).moments;
        worst = std::max(worst, back.max_abs_difference(truth) / std::max(1.0, truth.max_abs()));
    }
    const double seconds = clock.seconds();
    Outcome o;
    o.check(worst <= 1e-12, fmt("worst relative error %.2e over 100 states", worst));
    o.check(seconds < 1.0, fmt("%.3f s (budget 1 s)", seconds));
    return o;
}

Outcome wigner_correctness() {
    Eigen::MatrixXcd mixture = Eigen::MatrixXcd::Zero(kDefaultCutoff + 1, kDefaultCutoff + 1);
    mixture(0, 0) = 0.09;
    mixture(1, 1) = 0.91;
    const std::vector<std::pair<std::string, FockState>> states = {
        {"|1>", FockState::fock(1)},
        {"(|0>-|1>)/sqrt2", prepare_superposition(std::polar(std::sqrt(0.5), kPi))},
        {"0.91/0.09 mixture", FockState::mixed(mixture)},
    };
    Outcome o;
    for (const auto &[name, state] : states) {
        const auto grid = reconstruct_wigner(analytic_moments(state, 4), 3.0, 61);
        double worst = 0;
        for (int ip = 0; ip < grid.resolution; ++ip) {
            for (int ix = 0; ix < grid.resolution; ++ix) {
                const Complex alpha(grid.coordinate(ix), grid.coordinate(ip));
                if (std::abs(alpha) <= 3.0) {
                    worst = std::max(worst, std::abs(grid.at(ix, ip) - wigner_oracle(state, alpha)));
                }
            }
        }
        o.check(worst <= 1e-9, fmt("%s sup-norm %.1e", name.c_str(), worst));
    }

    const auto one = reconstruct_wigner(analytic_moments(FockState::fock(1), 4), 3.0, 61).minimum();
    o.check(std::abs(one.value + 2 / kPi) <= 1e-12 && std::abs(one.alpha) <= 1e-12,
            fmt("|1> min %.6f at |alpha| = %.1e", one.value, std::abs(one.alpha)));
    const auto mixed = reconstruct_wigner(analytic_moments(FockState::mixed(mixture), 4), 3.0, 61).minimum();
    o.check(std::abs(mixed.value - 2 / kPi * (0.09 - 0.91)) <= 1e-9 && std::abs(mixed.value + 0.522) < 5e-4,
            fmt("mixture min %.9f", mixed.value));

    // W of the rotated state at alpha equals W of the original at alpha e^{-i phi}.
    const auto base = prepare_superposition(std::polar(std::sqrt(0.5), 0.3));
    const double phi = 1.1;
    const auto a = reconstruct_wigner(analytic_moments(base, 4), 3.0, 121);
    const auto b = reconstruct_wigner(analytic_moments(rotate(base, phi), 4), 3.0, 121);
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> r(0.0, 2.0), t(0.0, 2 * kPi);
    double worst = 0;
    for (int i = 0; i < 500; ++i) {
        const Complex alpha = std::polar(r(rng), t(rng));
        worst = std::max(worst, std::abs(b.interpolate(alpha) - a.interpolate(alpha * std::polar(1.0, -phi))));
    }
    o.check(worst <= 5e-3, fmt("rotation mismatch %.1e (interpolation tolerance 5e-3)", worst));
    return o;
}

Outcome gain_calibration() {
    TempDir tmp("hettomo_acceptance_a6");
    const std::uint64_t shots = 10'000'000;
    Json doc = config_to_json(make_config(606, shots, 1e4, 64.0, tmp / "run"));
    doc["state"] = state_json(degraded_single_photon());
    doc["calibration"] = {{"state", state_json(superposition(std::sqrt(0.5)))}, {"shots", shots}};
    cmd_full_run(parse_config(doc));
    const Json s = read_json_file(tmp / "run/summary.json");
    const double rel = s.at("gain_relative_error").get<double>();
    const double m11 = s.at("m11").get<double>();
    Outcome o;
    o.check(std::abs(rel) <= 0.02, fmt("G = %.0f +- %.0f (%+.1f%%, target 2%%)", s.at("gain_estimate").get<double>(),
                                       s.at("gain_uncertainty").get<double>(), 100 * rel));
    o.check(std::abs(m11 - 0.91) <= 0.05,
            fmt("m11 = %.3f +- %.3f, |m01| = %.3f", m11, s.at("m11_error").get<double>(), s.at("abs_m01").get<double>()));
    return o;
}

Outcome mode_matching() {
    TempDir tmp("hettomo_acceptance_a7");
    const std::uint64_t shots = 1'000'000;
    const double gain = 1e4;
    const double nbar = 2.0;

    // Time-domain and direct acquisition of the same state through the pipeline.
    auto direct = make_config(707, shots, gain, nbar, tmp / "unused");
    direct.batches = 50;
    direct.histogram.range = 40.0 * std::sqrt(gain);
    auto traced = direct;
    traced.time_domain.enabled = true;
    const auto state = coherent(Complex(0.6, 0.3));
    simulate_run(direct, {"signal", state, Stage::signal, shots}, *direct.histogram.range, tmp / "direct");
    simulate_run(traced, {"signal", state, Stage::signal, shots}, *traced.histogram.range, tmp / "traced");
    const auto d = load_run(tmp / "direct");
    const auto t = load_run(tmp / "traced");
    const auto de = batch_errors(d.batches);
    const auto te = batch_errors(t.batches);
    double worst = 0;
    d.moments.for_each_index([&](int n, int m) {
        if (n + m == 0) return;
        const double sigma = std::hypot(de(n, m), te(n, m));
        worst = std::max(worst, std::abs(d.moments(n, m) - t.moments(n, m)) / sigma);
    });
    Outcome o;
    o.check(worst <= 3.0, fmt("time-domain vs direct: worst |diff| = %.2f sigma", worst));

    // |1> emitted at kappa, filtered with a kappa' = 2 kappa envelope.
    const TemporalEnvelope emitted(traced.time_domain.kappa, traced.time_domain.dt, traced.time_domain.bins);
    const TemporalEnvelope filter(2 * traced.time_domain.kappa, traced.time_domain.dt, traced.time_domain.bins);
    const AmplifierChain chain(gain, NoiseModel(nbar));
    const FockState photon = FockState::fock(1);
    const int batches = 50;
    const std::size_t per_batch = shots / batches;
    std::vector<RawMomentMatrix> sig, vac;
    const QSampler vacuum_sampler(FockState::vacuum());
    for (int b = 0; b < batches; ++b) {
        MomentAccumulator acc(4);
        const std::uint64_t seed = derive_seed(708, Stage::signal, static_cast<std::uint64_t>(b));
        for (std::size_t done = 0, chunk = 0; done < per_batch; done += 10'000, ++chunk) {
            const auto traces = simulate_time_trace(photon, emitted, chain, 10'000, seed, chunk);
            acc.add(matched_filter(traces, filter).samples);
        }
        sig.push_back(acc.moments());
        // White noise through any unit-energy filter has the direct-path statistics.
        Engine engine = make_engine(708, Stage::reference, static_cast<std::uint64_t>(b));
        std::vector<Complex> samples;
        sample_detector_into(vacuum_sampler, chain, per_batch, engine, samples);
        MomentAccumulator vacc(4);
        vacc.add(samples);
        vac.push_back(vacc.moments());
    }
    const auto report = invert_moments(sig, vac, gain, 4, 200, 709);
    const double eta = std::pow(exponential_overlap(1.0, 2.0), 2);
    const double lossy = analytic_moments(loss_channel(photon, eta), 4)(1, 1).real();
    const double n = report.moments(1, 1).real();
    o.check(std::abs(n - 8.0 / 9.0) <= 0.02 && std::abs(lossy - 8.0 / 9.0) <= 1e-12,
            fmt("kappa' = 2 kappa: <a^dag a> = %.4f +- %.4f (loss channel %.4f, target 8/9)", n,
                report.errors(1, 1), lossy));
    return o;
}

}  // namespace

int main(int argc, char **argv) {
    const std::vector<std::pair<std::string, std::pair<std::string, std::function<Outcome()>>>> criteria = {
        {"A1", {"noise floor", noise_floor}},
        {"A2", {"moment recovery", moment_recovery}},
        {"A3", {"error scaling", error_scaling}},
        {"A4", {"inversion exactness", inversion_exactness}},
        {"A5", {"Wigner correctness", wigner_correctness}},
        {"A6", {"gain calibration", gain_calibration}},
        {"A7", {"mode matching", mode_matching}},
    };
    std::vector<std::string> wanted(argv + 1, argv + argc);
    int failures = 0;
    for (const auto &[id, entry] : criteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
        const Clock clock;
        Outcome outcome;
        try {
            outcome = entry.second();
        } catch (const std::exception &e) {
            outcome.check(false, std::string("exception: ") + e.what());
        }
        std::printf("%s %s %s (%.1f s): %s\n", outcome.pass ? "PASS" : "FAIL", id.c_str(), entry.first.c_str(),
                    clock.seconds(), outcome.detail.str().c_str());
        std::fflush(stdout);
        failures += outcome.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
