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

#include "hettomo/pipeline/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "hettomo/pipeline/artifacts.hpp"
#include "hettomo/serialization.hpp"

namespace hettomo::pipeline {

namespace {

// Shots drawn per time-domain chunk; 10^4 records of 400 bins is ~64 MB.
constexpr std::size_t kTraceChunk = 10'000;
constexpr std::size_t kPilotShots = 100'000;
constexpr double kRangeSigmas = 6.0;

// Re-raises an exception with the stage name prefixed, keeping its type.
template <typename Fn>
decltype(auto) in_stage(const std::string &stage, Fn &&fn) {
    const auto tag = [&](const std::exception &e) { return "[" + stage + "] " + e.what(); };
    try {
        return fn();
    } catch (const ConfigError &e) {
        throw ConfigError(tag(e));
    } catch (const NumericError &e) {
        throw NumericError(tag(e));
    } catch (const DataError &e) {
        throw DataError(tag(e));
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument(tag(e));
    }
}

class Stopwatch {
   public:
    Stopwatch() : start_(std::chrono::steady_clock::now()), started_utc_(utc_timestamp()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    const std::string &started_utc() const { return started_utc_; }

   private:
    std::chrono::steady_clock::time_point start_;
    std::string started_utc_;
};

RawMomentMatrix truncate(const RawMomentMatrix &raw, int order) {
    if (order > raw.order()) {
        throw DataError("requested order " + std::to_string(order) + " exceeds the stored order " +
                        std::to_string(raw.order()));
    }
    RawMomentMatrix out(order, raw.source(), raw.count());
    out.for_each_index([&](int n, int m) { out.set(n, m, raw.extended(n, m)); });
    return out;
}

std::vector<RawMomentMatrix> truncate_all(const std::vector<RawMomentMatrix> &raws, int order) {
    std::vector<RawMomentMatrix> out;
    out.reserve(raws.size());
    for (const auto &r : raws) out.push_back(truncate(r, order));
    return out;
}

// Per-quadrature variances of S from its first and second raw moments.
Json quadrature_sigma(const RawMomentMatrix &raw) {
    const Complex mean = raw(0, 1);
    const double power = raw(1, 1).real();
    const double second = raw(0, 2).real();  // <S^2>: Re = <X^2> - <P^2>
    const double var_x = 0.5 * (power + second) - mean.real() * mean.real();
    const double var_p = 0.5 * (power - second) - mean.imag() * mean.imag();
    return {{"sigma", std::sqrt(0.5 * (var_x + var_p))}, {"sigma_x", std::sqrt(var_x)}, {"sigma_p", std::sqrt(var_p)}};
}

struct GeneratedRun {
    QuadratureHistogram histogram;
    std::vector<MomentAccumulator> accumulators;  // one per batch
    std::vector<std::vector<Complex>> shots;      // kept only when saving shots
};

GeneratedRun generate(const ExperimentConfig &config, const FockState &state, Stage stage, std::uint64_t shots,
                      double range) {
    const AmplifierChain chain = build_chain(config.amplifier);
    const int batches = config.batches;
    const int order = config.order;
    const QSampler sampler(state);
    std::optional<TemporalEnvelope> envelope;
    if (config.time_domain.enabled) {
        envelope.emplace(config.time_domain.kappa, config.time_domain.dt, config.time_domain.bins);
    }

    GeneratedRun run{QuadratureHistogram(config.histogram.bins, range),
                     std::vector<MomentAccumulator>(static_cast<std::size_t>(batches), MomentAccumulator(order)),
                     {}};
    if (config.save_shots) run.shots.resize(static_cast<std::size_t>(batches));

    const std::uint64_t per_batch = shots / static_cast<std::uint64_t>(batches);
    auto batch_size = [&](int b) {
        return b + 1 == batches ? shots - per_batch * static_cast<std::uint64_t>(batches - 1) : per_batch;
    };

    const int workers = std::min(config.threads, batches);
    std::vector<QuadratureHistogram> partial(static_cast<std::size_t>(workers),
                                             QuadratureHistogram(config.histogram.bins, range));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
    std::atomic<int> next{0};

    auto work = [&](int w) {
        try {
            std::vector<Complex> samples;
            for (int b = next++; b < batches; b = next++) {
                const auto n = static_cast<std::size_t>(batch_size(b));
                if (envelope) {
                    // Each batch owns a derived seed; chunks are its streams.
                    const std::uint64_t batch_seed = derive_seed(config.seed, stage, static_cast<std::uint64_t>(b));
                    samples.clear();
                    for (std::size_t done = 0, chunk = 0; done < n; ++chunk) {
                        const std::size_t len = std::min(kTraceChunk, n - done);
                        const auto traces = simulate_time_trace(state, *envelope, chain, len, batch_seed, chunk);
                        const auto filtered = matched_filter(traces, *envelope);
                        samples.insert(samples.end(), filtered.samples.begin(), filtered.samples.end());
                        done += len;
                    }
                } else {
                    Engine engine = make_engine(config.seed, stage, static_cast<std::uint64_t>(b));
                    sample_detector_into(sampler, chain, n, engine, samples);
                }
                auto &hist = partial[static_cast<std::size_t>(w)];
                for (const auto &s : samples) hist.add(s);
                run.accumulators[static_cast<std::size_t>(b)].add(samples);
                if (config.save_shots) run.shots[static_cast<std::size_t>(b)] = samples;
            }
        } catch (...) {
            failures[static_cast<std::size_t>(w)] = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (const auto &f : failures) {
        if (f) std::rethrow_exception(f);
    }
    for (const auto &h : partial) run.histogram.merge(h);
    return run;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw DataError("cannot write '" + path.string() + "'");
}

void write_shots(const std::filesystem::path &dir, const GeneratedRun &run, const ExperimentConfig &config,
                 Stage stage) {
    ShotBatch all;
    all.seed = config.seed;
    all.stream = static_cast<std::uint64_t>(stage);
    all.gain = config.amplifier.gain;
    for (const auto &part : run.shots) all.samples.insert(all.samples.end(), part.begin(), part.end());
    save_shot_batch(all, dir / "shots");
}

void check_compatible(const RunData &a, const RunData &b) {
    if (!a.histogram.same_binning(b.histogram)) {
        throw DataError("runs '" + a.dir.string() + "' and '" + b.dir.string() + "' use different histogram binning");
    }
    const auto units_a = a.info.at("units").get<std::string>();
    const auto units_b = b.info.at("units").get<std::string>();
    if (units_a != units_b) throw DataError("runs are recorded in different units (" + units_a + ", " + units_b + ")");
    const double ga = a.info.at("amplifier").at("gain").get<double>();
    const double gb = b.info.at("amplifier").at("gain").get<double>();
    if (std::abs(ga - gb) > 1e-12 * std::max(ga, gb)) {
        throw DataError("runs were taken with different amplifier settings");
    }
}

Json calibration_json(const GainEstimate &g, double configured, int bootstrap) {
    return {{"format", "hettomo-calibration"},
            {"version", 1},
            {"gain", g.gain},
            {"uncertainty", g.uncertainty},
            {"first_moment", g.first_moment},
            {"excess_power", g.excess_power},
            {"configured_gain", configured},
            {"bootstrap_samples", bootstrap}};
}

GainEstimate calibrate_runs(const RunData &super, const RunData &vacuum, int bootstrap, std::uint64_t seed) {
    check_compatible(super, vacuum);
    const auto s = truncate_all(super.batches, 2);
    const auto v = truncate_all(vacuum.batches, 2);
    return estimate_gain(s, v, bootstrap, seed);
}

struct Analysis {
    InversionReport report;
    Json derived;
};

Analysis analyze_runs(const RunData &signal, const RunData &vacuum, double gain, const std::string &gain_source,
                      int order, int bootstrap, std::uint64_t seed, bool from_histogram,
                      const std::filesystem::path &out) {
    check_compatible(signal, vacuum);
    Analysis a;
    if (from_histogram) {
        a.report = invert_moments(histogram_moments(signal.histogram, order), histogram_moments(vacuum.histogram, order),
                                  gain, order);
    } else {
        a.report = invert_moments(truncate_all(signal.batches, order), truncate_all(vacuum.batches, order), gain, order,
                                  bootstrap, seed);
    }
    const auto &m = a.report.moments;
    const auto &e = a.report.errors;
    const RawMomentMatrix vac = truncate(vacuum.moments, std::min(2, order));
    const double vacuum_variance = 0.5 * (vac(1, 1).real() - std::norm(vac(0, 1))) / gain;

    Json table = Json::array();
    m.for_each_index([&](int n, int k) {
        table.push_back({{"n", n}, {"m", k}, {"abs", std::abs(m(n, k))}, {"error", e(n, k)}});
    });
    a.derived = {
        {"gain", gain},
        {"gain_source", gain_source},
        {"order", order},
        {"moments_source", from_histogram ? "histogram" : "streaming"},
        {"truncation_order", bootstrap > 0 && !from_histogram ? truncation_order(m, e) : truncation_order(m, 0.1)},
        {"m11", m(1, 1).real()},
        {"m11_error", e(1, 1)},
        {"abs_m01", std::abs(m(0, 1))},
        {"abs_m01_error", e(0, 1)},
        {"vacuum_variance_mode_units", vacuum_variance},
        {"moments_abs", table},
    };
    if (order >= 4) {
        a.derived["m22"] = m(2, 2).real();
        a.derived["m22_error"] = e(2, 2);
    }

    Json report = report_to_json(a.report);
    report["provenance"]["signal_run"] = signal.dir.string();
    report["provenance"]["vacuum_run"] = vacuum.dir.string();
    report["provenance"]["gain_source"] = gain_source;
    report["provenance"]["moments_source"] = from_histogram ? "histogram" : "streaming";
    report["provenance"]["bootstrap_seed"] = seed;
    write_json_file(report, out / "report.json");
    write_text(out / "moments_table.txt", moment_table_text(a.report));
    return a;
}

Json wigner_into(const InversionReport &report, double extent, int resolution, const std::filesystem::path &out) {
    const bool has_errors = report.bootstrap_samples > 0;
    const WignerGrid grid = has_errors ? reconstruct_wigner(report.moments, report.errors, extent, resolution)
                                       : reconstruct_wigner(report.moments, extent, resolution);
    save_wigner(grid, out / "wigner.csv");
    const auto lo = grid.minimum();
    const auto hi = grid.maximum();
    return {{"wigner_min", lo.value},
            {"wigner_min_alpha", complex_to_json(lo.alpha)},
            {"wigner_max", hi.value},
            {"wigner_max_alpha", complex_to_json(hi.alpha)},
            {"wigner_integral", grid.integral()},
            {"truncation_order", grid.truncation},
            {"extent", extent},
            {"resolution", resolution}};
}

}  // namespace

RunData load_run(const std::filesystem::path &dir) {
    if (!std::filesystem::is_directory(dir)) throw DataError("run directory '" + dir.string() + "' does not exist");
    RunData run;
    run.dir = dir;
    run.info = read_json_file(dir / "run.json");
    run.moments = raw_moments_from_json(read_json_file(dir / "moments.json"));
    const Json batches = read_json_file(dir / "batch_moments.json");
    if (!batches.is_array()) throw DataError("batch_moments.json must hold an array");
    for (const auto &b : batches) run.batches.push_back(raw_moments_from_json(b));
    run.histogram = load_histogram(dir / "histogram.bin");
    return run;
}

double pilot_range(const ExperimentConfig &config) {
    const AmplifierChain chain = build_chain(config.amplifier);
    const QSampler sampler(FockState::vacuum());
    Engine engine = make_engine(config.seed, Stage::pilot, 0);
    ShotBatch pilot;
    sample_detector_into(sampler, chain, std::min<std::size_t>(kPilotShots, std::max<std::uint64_t>(config.shots, 1000)),
                         engine, pilot.samples);
    return kRangeSigmas * vacuum_sigma(pilot).sigma;
}

Json simulate_run(const ExperimentConfig &config, const RunRequest &request, double range,
                  const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    const FockState state = build_state(request.state);
    const GeneratedRun run = generate(config, state, request.stage, request.shots, range);

    MomentAccumulator total(config.order);
    Json batch_json = Json::array();
    for (const auto &acc : run.accumulators) {
        total.merge(acc);
        batch_json.push_back(raw_moments_to_json(acc.moments()));
    }
    const RawMomentMatrix merged = total.moments();

    const Json lineage{{"seed", config.seed}, {"stage", static_cast<std::uint64_t>(request.stage)},
                       {"role", request.role}};
    save_histogram(run.histogram, dir / "histogram.bin", lineage);
    export_histogram_csv(run.histogram, dir / "histogram.csv");
    write_json_file(raw_moments_to_json(merged), dir / "moments.json");
    write_json_file(batch_json, dir / "batch_moments.json");
    if (config.save_shots) write_shots(dir, run, config, request.stage);

    const auto hist_sigma = vacuum_sigma(run.histogram);
    Json info{
        {"format", "hettomo-run"},
        {"version", 1},
        {"role", request.role},
        {"state", state_spec_to_json(request.state)},
        {"amplifier", {{"gain", config.amplifier.gain}, {"mean_photons", config.amplifier.mean_photons}}},
        {"shots", request.shots},
        {"batches", config.batches},
        {"order", config.order},
        {"seed", config.seed},
        {"stage", static_cast<std::uint64_t>(request.stage)},
        {"time_domain", config.time_domain.enabled},
        {"units", "detector"},
        {"histogram",
         {{"bins", run.histogram.bins()},
          {"range", run.histogram.range()},
          {"overflow", run.histogram.overflow()},
          {"overflow_fraction",
           static_cast<double>(run.histogram.overflow()) / static_cast<double>(run.histogram.total())},
          {"overflow_warning", run.histogram.overflow_warning()}}},
        {"sample_mean", complex_to_json(merged(0, 1))},
        {"quadrature_sigma", quadrature_sigma(merged)},
        {"histogram_sigma",
         {{"sigma", hist_sigma.sigma},
          {"fitted_sigma", hist_sigma.fitted_sigma ? Json(*hist_sigma.fitted_sigma) : Json(nullptr)},
          {"non_gaussian", hist_sigma.non_gaussian}}},
    };
    write_json_file(info, dir / "run.json");
    return info;
}

Json cmd_simulate(const ExperimentConfig &config) {
    const Stopwatch clock;
    StagingDirectory staging(config.output);
    const double range = config.histogram.range ? *config.histogram.range
                                                : in_stage("pilot", [&] { return pilot_range(config); });
    Json derived{{"histogram_range", range}};
    const auto signal = in_stage("signal", [&] {
        return simulate_run(config, {"signal", config.state, Stage::signal, config.shots}, range,
                            staging.path() / "signal");
    });
    const auto vacuum = in_stage("vacuum", [&] {
        return simulate_run(config, {"vacuum", StateSpec{}, Stage::reference, config.shots}, range,
                            staging.path() / "vacuum");
    });
    if (config.calibration) {
        const auto cal = in_stage("calibration", [&] {
            return simulate_run(config, {"calibration", config.calibration->state, Stage::calibration,
                                         config.calibration->shots},
                                range, staging.path() / "calibration");
        });
        derived["calibration_sample_mean"] = cal.at("sample_mean");
    }
    derived["sigma_vac"] = vacuum.at("quadrature_sigma").at("sigma");
    derived["sigma_vac_fit"] = vacuum.at("histogram_sigma").at("fitted_sigma");
    derived["signal_sample_mean"] = signal.at("sample_mean");
    derived["signal_overflow_fraction"] = signal.at("histogram").at("overflow_fraction");
    const Json manifest = write_manifest(
        staging.path(), {"simulate", config_to_json(config), derived, clock.seconds(), clock.started_utc()});
    staging.commit();
    return manifest;
}

Json cmd_calibrate(const CalibrateOptions &options) {
    const Stopwatch clock;
    const auto super = in_stage("load", [&] { return load_run(options.signal); });
    const auto vacuum = in_stage("load", [&] { return load_run(options.vacuum); });
    const std::uint64_t seed = options.seed ? *options.seed : super.info.at("seed").get<std::uint64_t>();
    StagingDirectory staging(options.out);
    const auto estimate = in_stage("calibrate", [&] { return calibrate_runs(super, vacuum, options.bootstrap, seed); });
    const double configured = super.info.at("amplifier").at("gain").get<double>();
    const Json cal = calibration_json(estimate, configured, options.bootstrap);
    write_json_file(cal, staging.path() / "calibration.json");
    const Json args{{"signal", options.signal.string()},
                    {"vacuum", options.vacuum.string()},
                    {"bootstrap", options.bootstrap},
                    {"seed", seed}};
    const Json manifest = write_manifest(staging.path(), {"calibrate", args, cal, clock.seconds(), clock.started_utc()});
    staging.commit();
    return manifest;
}

Json cmd_analyze(const AnalyzeOptions &options) {
    const Stopwatch clock;
    const auto signal = in_stage("load", [&] { return load_run(options.signal); });
    const auto vacuum = in_stage("load", [&] { return load_run(options.vacuum); });
    double gain = signal.info.at("amplifier").at("gain").get<double>();
    std::string source = "configured";
    if (options.gain) {
        if (!(*options.gain > 0)) throw ConfigError("gain: must be positive");
        gain = *options.gain;
        source = "override";
    } else if (options.calibration) {
        const Json cal = in_stage("load", [&] { return read_json_file(*options.calibration); });
        if (cal.value("format", "") != "hettomo-calibration") {
            throw DataError("'" + options.calibration->string() + "' is not a calibration file");
        }
        gain = cal.at("gain").get<double>();
        source = "calibration";
    }
    const std::uint64_t seed = options.seed ? *options.seed : signal.info.at("seed").get<std::uint64_t>();
    StagingDirectory staging(options.out);
    const auto analysis = in_stage("analyze", [&] {
        return analyze_runs(signal, vacuum, gain, source, options.order, options.bootstrap, seed,
                            options.from_histogram, staging.path());
    });
    Json derived = analysis.derived;
    derived["gain_configured"] = signal.info.at("amplifier").at("gain");
    const Json args{{"signal", options.signal.string()},
                    {"vacuum", options.vacuum.string()},
                    {"order", options.order},
                    {"bootstrap", options.bootstrap},
                    {"seed", seed},
                    {"gain_source", source},
                    {"from_histogram", options.from_histogram}};
    const Json manifest = write_manifest(staging.path(), {"analyze", args, derived, clock.seconds(), clock.started_utc()});
    staging.commit();
    return manifest;
}

Json cmd_wigner(const WignerOptions &options) {
    const Stopwatch clock;
    if (!(options.extent > 0)) throw ConfigError("extent: must be positive");
    if (options.resolution < 2) throw ConfigError("resolution: must be at least 2");
    const auto report = in_stage("load", [&] { return report_from_json(read_json_file(options.report)); });
    StagingDirectory staging(options.out);
    const Json derived =
        in_stage("wigner", [&] { return wigner_into(report, options.extent, options.resolution, staging.path()); });
    const Json args{{"report", options.report.string()}, {"extent", options.extent}, {"resolution", options.resolution}};
    const Json manifest = write_manifest(staging.path(), {"wigner", args, derived, clock.seconds(), clock.started_utc()});
    staging.commit();
    return manifest;
}

Json cmd_full_run(const ExperimentConfig &config) {
    const Stopwatch clock;
    StagingDirectory staging(config.output);
    const auto &root = staging.path();
    const double range = config.histogram.range ? *config.histogram.range
                                                : in_stage("pilot", [&] { return pilot_range(config); });
    if (config.calibration) {
        in_stage("calibration", [&] {
            return simulate_run(config, {"calibration", config.calibration->state, Stage::calibration,
                                         config.calibration->shots},
                                range, root / "calibration");
        });
    }
    in_stage("signal", [&] {
        return simulate_run(config, {"signal", config.state, Stage::signal, config.shots}, range, root / "signal");
    });
    const Json vacuum_info = in_stage("vacuum", [&] {
        return simulate_run(config, {"vacuum", StateSpec{}, Stage::reference, config.shots}, range, root / "vacuum");
    });

    const auto signal = in_stage("load", [&] { return load_run(root / "signal"); });
    const auto vacuum = in_stage("load", [&] { return load_run(root / "vacuum"); });

    double gain = config.amplifier.gain;
    std::string source = "configured";
    Json summary{{"shots", config.shots},
                 {"gain_configured", config.amplifier.gain},
                 {"noise_mean_photons", config.amplifier.mean_photons},
                 {"sigma_vac", vacuum_info.at("quadrature_sigma").at("sigma")},
                 {"sigma_vac_fit", vacuum_info.at("histogram_sigma").at("fitted_sigma")},
                 {"histogram_range", range}};
    if (config.calibration) {
        const auto super = in_stage("load", [&] { return load_run(root / "calibration"); });
        const auto estimate =
            in_stage("calibrate", [&] { return calibrate_runs(super, vacuum, config.bootstrap, config.seed); });
        write_json_file(calibration_json(estimate, config.amplifier.gain, config.bootstrap), root / "calibration.json");
        gain = estimate.gain;
        source = "calibration";
        summary["gain_estimate"] = estimate.gain;
        summary["gain_uncertainty"] = estimate.uncertainty;
        summary["gain_relative_error"] = estimate.gain / config.amplifier.gain - 1.0;
    }
    const auto analysis = in_stage("analyze", [&] {
        return analyze_runs(signal, vacuum, gain, source, config.order, config.bootstrap, config.seed, false, root);
    });
    const Json wigner =
        in_stage("wigner", [&] { return wigner_into(analysis.report, config.wigner.extent, config.wigner.resolution, root); });

    summary["gain_used"] = gain;
    summary["gain_source"] = source;
    for (const auto &key : {"order", "m11", "m11_error", "abs_m01", "abs_m01_error", "m22", "m22_error",
                            "vacuum_variance_mode_units", "moments_abs"}) {
        if (analysis.derived.contains(key)) summary[key] = analysis.derived.at(key);
    }
    for (const auto &[key, value] : wigner.items()) summary[key] = value;
    write_json_file(summary, root / "summary.json");
    const Json manifest =
        write_manifest(root, {"full-run", config_to_json(config), summary, clock.seconds(), clock.started_utc()});
    staging.commit();
    return manifest;
}

std::string moment_table_text(const InversionReport &report) {
    const auto &m = report.moments;
    const int k = m.order();
    std::ostringstream out;
    out << "|<(a^dag)^n a^m>|  gain " << std::setprecision(6) << report.gain << ", " << report.signal_count
        << " signal and " << report.reference_count << " reference shots\n";
    out << std::setw(6) << "";
    for (int col = 0; col <= k; ++col) out << std::setw(20) << ("m=" + std::to_string(col));
    out << '\n';
    for (int row = 0; row <= k; ++row) {
        out << std::setw(6) << ("n=" + std::to_string(row));
        for (int col = 0; row + col <= k; ++col) {
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(4) << std::abs(m(row, col)) << " +- " << report.errors(row, col);
            out << std::setw(20) << cell.str();
        }
        out << '\n';
    }
    return out.str();
}

std::string wigner_summary_line(const Json &derived) {
    const Complex lo = complex_from_json(derived.at("wigner_min_alpha"));
    const Complex hi = complex_from_json(derived.at("wigner_max_alpha"));
    std::ostringstream out;
    out << std::fixed << std::setprecision(6) << "min W = " << derived.at("wigner_min").get<double>() << " at ("
        << std::setprecision(3) << lo.real() << ", " << lo.imag() << "); max W = " << std::setprecision(6)
        << derived.at("wigner_max").get<double>() << " at (" << std::setprecision(3) << hi.real() << ", "
        << hi.imag() << "); truncation order " << derived.at("truncation_order").get<int>();
    return out.str();
}

}  // namespace hettomo::pipeline
