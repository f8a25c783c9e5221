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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hettomo/pipeline/artifacts.hpp"
#include "hettomo/pipeline/commands.hpp"
#include "hettomo/pipeline/config.hpp"

namespace hp = hettomo::pipeline;
using hettomo::Json;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kData = 3, kNumeric = 4 };

// Flags that override keys of the config document.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> shots;
    std::optional<std::string> out;
    std::optional<int> order;
    std::optional<int> bins;
    std::optional<std::string> range;
    std::optional<int> threads;
    bool time_domain = false;
    bool save_shots = false;
};

void add_override_flags(CLI::App &cmd, std::string &config_path, Overrides &o) {
    cmd.add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd.add_option("--seed", o.seed, "overrides seed");
    cmd.add_option("--shots", o.shots, "overrides shots");
    cmd.add_option("--out", o.out, "overrides output");
    cmd.add_option("--order", o.order, "overrides order (highest total moment order K)");
    cmd.add_option("--bins", o.bins, "overrides histogram.bins");
    cmd.add_option("--range", o.range, "overrides histogram.range (number or 'auto')");
    cmd.add_option("--threads", o.threads, "overrides threads");
    cmd.add_flag("--time-domain", o.time_domain, "simulate time-binned records and apply the matched filter");
    cmd.add_flag("--save-shots", o.save_shots, "also store every complex sample");
}

hp::ExperimentConfig resolve_config(const std::string &path, const Overrides &o) {
    Json doc = hp::load_config_document(path);
    if (o.seed) hp::override_key(doc, "seed", *o.seed);
    if (o.shots) hp::override_key(doc, "shots", *o.shots);
    if (o.out) hp::override_key(doc, "output", *o.out);
    if (o.order) hp::override_key(doc, "order", *o.order);
    if (o.bins) hp::override_key(doc, "histogram.bins", *o.bins);
    if (o.range) {
        if (*o.range == "auto") {
            hp::override_key(doc, "histogram.range", "auto");
        } else {
            try {
                hp::override_key(doc, "histogram.range", std::stod(*o.range));
            } catch (const std::logic_error &) {
                throw hp::ConfigError("histogram.range: '" + *o.range + "' is neither a number nor 'auto'");
            }
        }
    }
    if (o.threads) hp::override_key(doc, "threads", *o.threads);
    if (o.time_domain) hp::override_key(doc, "time_domain.enabled", true);
    if (o.save_shots) hp::override_key(doc, "save_shots", true);
    return hp::parse_config(doc);
}

void report(const Json &manifest) {
    const Json &derived = manifest.at("derived");
    if (derived.contains("wigner_min")) std::cout << hp::wigner_summary_line(derived) << '\n';
    Json shown = derived;
    shown.erase("moments_abs");  // already in moments_table.txt
    std::cout << shown.dump(2) << '\n';
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Heterodyne moment tomography of a single microwave mode"};
    app.require_subcommand(1);
    app.set_version_flag("--version", HETTOMO_VERSION);

    std::string config_path;
    Overrides overrides;

    auto *simulate = app.add_subcommand("simulate", "simulate signal and vacuum-reference runs");
    add_override_flags(*simulate, config_path, overrides);

    auto *full = app.add_subcommand("full-run", "simulate, calibrate, analyze and reconstruct in one go");
    add_override_flags(*full, config_path, overrides);

    hp::AnalyzeOptions analyze_opts;
    std::optional<std::string> calibration_path;
    auto *analyze = app.add_subcommand("analyze", "recover normally ordered moments from a signal and a vacuum run");
    analyze->add_option("--signal", analyze_opts.signal, "signal run directory")->required();
    analyze->add_option("--vacuum", analyze_opts.vacuum, "vacuum reference run directory")->required();
    analyze->add_option("--out", analyze_opts.out, "output directory")->required();
    analyze->add_option("--order", analyze_opts.order, "highest total order K")->check(CLI::Range(1, 8));
    analyze->add_option("--bootstrap", analyze_opts.bootstrap, "bootstrap resamples")->check(CLI::NonNegativeNumber);
    analyze->add_option("--seed", analyze_opts.seed, "bootstrap seed (default: the signal run's)");
    auto *gain_opt = analyze->add_option("--gain", analyze_opts.gain, "gain to use instead of the configured one");
    analyze->add_option("--calibration", calibration_path, "calibration.json from the calibrate command")
        ->excludes(gain_opt);
    analyze->add_flag("--from-histogram", analyze_opts.from_histogram, "use binned rather than streaming moments");

    hp::CalibrateOptions calibrate_opts;
    auto *calibrate = app.add_subcommand("calibrate", "estimate the gain from a |0>/|1> superposition run");
    calibrate->add_option("--signal", calibrate_opts.signal, "superposition run directory")->required();
    calibrate->add_option("--vacuum", calibrate_opts.vacuum, "vacuum reference run directory")->required();
    calibrate->add_option("--out", calibrate_opts.out, "output directory")->required();
    calibrate->add_option("--bootstrap", calibrate_opts.bootstrap, "bootstrap resamples")
        ->check(CLI::NonNegativeNumber);
    calibrate->add_option("--seed", calibrate_opts.seed, "bootstrap seed (default: the run's)");

    hp::WignerOptions wigner_opts;
    auto *wigner = app.add_subcommand("wigner", "evaluate the Wigner function from an inversion report");
    wigner->add_option("--report", wigner_opts.report, "report.json from analyze")->required();
    wigner->add_option("--out", wigner_opts.out, "output directory")->required();
    wigner->add_option("--extent", wigner_opts.extent, "grid half-width");
    wigner->add_option("--resolution", wigner_opts.resolution, "points per axis");

    std::string verify_dir;
    auto *verify = app.add_subcommand("verify", "check every artifact against its manifest checksum");
    verify->add_option("dir", verify_dir, "output directory holding manifest.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (simulate->parsed()) {
            report(hp::cmd_simulate(resolve_config(config_path, overrides)));
        } else if (full->parsed()) {
            report(hp::cmd_full_run(resolve_config(config_path, overrides)));
        } else if (analyze->parsed()) {
            if (calibration_path) analyze_opts.calibration = *calibration_path;
            const auto manifest = hp::cmd_analyze(analyze_opts);
            std::ifstream table(analyze_opts.out / "moments_table.txt");
            std::cout << table.rdbuf();
            report(manifest);
        } else if (calibrate->parsed()) {
            report(hp::cmd_calibrate(calibrate_opts));
        } else if (wigner->parsed()) {
            report(hp::cmd_wigner(wigner_opts));
        } else if (verify->parsed()) {
            const auto problems = hp::verify_manifest(verify_dir);
            for (const auto &p : problems) std::cerr << p << '\n';
            if (!problems.empty()) return kData;
            std::cout << "all artifacts verified\n";
        }
    } catch (const hp::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const hettomo::DataError &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const hettomo::NumericError &e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumeric;
    }
    return kOk;
}
