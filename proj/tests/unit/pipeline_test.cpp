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

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "hettomo/fock.hpp"
#include "hettomo/pipeline/artifacts.hpp"
#include "hettomo/pipeline/commands.hpp"
#include "hettomo/pipeline/config.hpp"
#include "hettomo/serialization.hpp"
#include "support/temp_dir.hpp"

using namespace hettomo;
using namespace hettomo::pipeline;
using hettomo::testing::slurp;
using hettomo::testing::TempDir;

namespace {

Json base_config(const std::filesystem::path &out) {
    return {
        {"seed", 5},
        {"shots", 20000},
        {"batches", 20},
        {"bootstrap", 50},
        {"state", {{"kind", "vacuum"}}},
        {"amplifier", {{"gain", 1.0}, {"mean_photons", 0.0}}},
        {"histogram", {{"bins", 128}}},
        {"output", out.string()},
    };
}

std::string config_error(const Json &doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

int run_cli(const std::string &args) {
    const std::string command = std::string(HETTOMO_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Json derived_of(const Json &manifest) { return manifest.at("derived"); }

WignerGrid load_grid(const std::filesystem::path &csv) {
    const Json header = read_json_file(std::filesystem::path(csv.string() + ".json"));
    WignerGrid grid;
    grid.extent = header.at("extent").get<double>();
    grid.resolution = header.at("resolution").get<int>();
    grid.truncation = header.at("truncation_order").get<int>();
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) grid.values.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    return grid;
}

void write_exact_report(const FockState &state, const std::filesystem::path &path) {
    InversionReport report;
    report.moments = analytic_moments(state, 4);
    report.errors = MomentErrors(4, 0);
    report.noise = MomentMatrix::vacuum(4, Ordering::antinormal);
    write_json_file(report_to_json(report), path);
}

}  // namespace

TEST(Config, field_errors_name_their_path) {
    const auto out = std::filesystem::temp_directory_path() / "unused";
    auto doc = base_config(out);
    doc["state"]["colour"] = "red";
    EXPECT_EQ(config_error(doc), "state.colour: unknown field");

    doc = base_config(out);
    doc["amplifier"]["mean_photons"] = -1.0;
    EXPECT_EQ(config_error(doc), "amplifier.mean_photons: must be non-negative");

    doc = base_config(out);
    doc.erase("seed");
    EXPECT_EQ(config_error(doc), "seed: required field is missing");

    doc = base_config(out);
    doc["shots"] = 0;
    EXPECT_EQ(config_error(doc).rfind("shots:", 0), 0u);

    doc = base_config(out);
    doc["state"] = {{"kind", "superposition"}, {"beta", 1.5}};
    EXPECT_EQ(config_error(doc), "state.beta: must lie in [0, 1]");

    doc = base_config(out);
    doc["histogram"]["range"] = "wide";
    EXPECT_EQ(config_error(doc).rfind("histogram.range:", 0), 0u);

    doc = base_config(out);
    doc["calibration"] = {{"state", {{"kind", "vacuum"}}}};
    EXPECT_EQ(config_error(doc).rfind("calibration.state.kind:", 0), 0u);
}

TEST(Config, canonical_form_round_trips) {
    auto doc = base_config("/tmp/x");
    doc["amplifier"] = {{"gain", 1e4}, {"temperature", 0.1}, {"frequency", 6.77e9}};
    doc["state"] = {{"kind", "coherent"}, {"alpha", {0.3, -0.2}}};
    doc["calibration"] = {{"state", {{"kind", "superposition"}, {"beta", 0.7}}}};
    const auto c = parse_config(doc);
    EXPECT_EQ(config_to_json(parse_config(config_to_json(c))), config_to_json(c));
    EXPECT_GT(build_chain(c.amplifier).noise().mean_photons(), 0.0);
}

TEST(Config, flag_overrides_reach_nested_keys) {
    auto doc = base_config("/tmp/x");
    override_key(doc, "histogram.range", 12.5);
    override_key(doc, "time_domain.enabled", true);
    override_key(doc, "seed", 99);
    const auto c = parse_config(doc);
    EXPECT_DOUBLE_EQ(*c.histogram.range, 12.5);
    EXPECT_TRUE(c.time_domain.enabled);
    EXPECT_EQ(c.seed, 99u);
    EXPECT_THROW(override_key(doc, "seed.inner", 1), ConfigError);
}

TEST(Simulate, same_seed_gives_identical_artifacts) {
    TempDir tmp("hettomo_pipeline_determinism");
    auto doc = base_config(tmp / "run");
    doc["state"] = {{"kind", "superposition"}, {"beta", 0.6}, {"phase", 0.3}};
    doc["amplifier"] = {{"gain", 100.0}, {"mean_photons", 4.0}};
    auto first = cmd_simulate(parse_config(doc));
    const auto histogram = slurp(tmp / "run/signal/histogram.bin");
    std::filesystem::remove_all(tmp / "run");

    doc["threads"] = 3;  // scheduling must not leak into the data
    auto second = cmd_simulate(parse_config(doc));
    EXPECT_EQ(slurp(tmp / "run/signal/histogram.bin"), histogram);
    for (auto *m : {&first, &second}) {
        m->erase("timing");
        m->erase("config");
        m->erase("config_sha256");
    }
    EXPECT_EQ(first, second);
}

TEST(Simulate, manifests_match_modulo_timing) {
    TempDir tmp("hettomo_pipeline_manifest");
    const auto config = parse_config(base_config(tmp / "run"));
    auto first = cmd_simulate(config);
    std::filesystem::remove_all(tmp / "run");
    auto second = cmd_simulate(config);
    first.erase("timing");
    second.erase("timing");
    EXPECT_EQ(first, second);
    EXPECT_TRUE(verify_manifest(tmp / "run").empty());
}

TEST(Simulate, vacuum_sigma_at_64_noise_photons) {
    TempDir tmp("hettomo_pipeline_sigma");
    auto doc = base_config(tmp / "run");
    doc["shots"] = 1'000'000;
    doc["batches"] = 100;
    doc["amplifier"]["mean_photons"] = 64.0;
    doc["histogram"]["bins"] = 512;
    const auto derived = derived_of(cmd_simulate(parse_config(doc)));
    EXPECT_NEAR(derived.at("sigma_vac").get<double>(), 5.70, 0.02);
    EXPECT_NEAR(derived.at("sigma_vac_fit").get<double>(), 5.70, 0.02);
    EXPECT_LT(derived.at("signal_overflow_fraction").get<double>(), 1e-3);
}

TEST(Simulate, noiseless_coherent_sample_mean) {
    TempDir tmp("hettomo_pipeline_coherent_mean");
    auto doc = base_config(tmp / "run");
    doc["shots"] = 2'000'000;
    doc["batches"] = 50;
    doc["state"] = {{"kind", "coherent"}, {"alpha", 1.0}};
    const auto mean = complex_from_json(derived_of(cmd_simulate(parse_config(doc))).at("signal_sample_mean"));
    EXPECT_NEAR(mean.real(), 1.0, 0.002);
    EXPECT_NEAR(mean.imag(), 0.0, 0.002);
}

TEST(Simulate, time_domain_matches_direct_statistics) {
    TempDir tmp("hettomo_pipeline_time_domain");
    auto doc = base_config(tmp / "run");
    doc["shots"] = 40000;
    doc["amplifier"] = {{"gain", 1.0}, {"mean_photons", 64.0}};
    doc["time_domain"] = {{"enabled", true}};
    const auto derived = derived_of(cmd_simulate(parse_config(doc)));
    // sigma of a variance estimate from 2 x 40000 Gaussian draws: ~0.25%
    EXPECT_NEAR(derived.at("sigma_vac").get<double>(), std::sqrt(32.5), 0.01 * std::sqrt(32.5));
}

TEST(Simulate, saved_shots_reproduce_the_moments) {
    TempDir tmp("hettomo_pipeline_shots");
    auto doc = base_config(tmp / "run");
    doc["save_shots"] = true;
    doc["state"] = {{"kind", "coherent"}, {"alpha", {0.2, 0.4}}};
    cmd_simulate(parse_config(doc));
    const auto shots = load_shot_batch(tmp / "run/signal/shots");
    ASSERT_EQ(shots.count(), 20000u);
    const auto stored = raw_moments_from_json(read_json_file(tmp / "run/signal/moments.json"));
    MomentAccumulator acc(4);
    acc.add(shots.samples);
    EXPECT_LT(acc.moments().max_abs_difference(stored), 1e-12);
}

TEST(Analyze, coherent_moments_decay_geometrically) {
    TempDir tmp("hettomo_pipeline_coherent_table");
    auto doc = base_config(tmp / "run");
    doc["shots"] = 1'000'000;
    doc["batches"] = 50;
    doc["bootstrap"] = 100;
    doc["state"] = {{"kind", "coherent"}, {"alpha", 0.5}};
    doc["amplifier"] = {{"gain", 100.0}, {"mean_photons", 1.0}};
    cmd_simulate(parse_config(doc));
    AnalyzeOptions opts{tmp / "run/signal", tmp / "run/vacuum", tmp / "analysis"};
    opts.bootstrap = 100;
    cmd_analyze(opts);
    const auto report = report_from_json(read_json_file(tmp / "analysis/report.json"));
    report.moments.for_each_index([&](int n, int m) {
        EXPECT_NEAR(std::abs(report.moments(n, m)), std::pow(0.5, n + m), 4 * report.errors(n, m) + 1e-12)
            << "(" << n << "," << m << ")";
    });
    EXPECT_FALSE(slurp(tmp / "analysis/moments_table.txt").empty());
}

TEST(Analyze, vacuum_against_vacuum_is_consistent_with_zero) {
    TempDir tmp("hettomo_pipeline_vacuum_table");
    auto doc = base_config(tmp / "run");
    doc["shots"] = 200000;
    doc["amplifier"] = {{"gain", 100.0}, {"mean_photons", 4.0}};
    cmd_simulate(parse_config(doc));
    AnalyzeOptions opts{tmp / "run/signal", tmp / "run/vacuum", tmp / "analysis"};
    opts.bootstrap = 100;
    cmd_analyze(opts);
    const auto report = report_from_json(read_json_file(tmp / "analysis/report.json"));
    report.moments.for_each_index([&](int n, int m) {
        if (n + m == 0) return;
        EXPECT_LT(std::abs(report.moments(n, m)), 3 * report.errors(n, m)) << "(" << n << "," << m << ")";
    });
}

TEST(Analyze, rejects_incompatible_runs) {
    TempDir tmp("hettomo_pipeline_incompatible");
    auto doc = base_config(tmp / "a");
    cmd_simulate(parse_config(doc));
    doc["output"] = (tmp / "b").string();
    doc["histogram"]["bins"] = 64;
    cmd_simulate(parse_config(doc));
    EXPECT_THROW(cmd_analyze({tmp / "a/signal", tmp / "b/vacuum", tmp / "out"}), DataError);
    EXPECT_THROW(cmd_analyze({tmp / "a/signal", tmp / "missing", tmp / "out"}), DataError);
    EXPECT_FALSE(std::filesystem::exists(tmp / "out"));
}

TEST(Calibrate, estimate_feeds_the_analysis) {
    TempDir tmp("hettomo_pipeline_calibrate");
    auto doc = base_config(tmp / "run");
    doc["shots"] = 400000;
    doc["batches"] = 40;
    doc["state"] = {{"kind", "superposition"}, {"beta", std::sqrt(0.5)}};
    doc["amplifier"] = {{"gain", 100.0}, {"mean_photons", 4.0}};
    cmd_simulate(parse_config(doc));
    CalibrateOptions cal{tmp / "run/signal", tmp / "run/vacuum", tmp / "cal"};
    cal.bootstrap = 100;
    const auto derived = derived_of(cmd_calibrate(cal));
    const double gain = derived.at("gain").get<double>();
    EXPECT_NEAR(gain, 100.0, 4 * derived.at("uncertainty").get<double>());

    AnalyzeOptions opts{tmp / "run/signal", tmp / "run/vacuum", tmp / "analysis"};
    opts.calibration = tmp / "cal/calibration.json";
    const auto analysis = derived_of(cmd_analyze(opts));
    EXPECT_EQ(analysis.at("gain_source"), "calibration");
    EXPECT_DOUBLE_EQ(analysis.at("gain").get<double>(), gain);
}

TEST(Calibrate, vacuum_reference_is_degenerate) {
    TempDir tmp("hettomo_pipeline_degenerate");
    auto doc = base_config(tmp / "run");
    doc["amplifier"] = {{"gain", 100.0}, {"mean_photons", 4.0}};
    cmd_simulate(parse_config(doc));
    try {
        cmd_calibrate({tmp / "run/vacuum", tmp / "run/vacuum", tmp / "cal"});
        FAIL() << "expected a degenerate-reference error";
    } catch (const NumericError &e) {
        EXPECT_NE(std::string(e.what()).find("[calibrate] degenerate phase reference"), std::string::npos);
    }
    EXPECT_FALSE(std::filesystem::exists(tmp / "cal"));
}

TEST(Wigner, single_photon_minimum) {
    TempDir tmp("hettomo_pipeline_wigner_one");
    write_exact_report(FockState::fock(1), tmp / "report.json");
    const auto d = derived_of(cmd_wigner({tmp / "report.json", tmp / "w"}));
    EXPECT_NEAR(d.at("wigner_min").get<double>(), -2.0 / std::numbers::pi, 1e-12);
    EXPECT_LT(std::abs(complex_from_json(d.at("wigner_min_alpha"))), 1e-12);
    EXPECT_TRUE(std::filesystem::exists(tmp / "w/wigner.csv"));
}

TEST(Wigner, vacuum_is_a_positive_gaussian) {
    TempDir tmp("hettomo_pipeline_wigner_vacuum");
    write_exact_report(FockState::vacuum(), tmp / "report.json");
    const auto d = derived_of(cmd_wigner({tmp / "report.json", tmp / "w"}));
    EXPECT_NEAR(d.at("wigner_max").get<double>(), 2.0 / std::numbers::pi, 1e-12);
    EXPECT_LT(std::abs(complex_from_json(d.at("wigner_max_alpha"))), 1e-12);
    EXPECT_GE(d.at("wigner_min").get<double>(), 0.0);
    EXPECT_EQ(d.at("truncation_order").get<int>(), 1);
}

TEST(Wigner, quarter_turn_of_the_phase_rotates_the_grid) {
    TempDir tmp("hettomo_pipeline_wigner_rotation");
    const double phi = 0.4;
    write_exact_report(prepare_superposition(std::polar(std::sqrt(0.5), phi)), tmp / "a.json");
    write_exact_report(prepare_superposition(std::polar(std::sqrt(0.5), phi + std::numbers::pi / 2)), tmp / "b.json");
    cmd_wigner({tmp / "a.json", tmp / "wa"});
    cmd_wigner({tmp / "b.json", tmp / "wb"});
    const auto a = load_grid(tmp / "wa/wigner.csv");
    const auto b = load_grid(tmp / "wb/wigner.csv");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(0, 2.0), t(0, 2 * std::numbers::pi);
    const Complex quarter(0, 1);
    for (int i = 0; i < 200; ++i) {
        const Complex alpha = std::polar(r(rng), t(rng));
        EXPECT_NEAR(b.interpolate(alpha * quarter), a.interpolate(alpha), 5e-3);
    }
}

TEST(FullRun, quick_config_finishes_within_budget) {
    TempDir tmp("hettomo_pipeline_quick");
    auto doc = load_config_document(std::filesystem::path(HETTOMO_SOURCE_DIR) / "tools/configs/quick.json");
    doc["output"] = (tmp / "run").string();
    const auto start = std::chrono::steady_clock::now();
    const auto manifest = cmd_full_run(parse_config(doc));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(seconds, 5.0);
    const Json summary = read_json_file(tmp / "run/summary.json");
    for (const char *key : {"sigma_vac", "gain_estimate", "gain_uncertainty", "m11", "abs_m01", "m22", "wigner_min",
                            "wigner_min_alpha", "truncation_order"}) {
        EXPECT_TRUE(summary.contains(key)) << key;
    }
    EXPECT_LT(summary.at("wigner_min").get<double>(), 0.0);
    EXPECT_TRUE(verify_manifest(tmp / "run").empty());
}

TEST(FullRun, calibrated_vacuum_variance_in_mode_units) {
    TempDir tmp("hettomo_pipeline_units");
    auto doc = base_config(tmp / "run");
    doc["shots"] = 400000;
    doc["batches"] = 40;
    doc["bootstrap"] = 100;
    doc["amplifier"] = {{"gain", 100.0}, {"mean_photons", 4.0}};
    doc["calibration"] = {{"state", {{"kind", "superposition"}, {"beta", std::sqrt(0.5)}}}};
    cmd_full_run(parse_config(doc));
    const Json s = read_json_file(tmp / "run/summary.json");
    const double v = s.at("vacuum_variance_mode_units").get<double>();
    const double expected = (1 + 4.0) / 2;
    const double gain_part = expected * s.at("gain_uncertainty").get<double>() / s.at("gain_estimate").get<double>();
    const double sampling = expected / std::sqrt(400000.0);
    EXPECT_NEAR(v, expected, 3 * std::hypot(gain_part, sampling));
}

TEST(Artifacts, tampering_is_detected) {
    TempDir tmp("hettomo_pipeline_tamper");
    cmd_simulate(parse_config(base_config(tmp / "run")));
    ASSERT_TRUE(verify_manifest(tmp / "run").empty());
    std::ofstream(tmp / "run/signal/histogram.csv", std::ios::app) << "0,0,1\n";
    const auto bad = verify_manifest(tmp / "run");
    ASSERT_EQ(bad.size(), 1u);
    EXPECT_EQ(bad[0], "signal/histogram.csv");
}

TEST(Artifacts, failed_commands_leave_nothing_behind) {
    TempDir tmp("hettomo_pipeline_atomic");
    auto doc = base_config(tmp / "run");
    doc["state"] = {{"kind", "superposition"}, {"beta", std::sqrt(0.5)}};
    doc["calibration"] = {{"state", {{"kind", "superposition"}, {"beta", 0.0}}}};
    // A |0>-only reference makes the calibration stage fail after the runs.
    EXPECT_THROW(cmd_full_run(parse_config(doc)), NumericError);
    EXPECT_EQ(std::distance(std::filesystem::directory_iterator(tmp.path()), {}), 0);
}

TEST(Cli, exit_codes) {
    TempDir tmp("hettomo_pipeline_cli");
    {
        std::ofstream(tmp / "bad.json") << R"({"seed": 1, "shots": 1000, "state": {"kind": "fock"},)";
    }
    EXPECT_EQ(run_cli("simulate --config " + (tmp / "bad.json").string()), 2);
    EXPECT_EQ(run_cli("simulate"), 2);

    auto doc = base_config(tmp / "run");
    doc["amplifier"] = {{"gain", 100.0}, {"mean_photons", 4.0}};
    std::ofstream(tmp / "good.json") << doc.dump();
    EXPECT_EQ(run_cli("simulate --config " + (tmp / "good.json").string() + " --shots 5000"), 0);
    EXPECT_EQ(run_cli("verify " + (tmp / "run").string()), 0);
    EXPECT_EQ(run_cli("analyze --signal " + (tmp / "run/signal").string() + " --vacuum " + (tmp / "nope").string() +
                      " --out " + (tmp / "a").string()),
              3);
    EXPECT_EQ(run_cli("calibrate --signal " + (tmp / "run/vacuum").string() + " --vacuum " +
                      (tmp / "run/vacuum").string() + " --out " + (tmp / "c").string()),
              4);
    EXPECT_FALSE(std::filesystem::exists(tmp / "bad_run"));
}
