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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hettomo/acquisition.hpp"
#include "hettomo/pipeline/config.hpp"
#include "hettomo/rng.hpp"
#include "hettomo/tomography.hpp"

namespace hettomo::pipeline {

/// Artifacts of one simulated acquisition run, as read back from disk.
struct RunData {
    std::filesystem::path dir;
    Json info;  // run.json
    RawMomentMatrix moments;
    std::vector<RawMomentMatrix> batches;
    QuadratureHistogram histogram{2, 1.0};
};

/// Reads run.json, moments.json, batch_moments.json and histogram.bin.
RunData load_run(const std::filesystem::path &dir);

/// Histogram half-width from a vacuum pilot batch: 6 x the pooled sigma.
double pilot_range(const ExperimentConfig &config);

struct RunRequest {
    std::string role;  // "signal", "vacuum" or "calibration"
    StateSpec state;
    Stage stage = Stage::signal;
    std::uint64_t shots = 0;
};

/// Generates, histograms and accumulates one run into `dir`; returns run.json.
Json simulate_run(const ExperimentConfig &config, const RunRequest &request, double range,
                  const std::filesystem::path &dir);

struct AnalyzeOptions {
    std::filesystem::path signal;
    std::filesystem::path vacuum;
    std::filesystem::path out;
    int order = 4;
    std::optional<double> gain;
    std::optional<std::filesystem::path> calibration;
    int bootstrap = 200;
    std::optional<std::uint64_t> seed;  // defaults to the signal run's seed
    bool from_histogram = false;
};

struct CalibrateOptions {
    std::filesystem::path signal;
    std::filesystem::path vacuum;
    std::filesystem::path out;
    int bootstrap = 200;
    std::optional<std::uint64_t> seed;
};

struct WignerOptions {
    std::filesystem::path report;
    std::filesystem::path out;
    double extent = 3.0;
    int resolution = 121;
};

/// Each command writes into a staging directory, adds manifest.json and
/// moves the result to its output path; the manifest is returned.
Json cmd_simulate(const ExperimentConfig &config);
Json cmd_analyze(const AnalyzeOptions &options);
Json cmd_calibrate(const CalibrateOptions &options);
Json cmd_wigner(const WignerOptions &options);
Json cmd_full_run(const ExperimentConfig &config);

/// |m(n,m)| +- error laid out with n as rows and m as columns.
std::string moment_table_text(const InversionReport &report);

/// One-line description of a Wigner grid's extrema.
std::string wigner_summary_line(const Json &derived);

}  // namespace hettomo::pipeline
