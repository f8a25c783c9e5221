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

#include "hettomo/errors.hpp"
#include "hettomo/fock.hpp"
#include "hettomo/measurement.hpp"
#include "hettomo/serialization.hpp"

namespace hettomo::pipeline {

/// Invalid or inconsistent run configuration; the message starts with the
/// path of the offending field, e.g. "state.beta: ...".
class ConfigError : public Error {
   public:
    using Error::Error;
};

struct StateSpec {
    enum class Kind { vacuum, fock, coherent, superposition, thermal };
    Kind kind = Kind::vacuum;
    int level = 1;             // fock
    Complex alpha{};           // coherent
    double beta = 1.0;         // superposition: |beta| of the |1> amplitude
    double phase = 0.0;        // superposition: relative phase of |1>
    double admixture = 0.0;    // superposition: incoherent vacuum weight
    double mean_photons = 0;   // thermal
    int cutoff = kDefaultCutoff;
};

struct AmplifierSpec {
    double gain = 1.0;
    double mean_photons = 0.0;
    // Set when the noise was given as a temperature.
    std::optional<double> temperature_kelvin;
    std::optional<double> frequency_hz;
    ThermalApproximation approximation = ThermalApproximation::bose_einstein;
};

struct HistogramSpec {
    int bins = 1024;
    std::optional<double> range;  // empty: 6 x the pilot vacuum sigma
};

struct TimeDomainSpec {
    bool enabled = false;
    double kappa = 1.0 / 40.0;  // 1/ns
    double dt = 1.0;            // ns
    int bins = 400;
};

struct CalibrationSpec {
    StateSpec state;
    std::uint64_t shots = 0;
};

struct WignerSpec {
    double extent = 3.0;
    int resolution = 121;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    int batches = 100;
    int order = 4;
    int bootstrap = 200;
    int threads = 1;
    bool save_shots = false;
    StateSpec state;
    AmplifierSpec amplifier;
    HistogramSpec histogram;
    TimeDomainSpec time_domain;
    std::optional<CalibrationSpec> calibration;
    WignerSpec wigner;
    std::filesystem::path output;
};

/// Parses and validates a configuration document. Unknown keys are errors.
ExperimentConfig parse_config(const Json &document);

/// Canonical form with every default filled in; parse_config(config_to_json(c)) == c.
Json config_to_json(const ExperimentConfig &config);

Json state_spec_to_json(const StateSpec &spec);
StateSpec parse_state_spec(const Json &j, const std::string &path);

FockState build_state(const StateSpec &spec);
AmplifierChain build_chain(const AmplifierSpec &spec);

/// Reads a JSON config file; parse errors become ConfigError.
Json load_config_document(const std::filesystem::path &path);

/// Sets `value` at a dotted key path, creating objects on the way.
void override_key(Json &document, const std::string &dotted, Json value);

}  // namespace hettomo::pipeline
