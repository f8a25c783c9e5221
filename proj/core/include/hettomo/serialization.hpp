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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "hettomo/acquisition.hpp"
#include "hettomo/fock.hpp"
#include "hettomo/measurement.hpp"
#include "hettomo/tomography.hpp"

// JSON layouts and binary file formats. Complex numbers are [re, im] pairs
// everywhere; binary payloads are little-endian.

namespace hettomo {

using Json = nlohmann::json;

Json complex_to_json(Complex z);
Complex complex_from_json(const Json &j);

/// {"cutoff": N, "representation": "pure", "amplitudes": [[re, im], ...]} or
/// {"cutoff": N, "representation": "mixed", "density": [[[re, im], ...], ...]}.
Json state_to_json(const FockState &state);
FockState state_from_json(const Json &j);

/// {"order": K, "ordering": ..., "entries": [{"n", "m", "value": [re, im]}, ...]}
/// with every n + m <= K listed.
Json moments_to_json(const MomentMatrix &moments);
MomentMatrix moments_from_json(const Json &j);

/// As above with "source" and "count" in place of "ordering".
Json raw_moments_to_json(const RawMomentMatrix &moments);
RawMomentMatrix raw_moments_from_json(const Json &j);

/// {"order": K, "batches": B, "entries": [{"n", "m", "error"}, ...]}
Json errors_to_json(const MomentErrors &errors);
MomentErrors errors_from_json(const Json &j);

Json report_to_json(const InversionReport &report);
InversionReport report_from_json(const Json &j);

/// Histogram file: one line of compact JSON header
/// {"format": "hettomo-histogram", "version": 1, "bins", "range", "units",
///  "total", "overflow", "lineage"} terminated by '\n', followed by
/// bins * bins little-endian uint64 counts, row-major with P as the row.
void save_histogram(const QuadratureHistogram &hist, const std::filesystem::path &path, const Json &lineage = Json::object(),
                    const std::string &units = "detector");
QuadratureHistogram load_histogram(const std::filesystem::path &path, Json *header = nullptr);

/// CSV "x,p,count" for every non-empty bin (bin centers).
void export_histogram_csv(const QuadratureHistogram &hist, const std::filesystem::path &path);

/// CSV "X,P,W" for every grid point plus `<path>.json` header
/// {"extent", "resolution", "truncation_order"}.
void save_wigner(const WignerGrid &grid, const std::filesystem::path &csv_path);

Json read_json_file(const std::filesystem::path &path);
void write_json_file(const Json &j, const std::filesystem::path &path);

}  // namespace hettomo
