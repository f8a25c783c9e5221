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
#include <random>

namespace hettomo {

using Engine = std::mt19937_64;

/// Stages of a run that draw randomness. Each (seed, stage, index) triple
/// owns an independent engine.
enum class Stage : std::uint64_t {
    signal = 1,
    reference = 2,
    calibration = 3,
    bootstrap = 4,
    pilot = 5,
    trace_noise = 6,  // white noise of time-binned records
    test = 99,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of stream `index` of `stage` under the master `seed`.
std::uint64_t derive_seed(std::uint64_t seed, Stage stage, std::uint64_t index);

Engine make_engine(std::uint64_t seed, Stage stage, std::uint64_t index);

}  // namespace hettomo
