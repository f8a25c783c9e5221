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

#include <benchmark/benchmark.h>

#include <cmath>

#include "hettomo/fock.hpp"
#include "hettomo/tomography.hpp"

using namespace hettomo;

namespace {

struct Inputs {
    MomentMatrix truth;
    MomentMatrix noise;
    RawMomentMatrix raw;
    RawMomentMatrix vacuum;
};

Inputs inputs(int order) {
    Inputs in;
    in.truth = analytic_moments(prepare_superposition(0.99883, 0.0879), order);
    in.noise = noise_moments(NoiseModel(64.0), order);
    in.raw = forward_moments(in.truth, in.noise, 1e4, order);
    in.vacuum = forward_moments(MomentMatrix::vacuum(order, Ordering::normal), in.noise, 1e4, order);
    in.raw.set_count(100'000);
    in.vacuum.set_count(100'000);
    return in;
}

void BM_ForwardMoments(benchmark::State &st) {
    const auto in = inputs(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(forward_moments(in.truth, in.noise, 1e4, in.truth.order()));
}
BENCHMARK(BM_ForwardMoments)->Arg(4)->Arg(8);

void BM_InvertMoments(benchmark::State &st) {
    const auto in = inputs(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(invert_moments(in.raw, in.vacuum, 1e4, in.truth.order()));
}
BENCHMARK(BM_InvertMoments)->Arg(4)->Arg(8);

void BM_BootstrapInversion(benchmark::State &st) {
    const auto in = inputs(4);
    const std::vector<RawMomentMatrix> sig(100, in.raw), vac(100, in.vacuum);
    for (auto _ : st) benchmark::DoNotOptimize(invert_moments(sig, vac, 1e4, 4, 200, 7));
}
BENCHMARK(BM_BootstrapInversion)->Unit(benchmark::kMillisecond);

void BM_ReconstructWigner(benchmark::State &st) {
    const auto moments = analytic_moments(FockState::fock(1), 4);
    const int resolution = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(reconstruct_wigner(moments, 3.0, resolution));
    st.SetItemsProcessed(st.iterations() * resolution * resolution);
}
BENCHMARK(BM_ReconstructWigner)->Arg(61)->Arg(121)->Arg(241)->Unit(benchmark::kMillisecond);

}  // namespace
