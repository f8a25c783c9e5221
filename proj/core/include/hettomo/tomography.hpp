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
#include <optional>
#include <span>
#include <vector>

#include "hettomo/acquisition.hpp"
#include "hettomo/moments.hpp"

namespace hettomo {

/// Detector moments from signal and noise moments:
/// s(n,m) = G^((n+m)/2) sum_{i<=n, j<=m} C(n,i) C(m,j) <(a^dag)^i a^j> <h^(n-i) (h^dag)^(m-j)>.
RawMomentMatrix forward_moments(const MomentMatrix &signal, const MomentMatrix &noise, double gain, int order);

/// noise(n,m) = s_vac(n,m) / G^((n+m)/2).
MomentMatrix recover_noise_moments(const RawMomentMatrix &raw_vacuum, double gain, int order);

struct InversionReport {
    MomentMatrix moments;  // normal ordered, mode units
    MomentErrors errors;   // bootstrap spread; zero when no batches were given
    double gain = 1.0;
    MomentMatrix noise;    // antinormal
    std::uint64_t signal_count = 0;
    std::uint64_t reference_count = 0;
    int bootstrap_samples = 0;
};

/// Triangular solve of the forward relation in increasing total order.
InversionReport invert_moments(const RawMomentMatrix &raw_signal, const RawMomentMatrix &raw_vacuum, double gain,
                               int order);

/// As above, with errors from a bootstrap over batches: batches are resampled
/// with replacement, merged, inverted, and the error of each entry is half
/// the 16th-84th percentile spread, combined over real and imaginary parts.
InversionReport invert_moments(std::span<const RawMomentMatrix> signal_batches,
                               std::span<const RawMomentMatrix> vacuum_batches, double gain, int order,
                               int bootstrap_samples, std::uint64_t seed);

struct GainEstimate {
    double gain = 0;
    double uncertainty = 0;  // bootstrap, 0 when no batches were given
    double first_moment = 0;  // M1 = |s(0,1)|
    double excess_power = 0;  // M2 = s(1,1) - s_vac(1,1)
};

/// G = (M2 / M1)^2 from a |0>/|1> superposition run, which has |<a>| = <a^dag a>.
/// Throws NumericError when M1 is below 5 standard errors.
GainEstimate estimate_gain(const RawMomentMatrix &raw_super, const RawMomentMatrix &raw_vacuum);

GainEstimate estimate_gain(std::span<const RawMomentMatrix> super_batches,
                           std::span<const RawMomentMatrix> vacuum_batches, int bootstrap_samples,
                           std::uint64_t seed);

/// Highest total order kept in the Wigner sum. If N is the smallest index
/// with |m(N,N)| < threshold, returns min(order, 2N - 1); otherwise order.
/// Entries of total order >= 2N - 1 vanish for such states, so the
/// order-(2N-1) terms are kept only as measured (near-zero) values.
int truncation_order(const MomentMatrix &moments, double threshold);

/// max(0.1, 3 x the error of each diagonal entry) evaluated per entry.
int truncation_order(const MomentMatrix &moments, const MomentErrors &errors);

inline constexpr int kMaxKernelOrder = 8;

/// Closed-form value of (1/pi^2) int d^2lambda lambda^n (-lambda^*)^m
/// exp(-|lambda|^2/2 + alpha lambda^* - alpha^* lambda), generated by
/// differentiating (2/pi) exp(-2 beta gamma). Requires n + m <= 8.
Complex wigner_kernel(int n, int m, Complex alpha);

/// W(alpha) = sum_{n+m <= order} m(n,m) / (n! m!) kernel(n, m, alpha).
double wigner_value(const MomentMatrix &moments, int order, Complex alpha);

struct WignerGrid {
    double extent = 0;    // grid spans [-extent, extent]^2
    int resolution = 0;   // points per axis
    int truncation = 0;   // highest total order used
    std::vector<double> values;  // row-major, P index as row

    double coordinate(int i) const;
    double at(int ix, int ip) const { return values[static_cast<std::size_t>(ip) * resolution + ix]; }

    /// Bilinear interpolation; alpha must lie inside the grid.
    double interpolate(Complex alpha) const;

    struct Extremum {
        double value;
        Complex alpha;
    };
    Extremum minimum() const;
    Extremum maximum() const;

    /// Trapezoidal integral over the grid.
    double integral() const;
};

WignerGrid reconstruct_wigner(const MomentMatrix &moments, double extent, int resolution, double threshold = 0.1);

WignerGrid reconstruct_wigner(const MomentMatrix &moments, const MomentErrors &errors, double extent,
                              int resolution);

}  // namespace hettomo
