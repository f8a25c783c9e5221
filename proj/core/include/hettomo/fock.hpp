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

#include <optional>

#include <Eigen/Dense>

#include "hettomo/moments.hpp"

// Single-mode states in a truncated Fock basis and the exact oracles
// evaluated on them.
//
// Phase-space convention used throughout the library: alpha = X + iP with
// the vacuum Husimi function Q(alpha) = exp(-|alpha|^2) / pi, so each
// quadrature of the vacuum has variance 1/2 under Q.

namespace hettomo {

inline constexpr int kDefaultCutoff = 8;

/// How a state was produced. Samplers use it to pick an exact closed-form
/// method instead of rejection sampling.
struct Preparation {
    enum class Kind { generic, coherent, thermal } kind = Kind::generic;
    Complex amplitude{};    // coherent
    double mean_photons = 0;  // thermal
};

/// Density operator on span{|0>, ..., |cutoff>}. Pure states keep their
/// amplitude vector as well.
class FockState {
   public:
    /// Pure state; amplitudes must be normalized to 1e-12.
    static FockState pure(Eigen::VectorXcd amplitudes, Preparation prep = {});
    /// Mixed state; rho must be Hermitian with unit trace to 1e-12 and
    /// eigenvalues >= -1e-10.
    static FockState mixed(Eigen::MatrixXcd rho, Preparation prep = {});

    static FockState fock(int k, int cutoff = kDefaultCutoff);
    static FockState vacuum(int cutoff = kDefaultCutoff) { return fock(0, cutoff); }

    int cutoff() const { return static_cast<int>(rho_.rows()) - 1; }
    int dimension() const { return static_cast<int>(rho_.rows()); }
    bool is_pure() const { return amplitudes_.has_value(); }
    const std::optional<Eigen::VectorXcd> &amplitudes() const { return amplitudes_; }
    const Eigen::MatrixXcd &density() const { return rho_; }
    const Preparation &preparation() const { return prep_; }

    /// Highest photon number with population above 1e-14.
    int support() const;

    /// True if all off-diagonal density elements vanish to 1e-14.
    bool is_diagonal() const;

    double mean_photon_number() const;

    /// Same state embedded in a larger cutoff.
    FockState padded(int cutoff) const;

   private:
    FockState(Eigen::MatrixXcd rho, std::optional<Eigen::VectorXcd> amplitudes, Preparation prep)
        : rho_(std::move(rho)), amplitudes_(std::move(amplitudes)), prep_(prep) {}

    Eigen::MatrixXcd rho_;
    std::optional<Eigen::VectorXcd> amplitudes_;
    Preparation prep_;
};

/// Conversion from noise temperature to thermal occupation.
enum class ThermalApproximation { bose_einstein, rayleigh_jeans };

/// Thermal state of the amplifier's added-noise mode h.
class NoiseModel {
   public:
    explicit NoiseModel(double mean_photons = 0.0);

    /// n = 1 / (exp(h nu / kB T) - 1), or kB T / (h nu) for Rayleigh-Jeans.
    static NoiseModel from_temperature(double kelvin, double hertz,
                                       ThermalApproximation approx = ThermalApproximation::bose_einstein);

    double mean_photons() const { return mean_photons_; }

   private:
    double mean_photons_;
};

/// Ideal qubit-to-resonator swap of alpha|g> + beta|e>, with alpha = sqrt(1 - |beta|^2)
/// real, convexly mixed with the vacuum with weight admixture_error.
FockState prepare_superposition(Complex beta, double admixture_error = 0.0, int cutoff = kDefaultCutoff);

/// Truncated and renormalized coherent state. Requires |alpha|^2 <= cutoff / 4.
FockState coherent_state(Complex alpha, int cutoff = kDefaultCutoff);

/// Thermal state with the given cutoff; the geometric tail beyond the cutoff
/// must be below 1e-6.
FockState thermal_state(double mean_photons, int cutoff);

/// Thermal state with the smallest cutoff >= kDefaultCutoff whose tail is below 1e-6.
FockState thermal_state(double mean_photons);

/// Smallest cutoff whose thermal tail weight (nbar/(nbar+1))^(cutoff+1) is below 1e-6.
int thermal_cutoff(double mean_photons);

/// Tr[rho (a^dag)^n a^m] for n + m <= order. Requires order <= 2 * cutoff.
MomentMatrix analytic_moments(const FockState &state, int order);

/// Tr[rho a^m (a^dag)^n], i.e. the moments sampled by the Husimi function,
/// stored at (n, m) like the detector moments.
MomentMatrix analytic_antinormal_moments(const FockState &state, int order);

/// <h^n (h^dag)^m> = delta_nm n! (nbar + 1)^n.
MomentMatrix noise_moments(const NoiseModel &noise, int order);

/// <alpha|rho|alpha> / pi.
double husimi_q(const FockState &state, Complex alpha);

/// (2/pi) sum_k (-1)^k <k| D(-alpha) rho D(alpha) |k>, with D computed as the
/// exponential of the truncated generator.
double wigner_oracle(const FockState &state, Complex alpha);

/// Pure-loss channel with transmissivity eta.
FockState loss_channel(const FockState &state, double eta);

/// Multiplies each amplitude c_k (or rho_jk) by exp(i k phi) (resp. exp(i (j-k) phi)).
FockState rotate(const FockState &state, double phi);

}  // namespace hettomo
