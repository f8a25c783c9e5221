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

#include "hettomo/fock.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace hettomo {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kEigenTolerance = 1e-10;
constexpr double kThermalTail = 1e-6;
constexpr double kPopulationFloor = 1e-14;

bool all_finite(const Eigen::MatrixXcd &m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const Complex v = m.data()[i];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

// sqrt(k! / (k - d)!) for 0 <= d <= k.
double sqrt_falling(int k, int d) {
    double prod = 1;
    for (int i = 0; i < d; ++i) prod *= static_cast<double>(k - i);
    return std::sqrt(prod);
}

// Coherent-state overlaps u_k = alpha^k / sqrt(k!) for k = 0..cutoff.
Eigen::VectorXcd scaled_powers(Complex alpha, int cutoff) {
    Eigen::VectorXcd u(cutoff + 1);
    u(0) = 1.0;
    for (int k = 1; k <= cutoff; ++k) u(k) = u(k - 1) * alpha / std::sqrt(static_cast<double>(k));
    return u;
}

// Spectral decomposition of the truncated generator a^dag - a, so that
// exp(r (a^dag - a)) = V diag(exp(i r lambda)) V^dag. Cached per dimension.
struct GeneratorSpectrum {
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd values;
};

const GeneratorSpectrum &generator_spectrum(int dim) {
    static std::mutex mutex;
    static std::map<int, GeneratorSpectrum> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(dim);
    if (it != cache.end()) return it->second;

    // -i (a^dag - a) is Hermitian.
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 0; k + 1 < dim; ++k) {
        const double s = std::sqrt(static_cast<double>(k + 1));
        h(k + 1, k) = Complex(0, -s);
        h(k, k + 1) = Complex(0, s);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    return cache.emplace(dim, GeneratorSpectrum{solver.eigenvectors(), solver.eigenvalues()}).first->second;
}

// Levels added above the state's cutoff when displacing by |alpha|. The
// displaced state occupies photon numbers up to roughly (|alpha| + sqrt(N) + c)^2.
int displacement_padding(int cutoff, double radius) {
    const double reach = radius + std::sqrt(static_cast<double>(cutoff)) + 7.0;
    const int pad = static_cast<int>(std::ceil(reach * reach)) - cutoff;
    const int padded = std::max(4, pad);
    return (padded + 7) / 8 * 8;
}

}  // namespace

FockState FockState::pure(Eigen::VectorXcd amplitudes, Preparation prep) {
    if (amplitudes.size() < 1) throw std::invalid_argument("state needs at least one amplitude");
    if (!all_finite(amplitudes)) throw std::invalid_argument("state amplitudes must be finite");
    const double norm = amplitudes.squaredNorm();
    if (std::abs(norm - 1.0) > kNormTolerance) {
        throw std::invalid_argument("pure state not normalized: sum |c_k|^2 = " + std::to_string(norm));
    }
    Eigen::MatrixXcd rho = amplitudes * amplitudes.adjoint();
    return FockState(std::move(rho), std::move(amplitudes), prep);
}

FockState FockState::mixed(Eigen::MatrixXcd rho, Preparation prep) {
    if (rho.rows() < 1 || rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square");
    if (!all_finite(rho)) throw std::invalid_argument("density matrix must be finite");
    const Complex trace = rho.trace();
    if (std::abs(trace - 1.0) > kNormTolerance) {
        throw std::invalid_argument("density matrix trace " + std::to_string(trace.real()) + " != 1");
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kNormTolerance) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    // Exact hermitization so downstream quantities are real.
    Eigen::MatrixXcd sym = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kEigenTolerance) {
        throw std::invalid_argument("density matrix has a negative eigenvalue");
    }
    return FockState(std::move(sym), std::nullopt, prep);
}

FockState FockState::fock(int k, int cutoff) {
    if (k < 0 || cutoff < k) throw std::invalid_argument("Fock level must lie within the cutoff");
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(cutoff + 1);
    c(k) = 1.0;
    Preparation prep;
    if (k == 0) prep.kind = Preparation::Kind::coherent;
    return pure(std::move(c), prep);
}

int FockState::support() const {
    int top = 0;
    for (int k = 0; k < dimension(); ++k) {
        if (rho_(k, k).real() > kPopulationFloor) top = k;
    }
    return top;
}

bool FockState::is_diagonal() const {
    for (int j = 0; j < dimension(); ++j) {
        for (int k = 0; k < dimension(); ++k) {
            if (j != k && std::abs(rho_(j, k)) > kPopulationFloor) return false;
        }
    }
    return true;
}

double FockState::mean_photon_number() const {
    double mean = 0;
    for (int k = 1; k < dimension(); ++k) mean += k * rho_(k, k).real();
    return mean;
}

FockState FockState::padded(int new_cutoff) const {
    if (new_cutoff < cutoff()) throw std::invalid_argument("padding cannot shrink the cutoff");
    const int dim = new_cutoff + 1;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho.topLeftCorner(dimension(), dimension()) = rho_;
    std::optional<Eigen::VectorXcd> amps;
    if (amplitudes_) {
        amps = Eigen::VectorXcd::Zero(dim);
        amps->head(dimension()) = *amplitudes_;
    }
    return FockState(std::move(rho), std::move(amps), prep_);
}

NoiseModel::NoiseModel(double mean_photons) : mean_photons_(mean_photons) {
    if (!(mean_photons >= 0) || !std::isfinite(mean_photons)) {
        throw std::invalid_argument("noise photon number must be finite and non-negative");
    }
}

NoiseModel NoiseModel::from_temperature(double kelvin, double hertz, ThermalApproximation approx) {
    constexpr double kPlanck = 6.62607015e-34;
    constexpr double kBoltzmann = 1.380649e-23;
    if (!(kelvin >= 0) || !(hertz > 0)) {
        throw std::invalid_argument("noise temperature must be >= 0 and frequency > 0");
    }
    if (kelvin == 0) return NoiseModel(0.0);
    const double x = kPlanck * hertz / (kBoltzmann * kelvin);
    if (approx == ThermalApproximation::rayleigh_jeans) return NoiseModel(1.0 / x);
    return NoiseModel(1.0 / std::expm1(x));
}

FockState prepare_superposition(Complex beta, double admixture_error, int cutoff) {
    const double p1 = std::norm(beta);
    if (!(p1 <= 1.0 + kNormTolerance)) throw std::invalid_argument("qubit amplitude |beta| must be <= 1");
    if (!(admixture_error >= 0.0 && admixture_error <= 1.0)) {
        throw std::invalid_argument("admixture error must lie in [0, 1]");
    }
    if (cutoff < 1) throw std::invalid_argument("superposition needs cutoff >= 1");
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(cutoff + 1);
    c(0) = std::sqrt(std::max(0.0, 1.0 - p1));
    c(1) = beta;
    c /= c.norm();
    if (admixture_error == 0.0) return FockState::pure(std::move(c));
    Eigen::MatrixXcd rho = (1.0 - admixture_error) * (c * c.adjoint());
    rho(0, 0) += admixture_error;
    return FockState::mixed(std::move(rho));
}

FockState coherent_state(Complex alpha, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
    if (std::norm(alpha) > cutoff / 4.0) {
        throw std::invalid_argument("cutoff " + std::to_string(cutoff) + " too small for |alpha|^2 = " +
                                    std::to_string(std::norm(alpha)));
    }
    Eigen::VectorXcd c = scaled_powers(alpha, cutoff) * std::exp(-0.5 * std::norm(alpha));
    c /= c.norm();
    Preparation prep;
    prep.kind = Preparation::Kind::coherent;
    prep.amplitude = alpha;
    return FockState::pure(std::move(c), prep);
}

int thermal_cutoff(double mean_photons) {
    if (!(mean_photons >= 0)) throw std::invalid_argument("thermal photon number must be non-negative");
    if (mean_photons == 0) return kDefaultCutoff;
    const double ratio = mean_photons / (mean_photons + 1.0);
    const int needed = static_cast<int>(std::ceil(std::log(kThermalTail) / std::log(ratio)));
    return std::max(kDefaultCutoff, needed);
}

FockState thermal_state(double mean_photons, int cutoff) {
    if (!(mean_photons >= 0) || !std::isfinite(mean_photons)) {
        throw std::invalid_argument("thermal photon number must be non-negative");
    }
    if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
    const double ratio = mean_photons / (mean_photons + 1.0);
    if (std::pow(ratio, cutoff + 1) >= kThermalTail) {
        throw std::invalid_argument("cutoff " + std::to_string(cutoff) + " too small for thermal nbar = " +
                                    std::to_string(mean_photons));
    }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
    double weight = 1, total = 0;
    for (int k = 0; k <= cutoff; ++k) {
        rho(k, k) = weight;
        total += weight;
        weight *= ratio;
    }
    rho /= total;
    Preparation prep;
    prep.kind = Preparation::Kind::thermal;
    prep.mean_photons = mean_photons;
    return FockState::mixed(std::move(rho), prep);
}

FockState thermal_state(double mean_photons) { return thermal_state(mean_photons, thermal_cutoff(mean_photons)); }

MomentMatrix analytic_moments(const FockState &state, int order) {
    const int cutoff = state.cutoff();
    if (order < 0 || order > 2 * std::max(cutoff, 1)) {
        throw std::invalid_argument("moment order exceeds twice the Fock cutoff");
    }
    const auto &rho = state.density();
    MomentMatrix result(order, Ordering::normal);
    // (a^dag)^n a^m |k> = sqrt(k!/(k-m)!) sqrt((k-m+n)!/(k-m)!) |k-m+n>
    result.for_each_index([&](int n, int m) {
        if (n > m) return;
        Complex sum{};
        for (int k = m; k <= cutoff; ++k) {
            const int j = k - m + n;
            if (j > cutoff) break;
            sum += sqrt_falling(k, m) * sqrt_falling(j, n) * rho(k, j);
        }
        result.set_hermitian(n, m, sum);
    });
    return result;
}

MomentMatrix analytic_antinormal_moments(const FockState &state, int order) {
    const int cutoff = state.cutoff();
    if (order < 0) throw std::invalid_argument("moment order must be non-negative");
    const auto &rho = state.density();
    MomentMatrix result(order, Ordering::antinormal);
    // a^m (a^dag)^n |k> = sqrt((k+n)!/k!) sqrt((k+n)!/(k+n-m)!) |k+n-m>
    result.for_each_index([&](int n, int m) {
        if (n > m) return;
        Complex sum{};
        for (int k = std::max(0, m - n); k <= cutoff; ++k) {
            const int j = k + n - m;
            if (j > cutoff) break;
            sum += sqrt_falling(k + n, n) * sqrt_falling(k + n, m) * rho(k, j);
        }
        result.set_hermitian(n, m, sum);
    });
    return result;
}

MomentMatrix noise_moments(const NoiseModel &noise, int order) {
    MomentMatrix result(order, Ordering::antinormal);
    double value = 1;
    for (int n = 0; 2 * n <= order; ++n) {
        if (n > 0) value *= n * (noise.mean_photons() + 1.0);
        result.set(n, n, value);
    }
    return result;
}

double husimi_q(const FockState &state, Complex alpha) {
    const Eigen::VectorXcd u = scaled_powers(alpha, state.cutoff());
    double quad;
    if (state.is_pure()) {
        quad = std::norm(u.dot(*state.amplitudes()));
    } else {
        quad = u.dot(state.density() * u).real();
    }
    return std::max(0.0, quad) * std::exp(-std::norm(alpha)) / std::numbers::pi;
}

double wigner_oracle(const FockState &state, Complex alpha) {
    const int cutoff = state.cutoff();
    const double radius = std::abs(alpha);
    const int dim = cutoff + 1 + displacement_padding(cutoff, radius);
    const auto &spectrum = generator_spectrum(dim);

    // D(-alpha) = R(theta) exp(r (a^dag - a)) R(theta)^dag with -alpha = r e^{i theta}.
    const double theta = std::arg(-alpha);
    Eigen::VectorXcd phases(dim);
    for (int k = 0; k < dim; ++k) phases(k) = std::polar(1.0, theta * k);
    Eigen::VectorXcd spectral(dim);
    for (int k = 0; k < dim; ++k) spectral(k) = std::polar(1.0, radius * spectrum.values(k));

    // Columns 0..cutoff of D(-alpha).
    const auto &v = spectrum.vectors;
    Eigen::MatrixXcd right = v.topRows(cutoff + 1).adjoint();  // dim x (cutoff+1): (V^dag)(:, 0..cutoff)
    for (int c = 0; c <= cutoff; ++c) right.col(c) *= std::conj(phases(c));
    right = spectral.asDiagonal() * right;
    Eigen::MatrixXcd displaced = v * right;
    displaced = phases.asDiagonal() * displaced;

    Eigen::VectorXd populations(dim);
    if (state.is_pure()) {
        populations = (displaced * *state.amplitudes()).cwiseAbs2();
    } else {
        const Eigen::MatrixXcd tmp = displaced * state.density();
        populations = (tmp.cwiseProduct(displaced.conjugate())).rowwise().sum().real();
    }
    double parity = 0;
    for (int k = 0; k < dim; ++k) parity += (k % 2 == 0 ? 1.0 : -1.0) * populations(k);
    return 2.0 / std::numbers::pi * parity;
}

FockState loss_channel(const FockState &state, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("loss transmissivity must lie in [0, 1]");
    const int cutoff = state.cutoff();
    if (eta == 1.0) return state;
    if (eta == 0.0) return FockState::vacuum(cutoff);

    Preparation prep;
    if (state.preparation().kind == Preparation::Kind::coherent) {
        prep = state.preparation();
        prep.amplitude *= std::sqrt(eta);
    } else if (state.preparation().kind == Preparation::Kind::thermal) {
        prep = state.preparation();
        prep.mean_photons *= eta;
    }

    const auto &rho = state.density();
    const double log_eta = std::log(eta);
    const double log_loss = std::log1p(-eta);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
    // Kraus operators E_l |n> = sqrt(C(n,l) eta^(n-l) (1-eta)^l) |n-l>.
    Eigen::VectorXd amp(cutoff + 1);
    for (int l = 0; l <= cutoff; ++l) {
        amp.setZero();
        for (int n = l; n <= cutoff; ++n) {
            const double log_binom = std::lgamma(n + 1.0) - std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0);
            amp(n) = std::exp(0.5 * (log_binom + (n - l) * log_eta + l * log_loss));
        }
        const int span = cutoff + 1 - l;
        const Eigen::VectorXd a = amp.tail(span);
        out.topLeftCorner(span, span) +=
            (a.asDiagonal() * rho.bottomRightCorner(span, span) * a.asDiagonal()).eval();
    }
    // Renormalize away rounding so the invariant checks in mixed() pass.
    out = 0.5 * (out + out.adjoint()).eval();
    out /= out.trace().real();
    return FockState::mixed(std::move(out), prep);
}

FockState rotate(const FockState &state, double phi) {
    const int dim = state.dimension();
    Eigen::VectorXcd phases(dim);
    for (int k = 0; k < dim; ++k) phases(k) = std::polar(1.0, phi * k);
    Preparation prep = state.preparation();
    prep.amplitude *= std::polar(1.0, phi);
    if (state.is_pure()) {
        Eigen::VectorXcd c = phases.cwiseProduct(*state.amplitudes());
        c /= c.norm();
        return FockState::pure(std::move(c), prep);
    }
    Eigen::MatrixXcd rho = phases.asDiagonal() * state.density() * phases.conjugate().asDiagonal();
    return FockState::mixed(std::move(rho), prep);
}

}  // namespace hettomo
