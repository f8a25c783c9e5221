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
#include <span>
#include <string>
#include <vector>

#include "hettomo/fock.hpp"
#include "hettomo/rng.hpp"

namespace hettomo {

/// Phase-insensitive amplifier: S = sqrt(G) (a + h^dag).
class AmplifierChain {
   public:
    AmplifierChain(double gain, NoiseModel noise);

    double gain() const { return gain_; }
    const NoiseModel &noise() const { return noise_; }

   private:
    double gain_;
    NoiseModel noise_;
};

/// Discretized exponential emission envelope f_i = sqrt(kappa) exp(-kappa t_i / 2),
/// t_i = (i + 1/2) dt, rescaled so that sum |f_i|^2 dt = 1.
class TemporalEnvelope {
   public:
    /// kappa in 1/ns, dt in ns. Requires kappa dt <= 0.1 and bins * dt >= 6 / kappa.
    TemporalEnvelope(double kappa, double dt, int bins);

    /// kappa = 1/40 ns^-1, dt = 1 ns, 400 bins.
    static TemporalEnvelope standard();

    /// Arbitrary real filter shape on a grid of step dt, rescaled to unit
    /// energy. kappa() is 0 for such envelopes.
    static TemporalEnvelope from_samples(std::vector<double> values, double dt);

    double kappa() const { return kappa_; }
    double dt() const { return dt_; }
    int bins() const { return static_cast<int>(values_.size()); }
    std::span<const double> values() const { return values_; }

   private:
    TemporalEnvelope() = default;

    double kappa_ = 0;
    double dt_ = 0;
    std::vector<double> values_;
};

/// Detector outcomes with the stream they were drawn from.
struct ShotBatch {
    std::vector<Complex> samples;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    double gain = 1.0;
    /// "detector" for raw S, "mode" once divided by sqrt(G).
    std::string units = "detector";

    std::size_t count() const { return samples.size(); }
};

/// n time-binned complex records of `bins` samples each, row-major.
struct TraceBatch {
    int bins = 0;
    double dt = 0;
    double gain = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<Complex> data;

    std::size_t count() const { return bins == 0 ? 0 : data.size() / static_cast<std::size_t>(bins); }
    std::span<const Complex> record(std::size_t j) const {
        return std::span<const Complex>(data).subspan(j * static_cast<std::size_t>(bins), static_cast<std::size_t>(bins));
    }
};

/// Draws from the Husimi function of a state with a caller-owned engine.
/// Uses closed-form samplers for coherent, thermal and phase-symmetric
/// (diagonal) states and rejection sampling otherwise.
class QSampler {
   public:
    explicit QSampler(const FockState &state);

    Complex operator()(Engine &engine) const;

    enum class Method { gaussian, fock_mixture, rejection };
    Method method() const { return method_; }

    /// Rejection envelope constant (1 for closed-form methods).
    double envelope() const { return envelope_; }

    /// Per-quadrature variance of the rejection proposal, (support + 2) / 2.
    double proposal_variance() const { return proposal_variance_; }

    /// Q evaluated from the cached spectral decomposition.
    double density(Complex alpha) const;

   private:
    Complex draw_rejection(Engine &engine) const;
    double polynomial_weight(Complex alpha) const;

    Method method_;
    Complex center_{};
    double variance_ = 0.5;  // gaussian, per quadrature
    std::vector<double> cumulative_;  // fock_mixture
    // rho = sum_r weights_[r] |vectors_[r]><vectors_[r]|
    std::vector<double> weights_;
    std::vector<Eigen::VectorXcd> vectors_;
    std::vector<double> inverse_sqrt_;  // 1 / sqrt(k) up to the support
    double proposal_variance_ = 0.5;
    double envelope_ = 1.0;
};

/// n independent samples of the Husimi function of `state`.
std::vector<Complex> sample_q(const FockState &state, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

/// S_j = sqrt(G) (alpha_j + nu_j): alpha_j ~ Q of the state, nu_j complex
/// Gaussian with total variance nbar_h.
ShotBatch sample_detector(const FockState &state, const AmplifierChain &chain, std::size_t n, std::uint64_t seed,
                          std::uint64_t stream = 0);

/// Same as sample_detector with an already constructed sampler and engine.
void sample_detector_into(const QSampler &sampler, const AmplifierChain &chain, std::size_t n, Engine &engine,
                          std::vector<Complex> &out);

/// record_j(t_i) = sqrt(G) [f_i (alpha_j + nu_j) + w_ji - f_i <f, w_j>]: the
/// emitted mode carries the Husimi draw alpha_j plus amplifier noise nu_j,
/// and every orthogonal temporal mode is vacuum plus amplifier noise, drawn
/// as white noise w of total variance (nbar_h + 1) / dt per bin with its
/// f component removed. Any unit-energy filter g therefore sees the state
/// through a loss channel of efficiency |<g, f>|^2. alpha_j follows
/// sample_q(state, n, seed, stream); the noise uses its own stream.
TraceBatch simulate_time_trace(const FockState &state, const TemporalEnvelope &envelope, const AmplifierChain &chain,
                               std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

/// S_j = sum_i conj(g_i) record_j(t_i) dt.
ShotBatch matched_filter(const TraceBatch &records, const TemporalEnvelope &filter);

/// sum_i f_i g_i dt on a shared time grid.
double overlap(const TemporalEnvelope &f, const TemporalEnvelope &g);

/// 2 sqrt(kappa kappa') / (kappa + kappa').
double exponential_overlap(double kappa, double kappa_prime);

/// Writes `<stem>.f64` (little-endian re/im pairs) and `<stem>.json`.
void save_shot_batch(const ShotBatch &batch, const std::filesystem::path &stem);
ShotBatch load_shot_batch(const std::filesystem::path &stem);

}  // namespace hettomo
