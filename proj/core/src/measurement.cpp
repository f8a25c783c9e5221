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

#include "hettomo/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace hettomo {

namespace {

constexpr double kEnvelopeSafety = 1.2;

bool same_grid(double dt_a, int bins_a, double dt_b, int bins_b) {
    return bins_a == bins_b && std::abs(dt_a - dt_b) <= 1e-12 * std::max(std::abs(dt_a), std::abs(dt_b));
}

}  // namespace

AmplifierChain::AmplifierChain(double gain, NoiseModel noise) : gain_(gain), noise_(noise) {
    if (!(gain > 0) || !std::isfinite(gain)) throw std::invalid_argument("amplifier gain must be positive");
}

TemporalEnvelope::TemporalEnvelope(double kappa, double dt, int bins) : kappa_(kappa), dt_(dt) {
    if (!(kappa > 0) || !(dt > 0) || bins < 1) {
        throw std::invalid_argument("envelope needs kappa > 0, dt > 0 and at least one bin");
    }
    if (kappa * dt > 0.1 + 1e-12) throw std::invalid_argument("envelope resolution requires kappa * dt <= 0.1");
    if (bins * dt < 6.0 / kappa - 1e-9) throw std::invalid_argument("envelope window must span at least 6 / kappa");
    values_.resize(static_cast<std::size_t>(bins));
    double energy = 0;
    for (int i = 0; i < bins; ++i) {
        const double t = (i + 0.5) * dt;
        values_[i] = std::sqrt(kappa) * std::exp(-0.5 * kappa * t);
        energy += values_[i] * values_[i] * dt;
    }
    const double scale = 1.0 / std::sqrt(energy);
    for (double &v : values_) v *= scale;
}

TemporalEnvelope TemporalEnvelope::standard() { return TemporalEnvelope(1.0 / 40.0, 1.0, 400); }

TemporalEnvelope TemporalEnvelope::from_samples(std::vector<double> values, double dt) {
    if (!(dt > 0) || values.empty()) throw std::invalid_argument("envelope needs dt > 0 and at least one bin");
    double energy = 0;
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("envelope samples must be finite");
        energy += v * v * dt;
    }
    if (!(energy > 0)) throw std::invalid_argument("envelope has zero energy");
    TemporalEnvelope env;
    env.dt_ = dt;
    env.values_ = std::move(values);
    const double scale = 1.0 / std::sqrt(energy);
    for (double &v : env.values_) v *= scale;
    return env;
}

QSampler::QSampler(const FockState &state) {
    const auto &prep = state.preparation();
    if (prep.kind == Preparation::Kind::coherent) {
        method_ = Method::gaussian;
        center_ = prep.amplitude;
        variance_ = 0.5;
        return;
    }
    if (prep.kind == Preparation::Kind::thermal) {
        method_ = Method::gaussian;
        variance_ = 0.5 * (prep.mean_photons + 1.0);
        return;
    }
    const auto &rho = state.density();
    if (state.is_diagonal()) {
        method_ = Method::fock_mixture;
        double running = 0;
        for (int k = 0; k < state.dimension(); ++k) {
            running += std::max(0.0, rho(k, k).real());
            cumulative_.push_back(running);
        }
        for (double &c : cumulative_) c /= running;
        return;
    }

    method_ = Method::rejection;
    if (std::abs(rho.trace() - 1.0) > 1e-9) throw NumericError("rejection bound needs a normalized state");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
    for (int r = 0; r < state.dimension(); ++r) {
        if (solver.eigenvalues()(r) > 1e-15) {
            weights_.push_back(solver.eigenvalues()(r));
            vectors_.push_back(solver.eigenvectors().col(r));
        }
    }

    const int support = state.support();
    for (int k = 0; k <= support; ++k) inverse_sqrt_.push_back(k == 0 ? 1.0 : 1.0 / std::sqrt(static_cast<double>(k)));
    proposal_variance_ = 0.5 * (support + 2);
    const double reach = 2.0 * std::sqrt(support + 2.0);
    constexpr int kRadii = 256;
    constexpr int kAngles = 128;
    double best = 0;
    for (int i = 0; i <= kRadii; ++i) {
        const double r = reach * i / kRadii;
        const double proposal =
            std::exp(-r * r / (2 * proposal_variance_)) / (2 * std::numbers::pi * proposal_variance_);
        for (int j = 0; j < kAngles; ++j) {
            const Complex alpha = std::polar(r, 2 * std::numbers::pi * j / kAngles);
            best = std::max(best, density(alpha) / proposal);
        }
    }
    if (!(best > 0) || !std::isfinite(best)) throw NumericError("rejection envelope bound is not computable");
    envelope_ = kEnvelopeSafety * best;
}

double QSampler::polynomial_weight(Complex alpha) const {
    // sum_r w_r |sum_k conj(alpha)^k / sqrt(k!) v_rk|^2, real arithmetic on the truncated support
    const double ax = alpha.real(), ap = -alpha.imag();
    const std::size_t levels = inverse_sqrt_.size();
    double quad = 0;
    for (std::size_t r = 0; r < vectors_.size(); ++r) {
        const auto &v = vectors_[r];
        double tr = 1.0, ti = 0.0, sr = 0.0, si = 0.0;
        for (std::size_t k = 0; k < levels; ++k) {
            if (k > 0) {
                const double nr = (tr * ax - ti * ap) * inverse_sqrt_[k];
                ti = (tr * ap + ti * ax) * inverse_sqrt_[k];
                tr = nr;
            }
            const Complex c = v(static_cast<Eigen::Index>(k));
            sr += tr * c.real() - ti * c.imag();
            si += tr * c.imag() + ti * c.real();
        }
        quad += weights_[r] * (sr * sr + si * si);
    }
    return quad;
}

double QSampler::density(Complex alpha) const {
    if (method_ != Method::rejection) throw std::logic_error("density is only cached for the rejection sampler");
    return polynomial_weight(alpha) * std::exp(-std::norm(alpha)) / std::numbers::pi;
}

Complex QSampler::draw_rejection(Engine &engine) const {
    std::normal_distribution<double> normal(0.0, std::sqrt(proposal_variance_));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    // Q / (M g) = weight * exp(-|alpha|^2 (1 - 1 / (2 v))) * 2 v / M
    const double decay = 1.0 - 1.0 / (2 * proposal_variance_);
    const double scale = 2 * proposal_variance_ / envelope_;
    while (true) {
        const Complex alpha(normal(engine), normal(engine));
        const double ratio = scale * polynomial_weight(alpha) * std::exp(-decay * std::norm(alpha));
        if (ratio > 1.0) throw NumericError("rejection envelope exceeded; sampler bound is invalid");
        if (uniform(engine) < ratio) return alpha;
    }
}

Complex QSampler::operator()(Engine &engine) const {
    switch (method_) {
        case Method::gaussian: {
            std::normal_distribution<double> normal(0.0, std::sqrt(variance_));
            const double x = normal(engine);
            const double p = normal(engine);
            return center_ + Complex(x, p);
        }
        case Method::fock_mixture: {
            std::uniform_real_distribution<double> uniform(0.0, 1.0);
            const double u = uniform(engine);
            const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            const int k = static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                                    static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
            // |alpha|^2 ~ Gamma(k + 1, 1) for |k>, with uniform phase.
            std::gamma_distribution<double> gamma(k + 1.0, 1.0);
            const double radius = std::sqrt(gamma(engine));
            const double phase = 2 * std::numbers::pi * uniform(engine);
            return std::polar(radius, phase);
        }
        case Method::rejection:
            return draw_rejection(engine);
    }
    return {};
}

std::vector<Complex> sample_q(const FockState &state, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
    if (n < 1) throw std::invalid_argument("sample count must be at least 1");
    QSampler sampler(state);
    Engine engine = make_engine(seed, Stage::signal, stream);
    std::vector<Complex> out(n);
    for (auto &s : out) s = sampler(engine);
    return out;
}

void sample_detector_into(const QSampler &sampler, const AmplifierChain &chain, std::size_t n, Engine &engine,
                          std::vector<Complex> &out) {
    const double amplitude = std::sqrt(chain.gain());
    const double noise_sigma = std::sqrt(0.5 * chain.noise().mean_photons());
    std::normal_distribution<double> normal(0.0, 1.0);
    out.resize(n);
    for (auto &s : out) {
        Complex alpha = sampler(engine);
        if (noise_sigma > 0) alpha += Complex(noise_sigma * normal(engine), noise_sigma * normal(engine));
        s = amplitude * alpha;
    }
}

ShotBatch sample_detector(const FockState &state, const AmplifierChain &chain, std::size_t n, std::uint64_t seed,
                          std::uint64_t stream) {
    if (n < 1) throw std::invalid_argument("sample count must be at least 1");
    QSampler sampler(state);
    Engine engine = make_engine(seed, Stage::signal, stream);
    ShotBatch batch;
    batch.seed = seed;
    batch.stream = stream;
    batch.gain = chain.gain();
    sample_detector_into(sampler, chain, n, engine, batch.samples);
    return batch;
}

TraceBatch simulate_time_trace(const FockState &state, const TemporalEnvelope &envelope, const AmplifierChain &chain,
                               std::size_t n, std::uint64_t seed, std::uint64_t stream) {
    if (n < 1) throw std::invalid_argument("sample count must be at least 1");
    QSampler sampler(state);
    Engine engine = make_engine(seed, Stage::signal, stream);
    TraceBatch traces;
    traces.bins = envelope.bins();
    traces.dt = envelope.dt();
    traces.gain = chain.gain();
    traces.seed = seed;
    traces.stream = stream;
    traces.data.resize(n * static_cast<std::size_t>(traces.bins));

    Engine noise_engine = make_engine(seed, Stage::trace_noise, stream);
    const double amplitude = std::sqrt(chain.gain());
    const double nbar = chain.noise().mean_photons();
    const double bin_sigma = std::sqrt(0.5 * (nbar + 1.0) / envelope.dt());
    const double mode_sigma = std::sqrt(0.5 * nbar);
    const auto f = envelope.values();
    const double dt = envelope.dt();
    std::normal_distribution<double> normal(0.0, 1.0);
    auto out = traces.data.begin();
    for (std::size_t j = 0; j < n; ++j, out += traces.bins) {
        Complex projection{};
        for (int i = 0; i < traces.bins; ++i) {
            out[i] = Complex(bin_sigma * normal(noise_engine), bin_sigma * normal(noise_engine));
            projection += f[i] * out[i];
        }
        projection *= dt;
        Complex mode = sampler(engine);
        if (mode_sigma > 0) mode += Complex(mode_sigma * normal(noise_engine), mode_sigma * normal(noise_engine));
        const Complex shift = mode - projection;
        for (int i = 0; i < traces.bins; ++i) out[i] = amplitude * (out[i] + shift * f[i]);
    }
    return traces;
}

ShotBatch matched_filter(const TraceBatch &records, const TemporalEnvelope &filter) {
    if (!same_grid(records.dt, records.bins, filter.dt(), filter.bins())) {
        throw DataError("filter grid (" + std::to_string(filter.bins()) + " bins) does not match records (" +
                        std::to_string(records.bins) + " bins)");
    }
    const auto g = filter.values();
    ShotBatch batch;
    batch.seed = records.seed;
    batch.stream = records.stream;
    batch.gain = records.gain;
    batch.samples.resize(records.count());
    for (std::size_t j = 0; j < records.count(); ++j) {
        const auto record = records.record(j);
        Complex sum{};
        for (int i = 0; i < records.bins; ++i) sum += g[i] * record[i];
        batch.samples[j] = sum * records.dt;
    }
    return batch;
}

double overlap(const TemporalEnvelope &f, const TemporalEnvelope &g) {
    if (!same_grid(f.dt(), f.bins(), g.dt(), g.bins())) throw DataError("envelopes are not on the same time grid");
    double sum = 0;
    const auto a = f.values();
    const auto b = g.values();
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum * f.dt();
}

double exponential_overlap(double kappa, double kappa_prime) {
    if (!(kappa > 0) || !(kappa_prime > 0)) throw std::invalid_argument("decay rates must be positive");
    return 2.0 * std::sqrt(kappa * kappa_prime) / (kappa + kappa_prime);
}

}  // namespace hettomo
