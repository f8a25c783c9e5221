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

#include "hettomo/tomography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "hettomo/rng.hpp"

namespace hettomo {

namespace {

using LongComplex = ExtendedComplex;

long double binomial(int n, int k) {
    long double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

void require_order(const MomentTable &table, int order, const char *what) {
    if (table.order() < order) {
        throw std::invalid_argument(std::string(what) + " has order " + std::to_string(table.order()) +
                                    " < requested " + std::to_string(order));
    }
}

// (16th, 84th) percentile half-spread.
double half_spread(std::vector<double> &values) {
    std::sort(values.begin(), values.end());
    auto pick = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return 0.5 * (pick(0.8413447460685429) - pick(0.15865525393145707));
}

std::vector<RawMomentMatrix> resample(std::span<const RawMomentMatrix> batches, Engine &engine) {
    std::uniform_int_distribution<std::size_t> pick(0, batches.size() - 1);
    std::vector<RawMomentMatrix> out;
    out.reserve(batches.size());
    for (std::size_t i = 0; i < batches.size(); ++i) out.push_back(batches[pick(engine)]);
    return out;
}

// Polynomial coefficients c[p][q] of beta^p gamma^q with
// kernel(n, m) = (sum c_pq beta^p gamma^q) (2/pi) exp(-2 beta gamma).
using KernelPolynomial = std::array<std::array<double, kMaxKernelOrder + 1>, kMaxKernelOrder + 1>;

struct KernelTable {
    std::array<std::array<KernelPolynomial, kMaxKernelOrder + 1>, kMaxKernelOrder + 1> poly{};

    KernelTable() {
        poly[0][0][0][0] = 1.0;
        // Multiplying the integrand by lambda is -d/dgamma, by -lambda^* is -d/dbeta:
        //   -d/dgamma (P e) = (-dP/dgamma + 2 beta P) e,  -d/dbeta (P e) = (-dP/dbeta + 2 gamma P) e.
        for (int total = 1; total <= kMaxKernelOrder; ++total) {
            for (int n = 0; n <= total; ++n) {
                const int m = total - n;
                KernelPolynomial next{};
                if (n > 0) {
                    const auto &prev = poly[n - 1][m];
                    for (int p = 0; p <= kMaxKernelOrder; ++p) {
                        for (int q = 0; q <= kMaxKernelOrder; ++q) {
                            if (prev[p][q] == 0) continue;
                            if (q > 0) next[p][q - 1] -= q * prev[p][q];
                            if (p < kMaxKernelOrder) next[p + 1][q] += 2 * prev[p][q];
                        }
                    }
                } else {
                    const auto &prev = poly[n][m - 1];
                    for (int p = 0; p <= kMaxKernelOrder; ++p) {
                        for (int q = 0; q <= kMaxKernelOrder; ++q) {
                            if (prev[p][q] == 0) continue;
                            if (p > 0) next[p - 1][q] -= p * prev[p][q];
                            if (q < kMaxKernelOrder) next[p][q + 1] += 2 * prev[p][q];
                        }
                    }
                }
                poly[n][m] = next;
            }
        }
    }
};

const KernelTable &kernel_table() {
    static const KernelTable table;
    return table;
}

}  // namespace

RawMomentMatrix forward_moments(const MomentMatrix &signal, const MomentMatrix &noise, double gain, int order) {
    if (signal.ordering() != Ordering::normal) throw std::invalid_argument("signal moments must be normal ordered");
    if (noise.ordering() != Ordering::antinormal) {
        throw std::invalid_argument("noise moments must be antinormal ordered");
    }
    require_order(signal, order, "signal moment matrix");
    require_order(noise, order, "noise moment matrix");
    if (!(gain > 0)) throw std::invalid_argument("gain must be positive");

    RawMomentMatrix raw(order, MomentSource::model);
    raw.for_each_index([&](int n, int m) {
        if (n > m) return;
        LongComplex sum{};
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j <= m; ++j) {
                sum += binomial(n, i) * binomial(m, j) * signal.extended(i, j) * noise.extended(n - i, m - j);
            }
        }
        sum *= std::pow(static_cast<long double>(gain), 0.5L * (n + m));
        raw.set_hermitian(n, m, sum);
    });
    return raw;
}

MomentMatrix recover_noise_moments(const RawMomentMatrix &raw_vacuum, double gain, int order) {
    if (!(gain > 0)) throw std::invalid_argument("gain must be positive");
    require_order(raw_vacuum, order, "vacuum moment matrix");
    MomentMatrix noise(order, Ordering::antinormal);
    noise.for_each_index([&](int n, int m) {
        if (n > m) return;
        const long double scale = std::pow(static_cast<long double>(gain), -0.5L * (n + m));
        noise.set_hermitian(n, m, raw_vacuum.extended(n, m) * scale);
    });
    return noise;
}

InversionReport invert_moments(const RawMomentMatrix &raw_signal, const RawMomentMatrix &raw_vacuum, double gain,
                               int order) {
    require_order(raw_signal, order, "signal moment matrix");
    require_order(raw_vacuum, order, "vacuum moment matrix");
    if (!(gain > 0)) throw std::invalid_argument("gain must be positive");
    if (std::abs(raw_signal(0, 0) - 1.0) > 1e-9 || std::abs(raw_vacuum(0, 0) - 1.0) > 1e-9) {
        throw NumericError("raw moments are not normalized: s(0,0) must be 1");
    }

    InversionReport report;
    report.gain = gain;
    report.noise = recover_noise_moments(raw_vacuum, gain, order);
    report.signal_count = raw_signal.count();
    report.reference_count = raw_vacuum.count();
    report.errors = MomentErrors(order, 0);

    // Work in long double: high orders subtract products of large noise moments.
    const int stride = order + 1;
    std::vector<LongComplex> sig(static_cast<std::size_t>(stride * stride));
    std::vector<LongComplex> noise(static_cast<std::size_t>(stride * stride));
    auto at = [stride](int n, int m) { return static_cast<std::size_t>(n * stride + m); };
    report.noise.for_each_index([&](int n, int m) { noise[at(n, m)] = report.noise.extended(n, m); });

    MomentMatrix recovered(order, Ordering::normal);
    for (int total = 0; total <= order; ++total) {
        const long double scale = std::pow(static_cast<long double>(gain), -0.5L * total);
        for (int n = 0; 2 * n <= total; ++n) {
            const int m = total - n;
            LongComplex value = raw_signal.extended(n, m) * scale;
            for (int i = 0; i <= n; ++i) {
                for (int j = 0; j <= m; ++j) {
                    if (i == n && j == m) continue;
                    value -= binomial(n, i) * binomial(m, j) * sig[at(i, j)] * noise[at(n - i, m - j)];
                }
            }
            if (n == m) value = LongComplex(value.real(), 0.0L);
            sig[at(n, m)] = value;
            sig[at(m, n)] = std::conj(value);
            recovered.set_hermitian(n, m, value);
        }
    }
    recovered.set(0, 0, 1.0);
    report.moments = std::move(recovered);
    return report;
}

InversionReport invert_moments(std::span<const RawMomentMatrix> signal_batches,
                               std::span<const RawMomentMatrix> vacuum_batches, double gain, int order,
                               int bootstrap_samples, std::uint64_t seed) {
    if (signal_batches.empty() || vacuum_batches.empty()) throw DataError("inversion needs signal and vacuum batches");
    InversionReport report = invert_moments(merge_moments(signal_batches), merge_moments(vacuum_batches), gain, order);
    report.errors = MomentErrors(order, static_cast<int>(std::min(signal_batches.size(), vacuum_batches.size())));
    if (bootstrap_samples < 2 || signal_batches.size() < 2 || vacuum_batches.size() < 2) return report;

    report.bootstrap_samples = bootstrap_samples;
    Engine engine = make_engine(seed, Stage::bootstrap, 0);
    std::vector<MomentMatrix> replicas;
    replicas.reserve(static_cast<std::size_t>(bootstrap_samples));
    for (int b = 0; b < bootstrap_samples; ++b) {
        const auto s = resample(signal_batches, engine);
        const auto v = resample(vacuum_batches, engine);
        replicas.push_back(invert_moments(merge_moments(s), merge_moments(v), gain, order).moments);
    }
    std::vector<double> re(replicas.size()), im(replicas.size());
    report.moments.for_each_index([&](int n, int m) {
        for (std::size_t r = 0; r < replicas.size(); ++r) {
            re[r] = replicas[r](n, m).real();
            im[r] = replicas[r](n, m).imag();
        }
        const double er = half_spread(re);
        const double ei = half_spread(im);
        report.errors.set(n, m, std::hypot(er, ei));
    });
    return report;
}

GainEstimate estimate_gain(const RawMomentMatrix &raw_super, const RawMomentMatrix &raw_vacuum) {
    require_order(raw_super, 2, "superposition moment matrix");
    require_order(raw_vacuum, 2, "vacuum moment matrix");
    GainEstimate out;
    out.first_moment = std::abs(raw_super(0, 1));
    out.excess_power = raw_super(1, 1).real() - raw_vacuum(1, 1).real();
    double standard_error = 0;
    if (raw_super.count() > 0) {
        const double spread = std::max(0.0, raw_super(1, 1).real() - std::norm(raw_super(0, 1)));
        standard_error = std::sqrt(spread / static_cast<double>(raw_super.count()));
    }
    if (!(out.first_moment > 0) || out.first_moment < 5.0 * standard_error) {
        throw NumericError("degenerate phase reference: |<S>| = " + std::to_string(out.first_moment) +
                           " is below 5 standard errors (" + std::to_string(standard_error) + ")");
    }
    if (!(out.excess_power > 0)) throw NumericError("superposition run shows no excess power over the vacuum");
    const double ratio = out.excess_power / out.first_moment;
    out.gain = ratio * ratio;
    return out;
}

GainEstimate estimate_gain(std::span<const RawMomentMatrix> super_batches,
                           std::span<const RawMomentMatrix> vacuum_batches, int bootstrap_samples,
                           std::uint64_t seed) {
    if (super_batches.empty() || vacuum_batches.empty()) throw DataError("gain estimate needs batches");
    GainEstimate out = estimate_gain(merge_moments(super_batches), merge_moments(vacuum_batches));
    if (bootstrap_samples < 2 || super_batches.size() < 2 || vacuum_batches.size() < 2) return out;
    Engine engine = make_engine(seed, Stage::bootstrap, 1);
    std::vector<double> gains;
    gains.reserve(static_cast<std::size_t>(bootstrap_samples));
    for (int b = 0; b < bootstrap_samples; ++b) {
        const auto s = merge_moments(resample(super_batches, engine));
        const auto v = merge_moments(resample(vacuum_batches, engine));
        const double m1 = std::abs(s(0, 1));
        const double m2 = s(1, 1).real() - v(1, 1).real();
        if (m1 > 0) gains.push_back((m2 / m1) * (m2 / m1));
    }
    if (gains.size() >= 2) out.uncertainty = half_spread(gains);
    return out;
}

namespace {

int truncation_with(const MomentMatrix &moments, auto &&threshold_for) {
    if (moments.ordering() != Ordering::normal) throw std::invalid_argument("truncation needs normal-ordered moments");
    const int order = moments.order();
    for (int n = 1; 2 * n <= order; ++n) {
        if (std::abs(moments(n, n)) < threshold_for(n)) return std::min(order, 2 * n - 1);
    }
    return order;
}

}  // namespace

int truncation_order(const MomentMatrix &moments, double threshold) {
    return truncation_with(moments, [threshold](int) { return threshold; });
}

int truncation_order(const MomentMatrix &moments, const MomentErrors &errors) {
    return truncation_with(moments, [&](int n) {
        const double e = n + n <= errors.order() ? errors(n, n) : 0.0;
        return std::max(0.1, 3.0 * e);
    });
}

Complex wigner_kernel(int n, int m, Complex alpha) {
    if (n < 0 || m < 0 || n + m > kMaxKernelOrder) {
        throw std::invalid_argument("Wigner kernel supports n + m <= " + std::to_string(kMaxKernelOrder));
    }
    const auto &poly = kernel_table().poly[n][m];
    const Complex beta = alpha;
    const Complex gamma = std::conj(alpha);
    Complex sum{};
    Complex beta_power = 1.0;
    for (int p = 0; p <= kMaxKernelOrder; ++p) {
        Complex term = beta_power;
        for (int q = 0; q <= kMaxKernelOrder; ++q) {
            if (poly[p][q] != 0) sum += poly[p][q] * term;
            term *= gamma;
        }
        beta_power *= beta;
    }
    return sum * (2.0 / std::numbers::pi) * std::exp(-2.0 * std::norm(alpha));
}

double wigner_value(const MomentMatrix &moments, int order, Complex alpha) {
    if (moments.ordering() != Ordering::normal) throw std::invalid_argument("Wigner sum needs normal-ordered moments");
    order = std::min(order, moments.order());
    if (order > kMaxKernelOrder) throw std::invalid_argument("Wigner sum supports orders up to 8");
    Complex w{};
    for (int total = 0; total <= order; ++total) {
        for (int n = 0; n <= total; ++n) {
            const int m = total - n;
            w += moments(n, m) / (factorial(n) * factorial(m)) * wigner_kernel(n, m, alpha);
        }
    }
    return w.real();
}

double WignerGrid::coordinate(int i) const { return -extent + 2.0 * extent * i / (resolution - 1); }

double WignerGrid::interpolate(Complex alpha) const {
    const double step = 2.0 * extent / (resolution - 1);
    const double fx = (alpha.real() + extent) / step;
    const double fp = (alpha.imag() + extent) / step;
    if (fx < -1e-9 || fp < -1e-9 || fx > resolution - 1 + 1e-9 || fp > resolution - 1 + 1e-9) {
        throw std::out_of_range("interpolation point outside the Wigner grid");
    }
    const int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, resolution - 2);
    const int ip = std::clamp(static_cast<int>(std::floor(fp)), 0, resolution - 2);
    const double tx = fx - ix, tp = fp - ip;
    return (1 - tx) * (1 - tp) * at(ix, ip) + tx * (1 - tp) * at(ix + 1, ip) + (1 - tx) * tp * at(ix, ip + 1) +
           tx * tp * at(ix + 1, ip + 1);
}

WignerGrid::Extremum WignerGrid::minimum() const {
    const auto it = std::min_element(values.begin(), values.end());
    const auto idx = static_cast<int>(it - values.begin());
    return {*it, Complex(coordinate(idx % resolution), coordinate(idx / resolution))};
}

WignerGrid::Extremum WignerGrid::maximum() const {
    const auto it = std::max_element(values.begin(), values.end());
    const auto idx = static_cast<int>(it - values.begin());
    return {*it, Complex(coordinate(idx % resolution), coordinate(idx / resolution))};
}

double WignerGrid::integral() const {
    const double step = 2.0 * extent / (resolution - 1);
    double sum = 0;
    for (int ip = 0; ip < resolution; ++ip) {
        const double wp = (ip == 0 || ip == resolution - 1) ? 0.5 : 1.0;
        for (int ix = 0; ix < resolution; ++ix) {
            const double wx = (ix == 0 || ix == resolution - 1) ? 0.5 : 1.0;
            sum += wx * wp * at(ix, ip);
        }
    }
    return sum * step * step;
}

namespace {

WignerGrid evaluate_grid(const MomentMatrix &moments, int truncation, double extent, int resolution) {
    if (!(extent > 0) || resolution < 2) throw std::invalid_argument("Wigner grid needs extent > 0 and >= 2 points");
    WignerGrid grid;
    grid.extent = extent;
    grid.resolution = resolution;
    grid.truncation = std::min(truncation, kMaxKernelOrder);
    grid.values.resize(static_cast<std::size_t>(resolution) * resolution);
    for (int ip = 0; ip < resolution; ++ip) {
        for (int ix = 0; ix < resolution; ++ix) {
            grid.values[static_cast<std::size_t>(ip) * resolution + ix] =
                wigner_value(moments, grid.truncation, Complex(grid.coordinate(ix), grid.coordinate(ip)));
        }
    }
    return grid;
}

}  // namespace

WignerGrid reconstruct_wigner(const MomentMatrix &moments, double extent, int resolution, double threshold) {
    return evaluate_grid(moments, truncation_order(moments, threshold), extent, resolution);
}

WignerGrid reconstruct_wigner(const MomentMatrix &moments, const MomentErrors &errors, double extent,
                              int resolution) {
    return evaluate_grid(moments, truncation_order(moments, errors), extent, resolution);
}

}  // namespace hettomo
