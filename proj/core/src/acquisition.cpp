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

#include "hettomo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace hettomo {

QuadratureHistogram::QuadratureHistogram(int bins, double range) : bins_(bins), range_(range) {
    if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
    if (!(range > 0) || !std::isfinite(range)) throw std::invalid_argument("histogram range must be positive");
    inverse_width_ = bins / (2.0 * range);
    counts_.assign(static_cast<std::size_t>(bins) * bins, 0);
}

void QuadratureHistogram::add(Complex s) {
    ++total_;
    const double fx = (s.real() + range_) * inverse_width_;
    const double fp = (s.imag() + range_) * inverse_width_;
    // Negated comparisons also reject NaN.
    if (!(fx >= 0 && fx < bins_ && fp >= 0 && fp < bins_)) {
        ++overflow_;
        return;
    }
    const auto ix = static_cast<std::size_t>(fx);
    const auto ip = static_cast<std::size_t>(fp);
    ++counts_[ip * bins_ + ix];
}

bool QuadratureHistogram::same_binning(const QuadratureHistogram &other) const {
    return bins_ == other.bins_ && range_ == other.range_;
}

void QuadratureHistogram::merge(const QuadratureHistogram &other) {
    if (!same_binning(other)) throw DataError("cannot merge histograms with different binning");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    total_ += other.total_;
    overflow_ += other.overflow_;
}

QuadratureHistogram QuadratureHistogram::from_counts(int bins, double range, std::vector<std::uint64_t> counts,
                                                     std::uint64_t overflow) {
    QuadratureHistogram hist(bins, range);
    if (counts.size() != hist.counts_.size()) throw DataError("histogram count array has the wrong size");
    hist.counts_ = std::move(counts);
    hist.overflow_ = overflow;
    hist.total_ = overflow;
    for (auto c : hist.counts_) hist.total_ += c;
    return hist;
}

void accumulate(QuadratureHistogram &hist, const ShotBatch &batch) {
    for (const Complex &s : batch.samples) hist.add(s);
}

MomentAccumulator::MomentAccumulator(int order) : order_(order) {
    if (order < 0) throw std::invalid_argument("moment order must be non-negative");
    sums_.assign(static_cast<std::size_t>((order + 1) * (order + 1)), ExtendedComplex{});
}

void MomentAccumulator::add(Complex s) { add(std::span<const Complex>(&s, 1)); }

void MomentAccumulator::add(std::span<const Complex> samples) {
    const int k = order_;
    const auto stride = static_cast<std::size_t>(k + 1);
    std::vector<Complex> powers(stride);
    for (const Complex &s : samples) {
        powers[0] = 1.0;
        for (int m = 1; m <= k; ++m) powers[m] = powers[m - 1] * s;
        for (int n = 0; 2 * n <= k; ++n) {
            const Complex left = std::conj(powers[n]);
            for (int m = n; n + m <= k; ++m) {
                const Complex term = left * powers[m];
                sums_[n * stride + m] += ExtendedComplex(term.real(), term.imag());
            }
        }
    }
    count_ += samples.size();
}

void MomentAccumulator::merge(const MomentAccumulator &other) {
    if (other.order_ != order_) throw std::invalid_argument("cannot merge accumulators of different order");
    for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i] += other.sums_[i];
    count_ += other.count_;
}

RawMomentMatrix MomentAccumulator::moments() const {
    if (count_ == 0) throw DataError("no samples accumulated");
    RawMomentMatrix result(order_, MomentSource::streaming, count_);
    const long double inv = 1.0L / static_cast<long double>(count_);
    const auto stride = static_cast<std::size_t>(order_ + 1);
    for (int n = 0; 2 * n <= order_; ++n) {
        for (int m = n; n + m <= order_; ++m) result.set_hermitian(n, m, sums_[n * stride + m] * inv);
    }
    result.set(0, 0, 1.0);
    return result;
}

RawMomentMatrix histogram_moments(const QuadratureHistogram &hist, int order) {
    if (hist.in_range() == 0) throw DataError("histogram has no in-range counts");
    const int b = hist.bins();
    const auto stride = static_cast<std::size_t>(order + 1);
    std::vector<Complex> weighted(stride * stride);
    std::vector<Complex> powers(stride);
    for (int ip = 0; ip < b; ++ip) {
        for (int ix = 0; ix < b; ++ix) {
            const auto c = hist.count(ix, ip);
            if (c == 0) continue;
            const Complex s(hist.center(ix), hist.center(ip));
            powers[0] = static_cast<double>(c);
            for (int m = 1; m <= order; ++m) powers[m] = powers[m - 1] * s;
            Complex conj_power = 1.0;
            for (int n = 0; 2 * n <= order; ++n) {
                for (int m = n; n + m <= order; ++m) weighted[n * stride + m] += conj_power * powers[m];
                conj_power *= std::conj(s);
            }
        }
    }
    RawMomentMatrix result(order, MomentSource::histogram, hist.in_range());
    const double inv = 1.0 / static_cast<double>(hist.in_range());
    for (int n = 0; 2 * n <= order; ++n) {
        for (int m = n; n + m <= order; ++m) result.set_hermitian(n, m, weighted[n * stride + m] * inv);
    }
    result.set(0, 0, 1.0);
    return result;
}

RawMomentMatrix streaming_moments(std::span<const ShotBatch> batches, int order) {
    MomentAccumulator acc(order);
    for (const auto &batch : batches) acc.add(batch.samples);
    return acc.moments();
}

double DifferenceGrid::sum() const {
    double total = 0;
    for (double v : values) total += v;
    return total;
}

DifferenceGrid difference_histogram(const QuadratureHistogram &signal, const QuadratureHistogram &reference) {
    if (!signal.same_binning(reference)) throw DataError("difference needs identical binning and range");
    if (signal.in_range() == 0 || reference.in_range() == 0) throw DataError("difference of an empty histogram");
    DifferenceGrid grid;
    grid.bins = signal.bins();
    grid.range = signal.range();
    grid.values.resize(signal.counts().size());
    const double ws = 1.0 / static_cast<double>(signal.in_range());
    const double wr = 1.0 / static_cast<double>(reference.in_range());
    const auto a = signal.counts();
    const auto b = reference.counts();
    for (std::size_t i = 0; i < a.size(); ++i) {
        grid.values[i] = static_cast<double>(a[i]) * ws - static_cast<double>(b[i]) * wr;
    }
    return grid;
}

namespace {

VacuumSigma pooled_sigma(double var_x, double var_p, double n) {
    VacuumSigma out;
    out.sigma_x = std::sqrt(var_x);
    out.sigma_p = std::sqrt(var_p);
    out.sigma = std::sqrt(0.5 * (var_x + var_p));
    // Var(s^2) ~ 2 sigma^4 / n for Gaussian data.
    const double se = std::sqrt(2.0 * (var_x * var_x + var_p * var_p) / n);
    out.non_gaussian = std::abs(var_x - var_p) > 3.0 * se;
    return out;
}

// Weighted least-squares fit of log(counts) = c0 + c1 x + c2 x^2 on a 1D
// marginal; returns sigma = sqrt(-1 / (2 c2)).
std::optional<double> fit_marginal(const std::vector<double> &counts, const QuadratureHistogram &hist) {
    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    const double peak = *std::max_element(counts.begin(), counts.end());
    int used = 0;
    for (int i = 0; i < hist.bins(); ++i) {
        // Bins with few counts have a skewed log; keep the well-populated core.
        if (counts[i] < std::max(20.0, 1e-3 * peak)) continue;
        const double x = hist.center(i);
        const Eigen::Vector3d basis(1.0, x, x * x);
        normal += counts[i] * basis * basis.transpose();
        rhs += counts[i] * std::log(counts[i]) * basis;
        ++used;
    }
    if (used < 3) return std::nullopt;
    const Eigen::Vector3d coeff = normal.ldlt().solve(rhs);
    if (!(coeff(2) < 0)) return std::nullopt;
    return std::sqrt(-1.0 / (2.0 * coeff(2)));
}

}  // namespace

VacuumSigma vacuum_sigma(const ShotBatch &batch) {
    const auto n = static_cast<double>(batch.count());
    if (batch.count() < 2) throw DataError("vacuum sigma needs at least two samples");
    double mx = 0, mp = 0;
    for (const auto &s : batch.samples) {
        mx += s.real();
        mp += s.imag();
    }
    mx /= n;
    mp /= n;
    double vx = 0, vp = 0;
    for (const auto &s : batch.samples) {
        vx += (s.real() - mx) * (s.real() - mx);
        vp += (s.imag() - mp) * (s.imag() - mp);
    }
    return pooled_sigma(vx / (n - 1), vp / (n - 1), n);
}

VacuumSigma vacuum_sigma(const QuadratureHistogram &hist) {
    const auto n = static_cast<double>(hist.in_range());
    if (hist.in_range() < 2) throw DataError("vacuum sigma needs at least two in-range counts");
    const int b = hist.bins();
    std::vector<double> marginal_x(b, 0.0), marginal_p(b, 0.0);
    for (int ip = 0; ip < b; ++ip) {
        for (int ix = 0; ix < b; ++ix) {
            const auto c = static_cast<double>(hist.count(ix, ip));
            marginal_x[ix] += c;
            marginal_p[ip] += c;
        }
    }
    auto variance = [&](const std::vector<double> &marginal) {
        double mean = 0, second = 0;
        for (int i = 0; i < b; ++i) {
            mean += marginal[i] * hist.center(i);
            second += marginal[i] * hist.center(i) * hist.center(i);
        }
        mean /= n;
        return (second / n - mean * mean) * n / (n - 1);
    };
    VacuumSigma out = pooled_sigma(variance(marginal_x), variance(marginal_p), n);
    const auto fx = fit_marginal(marginal_x, hist);
    const auto fp = fit_marginal(marginal_p, hist);
    if (fx && fp) {
        out.fitted_sigma = std::sqrt(0.5 * (*fx * *fx + *fp * *fp));
        if (std::abs(*out.fitted_sigma - out.sigma) > 0.01 * out.sigma) out.non_gaussian = true;
    }
    return out;
}

MomentErrors batch_errors(std::span<const RawMomentMatrix> per_batch) {
    if (per_batch.size() < 2) throw DataError("batch errors need at least two batches");
    const int order = per_batch.front().order();
    const auto b = static_cast<double>(per_batch.size());
    MomentErrors errors(order, static_cast<int>(per_batch.size()));
    per_batch.front().for_each_index([&](int n, int m) {
        Complex mean{};
        for (const auto &batch : per_batch) {
            if (batch.order() != order) throw DataError("batches differ in moment order");
            mean += batch(n, m);
        }
        mean /= b;
        double spread = 0;
        for (const auto &batch : per_batch) spread += std::norm(batch(n, m) - mean);
        errors.set(n, m, std::sqrt(spread / (b - 1) / b));
    });
    return errors;
}

MomentErrors batch_errors(std::span<const ShotBatch> batches, int order) {
    std::vector<RawMomentMatrix> per_batch;
    per_batch.reserve(batches.size());
    for (const auto &batch : batches) {
        MomentAccumulator acc(order);
        acc.add(batch.samples);
        per_batch.push_back(acc.moments());
    }
    return batch_errors(per_batch);
}

std::vector<RawMomentMatrix> split_moments(std::span<const Complex> samples, int order, int batches) {
    if (batches < 1 || samples.size() < static_cast<std::size_t>(batches)) {
        throw DataError("cannot split " + std::to_string(samples.size()) + " samples into " +
                        std::to_string(batches) + " batches");
    }
    const std::size_t size = samples.size() / static_cast<std::size_t>(batches);
    std::vector<RawMomentMatrix> out;
    out.reserve(static_cast<std::size_t>(batches));
    for (int i = 0; i < batches; ++i) {
        const std::size_t begin = static_cast<std::size_t>(i) * size;
        const std::size_t len = i + 1 == batches ? samples.size() - begin : size;
        MomentAccumulator acc(order);
        acc.add(samples.subspan(begin, len));
        out.push_back(acc.moments());
    }
    return out;
}

RawMomentMatrix merge_moments(std::span<const RawMomentMatrix> per_batch) {
    if (per_batch.empty()) throw DataError("nothing to merge");
    const int order = per_batch.front().order();
    RawMomentMatrix result(order, per_batch.front().source());
    std::uint64_t total = 0;
    for (const auto &b : per_batch) {
        if (b.order() != order) throw DataError("batches differ in moment order");
        total += b.count();
    }
    if (total == 0) throw DataError("merged batches carry no samples");
    result.for_each_index([&](int n, int m) {
        if (n > m) return;
        ExtendedComplex sum{};
        for (const auto &b : per_batch) sum += static_cast<long double>(b.count()) * b.extended(n, m);
        result.set_hermitian(n, m, sum / static_cast<long double>(total));
    });
    result.set(0, 0, 1.0);
    result.set_count(total);
    return result;
}

}  // namespace hettomo
