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
#include <optional>
#include <span>
#include <vector>

#include "hettomo/measurement.hpp"
#include "hettomo/moments.hpp"

namespace hettomo {

/// B x B counts over [-R, R)^2 in detector units. Bins are half-open,
/// [lo, lo + width); a sample exactly at the origin lands in bin B/2 along
/// each axis. Counts are stored row-major with the P index as the row.
class QuadratureHistogram {
   public:
    QuadratureHistogram(int bins, double range);

    int bins() const { return bins_; }
    double range() const { return range_; }
    double bin_width() const { return 2.0 * range_ / bins_; }
    std::uint64_t total() const { return total_; }
    std::uint64_t overflow() const { return overflow_; }
    std::uint64_t in_range() const { return total_ - overflow_; }

    std::uint64_t count(int ix, int ip) const { return counts_[static_cast<std::size_t>(ip) * bins_ + ix]; }
    std::span<const std::uint64_t> counts() const { return counts_; }

    /// Center of bin i along either axis.
    double center(int i) const { return -range_ + (i + 0.5) * bin_width(); }

    void add(Complex s);
    void merge(const QuadratureHistogram &other);

    bool same_binning(const QuadratureHistogram &other) const;

    /// True once more than 0.1% of all samples fell outside the range.
    bool overflow_warning() const { return overflow_ * 1000 > total_; }

    /// Rebuilds a histogram from stored counts.
    static QuadratureHistogram from_counts(int bins, double range, std::vector<std::uint64_t> counts,
                                           std::uint64_t overflow);

   private:
    int bins_;
    double range_;
    double inverse_width_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
    std::uint64_t overflow_ = 0;
};

void accumulate(QuadratureHistogram &hist, const ShotBatch &batch);

/// Single-pass sums of (S^*)^n S^m; a mergeable monoid.
class MomentAccumulator {
   public:
    explicit MomentAccumulator(int order);

    int order() const { return order_; }
    std::uint64_t count() const { return count_; }

    void add(Complex s);
    void add(std::span<const Complex> samples);
    void merge(const MomentAccumulator &other);

    /// Sample averages; s(0,0) = 1. Requires at least one sample.
    RawMomentMatrix moments() const;

   private:
    int order_;
    std::uint64_t count_ = 0;
    // sums_[n * (order + 1) + m] for n <= m, n + m <= order
    std::vector<ExtendedComplex> sums_;
};

/// Midpoint-rule moments over bin centers, normalized by the in-range count.
RawMomentMatrix histogram_moments(const QuadratureHistogram &hist, int order);

RawMomentMatrix streaming_moments(std::span<const ShotBatch> batches, int order);

/// Per-bin probability mass difference p_signal - p_reference.
struct DifferenceGrid {
    int bins = 0;
    double range = 0;
    std::vector<double> values;  // row-major, P index as row

    double at(int ix, int ip) const { return values[static_cast<std::size_t>(ip) * bins + ix]; }
    double sum() const;
};

DifferenceGrid difference_histogram(const QuadratureHistogram &signal, const QuadratureHistogram &reference);

struct VacuumSigma {
    double sigma = 0;  // pooled per-quadrature standard deviation
    double sigma_x = 0;
    double sigma_p = 0;
    std::optional<double> fitted_sigma;  // Gaussian fit to the marginals (histograms only)
    /// X and P variances differ by more than 3 standard errors, or the fit
    /// disagrees with the sample estimate by more than 1%.
    bool non_gaussian = false;
};

VacuumSigma vacuum_sigma(const ShotBatch &batch);
VacuumSigma vacuum_sigma(const QuadratureHistogram &hist);

/// Batch-means standard error of each entry from per-batch moment estimates.
/// The complex error combines the spreads of the real and imaginary parts.
MomentErrors batch_errors(std::span<const RawMomentMatrix> per_batch);
MomentErrors batch_errors(std::span<const ShotBatch> batches, int order);

/// Splits samples into `batches` contiguous equal parts (the last absorbs
/// the remainder) and returns their moment matrices.
std::vector<RawMomentMatrix> split_moments(std::span<const Complex> samples, int order, int batches);

/// Count-weighted merge of per-batch moments.
RawMomentMatrix merge_moments(std::span<const RawMomentMatrix> per_batch);

}  // namespace hettomo
