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
#include <string_view>
#include <vector>

#include "hettomo/errors.hpp"

namespace hettomo {

using ExtendedComplex = std::complex<long double>;

/// Operator ordering of a moment table. Signal moments are normal ordered,
/// <(a^dag)^n a^m>; amplifier noise moments are antinormal, <h^n (h^dag)^m>.
enum class Ordering { normal, antinormal };

std::string_view to_string(Ordering ordering);
Ordering ordering_from_string(std::string_view text);

/// Complex values v(n, m) for all 0 <= n + m <= order, stored densely in an
/// (order + 1) x (order + 1) array. Entries with n + m > order are unused.
class MomentTable {
   public:
    MomentTable() = default;
    explicit MomentTable(int order);

    int order() const { return order_; }

    Complex operator()(int n, int m) const {
        const auto &v = values_[index(n, m)];
        return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
    }

    /// Entries are held in extended precision so that chained forward and
    /// inverse transforms do not lose the digits cancelled at high order.
    ExtendedComplex extended(int n, int m) const { return values_[index(n, m)]; }

    /// Stores v at (n, m) and conj(v) at (m, n). Diagonal entries keep only
    /// their real part.
    void set_hermitian(int n, int m, ExtendedComplex v);

    /// Stores v at (n, m) only.
    void set(int n, int m, ExtendedComplex v) { values_[index(n, m)] = v; }

    bool contains(int n, int m) const { return n >= 0 && m >= 0 && n + m <= order_; }

    /// Largest |v(n,m) - conj(v(m,n))| over the table.
    double hermitian_defect() const;

    /// Largest absolute entry difference; both tables must share the order.
    double max_abs_difference(const MomentTable &other) const;

    double max_abs() const;

    template <typename Fn>
    void for_each_index(Fn &&fn) const {
        for (int total = 0; total <= order_; ++total) {
            for (int n = 0; n <= total; ++n) {
                fn(n, total - n);
            }
        }
    }

   private:
    std::size_t index(int n, int m) const;

    int order_ = 0;
    std::vector<ExtendedComplex> values_;
};

/// Moments of a quantum mode, tagged with their operator ordering.
class MomentMatrix : public MomentTable {
   public:
    MomentMatrix() = default;
    MomentMatrix(int order, Ordering ordering);

    Ordering ordering() const { return ordering_; }

    /// The moments of the vacuum: 1 at (0,0) for normal ordering; for
    /// antinormal ordering n! on the diagonal.
    static MomentMatrix vacuum(int order, Ordering ordering);

   private:
    Ordering ordering_ = Ordering::normal;
};

enum class MomentSource { streaming, histogram, model };

std::string_view to_string(MomentSource source);
MomentSource moment_source_from_string(std::string_view text);

/// Raw detector moments <(S^dag)^n S^m> of a measured record.
class RawMomentMatrix : public MomentTable {
   public:
    RawMomentMatrix() = default;
    RawMomentMatrix(int order, MomentSource source, std::uint64_t count = 0)
        : MomentTable(order), source_(source), count_(count) {}

    MomentSource source() const { return source_; }
    std::uint64_t count() const { return count_; }
    void set_count(std::uint64_t count) { count_ = count; }

   private:
    MomentSource source_ = MomentSource::model;
    std::uint64_t count_ = 0;
};

/// Real standard error per (n, m) entry.
class MomentErrors {
   public:
    MomentErrors() = default;
    MomentErrors(int order, int batches);

    int order() const { return order_; }
    int batches() const { return batches_; }
    double operator()(int n, int m) const { return values_[index(n, m)]; }
    void set(int n, int m, double v);

    /// Root mean square of the errors over all entries with n + m == total.
    double rms_of_order(int total) const;

    template <typename Fn>
    void for_each_index(Fn &&fn) const {
        for (int total = 0; total <= order_; ++total) {
            for (int n = 0; n <= total; ++n) fn(n, total - n);
        }
    }

   private:
    std::size_t index(int n, int m) const;

    int order_ = 0;
    int batches_ = 0;
    std::vector<double> values_;
};

}  // namespace hettomo
