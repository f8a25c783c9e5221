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

#include "hettomo/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hettomo {

std::string_view to_string(Ordering ordering) {
    return ordering == Ordering::normal ? "normal" : "antinormal";
}

Ordering ordering_from_string(std::string_view text) {
    if (text == "normal") return Ordering::normal;
    if (text == "antinormal") return Ordering::antinormal;
    throw DataError("unknown moment ordering '" + std::string(text) + "'");
}

std::string_view to_string(MomentSource source) {
    switch (source) {
        case MomentSource::streaming:
            return "streaming";
        case MomentSource::histogram:
            return "histogram";
        case MomentSource::model:
            return "model";
    }
    return "model";
}

MomentSource moment_source_from_string(std::string_view text) {
    if (text == "streaming") return MomentSource::streaming;
    if (text == "histogram") return MomentSource::histogram;
    if (text == "model") return MomentSource::model;
    throw DataError("unknown moment source '" + std::string(text) + "'");
}

MomentTable::MomentTable(int order) : order_(order) {
    if (order < 0) throw std::invalid_argument("moment order must be non-negative");
    values_.assign(static_cast<std::size_t>((order + 1) * (order + 1)), ExtendedComplex{});
}

std::size_t MomentTable::index(int n, int m) const {
    if (!contains(n, m)) {
        throw std::out_of_range("moment index (" + std::to_string(n) + "," + std::to_string(m) +
                                ") outside order " + std::to_string(order_));
    }
    return static_cast<std::size_t>(n * (order_ + 1) + m);
}

void MomentTable::set_hermitian(int n, int m, ExtendedComplex v) {
    if (n == m) {
        values_[index(n, m)] = ExtendedComplex(v.real(), 0.0L);
        return;
    }
    values_[index(n, m)] = v;
    values_[index(m, n)] = std::conj(v);
}

double MomentTable::hermitian_defect() const {
    double worst = 0;
    for_each_index([&](int n, int m) { worst = std::max(worst, std::abs((*this)(n, m) - std::conj((*this)(m, n)))); });
    return worst;
}

double MomentTable::max_abs_difference(const MomentTable &other) const {
    if (other.order_ != order_) throw std::invalid_argument("moment tables differ in order");
    double worst = 0;
    for_each_index([&](int n, int m) { worst = std::max(worst, std::abs((*this)(n, m) - other(n, m))); });
    return worst;
}

double MomentTable::max_abs() const {
    double worst = 0;
    for_each_index([&](int n, int m) { worst = std::max(worst, std::abs((*this)(n, m))); });
    return worst;
}

MomentMatrix::MomentMatrix(int order, Ordering ordering) : MomentTable(order), ordering_(ordering) {}

MomentMatrix MomentMatrix::vacuum(int order, Ordering ordering) {
    MomentMatrix result(order, ordering);
    result.set(0, 0, 1.0);
    if (ordering == Ordering::antinormal) {
        double factorial = 1;
        for (int n = 1; 2 * n <= order; ++n) {
            factorial *= n;
            result.set(n, n, factorial);
        }
    }
    return result;
}

MomentErrors::MomentErrors(int order, int batches) : order_(order), batches_(batches) {
    if (order < 0) throw std::invalid_argument("moment order must be non-negative");
    values_.assign(static_cast<std::size_t>((order + 1) * (order + 1)), 0.0);
}

std::size_t MomentErrors::index(int n, int m) const {
    if (n < 0 || m < 0 || n + m > order_) throw std::out_of_range("moment error index outside order");
    return static_cast<std::size_t>(n * (order_ + 1) + m);
}

void MomentErrors::set(int n, int m, double v) {
    if (!(v >= 0)) throw std::invalid_argument("moment errors must be non-negative");
    values_[index(n, m)] = v;
}

double MomentErrors::rms_of_order(int total) const {
    if (total < 0 || total > order_) throw std::out_of_range("order outside error table");
    double sum = 0;
    for (int n = 0; n <= total; ++n) {
        double e = (*this)(n, total - n);
        sum += e * e;
    }
    return std::sqrt(sum / (total + 1));
}

}  // namespace hettomo
