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

#include "hettomo/serialization.hpp"

#include <bit>
#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>

namespace hettomo {

namespace {

template <typename T>
T to_little_endian(T value) {
    if constexpr (std::endian::native == std::endian::little) {
        return value;
    } else {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
}

template <typename T>
void write_le(std::ostream &out, std::span<const T> values) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char *>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    } else {
        for (T v : values) {
            const T le = to_little_endian(v);
            out.write(reinterpret_cast<const char *>(&le), sizeof(T));
        }
    }
}

template <typename T>
void read_le(std::istream &in, std::span<T> values) {
    in.read(reinterpret_cast<char *>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    if constexpr (std::endian::native != std::endian::little) {
        for (T &v : values) v = to_little_endian(v);
    }
}

std::ofstream open_out(const std::filesystem::path &path, std::ios::openmode mode = {}) {
    std::ofstream out(path, mode | std::ios::out | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path &path, std::ios::openmode mode = {}) {
    std::ifstream in(path, mode | std::ios::in);
    if (!in) throw DataError("cannot read " + path.string());
    return in;
}

template <typename Fn>
auto parse_or_throw(const char *what, Fn &&fn) {
    try {
        return fn();
    } catch (const Json::exception &e) {
        throw DataError(std::string("malformed ") + what + ": " + e.what());
    }
}

void fill_table(MomentTable &table, const Json &entries) {
    const int k = table.order();
    std::vector<bool> seen(static_cast<std::size_t>((k + 1) * (k + 1)), false);
    for (const auto &e : entries) {
        const int n = e.at("n").get<int>();
        const int m = e.at("m").get<int>();
        if (!table.contains(n, m)) throw DataError("moment entry outside declared order");
        seen[static_cast<std::size_t>(n * (k + 1) + m)] = true;
        table.set(n, m, complex_from_json(e.at("value")));
    }
    table.for_each_index([&](int n, int m) {
        if (!seen[static_cast<std::size_t>(n * (k + 1) + m)]) {
            throw DataError("moment entry (" + std::to_string(n) + "," + std::to_string(m) + ") is missing");
        }
    });
}

Json table_entries(const MomentTable &table) {
    Json entries = Json::array();
    table.for_each_index([&](int n, int m) { entries.push_back({{"n", n}, {"m", m}, {"value", complex_to_json(table(n, m))}}); });
    return entries;
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json &j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw DataError("complex value must be an [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

Json state_to_json(const FockState &state) {
    Json j;
    j["cutoff"] = state.cutoff();
    if (state.is_pure()) {
        j["representation"] = "pure";
        Json amps = Json::array();
        for (Eigen::Index k = 0; k < state.amplitudes()->size(); ++k) amps.push_back(complex_to_json((*state.amplitudes())(k)));
        j["amplitudes"] = std::move(amps);
    } else {
        j["representation"] = "mixed";
        Json rows = Json::array();
        for (int r = 0; r < state.dimension(); ++r) {
            Json row = Json::array();
            for (int c = 0; c < state.dimension(); ++c) row.push_back(complex_to_json(state.density()(r, c)));
            rows.push_back(std::move(row));
        }
        j["density"] = std::move(rows);
    }
    return j;
}

FockState state_from_json(const Json &j) {
    return parse_or_throw("state", [&] {
        const int cutoff = j.at("cutoff").get<int>();
        const auto repr = j.at("representation").get<std::string>();
        if (repr == "pure") {
            const auto &amps = j.at("amplitudes");
            if (static_cast<int>(amps.size()) != cutoff + 1) throw DataError("amplitude count does not match cutoff");
            Eigen::VectorXcd c(cutoff + 1);
            for (int k = 0; k <= cutoff; ++k) c(k) = complex_from_json(amps[k]);
            return FockState::pure(std::move(c));
        }
        if (repr == "mixed") {
            const auto &rows = j.at("density");
            if (static_cast<int>(rows.size()) != cutoff + 1) throw DataError("density rows do not match cutoff");
            Eigen::MatrixXcd rho(cutoff + 1, cutoff + 1);
            for (int r = 0; r <= cutoff; ++r) {
                if (static_cast<int>(rows[r].size()) != cutoff + 1) throw DataError("density row has wrong length");
                for (int c = 0; c <= cutoff; ++c) rho(r, c) = complex_from_json(rows[r][c]);
            }
            return FockState::mixed(std::move(rho));
        }
        throw DataError("unknown state representation '" + repr + "'");
    });
}

Json moments_to_json(const MomentMatrix &moments) {
    return {{"order", moments.order()}, {"ordering", std::string(to_string(moments.ordering()))},
            {"entries", table_entries(moments)}};
}

MomentMatrix moments_from_json(const Json &j) {
    return parse_or_throw("moment matrix", [&] {
        MomentMatrix m(j.at("order").get<int>(), ordering_from_string(j.at("ordering").get<std::string>()));
        fill_table(m, j.at("entries"));
        return m;
    });
}

Json raw_moments_to_json(const RawMomentMatrix &moments) {
    return {{"order", moments.order()}, {"source", std::string(to_string(moments.source()))},
            {"count", moments.count()}, {"entries", table_entries(moments)}};
}

RawMomentMatrix raw_moments_from_json(const Json &j) {
    return parse_or_throw("raw moment matrix", [&] {
        RawMomentMatrix m(j.at("order").get<int>(), moment_source_from_string(j.at("source").get<std::string>()),
                          j.at("count").get<std::uint64_t>());
        fill_table(m, j.at("entries"));
        return m;
    });
}

Json errors_to_json(const MomentErrors &errors) {
    Json entries = Json::array();
    for (int total = 0; total <= errors.order(); ++total) {
        for (int n = 0; n <= total; ++n) entries.push_back({{"n", n}, {"m", total - n}, {"error", errors(n, total - n)}});
    }
    return {{"order", errors.order()}, {"batches", errors.batches()}, {"entries", std::move(entries)}};
}

MomentErrors errors_from_json(const Json &j) {
    return parse_or_throw("moment errors", [&] {
        MomentErrors errors(j.at("order").get<int>(), j.at("batches").get<int>());
        for (const auto &e : j.at("entries")) errors.set(e.at("n").get<int>(), e.at("m").get<int>(), e.at("error").get<double>());
        return errors;
    });
}

Json report_to_json(const InversionReport &report) {
    return {{"format", "hettomo-inversion"},
            {"version", 1},
            {"gain", report.gain},
            {"moments", moments_to_json(report.moments)},
            {"errors", errors_to_json(report.errors)},
            {"noise", moments_to_json(report.noise)},
            {"provenance",
             {{"signal_count", report.signal_count},
              {"reference_count", report.reference_count},
              {"bootstrap_samples", report.bootstrap_samples}}}};
}

InversionReport report_from_json(const Json &j) {
    return parse_or_throw("inversion report", [&] {
        InversionReport r;
        r.gain = j.at("gain").get<double>();
        r.moments = moments_from_json(j.at("moments"));
        r.errors = errors_from_json(j.at("errors"));
        r.noise = moments_from_json(j.at("noise"));
        const auto &p = j.at("provenance");
        r.signal_count = p.value("signal_count", std::uint64_t{0});
        r.reference_count = p.value("reference_count", std::uint64_t{0});
        r.bootstrap_samples = p.value("bootstrap_samples", 0);
        if (r.moments.ordering() != Ordering::normal) throw DataError("report moments must be normal ordered");
        return r;
    });
}

void save_histogram(const QuadratureHistogram &hist, const std::filesystem::path &path, const Json &lineage,
                    const std::string &units) {
    const Json header = {{"format", "hettomo-histogram"}, {"version", 1},           {"bins", hist.bins()},
                         {"range", hist.range()},          {"units", units},        {"total", hist.total()},
                         {"overflow", hist.overflow()},    {"lineage", lineage}};
    auto out = open_out(path, std::ios::binary);
    out << header.dump() << '\n';
    write_le(out, hist.counts());
    if (!out) throw DataError("failed writing " + path.string());
}

QuadratureHistogram load_histogram(const std::filesystem::path &path, Json *header_out) {
    auto in = open_in(path, std::ios::binary);
    std::string line;
    if (!std::getline(in, line)) throw DataError("histogram file " + path.string() + " has no header");
    const Json header = parse_or_throw("histogram header", [&] { return Json::parse(line); });
    return parse_or_throw("histogram header", [&] {
        if (header.at("format") != "hettomo-histogram") throw DataError(path.string() + " is not a histogram file");
        const int bins = header.at("bins").get<int>();
        const double range = header.at("range").get<double>();
        if (bins < 1) throw DataError("histogram header declares no bins");
        std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins) * bins);
        read_le(in, std::span<std::uint64_t>(counts));
        if (!in) throw DataError("histogram file " + path.string() + " is truncated");
        auto hist = QuadratureHistogram::from_counts(bins, range, std::move(counts), header.at("overflow").get<std::uint64_t>());
        if (hist.total() != header.at("total").get<std::uint64_t>()) {
            throw DataError("histogram total does not match its counts");
        }
        if (header_out) *header_out = header;
        return hist;
    });
}

void export_histogram_csv(const QuadratureHistogram &hist, const std::filesystem::path &path) {
    auto out = open_out(path);
    out << "x,p,count\n";
    out.precision(17);
    for (int ip = 0; ip < hist.bins(); ++ip) {
        for (int ix = 0; ix < hist.bins(); ++ix) {
            if (const auto c = hist.count(ix, ip)) out << hist.center(ix) << ',' << hist.center(ip) << ',' << c << '\n';
        }
    }
}

void save_wigner(const WignerGrid &grid, const std::filesystem::path &csv_path) {
    auto out = open_out(csv_path);
    out << "X,P,W\n";
    out.precision(17);
    for (int ip = 0; ip < grid.resolution; ++ip) {
        for (int ix = 0; ix < grid.resolution; ++ix) {
            out << grid.coordinate(ix) << ',' << grid.coordinate(ip) << ',' << grid.at(ix, ip) << '\n';
        }
    }
    auto header_path = csv_path;
    header_path += ".json";
    write_json_file({{"extent", grid.extent}, {"resolution", grid.resolution}, {"truncation_order", grid.truncation}},
                    header_path);
}

Json read_json_file(const std::filesystem::path &path) {
    auto in = open_in(path);
    return parse_or_throw("JSON file", [&] { return Json::parse(in); });
}

void write_json_file(const Json &j, const std::filesystem::path &path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("failed writing " + path.string());
}

void save_shot_batch(const ShotBatch &batch, const std::filesystem::path &stem) {
    auto data_path = stem;
    data_path += ".f64";
    auto meta_path = stem;
    meta_path += ".json";
    std::vector<double> flat;
    flat.reserve(batch.samples.size() * 2);
    for (const auto &s : batch.samples) {
        flat.push_back(s.real());
        flat.push_back(s.imag());
    }
    auto out = open_out(data_path, std::ios::binary);
    write_le(out, std::span<const double>(flat));
    if (!out) throw DataError("failed writing " + data_path.string());
    write_json_file({{"format", "hettomo-shots"},
                     {"version", 1},
                     {"count", batch.count()},
                     {"seed", batch.seed},
                     {"stream", batch.stream},
                     {"units", batch.units},
                     {"gain", batch.gain},
                     {"data", data_path.filename().string()}},
                    meta_path);
}

ShotBatch load_shot_batch(const std::filesystem::path &stem) {
    auto meta_path = stem;
    meta_path += ".json";
    const Json meta = read_json_file(meta_path);
    ShotBatch batch;
    const auto count = parse_or_throw("shot metadata", [&] {
        batch.seed = meta.at("seed").get<std::uint64_t>();
        batch.stream = meta.at("stream").get<std::uint64_t>();
        batch.units = meta.at("units").get<std::string>();
        batch.gain = meta.at("gain").get<double>();
        return meta.at("count").get<std::size_t>();
    });
    auto data_path = stem;
    data_path += ".f64";
    auto in = open_in(data_path, std::ios::binary);
    std::vector<double> flat(count * 2);
    read_le(in, std::span<double>(flat));
    if (!in) throw DataError("shot file " + data_path.string() + " is truncated");
    batch.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) batch.samples[i] = {flat[2 * i], flat[2 * i + 1]};
    return batch;
}

}  // namespace hettomo
