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

#include "hettomo/pipeline/artifacts.hpp"

#include <openssl/evp.h>
#include <openssl/opensslv.h>
#include <unistd.h>

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <system_error>

#include "hettomo/pipeline/config.hpp"

#ifndef HETTOMO_VERSION
#define HETTOMO_VERSION "unknown"
#endif

namespace hettomo::pipeline {

namespace {

using DigestContext = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

DigestContext new_digest() {
    DigestContext ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("cannot initialize SHA-256");
    return ctx;
}

std::string finish_digest(EVP_MD_CTX *ctx) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_DigestFinal_ex(ctx, digest.data(), &length) != 1) throw Error("SHA-256 finalization failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 15]);
    }
    return out;
}

}  // namespace

std::string sha256_text(const std::string &text) {
    auto ctx = new_digest();
    EVP_DigestUpdate(ctx.get(), text.data(), text.size());
    return finish_digest(ctx.get());
}

std::string sha256_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path.string() + "' for hashing");
    auto ctx = new_digest();
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), buffer.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    return finish_digest(ctx.get());
}

StagingDirectory::StagingDirectory(std::filesystem::path destination) : destination_(std::move(destination)) {
    if (destination_.filename().empty()) destination_ = destination_.parent_path();
    const auto parent = destination_.has_parent_path() ? destination_.parent_path() : std::filesystem::path(".");
    std::filesystem::create_directories(parent);
    staging_ = parent / ("." + destination_.filename().string() + ".partial-" + std::to_string(::getpid()));
    std::filesystem::remove_all(staging_);
    std::filesystem::create_directories(staging_);
}

StagingDirectory::~StagingDirectory() {
    if (!committed_) {
        std::error_code ignored;
        std::filesystem::remove_all(staging_, ignored);
    }
}

void StagingDirectory::commit() {
    std::filesystem::remove_all(destination_);
    std::filesystem::rename(staging_, destination_);
    committed_ = true;
}

Json describe_artifacts(const std::filesystem::path &root) {
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) files.push_back(std::filesystem::relative(entry.path(), root));
    }
    std::sort(files.begin(), files.end());
    Json out = Json::array();
    for (const auto &rel : files) {
        if (rel == "manifest.json") continue;
        out.push_back({{"path", rel.generic_string()},
                       {"bytes", std::filesystem::file_size(root / rel)},
                       {"sha256", sha256_file(root / rel)}});
    }
    return out;
}

Json version_info() {
    return {
        {"hettomo", HETTOMO_VERSION},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"openssl", OPENSSL_VERSION_TEXT},
        {"compiler", __VERSION__},
    };
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char text[32];
    std::strftime(text, sizeof text, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return text;
}

Json write_manifest(const std::filesystem::path &root, const ManifestInput &input) {
    Json manifest{
        {"format", "hettomo-manifest"},
        {"version", 1},
        {"command", input.command},
        {"config", input.config},
        {"config_sha256", sha256_text(input.config.dump())},
        {"versions", version_info()},
        {"timing", {{"started_utc", input.started_utc}, {"wall_seconds", input.wall_seconds}}},
        {"derived", input.derived},
        {"artifacts", describe_artifacts(root)},
    };
    write_json_file(manifest, root / "manifest.json");
    return manifest;
}

std::vector<std::string> verify_manifest(const std::filesystem::path &root) {
    const Json manifest = read_json_file(root / "manifest.json");
    std::vector<std::string> bad;
    for (const auto &entry : manifest.at("artifacts")) {
        const auto rel = entry.at("path").get<std::string>();
        const auto file = root / rel;
        if (!std::filesystem::is_regular_file(file) ||
            std::filesystem::file_size(file) != entry.at("bytes").get<std::uintmax_t>() ||
            sha256_file(file) != entry.at("sha256").get<std::string>()) {
            bad.push_back(rel);
        }
    }
    return bad;
}

}  // namespace hettomo::pipeline
