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

#include <filesystem>
#include <string>
#include <vector>

#include "hettomo/serialization.hpp"

namespace hettomo::pipeline {

/// Lower-case hex SHA-256 of a file's bytes or of a string.
std::string sha256_file(const std::filesystem::path &path);
std::string sha256_text(const std::string &text);

/// Collects a command's outputs in a sibling directory and moves them into
/// place only on commit(); an uncommitted staging directory is deleted.
class StagingDirectory {
   public:
    explicit StagingDirectory(std::filesystem::path destination);
    ~StagingDirectory();
    StagingDirectory(const StagingDirectory &) = delete;
    StagingDirectory &operator=(const StagingDirectory &) = delete;

    const std::filesystem::path &path() const { return staging_; }
    const std::filesystem::path &destination() const { return destination_; }

    /// Replaces any previous destination with the staged tree.
    void commit();

   private:
    std::filesystem::path destination_;
    std::filesystem::path staging_;
    bool committed_ = false;
};

/// [{"path", "bytes", "sha256"}] for every regular file under `root`
/// (relative, '/'-separated, sorted), skipping manifest.json itself.
Json describe_artifacts(const std::filesystem::path &root);

/// Library and compiler versions recorded in manifests.
Json version_info();

struct ManifestInput {
    std::string command;
    Json config;    // resolved config or command arguments
    Json derived;   // command-specific results
    double wall_seconds = 0;
    std::string started_utc;
};

/// Writes `<root>/manifest.json` listing every artifact under root.
Json write_manifest(const std::filesystem::path &root, const ManifestInput &input);

/// Paths whose size or checksum no longer match the manifest.
std::vector<std::string> verify_manifest(const std::filesystem::path &root);

std::string utc_timestamp();

}  // namespace hettomo::pipeline
