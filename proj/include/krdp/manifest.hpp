// Copyright 2026 The KRDP Authors
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
#include <string>
#include <string_view>
#include <vector>

#include "krdp/digest.hpp"
#include "krdp/walk.hpp"

namespace krdp {

/// One file of the trusted baseline.
struct FileRecord {
  std::string path;  // relative, '/'-separated
  std::uint64_t size = 0;
  Digest digest;
  std::int64_t mtime = 0;  // informational only, never used for verdicts

  friend bool operator==(const FileRecord&, const FileRecord&) = default;
};

/// The trusted view of a directory tree. Records are kept sorted strictly
/// ascending by byte-wise path.
struct Manifest {
  static constexpr int kFormatVersion = 1;

  int version = kFormatVersion;
  std::string root_label;
  std::int64_t created_at = 0;
  std::vector<FileRecord> records;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// Throws Error(kMalformedManifest) when records are unsorted, duplicated,
/// carry an invalid path, or the label contains a line break.
void validate(const Manifest& m);

/// Binary search; nullptr when absent.
const FileRecord* lookup(const Manifest& m, std::string_view path);

struct SnapshotOptions {
  ExcludeSet excludes;
  /// Defaults to the root path as given.
  std::optional<std::string> root_label;
  /// Defaults to the current wall-clock time.
  std::optional<std::int64_t> created_at;
  /// 0 picks a value from the hardware concurrency.
  unsigned threads = 0;
};

struct SnapshotResult {
  Manifest manifest;
  /// Files and directories that could not be read; they are absent from the
  /// manifest. Non-empty means the snapshot is partial.
  std::vector<std::string> unreadable;
  SkipSummary skipped;

  bool partial() const { return !unreadable.empty(); }
};

/// Walks and hashes every regular file under root. Hashing runs in parallel;
/// the output order does not depend on scheduling. Throws
/// Error(kRootUnreadable) if root cannot be listed.
SnapshotResult snapshot(const std::filesystem::path& root,
                        const SnapshotOptions& options = {});

/// Canonical text form:
///
///   KRDP-MANIFEST v1
///   root=<label>
///   created=<epoch>
///   count=<N>
///   <digest>\t<size>\t<mtime>\t<path>      (N times)
std::string write_manifest(const Manifest& m);

/// Strict inverse of write_manifest. Throws Error(kMalformedManifest).
Manifest read_manifest(std::string_view data);

Manifest load_manifest_file(const std::filesystem::path& path);
void save_manifest_file(const std::filesystem::path& path, const Manifest& m);

std::int64_t epoch_now();

}  // namespace krdp
