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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "krdp/backup.hpp"
#include "krdp/digest.hpp"
#include "krdp/manifest.hpp"
#include "krdp/signatures.hpp"

namespace krdp {

/// Result of hashing a live file and comparing it with its baseline digest.
struct PatternVerdict {
  bool equal = false;
  Digest baseline_digest;
  Digest observed_digest;

  friend bool operator==(const PatternVerdict&, const PatternVerdict&) = default;
};

/// Hashes `observed_file` and compares the two digests character by
/// character on their lowercase hex forms.
PatternVerdict pattern_check(const Digest& baseline_digest,
                             const std::filesystem::path& observed_file);

/// Byte-level comparison of a clean copy against a possibly tainted file.
/// Files of different length are never equal; when one is a strict prefix of
/// the other, first_divergence is the shorter length.
struct DiffReport {
  bool equal = true;
  std::uint64_t length_clean = 0;
  std::uint64_t length_tainted = 0;
  std::optional<std::uint64_t> first_divergence;

  std::int64_t size_delta() const {
    return static_cast<std::int64_t>(length_tainted) -
           static_cast<std::int64_t>(length_clean);
  }

  friend bool operator==(const DiffReport&, const DiffReport&) = default;
};

/// Streams both files in lockstep; neither is buffered whole.
DiffReport byte_compare(const std::filesystem::path& clean,
                        const std::filesystem::path& tainted);

enum class FindingStatus { kClean, kModified, kMissing, kUnknown, kSignatureHit };

inline constexpr std::array<FindingStatus, 5> kAllStatuses = {
    FindingStatus::kClean, FindingStatus::kModified, FindingStatus::kMissing,
    FindingStatus::kUnknown, FindingStatus::kSignatureHit};

/// "clean", "modified", "missing", "unknown", "sighit".
std::string_view status_token(FindingStatus s);
std::optional<FindingStatus> parse_status(std::string_view token);

struct ScanFinding {
  std::string path;
  FindingStatus status = FindingStatus::kClean;
  std::optional<Digest> observed_digest;
  std::optional<Digest> baseline_digest;
  std::optional<std::string> signature_name;
  /// observed size minus baseline size, when both sides were read.
  std::optional<std::int64_t> size_delta;
  /// Present for content changes when a backup copy was available.
  std::optional<DiffReport> diff;
  /// Human annotation: read errors and informational signature targets.
  std::optional<std::string> note;

  friend bool operator==(const ScanFinding&, const ScanFinding&) = default;
};

struct StatusCounts {
  std::size_t clean = 0;
  std::size_t modified = 0;
  std::size_t missing = 0;
  std::size_t unknown = 0;
  std::size_t sighit = 0;

  std::size_t& operator[](FindingStatus s);
  std::size_t operator[](FindingStatus s) const;
  std::size_t non_clean() const { return modified + missing + unknown + sighit; }

  friend bool operator==(const StatusCounts&, const StatusCounts&) = default;
};

struct ScanReport {
  std::int64_t scanned_at = 0;
  std::vector<ScanFinding> findings;  // sorted by path
  StatusCounts counts;

  bool has_findings() const { return counts.non_clean() > 0; }
};

StatusCounts tally(const std::vector<ScanFinding>& findings);

struct ScanOptions {
  ExcludeSet excludes;
  /// Enables SignatureHit lookups when set.
  const SignatureDb* signatures = nullptr;
  /// Enables byte-level diffs for changed files when set.
  const BackupStore* backup = nullptr;
  unsigned threads = 0;
  std::optional<std::int64_t> scanned_at;
};

/// Classifies every baseline path and every file under root. Per-file read
/// errors become findings with a note; only an unreadable root throws
/// (Error(kRootUnreadable)).
ScanReport scan(const Manifest& baseline, const std::filesystem::path& root,
                const ScanOptions& options = {});

/// Machine format:
///
///   KRDP-REPORT v1
///   clean=<n> modified=<n> missing=<n> unknown=<n> sighit=<n>
///   <status>\t<path>\t<observed|->\t<baseline|->\t<size-delta|->\t<sig|->
///
/// Diffs, notes and the scan time are not part of the format.
std::string render_report(const ScanReport& report);
std::string render_finding_line(const ScanFinding& f);
ScanReport parse_report(std::string_view data);

/// "+5", "-3", "0".
std::string signed_string(std::int64_t v);

}  // namespace krdp
