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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "krdp/detector.hpp"
#include "krdp/digest.hpp"
#include "krdp/signatures.hpp"

namespace krdp {

struct QuarantineEntry {
  std::uint64_t id = 0;
  std::string original_path;  // relative to the scanned root
  Digest digest;              // of the quarantined content
  std::int64_t quarantined_at = 0;
  std::string reason;

  friend bool operator==(const QuarantineEntry&, const QuarantineEntry&) = default;
};

/// `<id>\t<digest>\t<quarantined_at>\t<reason>\t<original_path>`, no newline.
std::string render_index_line(const QuarantineEntry& e);
QuarantineEntry parse_index_line(std::string_view line);

/// Points at which a fault injector is invoked during quarantine().
enum class QuarantineStage { kBlobStored, kIndexAppended };

/// On-disk layout:
///
///   <dir>/blobs/<digest>   content-addressed, read-only copies
///   <dir>/index            append-only entry log
///   <dir>/restored         append-only `<id>\t<epoch>` log
///   <dir>/lock             flock(2) target held by the single writer
///
/// An index line is appended only after its blob is durable, so a crash at
/// any point leaves at worst an orphan blob, never a dangling entry.
class QuarantineStore {
 public:
  enum class Mode { kReadOnly, kReadWrite };

  /// kReadWrite creates the layout if needed and takes the writer lock
  /// (Error(kStoreLocked) if another writer holds it). kReadOnly on a
  /// missing directory yields an empty store.
  static QuarantineStore open(const std::filesystem::path& dir, Mode mode);

  QuarantineStore(QuarantineStore&& other) noexcept;
  QuarantineStore& operator=(QuarantineStore&& other) noexcept;
  QuarantineStore(const QuarantineStore&) = delete;
  QuarantineStore& operator=(const QuarantineStore&) = delete;
  ~QuarantineStore();

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<QuarantineEntry>& entries() const { return entries_; }
  const QuarantineEntry* find(std::uint64_t id) const;
  bool is_restored(std::uint64_t id) const;

  /// The most recent entry for `relative_path` that has not been restored.
  const QuarantineEntry* active_entry_for(std::string_view relative_path) const;

  std::filesystem::path blob_path(const Digest& d) const;

  /// Moves root/relative_path into the store. Either the file is gone from
  /// the tree and an entry exists, or nothing changed (Error(kStoreWriteFailed)
  /// / Error(kFileUnreadable)).
  QuarantineEntry quarantine(const std::filesystem::path& root,
                             std::string_view relative_path,
                             std::string_view reason,
                             std::int64_t now = epoch_now());

  /// Writes the quarantined bytes to `destination` and re-hashes the written
  /// file. Error(kUnknownEntry) or Error(kDigestMismatchOnRestore).
  std::filesystem::path restore(std::uint64_t id,
                                const std::filesystem::path& destination,
                                std::int64_t now = epoch_now());

  /// Ids whose blob is missing or no longer hashes to the entry digest.
  std::vector<std::uint64_t> verify() const;

  /// Test hook; an exception thrown from the injector aborts quarantine() at
  /// that stage exactly as a crash would.
  void set_fault_injector(std::function<void(QuarantineStage)> injector) {
    fault_injector_ = std::move(injector);
  }

 private:
  QuarantineStore(std::filesystem::path dir, Mode mode);
  void load();
  void require_writable() const;

  std::filesystem::path dir_;
  Mode mode_;
  int lock_fd_ = -1;
  std::vector<QuarantineEntry> entries_;
  std::vector<std::uint64_t> restored_;
  std::function<void(QuarantineStage)> fault_injector_;
};

/// Why guarded_open refused a file.
struct PreventionBlocked {
  enum class Reason { kQuarantined, kSignatureHit };
  Reason reason;
  std::string detail;
};

std::string_view to_string(PreventionBlocked::Reason r);

using GuardedContent = std::variant<std::vector<std::uint8_t>, PreventionBlocked>;

/// Returns the file content unless the path has an active quarantine entry
/// or the content matches a signature. The content is read once and the
/// signature check is made on exactly the bytes returned.
GuardedContent guarded_open(const std::filesystem::path& root,
                            std::string_view relative_path,
                            const QuarantineStore& store,
                            const SignatureDb* signatures = nullptr);

struct Alert {
  std::int64_t at = 0;
  FindingStatus status = FindingStatus::kClean;
  std::string path;
  std::string message;

  friend bool operator==(const Alert&, const Alert&) = default;
};

std::string alert_message(const ScanFinding& finding);

/// Appends `<epoch>\t<status>\t<path>\t<message>` to the log.
/// Error(kLogWriteFailed) on failure.
Alert alert(const ScanFinding& finding, const std::filesystem::path& log,
            std::int64_t now = epoch_now());

std::string render_alert_line(const Alert& a);
Alert parse_alert_line(std::string_view line);
std::vector<Alert> read_alert_log(const std::filesystem::path& log);

}  // namespace krdp
