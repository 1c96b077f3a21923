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

#include "krdp/response.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "io.hpp"
#include "krdp/error.hpp"
#include "krdp/sha256.hpp"

namespace krdp {
namespace {

std::string sanitize(std::string_view s) {
  std::string out(s);
  std::replace_if(out.begin(), out.end(),
                  [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return out;
}

[[noreturn]] void malformed_index(const std::string& what) {
  throw Error(Errc::kMalformedQuarantineIndex, what);
}

std::string_view as_chars(const std::vector<std::uint8_t>& bytes) {
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

// Reads a log file that may end in a torn (unterminated) line; the torn tail
// is dropped and its offset returned through `valid_length`.
std::vector<std::string> read_complete_lines(const std::filesystem::path& path,
                                             std::uint64_t& valid_length) {
  valid_length = 0;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return {};
  std::string data = detail::read_text_file(path);
  auto last_nl = data.rfind('\n');
  data.resize(last_nl == std::string::npos ? 0 : last_nl + 1);
  valid_length = data.size();
  const auto views = detail::split_lines(data);
  return views ? std::vector<std::string>(views->begin(), views->end())
               : std::vector<std::string>{};
}

}  // namespace

std::string render_index_line(const QuarantineEntry& e) {
  return std::to_string(e.id) + "\t" + e.digest.hex() + "\t" +
         std::to_string(e.quarantined_at) + "\t" + e.reason + "\t" +
         e.original_path;
}

QuarantineEntry parse_index_line(std::string_view line) {
  auto f = detail::split(line, '\t');
  if (f.size() != 5) malformed_index("expected 5 fields");
  QuarantineEntry e;
  auto id = detail::parse_int<std::uint64_t>(f[0]);
  if (!id || *id == 0) malformed_index("bad id");
  e.id = *id;
  auto digest = Digest::parse(f[1]);
  if (!digest) malformed_index("bad digest");
  e.digest = *digest;
  auto at = detail::parse_int<std::int64_t>(f[2]);
  if (!at) malformed_index("bad timestamp");
  e.quarantined_at = *at;
  e.reason = std::string(f[3]);
  e.original_path = std::string(f[4]);
  if (!is_valid_relative_path(e.original_path)) malformed_index("bad path");
  return e;
}

QuarantineStore::QuarantineStore(std::filesystem::path dir, Mode mode)
    : dir_(std::move(dir)), mode_(mode) {}

QuarantineStore::QuarantineStore(QuarantineStore&& other) noexcept
    : dir_(std::move(other.dir_)),
      mode_(other.mode_),
      lock_fd_(std::exchange(other.lock_fd_, -1)),
      entries_(std::move(other.entries_)),
      restored_(std::move(other.restored_)),
      fault_injector_(std::move(other.fault_injector_)) {}

QuarantineStore& QuarantineStore::operator=(QuarantineStore&& other) noexcept {
  if (this != &other) {
    if (lock_fd_ >= 0) ::close(lock_fd_);
    dir_ = std::move(other.dir_);
    mode_ = other.mode_;
    lock_fd_ = std::exchange(other.lock_fd_, -1);
    entries_ = std::move(other.entries_);
    restored_ = std::move(other.restored_);
    fault_injector_ = std::move(other.fault_injector_);
  }
  return *this;
}

QuarantineStore::~QuarantineStore() {
  if (lock_fd_ >= 0) ::close(lock_fd_);  // releases the flock
}

QuarantineStore QuarantineStore::open(const std::filesystem::path& dir, Mode mode) {
  QuarantineStore store(dir, mode);
  if (mode == Mode::kReadWrite) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "blobs", ec);
    if (ec) throw Error(Errc::kStoreWriteFailed, dir.string() + ": " + ec.message());
    const auto lock_path = dir / "lock";
    store.lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (store.lock_fd_ < 0) {
      throw Error(Errc::kStoreWriteFailed,
                  lock_path.string() + ": " + std::strerror(errno));
    }
    if (::flock(store.lock_fd_, LOCK_EX | LOCK_NB) != 0) {
      throw Error(Errc::kStoreLocked, dir.string() + " is held by another writer");
    }
  }
  store.load();
  return store;
}

void QuarantineStore::load() {
  entries_.clear();
  restored_.clear();

  std::uint64_t valid = 0;
  const auto index_path = dir_ / "index";
  for (const auto& line : read_complete_lines(index_path, valid)) {
    QuarantineEntry e = parse_index_line(line);
    if (!entries_.empty() && e.id <= entries_.back().id) {
      malformed_index("ids not strictly increasing at " + std::to_string(e.id));
    }
    entries_.push_back(std::move(e));
  }
  if (mode_ == Mode::kReadWrite) {
    std::error_code ec;
    if (std::filesystem::exists(index_path, ec) &&
        std::filesystem::file_size(index_path, ec) != valid) {
      std::filesystem::resize_file(index_path, valid, ec);
    }
  }

  for (const auto& line : read_complete_lines(dir_ / "restored", valid)) {
    auto f = detail::split(line, '\t');
    auto id = f.size() == 2 ? detail::parse_int<std::uint64_t>(f[0]) : std::nullopt;
    if (!id) malformed_index("bad restored line");
    restored_.push_back(*id);
  }
}

void QuarantineStore::require_writable() const {
  if (mode_ != Mode::kReadWrite || lock_fd_ < 0) {
    throw Error(Errc::kStoreWriteFailed, dir_.string() + " opened read-only");
  }
}

const QuarantineEntry* QuarantineStore::find(std::uint64_t id) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), id,
      [](const QuarantineEntry& e, std::uint64_t v) { return e.id < v; });
  return it != entries_.end() && it->id == id ? &*it : nullptr;
}

bool QuarantineStore::is_restored(std::uint64_t id) const {
  return std::find(restored_.begin(), restored_.end(), id) != restored_.end();
}

const QuarantineEntry* QuarantineStore::active_entry_for(
    std::string_view relative_path) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->original_path == relative_path && !is_restored(it->id)) return &*it;
  }
  return nullptr;
}

std::filesystem::path QuarantineStore::blob_path(const Digest& d) const {
  return dir_ / "blobs" / d.hex();
}

QuarantineEntry QuarantineStore::quarantine(const std::filesystem::path& root,
                                            std::string_view relative_path,
                                            std::string_view reason,
                                            std::int64_t now) {
  require_writable();
  const std::string rel = canonical_path(relative_path);
  if (!is_valid_relative_path(rel)) {
    throw Error(Errc::kInvalidArgument, "bad path '" + std::string(relative_path) + "'");
  }
  const auto original = root / rel;
  const auto bytes = detail::read_file(original);

  QuarantineEntry entry;
  entry.id = entries_.empty() ? 1 : entries_.back().id + 1;
  entry.original_path = rel;
  entry.digest = sha256_bytes(bytes);
  entry.quarantined_at = now;
  entry.reason = sanitize(reason);

  const auto blob = blob_path(entry.digest);
  std::error_code ec;
  if (!std::filesystem::exists(blob, ec)) {
    detail::write_file_atomic(blob, as_chars(bytes), 0400);
  }
  if (fault_injector_) fault_injector_(QuarantineStage::kBlobStored);

  const auto index_path = dir_ / "index";
  const std::uint64_t index_size =
      std::filesystem::exists(index_path, ec) ? std::filesystem::file_size(index_path, ec) : 0;
  if (!detail::append_durable(index_path, render_index_line(entry) + "\n")) {
    std::filesystem::resize_file(index_path, index_size, ec);
    throw Error(Errc::kStoreWriteFailed, index_path.string() + ": append failed");
  }
  if (fault_injector_) fault_injector_(QuarantineStage::kIndexAppended);

  if (::unlink(original.c_str()) != 0) {
    const std::string why = std::strerror(errno);
    std::filesystem::resize_file(index_path, index_size, ec);
    throw Error(Errc::kStoreWriteFailed, original.string() + ": " + why);
  }
  detail::fsync_dir(original.parent_path());
  entries_.push_back(entry);
  return entry;
}

std::filesystem::path QuarantineStore::restore(std::uint64_t id,
                                               const std::filesystem::path& destination,
                                               std::int64_t now) {
  require_writable();
  const QuarantineEntry* e = find(id);
  if (!e) throw Error(Errc::kUnknownEntry, "no quarantine entry " + std::to_string(id));

  std::vector<std::uint8_t> bytes;
  try {
    bytes = detail::read_file(blob_path(e->digest));
  } catch (const Error&) {
    throw Error(Errc::kDigestMismatchOnRestore, "blob missing for entry " + std::to_string(id));
  }
  if (sha256_bytes(bytes) != e->digest) {
    throw Error(Errc::kDigestMismatchOnRestore, "stored blob for entry " +
                                                    std::to_string(id) + " is corrupt");
  }
  if (destination.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(destination.parent_path(), ec);
  }
  detail::write_file_atomic(destination, as_chars(bytes));
  if (sha256_file(destination) != e->digest) {
    std::filesystem::remove(destination);
    throw Error(Errc::kDigestMismatchOnRestore,
                destination.string() + ": written content does not verify");
  }
  if (!detail::append_durable(dir_ / "restored",
                              std::to_string(id) + "\t" + std::to_string(now) + "\n")) {
    throw Error(Errc::kStoreWriteFailed, "cannot record restore of " + std::to_string(id));
  }
  restored_.push_back(id);
  return destination;
}

std::vector<std::uint64_t> QuarantineStore::verify() const {
  std::vector<std::uint64_t> bad;
  for (const auto& e : entries_) {
    try {
      if (sha256_file(blob_path(e.digest)) != e.digest) bad.push_back(e.id);
    } catch (const Error&) {
      bad.push_back(e.id);
    }
  }
  return bad;
}

std::string_view to_string(PreventionBlocked::Reason r) {
  switch (r) {
    case PreventionBlocked::Reason::kQuarantined: return "Quarantined";
    case PreventionBlocked::Reason::kSignatureHit: return "SignatureHit";
  }
  return "?";
}

GuardedContent guarded_open(const std::filesystem::path& root,
                            std::string_view relative_path,
                            const QuarantineStore& store,
                            const SignatureDb* signatures) {
  const std::string rel = canonical_path(relative_path);
  if (const QuarantineEntry* e = store.active_entry_for(rel)) {
    return PreventionBlocked{PreventionBlocked::Reason::kQuarantined,
                             "quarantine entry " + std::to_string(e->id) + " (" +
                                 e->reason + ")"};
  }
  auto bytes = detail::read_file(root / rel);
  if (signatures) {
    if (const Signature* s = signatures->match_digest(sha256_bytes(bytes))) {
      return PreventionBlocked{PreventionBlocked::Reason::kSignatureHit, s->name};
    }
  }
  return bytes;
}

std::string alert_message(const ScanFinding& f) {
  switch (f.status) {
    case FindingStatus::kClean:
      return "file matches baseline";
    case FindingStatus::kModified: {
      std::string m = "content differs from baseline";
      if (f.size_delta && *f.size_delta != 0) {
        m += " (size " + signed_string(*f.size_delta) + " bytes)";
      }
      return m;
    }
    case FindingStatus::kMissing:
      return "baseline file is missing";
    case FindingStatus::kUnknown:
      return "file not present in baseline";
    case FindingStatus::kSignatureHit:
      return "content matches rootkit signature " + f.signature_name.value_or("?");
  }
  return {};
}

std::string render_alert_line(const Alert& a) {
  return std::to_string(a.at) + "\t" + std::string(status_token(a.status)) + "\t" +
         a.path + "\t" + a.message;
}

Alert parse_alert_line(std::string_view line) {
  auto f = detail::split(line, '\t');
  if (f.size() != 4) throw Error(Errc::kMalformedAlert, "expected 4 fields");
  Alert a;
  auto at = detail::parse_int<std::int64_t>(f[0]);
  auto status = parse_status(f[1]);
  if (!at || !status) throw Error(Errc::kMalformedAlert, "bad timestamp or status");
  a.at = *at;
  a.status = *status;
  a.path = std::string(f[2]);
  a.message = std::string(f[3]);
  return a;
}

Alert alert(const ScanFinding& finding, const std::filesystem::path& log,
            std::int64_t now) {
  Alert a{now, finding.status, sanitize(finding.path), sanitize(alert_message(finding))};
  if (!detail::append_durable(log, render_alert_line(a) + "\n")) {
    throw Error(Errc::kLogWriteFailed, log.string() + ": " + std::strerror(errno));
  }
  return a;
}

std::vector<Alert> read_alert_log(const std::filesystem::path& log) {
  const std::string data = detail::read_text_file(log);
  auto lines = detail::split_lines(data);
  if (!lines) throw Error(Errc::kMalformedAlert, "torn final line");
  std::vector<Alert> out;
  for (auto line : *lines) out.push_back(parse_alert_line(line));
  return out;
}

}  // namespace krdp
