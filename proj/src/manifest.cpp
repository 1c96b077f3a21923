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

#include "krdp/manifest.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <chrono>

#include "io.hpp"
#include "krdp/error.hpp"
#include "krdp/sha256.hpp"
#include "parallel.hpp"

namespace krdp {
namespace {

constexpr std::string_view kHeader = "KRDP-MANIFEST v1";

[[noreturn]] void malformed(const std::string& what) {
  throw Error(Errc::kMalformedManifest, what);
}

std::string_view strip_key(std::string_view line, std::string_view key,
                           std::size_t line_no) {
  if (!line.starts_with(key)) {
    malformed("line " + std::to_string(line_no) + ": expected '" +
              std::string(key) + "'");
  }
  return line.substr(key.size());
}

}  // namespace

std::int64_t epoch_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void validate(const Manifest& m) {
  if (m.version != Manifest::kFormatVersion) {
    malformed("unsupported version " + std::to_string(m.version));
  }
  if (m.root_label.find_first_of("\r\n") != std::string::npos) {
    malformed("root label contains a line break");
  }
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    const auto& path = m.records[i].path;
    if (!is_valid_relative_path(path) || canonical_path(path) != path) {
      malformed("invalid path '" + path + "'");
    }
    if (i > 0 && !(m.records[i - 1].path < path)) {
      malformed("records not strictly sorted at '" + path + "'");
    }
  }
}

const FileRecord* lookup(const Manifest& m, std::string_view path) {
  auto it = std::lower_bound(
      m.records.begin(), m.records.end(), path,
      [](const FileRecord& r, std::string_view p) { return r.path < p; });
  if (it == m.records.end() || it->path != path) return nullptr;
  return &*it;
}

SnapshotResult snapshot(const std::filesystem::path& root,
                        const SnapshotOptions& options) {
  WalkResult walk = walk_tree(root, options.excludes);

  std::vector<std::optional<FileRecord>> slots(walk.files.size());
  detail::parallel_for(walk.files.size(), options.threads, [&](std::size_t i) {
    const auto full = root / walk.files[i];
    FileRecord rec;
    rec.path = walk.files[i];
    try {
      rec.digest = sha256_file(full, rec.size);
    } catch (const Error&) {
      return;
    }
    struct stat st {};
    if (::stat(full.c_str(), &st) == 0) rec.mtime = st.st_mtime;
    slots[i] = std::move(rec);
  });

  SnapshotResult result;
  result.skipped = walk.skipped;
  result.unreadable = std::move(walk.unreadable_dirs);
  result.manifest.root_label = options.root_label.value_or(root.string());
  result.manifest.created_at = options.created_at.value_or(epoch_now());
  result.manifest.records.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) {
      result.manifest.records.push_back(std::move(*slots[i]));
    } else {
      result.unreadable.push_back(walk.files[i]);
    }
  }
  std::sort(result.unreadable.begin(), result.unreadable.end());
  return result;
}

std::string write_manifest(const Manifest& m) {
  validate(m);
  std::string out;
  out.reserve(64 + m.records.size() * 100);
  out += kHeader;
  out += "\nroot=";
  out += m.root_label;
  out += "\ncreated=";
  out += std::to_string(m.created_at);
  out += "\ncount=";
  out += std::to_string(m.records.size());
  out += '\n';
  for (const auto& r : m.records) {
    out += r.digest.hex();
    out += '\t';
    out += std::to_string(r.size);
    out += '\t';
    out += std::to_string(r.mtime);
    out += '\t';
    out += r.path;
    out += '\n';
  }
  return out;
}

Manifest read_manifest(std::string_view data) {
  auto lines = detail::split_lines(data);
  if (!lines) malformed("missing final newline");
  if (lines->size() < 4) malformed("truncated header");
  if ((*lines)[0] != kHeader) malformed("bad header line");

  Manifest m;
  m.root_label = std::string(strip_key((*lines)[1], "root=", 2));
  auto created = detail::parse_int<std::int64_t>(strip_key((*lines)[2], "created=", 3));
  if (!created) malformed("bad created value");
  m.created_at = *created;
  auto count = detail::parse_int<std::uint64_t>(strip_key((*lines)[3], "count=", 4));
  if (!count) malformed("bad count value");
  if (*count != lines->size() - 4) {
    malformed("count=" + std::to_string(*count) + " but " +
              std::to_string(lines->size() - 4) + " record lines");
  }

  m.records.reserve(*count);
  for (std::size_t i = 4; i < lines->size(); ++i) {
    auto fields = detail::split((*lines)[i], '\t');
    const std::string where = "line " + std::to_string(i + 1) + ": ";
    if (fields.size() != 4) malformed(where + "expected 4 fields");
    auto digest = Digest::parse(fields[0]);
    if (!digest) malformed(where + "bad digest");
    auto size = detail::parse_int<std::uint64_t>(fields[1]);
    if (!size) malformed(where + "bad size");
    auto mtime = detail::parse_int<std::int64_t>(fields[2]);
    if (!mtime) malformed(where + "bad mtime");
    m.records.push_back({std::string(fields[3]), *size, *digest, *mtime});
  }
  validate(m);
  return m;
}

Manifest load_manifest_file(const std::filesystem::path& path) {
  return read_manifest(detail::read_text_file(path));
}

void save_manifest_file(const std::filesystem::path& path, const Manifest& m) {
  detail::write_file_atomic(path, write_manifest(m));
}

}  // namespace krdp
