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

#include "krdp/detector.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <memory>

#include "io.hpp"
#include "krdp/error.hpp"
#include "krdp/sha256.hpp"
#include "parallel.hpp"

namespace krdp {
namespace {

constexpr std::string_view kReportHeader = "KRDP-REPORT v1";

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_regular(const std::filesystem::path& path) {
  struct stat st {};
  if (::stat(path.c_str(), &st) != 0) {
    throw Error(Errc::kFileUnreadable,
                path.string() + ": " + std::strerror(errno));
  }
  if (!S_ISREG(st.st_mode)) {
    throw Error(Errc::kFileUnreadable, path.string() + ": not a regular file");
  }
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) {
    throw Error(Errc::kFileUnreadable,
                path.string() + ": " + std::strerror(errno));
  }
  return f;
}

bool hex_equal(const Digest& a, const Digest& b) {
  const std::string ha = a.hex();
  const std::string hb = b.hex();
  bool equal = true;
  for (std::size_t i = 0; i < ha.size(); ++i) {
    if (ha[i] != hb[i]) equal = false;
  }
  return equal;
}

std::string basename_of(std::string_view rel) {
  auto slash = rel.rfind('/');
  return std::string(slash == std::string_view::npos ? rel : rel.substr(slash + 1));
}

void add_note(ScanFinding& f, const std::string& text) {
  if (f.note) {
    *f.note += "; " + text;
  } else {
    f.note = text;
  }
}

[[noreturn]] void malformed_report(const std::string& what) {
  throw Error(Errc::kMalformedReport, what);
}

}  // namespace

PatternVerdict pattern_check(const Digest& baseline_digest,
                             const std::filesystem::path& observed_file) {
  PatternVerdict v;
  v.baseline_digest = baseline_digest;
  v.observed_digest = sha256_file(observed_file);
  v.equal = hex_equal(v.baseline_digest, v.observed_digest);
  return v;
}

DiffReport byte_compare(const std::filesystem::path& clean,
                        const std::filesystem::path& tainted) {
  FilePtr a = open_regular(clean);
  FilePtr b = open_regular(tainted);

  std::vector<std::uint8_t> buf_a(kHashChunkSize), buf_b(kHashChunkSize);
  DiffReport r;
  bool a_done = false, b_done = false;
  while (!a_done || !b_done) {
    std::size_t na = 0, nb = 0;
    if (!a_done) {
      na = std::fread(buf_a.data(), 1, buf_a.size(), a.get());
      if (na < buf_a.size()) {
        if (std::ferror(a.get())) throw Error(Errc::kFileUnreadable, clean.string());
        a_done = true;
      }
    }
    if (!b_done) {
      nb = std::fread(buf_b.data(), 1, buf_b.size(), b.get());
      if (nb < buf_b.size()) {
        if (std::ferror(b.get())) throw Error(Errc::kFileUnreadable, tainted.string());
        b_done = true;
      }
    }
    // fread only returns short at EOF, so while both are live the running
    // lengths are equal and offsets line up.
    if (!r.first_divergence) {
      const std::size_t n = std::min(na, nb);
      auto [pa, pb] = std::mismatch(buf_a.begin(), buf_a.begin() + n, buf_b.begin());
      if (pa != buf_a.begin() + n) {
        r.first_divergence = r.length_clean + static_cast<std::uint64_t>(pa - buf_a.begin());
      }
    }
    r.length_clean += na;
    r.length_tainted += nb;
  }
  if (!r.first_divergence && r.length_clean != r.length_tainted) {
    r.first_divergence = std::min(r.length_clean, r.length_tainted);
  }
  r.equal = !r.first_divergence.has_value();
  return r;
}

std::string_view status_token(FindingStatus s) {
  switch (s) {
    case FindingStatus::kClean: return "clean";
    case FindingStatus::kModified: return "modified";
    case FindingStatus::kMissing: return "missing";
    case FindingStatus::kUnknown: return "unknown";
    case FindingStatus::kSignatureHit: return "sighit";
  }
  return "?";
}

std::optional<FindingStatus> parse_status(std::string_view token) {
  for (auto s : kAllStatuses) {
    if (status_token(s) == token) return s;
  }
  return std::nullopt;
}

std::size_t& StatusCounts::operator[](FindingStatus s) {
  switch (s) {
    case FindingStatus::kClean: return clean;
    case FindingStatus::kModified: return modified;
    case FindingStatus::kMissing: return missing;
    case FindingStatus::kUnknown: return unknown;
    case FindingStatus::kSignatureHit: return sighit;
  }
  return clean;
}

std::size_t StatusCounts::operator[](FindingStatus s) const {
  return const_cast<StatusCounts&>(*this)[s];
}

StatusCounts tally(const std::vector<ScanFinding>& findings) {
  StatusCounts c;
  for (const auto& f : findings) ++c[f.status];
  return c;
}

ScanReport scan(const Manifest& baseline, const std::filesystem::path& root,
                const ScanOptions& options) {
  WalkResult walk = walk_tree(root, options.excludes);

  // Sorted merge of the two path lists; every path gets exactly one slot.
  struct Task {
    const std::string* path;
    const FileRecord* record;
    bool on_disk;
  };
  std::vector<Task> tasks;
  tasks.reserve(baseline.records.size() + walk.files.size());
  {
    auto r = baseline.records.begin();
    auto o = walk.files.begin();
    while (r != baseline.records.end() || o != walk.files.end()) {
      if (o == walk.files.end() || (r != baseline.records.end() && r->path < *o)) {
        tasks.push_back({&r->path, &*r, false});
        ++r;
      } else if (r == baseline.records.end() || *o < r->path) {
        tasks.push_back({&*o, nullptr, true});
        ++o;
      } else {
        tasks.push_back({&r->path, &*r, true});
        ++r;
        ++o;
      }
    }
  }

  std::vector<ScanFinding> findings(tasks.size());
  detail::parallel_for(tasks.size(), options.threads, [&](std::size_t i) {
    const Task& t = tasks[i];
    ScanFinding& f = findings[i];
    f.path = *t.path;
    if (t.record) f.baseline_digest = t.record->digest;

    if (!t.on_disk) {
      f.status = FindingStatus::kMissing;
      for (const auto& dir : walk.unreadable_dirs) {
        if (f.path.starts_with(dir + "/")) {
          add_note(f, "read-error: directory " + dir + " unreadable");
          break;
        }
      }
      return;
    }

    const auto full = root / f.path;
    std::uint64_t size = 0;
    try {
      f.observed_digest = sha256_file(full, size);
    } catch (const Error& e) {
      f.status = t.record ? FindingStatus::kMissing : FindingStatus::kUnknown;
      add_note(f, std::string("read-error: ") + e.what());
      return;
    }

    if (!t.record) {
      f.status = FindingStatus::kUnknown;
    } else {
      f.size_delta = static_cast<std::int64_t>(size) -
                     static_cast<std::int64_t>(t.record->size);
      f.status = hex_equal(t.record->digest, *f.observed_digest)
                     ? FindingStatus::kClean
                     : FindingStatus::kModified;
    }

    if (options.signatures) {
      if (const Signature* hit = options.signatures->match_digest(*f.observed_digest)) {
        f.status = FindingStatus::kSignatureHit;
        f.signature_name = hit->name;
      }
    }

    // Byte comparison only follows a failed pattern check.
    if (t.record && *f.observed_digest != t.record->digest && options.backup &&
        options.backup->contains(t.record->digest)) {
      try {
        f.diff = byte_compare(options.backup->path_for(t.record->digest), full);
      } catch (const Error& e) {
        add_note(f, std::string("diff-error: ") + e.what());
      }
    }
  });

  if (options.signatures) {
    for (auto& f : findings) {
      if (f.status == FindingStatus::kClean) continue;
      for (const Signature* s : options.signatures->by_affected_file(basename_of(f.path))) {
        if (f.signature_name == s->name) continue;
        add_note(f, "known target of " + s->name);
      }
    }
  }

  ScanReport report;
  report.scanned_at = options.scanned_at.value_or(epoch_now());
  report.counts = tally(findings);
  report.findings = std::move(findings);
  return report;
}

std::string signed_string(std::int64_t v) {
  return v > 0 ? "+" + std::to_string(v) : std::to_string(v);
}

std::string render_finding_line(const ScanFinding& f) {
  std::string line(status_token(f.status));
  line += '\t';
  line += f.path;
  line += '\t';
  line += f.observed_digest ? f.observed_digest->hex() : "-";
  line += '\t';
  line += f.baseline_digest ? f.baseline_digest->hex() : "-";
  line += '\t';
  line += f.size_delta ? signed_string(*f.size_delta) : "-";
  line += '\t';
  line += f.signature_name ? *f.signature_name : "-";
  return line;
}

std::string render_report(const ScanReport& report) {
  const auto& c = report.counts;
  std::string out(kReportHeader);
  out += "\nclean=" + std::to_string(c.clean) +
         " modified=" + std::to_string(c.modified) +
         " missing=" + std::to_string(c.missing) +
         " unknown=" + std::to_string(c.unknown) +
         " sighit=" + std::to_string(c.sighit) + "\n";
  for (const auto& f : report.findings) {
    out += render_finding_line(f);
    out += '\n';
  }
  return out;
}

ScanReport parse_report(std::string_view data) {
  auto lines = detail::split_lines(data);
  if (!lines || lines->size() < 2 || (*lines)[0] != kReportHeader) {
    malformed_report("bad header");
  }

  StatusCounts declared;
  {
    auto parts = detail::split((*lines)[1], ' ');
    if (parts.size() != kAllStatuses.size()) malformed_report("bad summary line");
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const std::string key = std::string(status_token(kAllStatuses[i])) + "=";
      if (!parts[i].starts_with(key)) malformed_report("bad summary key");
      auto n = detail::parse_int<std::size_t>(parts[i].substr(key.size()));
      if (!n) malformed_report("bad summary count");
      declared[kAllStatuses[i]] = *n;
    }
  }

  ScanReport report;
  for (std::size_t i = 2; i < lines->size(); ++i) {
    const std::string where = "line " + std::to_string(i + 1) + ": ";
    auto fields = detail::split((*lines)[i], '\t');
    if (fields.size() != 6) malformed_report(where + "expected 6 fields");
    ScanFinding f;
    auto status = parse_status(fields[0]);
    if (!status) malformed_report(where + "bad status");
    f.status = *status;
    f.path = std::string(fields[1]);
    if (!is_valid_relative_path(f.path)) malformed_report(where + "bad path");
    auto digest_field = [&](std::string_view s) -> std::optional<Digest> {
      if (s == "-") return std::nullopt;
      auto d = Digest::parse(s);
      if (!d) malformed_report(where + "bad digest");
      return d;
    };
    f.observed_digest = digest_field(fields[2]);
    f.baseline_digest = digest_field(fields[3]);
    if (fields[4] != "-") {
      std::string_view delta = fields[4];
      if (delta.starts_with('+')) {
        delta.remove_prefix(1);
        if (delta == "0") malformed_report(where + "bad size delta");
      }
      auto v = detail::parse_int<std::int64_t>(delta);
      if (!v) malformed_report(where + "bad size delta");
      if (*v > 0 && !fields[4].starts_with('+')) malformed_report(where + "bad size delta");
      f.size_delta = *v;
    }
    if (fields[5] != "-") f.signature_name = std::string(fields[5]);

    const bool both = f.observed_digest && f.baseline_digest;
    bool ok = true;
    switch (f.status) {
      case FindingStatus::kClean:
        ok = both && *f.observed_digest == *f.baseline_digest;
        break;
      case FindingStatus::kModified:
        ok = both && *f.observed_digest != *f.baseline_digest;
        break;
      case FindingStatus::kMissing: ok = !f.observed_digest; break;
      case FindingStatus::kUnknown: ok = !f.baseline_digest; break;
      case FindingStatus::kSignatureHit: ok = f.signature_name.has_value(); break;
    }
    if (!ok) malformed_report(where + "fields inconsistent with status");
    if (!report.findings.empty() && !(report.findings.back().path < f.path)) {
      malformed_report(where + "findings not sorted by path");
    }
    report.findings.push_back(std::move(f));
  }
  report.counts = tally(report.findings);
  if (report.counts != declared) malformed_report("summary does not match findings");
  return report;
}

}  // namespace krdp
