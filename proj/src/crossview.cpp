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

#include "krdp/crossview.hpp"

#include <algorithm>

#include "io.hpp"
#include "krdp/error.hpp"

namespace krdp {
namespace {

constexpr std::string_view kHeader = "KRDP-XVIEW v1";

[[noreturn]] void malformed(const std::string& what) {
  throw Error(Errc::kMalformedViewDiff, what);
}

}  // namespace

PathSet::PathSet(std::vector<std::string> paths) : paths_(std::move(paths)) {
  std::sort(paths_.begin(), paths_.end());
  paths_.erase(std::unique(paths_.begin(), paths_.end()), paths_.end());
}

bool PathSet::contains(std::string_view p) const {
  return std::binary_search(paths_.begin(), paths_.end(), p);
}

PathSet observe(const std::filesystem::path& root, const ExcludeSet& excludes) {
  return PathSet(walk_tree(root, excludes).files);
}

ViewDiff cross_view_diff(const Manifest& trusted, const PathSet& observed) {
  ViewDiff d;
  auto t = trusted.records.begin();
  auto o = observed.begin();
  while (t != trusted.records.end() && o != observed.end()) {
    if (t->path < *o) {
      d.hidden.push_back((t++)->path);
    } else if (*o < t->path) {
      d.unknown.push_back(*o++);
    } else {
      ++d.common;
      ++t;
      ++o;
    }
  }
  for (; t != trusted.records.end(); ++t) d.hidden.push_back(t->path);
  for (; o != observed.end(); ++o) d.unknown.push_back(*o);
  return d;
}

std::string render_view_diff(const ViewDiff& d) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& p : d.hidden) out += "H " + p + "\n";
  for (const auto& p : d.unknown) out += "U " + p + "\n";
  out += "common=" + std::to_string(d.common) + "\n";
  return out;
}

ViewDiff parse_view_diff(std::string_view data) {
  auto lines = detail::split_lines(data);
  if (!lines || lines->size() < 2 || lines->front() != kHeader) {
    malformed("bad header");
  }
  ViewDiff d;
  for (std::size_t i = 1; i + 1 < lines->size(); ++i) {
    std::string_view line = (*lines)[i];
    if (line.size() < 3 || line[1] != ' ') malformed("bad entry line");
    std::string path(line.substr(2));
    if (!is_valid_relative_path(path)) malformed("bad path '" + path + "'");
    std::vector<std::string>* target = nullptr;
    if (line[0] == 'H') {
      if (!d.unknown.empty()) malformed("H line after U lines");
      target = &d.hidden;
    } else if (line[0] == 'U') {
      target = &d.unknown;
    } else {
      malformed("bad entry tag");
    }
    if (!target->empty() && !(target->back() < path)) malformed("entries not sorted");
    target->push_back(std::move(path));
  }
  std::string_view last = lines->back();
  if (!last.starts_with("common=")) malformed("missing common line");
  auto n = detail::parse_int<std::size_t>(last.substr(7));
  if (!n) malformed("bad common count");
  d.common = *n;
  return d;
}

std::string render_path_list(const PathSet& s) {
  std::string out;
  for (const auto& p : s) out += p + "\n";
  return out;
}

PathSet parse_path_list(std::string_view data) {
  auto lines = detail::split_lines(data);
  if (!lines) throw Error(Errc::kInvalidArgument, "path list missing final newline");
  std::vector<std::string> paths;
  for (auto line : *lines) {
    std::string p = canonical_path(line);
    if (!is_valid_relative_path(p)) {
      throw Error(Errc::kInvalidArgument, "bad path '" + std::string(line) + "'");
    }
    paths.push_back(std::move(p));
  }
  return PathSet(std::move(paths));
}

}  // namespace krdp
