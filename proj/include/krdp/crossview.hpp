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

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "krdp/manifest.hpp"
#include "krdp/walk.hpp"

namespace krdp {

/// Sorted, duplicate-free set of relative paths.
class PathSet {
 public:
  PathSet() = default;
  PathSet(std::initializer_list<std::string> paths)
      : PathSet(std::vector<std::string>(paths)) {}
  /// Sorts and deduplicates.
  explicit PathSet(std::vector<std::string> paths);

  const std::vector<std::string>& paths() const { return paths_; }
  std::size_t size() const { return paths_.size(); }
  bool empty() const { return paths_.empty(); }
  bool contains(std::string_view p) const;
  auto begin() const { return paths_.begin(); }
  auto end() const { return paths_.end(); }

  friend bool operator==(const PathSet&, const PathSet&) = default;

 private:
  std::vector<std::string> paths_;
};

/// The user-visible view: regular files reachable by ordinary directory
/// enumeration, with the same exclusion rules as snapshot().
PathSet observe(const std::filesystem::path& root, const ExcludeSet& excludes = {});

struct ViewDiff {
  /// In the trusted view but not observed. Either hidden by something on the
  /// host or deleted; path sets alone cannot tell the two apart.
  std::vector<std::string> hidden;
  /// Observed but not in the trusted view.
  std::vector<std::string> unknown;
  std::size_t common = 0;

  bool clean() const { return hidden.empty() && unknown.empty(); }

  friend bool operator==(const ViewDiff&, const ViewDiff&) = default;
};

/// Pure set difference over paths; file content plays no part.
ViewDiff cross_view_diff(const Manifest& trusted, const PathSet& observed);

/// `KRDP-XVIEW v1`, `H <path>` lines, `U <path>` lines, `common=<n>`.
std::string render_view_diff(const ViewDiff& d);
ViewDiff parse_view_diff(std::string_view data);

/// One path per line; used to hand a captured observed view between runs.
std::string render_path_list(const PathSet& s);
PathSet parse_path_list(std::string_view data);

}  // namespace krdp
