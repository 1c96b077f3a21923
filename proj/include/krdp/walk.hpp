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
#include <string>
#include <string_view>
#include <vector>

namespace krdp {

/// Converts '\' to '/', strips leading "./" and '/' and collapses repeated
/// separators. Comparison afterwards is raw byte-wise; no Unicode
/// normalization is attempted.
std::string canonical_path(std::string_view path);

/// True when `path` is a valid manifest path: non-empty, relative, no "." or
/// ".." segments, no NUL, tab, CR or LF.
bool is_valid_relative_path(std::string_view path);

/// Exclusion patterns are fnmatch(3) globs. A pattern containing '/' is
/// matched against the full relative path; otherwise it is matched against
/// every individual path segment, so "*.tmp" or ".git" exclude at any depth.
/// A leading '/' anchors the pattern at the root ("/state" excludes only the
/// top-level entry). A matching directory is pruned with everything below it.
class ExcludeSet {
 public:
  ExcludeSet() = default;
  explicit ExcludeSet(std::vector<std::string> patterns)
      : patterns_(std::move(patterns)) {}

  bool excludes(std::string_view relative_path) const;
  const std::vector<std::string>& patterns() const { return patterns_; }

 private:
  std::vector<std::string> patterns_;
};

struct SkipSummary {
  std::size_t symlinks = 0;
  std::size_t special_files = 0;
  std::size_t excluded = 0;
  // Names that cannot be represented in the line-oriented formats (tab, CR,
  // LF in the name).
  std::size_t unrepresentable = 0;

  friend bool operator==(const SkipSummary&, const SkipSummary&) = default;
};

struct WalkResult {
  /// Relative, '/'-separated, sorted ascending byte-wise, unique.
  std::vector<std::string> files;
  /// Relative paths of directories that could not be listed.
  std::vector<std::string> unreadable_dirs;
  SkipSummary skipped;
};

/// Enumerates regular files under `root` without following symlinks.
/// Throws Error(kRootUnreadable) when root itself cannot be listed.
WalkResult walk_tree(const std::filesystem::path& root,
                     const ExcludeSet& excludes);

}  // namespace krdp
