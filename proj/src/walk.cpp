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

#include "krdp/walk.hpp"

#include <dirent.h>
#include <fnmatch.h>
#include <sys/stat.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "io.hpp"
#include "krdp/error.hpp"

namespace krdp {

std::string canonical_path(std::string_view path) {
  std::string out;
  out.reserve(path.size());
  for (char c : path) {
    if (c == '\\') c = '/';
    if (c == '/' && (out.empty() || out.back() == '/')) continue;
    out.push_back(c);
  }
  while (out.starts_with("./")) out.erase(0, 2);
  if (out == ".") out.clear();
  if (!out.empty() && out.back() == '/') out.pop_back();
  return out;
}

bool is_valid_relative_path(std::string_view path) {
  if (path.empty() || path.front() == '/' || path.back() == '/') return false;
  if (path.find('\0') != std::string_view::npos) return false;
  if (detail::has_line_break_or_tab(path)) return false;
  for (auto segment : detail::split(path, '/')) {
    if (segment.empty() || segment == "." || segment == "..") return false;
  }
  return true;
}

bool ExcludeSet::excludes(std::string_view relative_path) const {
  if (patterns_.empty()) return false;
  const std::string full(relative_path);
  auto segments = detail::split(relative_path, '/');
  for (const auto& pattern : patterns_) {
    if (pattern.starts_with('/')) {
      if (::fnmatch(pattern.c_str() + 1, full.c_str(), FNM_PATHNAME) == 0) {
        return true;
      }
      continue;
    }
    if (pattern.find('/') != std::string::npos) {
      if (::fnmatch(pattern.c_str(), full.c_str(), FNM_PATHNAME) == 0) {
        return true;
      }
      continue;
    }
    for (auto segment : segments) {
      const std::string seg(segment);
      if (::fnmatch(pattern.c_str(), seg.c_str(), 0) == 0) return true;
    }
  }
  return false;
}

namespace {

struct Walker {
  const std::filesystem::path& root;
  const ExcludeSet& excludes;
  WalkResult result;

  // Returns false if the directory could not be opened.
  bool visit(const std::string& rel_dir) {
    std::filesystem::path dir = rel_dir.empty() ? root : root / rel_dir;
    DIR* d = ::opendir(dir.c_str());
    if (d == nullptr) return false;
    std::vector<std::string> names;
    while (dirent* entry = ::readdir(d)) {
      std::string_view name = entry->d_name;
      if (name == "." || name == "..") continue;
      names.emplace_back(name);
    }
    ::closedir(d);
    std::sort(names.begin(), names.end());

    for (const auto& name : names) {
      std::string rel = rel_dir.empty() ? name : rel_dir + "/" + name;
      if (detail::has_line_break_or_tab(name) || name.find('\\') != std::string::npos) {
        ++result.skipped.unrepresentable;
        continue;
      }
      if (excludes.excludes(rel)) {
        ++result.skipped.excluded;
        continue;
      }
      struct stat st {};
      if (::lstat((root / rel).c_str(), &st) != 0) {
        result.unreadable_dirs.push_back(rel);
        continue;
      }
      if (S_ISLNK(st.st_mode)) {
        ++result.skipped.symlinks;
      } else if (S_ISDIR(st.st_mode)) {
        if (!visit(rel)) result.unreadable_dirs.push_back(rel);
      } else if (S_ISREG(st.st_mode)) {
        result.files.push_back(std::move(rel));
      } else {
        ++result.skipped.special_files;
      }
    }
    return true;
  }
};

}  // namespace

WalkResult walk_tree(const std::filesystem::path& root,
                     const ExcludeSet& excludes) {
  struct stat st {};
  if (::stat(root.c_str(), &st) != 0 || !S_ISDIR(st.st_mode)) {
    throw Error(Errc::kRootUnreadable, root.string() + ": not a directory");
  }
  Walker walker{root, excludes, {}};
  if (!walker.visit("")) {
    throw Error(Errc::kRootUnreadable,
                root.string() + ": " + std::strerror(errno));
  }
  // Per-directory name sorting is not a global byte-wise order ("a/b" vs
  // "a.txt"), so sort the flat list once more.
  std::sort(walker.result.files.begin(), walker.result.files.end());
  std::sort(walker.result.unreadable_dirs.begin(),
            walker.result.unreadable_dirs.end());
  return std::move(walker.result);
}

}  // namespace krdp
