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

#include "krdp/digest.hpp"
#include "krdp/manifest.hpp"

namespace krdp {

/// Content-addressed mirror of baseline files: `<dir>/<digest>` holds the
/// bytes whose SHA-256 is <digest>. Only byte comparison and restore need
/// it; hash-only detection works from the manifest alone.
class BackupStore {
 public:
  explicit BackupStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const Digest& d) const;
  bool contains(const Digest& d) const;

  /// Copies every manifest record from root into the store, skipping digests
  /// already present. A file whose content no longer matches its record is
  /// not stored. Returns the number of blobs written.
  std::size_t populate(const Manifest& m, const std::filesystem::path& root);

 private:
  std::filesystem::path dir_;
};

}  // namespace krdp
