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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>

#include "krdp/digest.hpp"

namespace krdp {

/// Incremental SHA-256 (FIPS 180-4).
///
///   Sha256 h;
///   h.update(chunk1);
///   h.update(chunk2);
///   Digest d = h.finish();
///
/// finish() may be called once; the object is reset afterwards and can be
/// reused for a new message.
class Sha256 {
 public:
  Sha256() { reset(); }

  void reset() noexcept;
  void update(std::span<const std::uint8_t> data) noexcept;
  void update(std::string_view data) noexcept;
  Digest finish() noexcept;

 private:
  void compress(const std::uint8_t* block) noexcept;

  std::array<std::uint32_t, 8> state_{};
  std::array<std::uint8_t, 64> buffer_{};
  std::size_t buffered_ = 0;
  std::uint64_t total_bytes_ = 0;
};

/// Read size used when streaming files through the hasher.
inline constexpr std::size_t kHashChunkSize = 65536;

Digest sha256_bytes(std::span<const std::uint8_t> data) noexcept;
Digest sha256_bytes(std::string_view data) noexcept;

/// Streams the file in kHashChunkSize reads. Throws Error(kFileUnreadable)
/// for missing files, directories, and permission failures.
Digest sha256_file(const std::filesystem::path& path);

/// Same as sha256_file but also reports the number of bytes hashed, which is
/// the file size as seen by this read (not a separate stat call).
Digest sha256_file(const std::filesystem::path& path, std::uint64_t& size_out);

}  // namespace krdp
