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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace krdp {

/// A SHA-256 value. Rendered and parsed as 64 lowercase hex characters;
/// comparison is byte-wise.
class Digest {
 public:
  static constexpr std::size_t kSize = 32;
  static constexpr std::size_t kHexLength = 2 * kSize;
  using Bytes = std::array<std::uint8_t, kSize>;

  Digest() = default;
  explicit Digest(const Bytes& bytes) : bytes_(bytes) {}

  /// Strict parse: exactly 64 characters from [0-9a-f]. Uppercase is
  /// rejected so that every accepted string is already canonical.
  static std::optional<Digest> parse(std::string_view hex);

  /// Like parse() but throws Error(kInvalidArgument).
  static Digest from_hex(std::string_view hex);

  std::string hex() const;
  const Bytes& bytes() const noexcept { return bytes_; }

  friend bool operator==(const Digest&, const Digest&) = default;
  friend auto operator<=>(const Digest&, const Digest&) = default;

 private:
  Bytes bytes_{};
};

}  // namespace krdp

template <>
struct std::hash<krdp::Digest> {
  std::size_t operator()(const krdp::Digest& d) const noexcept {
    // SHA-256 output is uniformly distributed; the first word is enough.
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) {
      h = (h << 8) | d.bytes()[i];
    }
    return h;
  }
};
