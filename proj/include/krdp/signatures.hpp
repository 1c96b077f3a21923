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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "krdp/digest.hpp"

namespace krdp {

/// A known-rootkit entry: family name, the file it targets, the size listed
/// for it, and (optionally) the SHA-256 of its payload. Entries without a
/// digest are informational only and never produce a hit on their own.
struct Signature {
  std::string name;
  std::string affected_file;
  std::uint64_t size_bytes = 0;
  std::optional<Digest> digest;

  friend bool operator==(const Signature&, const Signature&) = default;
};

class SignatureDb {
 public:
  static constexpr int kFormatVersion = 1;

  SignatureDb() = default;

  /// Throws Error(kDuplicateSignatureName) if the name is taken and
  /// Error(kInvalidArgument) for names or filenames that are empty or
  /// contain tabs or line breaks.
  void add(Signature sig);

  int version() const { return kFormatVersion; }
  const std::vector<Signature>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  /// Average O(1).
  const Signature* match_digest(const Digest& d) const;

  /// Entries whose affected_file equals `filename` (compared
  /// case-insensitively, as the targets are Windows file names).
  std::vector<const Signature*> by_affected_file(std::string_view filename) const;

  const Signature* find(std::string_view name) const;

  friend bool operator==(const SignatureDb& a, const SignatureDb& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<Signature> entries_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::unordered_map<Digest, std::size_t> digest_index_;
};

/// Text form: `KRDP-SIGDB v1` then
/// `<name>\t<affected_file>\t<size_bytes>\t<digest-or->` per entry.
SignatureDb load_signatures(std::string_view data);
std::string save_signatures(const SignatureDb& db);

}  // namespace krdp
