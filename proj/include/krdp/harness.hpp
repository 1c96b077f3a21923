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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "krdp/crossview.hpp"
#include "krdp/manifest.hpp"
#include "krdp/signatures.hpp"

namespace krdp::harness {

/// Pseudorandom content generator used for every synthetic byte.
///
/// The generator is SplitMix64 in counter mode, pinned so fixtures stay
/// stable across versions:
///
///   mix(z)      = z += 0x9e3779b97f4a7c15;
///                 z = (z ^ z >> 30) * 0xbf58476d1ce4e5b9;
///                 z = (z ^ z >> 27) * 0x94d049bb133111eb;
///                 z ^ z >> 31
///   key         = mix(seed ^ mix(fnv1a64(label)))
///   word(k)     = mix(key + k * 0x9e3779b97f4a7c15)
///   byte(off)   = (word(off / 8) >> 8 * (off % 8)) & 0xff
///
/// Any byte is addressable directly, so a stream is a pure function of
/// (seed, label, offset).
class ContentStream {
 public:
  ContentStream(std::uint64_t seed, std::string_view label);

  std::uint8_t byte_at(std::uint64_t offset) const;
  void fill(std::span<std::uint8_t> out, std::uint64_t start_offset) const;
  std::vector<std::uint8_t> bytes(std::uint64_t start_offset, std::uint64_t length) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

std::uint64_t splitmix64_mix(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view s);

struct SandboxFile {
  std::string path;
  std::uint64_t size = 0;

  friend bool operator==(const SandboxFile&, const SandboxFile&) = default;
};

struct SandboxSpec {
  std::uint64_t seed = 0;
  std::vector<SandboxFile> files;

  friend bool operator==(const SandboxSpec&, const SandboxSpec&) = default;
};

/// `KRDP-SANDBOX v1`, `seed=<u64>`, then `<size>\t<path>` lines.
std::string render_sandbox_spec(const SandboxSpec& spec);
SandboxSpec parse_sandbox_spec(std::string_view data);

/// Sandbox files get this modification time so that manifests of separate
/// builds are byte-identical.
inline constexpr std::int64_t kSandboxMtime = 1'000'000'000;

/// Materializes the spec under root (which must be empty or absent;
/// Error(kRootNotEmpty) otherwise) and returns its snapshot. The manifest is
/// labelled "sandbox" with created_at 0.
Manifest build_sandbox(const SandboxSpec& spec, const std::filesystem::path& root);

/// Writes `length` pseudorandom bytes at `offset`, growing the file if
/// needed. Every byte inside the old extent is guaranteed to change, so any
/// non-empty overwrite changes the digest.
void infect_overwrite(const std::filesystem::path& path, std::uint64_t offset,
                      std::uint64_t seed, std::uint64_t length);

/// Appends pseudorandom bytes until the file is exactly target_size.
/// Error(kTargetSmallerThanFile) if it is already larger.
void infect_grow_to(const std::filesystem::path& path, std::uint64_t target_size,
                    std::uint64_t seed);

/// Cuts the file down to new_size, which must be smaller than its current
/// size (Error(kInvalidArgument) otherwise).
void infect_truncate(const std::filesystem::path& path, std::uint64_t new_size);

/// observed minus paths.
PathSet hide_from_view(const PathSet& observed, const std::vector<std::string>& paths);

// ---------------------------------------------------------------------------
// Sample rootkit fixtures.

struct SampleRootkit {
  std::string_view name;
  std::string_view affected_file;
  std::string_view listed_size;  // as printed in the sample table
  std::uint64_t size_bytes;      // KB = 1024 bytes, rounded to nearest
};

/// The nine sample rootkits with their target files and sizes.
std::span<const SampleRootkit> sample_rootkits();

inline constexpr std::uint64_t kFixtureSeed = 0x4b524450;  // "KRDP"

/// One clean target file per sample rootkit, at "<name>/<affected_file>"
/// (two families target the same file name).
SandboxSpec sample_rootkit_sandbox(std::uint64_t seed = kFixtureSeed);

/// Synthetic payload standing in for a rootkit sample.
std::vector<std::uint8_t> payload_bytes(std::uint64_t seed, std::string_view name,
                                        std::uint64_t size);

/// Signature DB whose every entry carries the digest of its payload.
SignatureDb sample_signature_db(std::uint64_t seed = kFixtureSeed);

/// Replaces the file's content with the payload for `sig`.
void plant_payload(const std::filesystem::path& path, std::uint64_t seed,
                   const Signature& sig);

/// Growth scenario: a single 9 KB KEYBOARD.SYS that is grown to 42 KB.
inline constexpr std::uint64_t kKeyboardSysSize = 9 * 1024;
inline constexpr std::uint64_t kKeyboardSysInfectedSize = 42 * 1024;
SandboxSpec keyboard_sys_sandbox(std::uint64_t seed = kFixtureSeed);

}  // namespace krdp::harness
