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

#include "krdp/harness.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "io.hpp"
#include "krdp/error.hpp"
#include "krdp/sha256.hpp"

namespace krdp::harness {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
constexpr std::string_view kSpecHeader = "KRDP-SANDBOX v1";

constexpr SampleRootkit kSampleRootkits[] = {
    {"Virus.Boot.Israeli.Boot.a", "Kernel.dll", "512 bytes", 512},
    {"Virus.Win32.Enerlam.c", "Kernel32.dll", "6KB", 6 * 1024},
    {"Virus.Boot.Gwar", "Tasthost.exe", "512 bytes", 512},
    {"Virus.Win32.Orez.6291", "User32.dll", "12.0 KB", 12 * 1024},
    {"Virus.Win32.Orez.6287", "Ucrtbase.dll", "12.0 KB", 12 * 1024},
    {"Virus.Multi.b", "System32.dll", "68 KB", 68 * 1024},
    {"Virus.DOS.Vienna.Violator.699", "Scvhost.exe", "1.4 KB", 1434},
    {"Virus.BATBatman.b", "Auto.bat", "256 bytes", 256},
    {"Virus.Win32.Hawey", "Scvhost.exe", "5.5 KB", 5632},
};

std::string basename_of(const std::filesystem::path& p) {
  return p.filename().string();
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(Errc::kFileUnreadable, path.string() + ": write failed");
}

std::vector<std::uint8_t> read_existing(const std::filesystem::path& path) {
  return detail::read_file(path);
}

}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

ContentStream::ContentStream(std::uint64_t seed, std::string_view label)
    : key_(splitmix64_mix(seed ^ splitmix64_mix(fnv1a64(label)))) {}

std::uint8_t ContentStream::byte_at(std::uint64_t offset) const {
  const std::uint64_t word = splitmix64_mix(key_ + (offset / 8) * kGolden);
  return static_cast<std::uint8_t>(word >> (8 * (offset % 8)));
}

void ContentStream::fill(std::span<std::uint8_t> out, std::uint64_t start_offset) const {
  std::uint64_t offset = start_offset;
  std::size_t i = 0;
  while (i < out.size()) {
    const std::uint64_t word = splitmix64_mix(key_ + (offset / 8) * kGolden);
    for (unsigned b = offset % 8; b < 8 && i < out.size(); ++b, ++i, ++offset) {
      out[i] = static_cast<std::uint8_t>(word >> (8 * b));
    }
  }
}

std::vector<std::uint8_t> ContentStream::bytes(std::uint64_t start_offset,
                                               std::uint64_t length) const {
  std::vector<std::uint8_t> out(length);
  fill(out, start_offset);
  return out;
}

std::string render_sandbox_spec(const SandboxSpec& spec) {
  std::string out(kSpecHeader);
  out += "\nseed=" + std::to_string(spec.seed) + "\n";
  for (const auto& f : spec.files) {
    out += std::to_string(f.size) + "\t" + f.path + "\n";
  }
  return out;
}

SandboxSpec parse_sandbox_spec(std::string_view data) {
  auto fail = [](const std::string& what) -> void {
    throw Error(Errc::kMalformedSandboxSpec, what);
  };
  auto lines = detail::split_lines(data);
  if (!lines || lines->size() < 2 || (*lines)[0] != kSpecHeader) fail("bad header");
  if (!(*lines)[1].starts_with("seed=")) fail("missing seed line");
  auto seed = detail::parse_int<std::uint64_t>((*lines)[1].substr(5));
  if (!seed) fail("bad seed");

  SandboxSpec spec;
  spec.seed = *seed;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 2; i < lines->size(); ++i) {
    auto f = detail::split((*lines)[i], '\t');
    if (f.size() != 2) fail("line " + std::to_string(i + 1) + ": expected <size>\\t<path>");
    auto size = detail::parse_int<std::uint64_t>(f[0]);
    if (!size) fail("line " + std::to_string(i + 1) + ": bad size");
    std::string path(f[1]);
    if (!is_valid_relative_path(path) || canonical_path(path) != path) {
      fail("line " + std::to_string(i + 1) + ": bad path");
    }
    if (!seen.insert(path).second) fail("duplicate path " + path);
    spec.files.push_back({std::move(path), *size});
  }
  return spec;
}

Manifest build_sandbox(const SandboxSpec& spec, const std::filesystem::path& root) {
  std::error_code ec;
  if (std::filesystem::exists(root, ec)) {
    if (!std::filesystem::is_directory(root, ec) ||
        std::filesystem::directory_iterator(root) != std::filesystem::directory_iterator()) {
      throw Error(Errc::kRootNotEmpty, root.string());
    }
  }
  std::filesystem::create_directories(root, ec);
  if (ec) throw Error(Errc::kRootUnreadable, root.string() + ": " + ec.message());

  std::unordered_set<std::string> seen;
  for (const auto& f : spec.files) {
    if (!is_valid_relative_path(f.path) || !seen.insert(f.path).second) {
      throw Error(Errc::kMalformedSandboxSpec, "bad or duplicate path '" + f.path + "'");
    }
    const auto full = root / f.path;
    std::filesystem::create_directories(full.parent_path(), ec);
    write_bytes(full, ContentStream(spec.seed, f.path).bytes(0, f.size));
    const struct timespec times[2] = {{kSandboxMtime, 0}, {kSandboxMtime, 0}};
    ::utimensat(AT_FDCWD, full.c_str(), times, 0);
  }

  SnapshotOptions options;
  options.root_label = "sandbox";
  options.created_at = 0;
  return snapshot(root, options).manifest;
}

void infect_overwrite(const std::filesystem::path& path, std::uint64_t offset,
                      std::uint64_t seed, std::uint64_t length) {
  auto content = read_existing(path);
  if (length == 0) return;
  const std::uint64_t old_size = content.size();
  const std::uint64_t end = offset + length;
  const ContentStream stream(seed, "overwrite:" + basename_of(path));
  if (end > content.size()) {
    // Any gap between the old end and offset is filled from the same stream.
    const std::size_t from = content.size();
    content.resize(end);
    stream.fill(std::span(content).subspan(from), from);
  }
  for (std::uint64_t i = offset; i < end; ++i) {
    std::uint8_t b = stream.byte_at(i);
    if (i < old_size && b == content[i]) b = static_cast<std::uint8_t>(~b);
    content[i] = b;
  }
  write_bytes(path, content);
}

void infect_grow_to(const std::filesystem::path& path, std::uint64_t target_size,
                    std::uint64_t seed) {
  auto content = read_existing(path);
  if (target_size < content.size()) {
    throw Error(Errc::kTargetSmallerThanFile,
                path.string() + " is " + std::to_string(content.size()) +
                    " bytes, target " + std::to_string(target_size));
  }
  if (target_size == content.size()) return;
  const std::size_t from = content.size();
  content.resize(target_size);
  ContentStream(seed, "grow:" + basename_of(path)).fill(std::span(content).subspan(from), from);
  write_bytes(path, content);
}

void infect_truncate(const std::filesystem::path& path, std::uint64_t new_size) {
  auto content = read_existing(path);
  if (new_size >= content.size()) {
    throw Error(Errc::kInvalidArgument,
                path.string() + ": truncation must shrink the file");
  }
  content.resize(new_size);
  write_bytes(path, content);
}

PathSet hide_from_view(const PathSet& observed, const std::vector<std::string>& paths) {
  const PathSet hide(paths);
  std::vector<std::string> kept;
  kept.reserve(observed.size());
  std::set_difference(observed.begin(), observed.end(), hide.begin(), hide.end(),
                      std::back_inserter(kept));
  return PathSet(std::move(kept));
}

std::span<const SampleRootkit> sample_rootkits() { return kSampleRootkits; }

SandboxSpec sample_rootkit_sandbox(std::uint64_t seed) {
  SandboxSpec spec;
  spec.seed = seed;
  for (const auto& r : kSampleRootkits) {
    spec.files.push_back({std::string(r.name) + "/" + std::string(r.affected_file), r.size_bytes});
  }
  return spec;
}

std::vector<std::uint8_t> payload_bytes(std::uint64_t seed, std::string_view name,
                                        std::uint64_t size) {
  return ContentStream(seed, "payload:" + std::string(name)).bytes(0, size);
}

SignatureDb sample_signature_db(std::uint64_t seed) {
  SignatureDb db;
  for (const auto& r : kSampleRootkits) {
    Signature sig{std::string(r.name), std::string(r.affected_file), r.size_bytes, std::nullopt};
    sig.digest = sha256_bytes(payload_bytes(seed, r.name, r.size_bytes));
    db.add(std::move(sig));
  }
  return db;
}

void plant_payload(const std::filesystem::path& path, std::uint64_t seed,
                   const Signature& sig) {
  write_bytes(path, payload_bytes(seed, sig.name, sig.size_bytes));
}

SandboxSpec keyboard_sys_sandbox(std::uint64_t seed) {
  return SandboxSpec{seed, {{"KEYBOARD.SYS", kKeyboardSysSize}}};
}

}  // namespace krdp::harness
