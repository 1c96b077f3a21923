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

// Internal file and text helpers shared by the library sources.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace krdp::detail {

/// Whole-file read; throws Error(kFileUnreadable).
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary, fsyncs it, then renames over `path`.
/// Throws Error(on_failure) on any failure; the target is then untouched.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view data, int mode = 0644);

/// Appends and fsyncs. Returns false on failure.
bool append_durable(const std::filesystem::path& path, std::string_view data);

void fsync_dir(const std::filesystem::path& dir);

/// Splits on '\n'. The input must be empty or end with '\n'; returns nullopt
/// otherwise. CR characters are not stripped.
std::optional<std::vector<std::string_view>> split_lines(std::string_view s);
// The result views into its argument, so temporaries are refused.
std::optional<std::vector<std::string_view>> split_lines(std::string&&) = delete;

std::vector<std::string_view> split(std::string_view s, char sep);

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  // from_chars accepts a leading '-' for signed types only; reject '+' and
  // leading zeros so that parse(render(x)) has a unique textual form.
  if (s.size() > 1 && s[0] == '0') return std::nullopt;
  if (s.size() > 2 && s[0] == '-' && s[1] == '0') return std::nullopt;
  if (s == "-0") return std::nullopt;
  Int value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool has_line_break_or_tab(std::string_view s);

}  // namespace krdp::detail
