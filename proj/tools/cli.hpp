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

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace krdp::cli {

inline constexpr int kExitClean = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitError = 2;

/// Final lines of the pattern check and byte comparison in legacy-compatible
/// output mode.
inline constexpr std::string_view kPatternMatchMessage =
    "The virus pattern matches with the file";
inline constexpr std::string_view kPatternCleanMessage =
    "There is no virus pattern in the file";
inline constexpr std::string_view kBytesChangedMessage =
    "The bytes value of the file has changed! The file has been affected by virus";
inline constexpr std::string_view kBytesUnchangedMessage =
    "The bytes value of the files have unchanged";

/// Settings shared by all subcommands. Read from `key=value` lines (`#`
/// starts a comment); relative paths are resolved against the directory of
/// the config file. Command-line flags override file values.
struct Config {
  std::optional<std::filesystem::path> root;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> backup_store;
  std::optional<std::filesystem::path> sigdb;
  std::optional<std::filesystem::path> quarantine_store;
  std::optional<std::filesystem::path> alert_log;
  std::vector<std::string> excludes;
  bool paper_compat = false;
};

/// Throws krdp::Error(kInvalidArgument) on unknown keys or bad lines.
Config parse_config(std::string_view text, const std::filesystem::path& base_dir);
Config load_config(const std::filesystem::path& path);

/// Throws krdp::Error(kInvalidArgument) if two configured paths coincide.
void validate_config(const Config& c);

/// Entry point. args[0] is the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace krdp::cli
