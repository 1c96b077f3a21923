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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace krdp {

/// System-wide resource readings at one instant. Every metric is optional:
/// nullopt means the platform could not provide it, which is distinct from a
/// reading of zero.
struct PerfSnapshot {
  std::int64_t at_ms = 0;  // Unix epoch, milliseconds
  std::optional<double> cpu_percent;
  std::optional<std::uint64_t> processes;
  std::optional<std::uint64_t> threads;
  std::optional<std::uint64_t> handles;
  std::optional<std::uint64_t> mem_used_bytes;
  std::optional<std::uint64_t> mem_total_bytes;

  friend bool operator==(const PerfSnapshot&, const PerfSnapshot&) = default;
};

/// Throws Error(kMalformedSnapshot) when cpu is outside [0,100], memory used
/// exceeds total, or total is zero.
void validate(const PerfSnapshot& s);

struct SampleOptions {
  /// CPU usage is the busy fraction between two reads of the cumulative
  /// counters taken this far apart.
  std::chrono::milliseconds cpu_window{500};
};

/// Best-effort reading of the host. Successive calls within a process
/// return strictly increasing timestamps.
PerfSnapshot sample(const SampleOptions& options = {});

/// after - before, per field. A field missing from either side is nullopt
/// and its name is listed in not_comparable.
struct PerfDelta {
  PerfSnapshot before;
  PerfSnapshot after;
  std::int64_t elapsed_ms = 0;
  std::optional<double> cpu_percent;
  std::optional<std::int64_t> processes;
  std::optional<std::int64_t> threads;
  std::optional<std::int64_t> handles;
  std::optional<std::int64_t> mem_used_bytes;
  std::vector<std::string> not_comparable;
};

PerfDelta delta(const PerfSnapshot& before, const PerfSnapshot& after);

/// Human-readable:
///   cpu_percent: 17 -> 25 (delta +8)
///   mem_used: 0.9 GB -> 0.7 GB (delta -0.2 GB)
///   not-comparable: processes
std::string render_report(const PerfDelta& d);

/// `<at>\t<cpu>\t<processes>\t<threads>\t<handles>\t<mem_used>\t<mem_total>`
/// with `?` for unavailable fields. `at` is seconds with three decimals.
std::string render_snapshot_line(const PerfSnapshot& s);
PerfSnapshot parse_snapshot_line(std::string_view line);

/// Single-writer append of one snapshot line.
void append_snapshot(const std::filesystem::path& log, const PerfSnapshot& s);
std::vector<PerfSnapshot> read_snapshot_log(const std::filesystem::path& log);

/// Decimal gigabytes with one decimal, e.g. 900000000 -> "0.9".
std::string format_gb(std::int64_t bytes);

}  // namespace krdp
