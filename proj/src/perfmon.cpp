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

#include "krdp/perfmon.hpp"

#include <dirent.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "io.hpp"
#include "krdp/detector.hpp"
#include "krdp/error.hpp"

namespace krdp {
namespace {

constexpr double kBytesPerGb = 1e9;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(Errc::kMalformedSnapshot, what);
}

struct CpuTimes {
  std::uint64_t total = 0;
  std::uint64_t idle = 0;
};

std::optional<CpuTimes> read_cpu_times() {
  std::ifstream in("/proc/stat");
  std::string label;
  if (!(in >> label) || label != "cpu") return std::nullopt;
  // user nice system idle iowait irq softirq steal
  std::array<std::uint64_t, 8> v{};
  for (auto& x : v) {
    if (!(in >> x)) return std::nullopt;
  }
  CpuTimes t;
  for (auto x : v) t.total += x;
  t.idle = v[3] + v[4];
  return t;
}

std::optional<std::uint64_t> count_processes() {
  DIR* d = ::opendir("/proc");
  if (!d) return std::nullopt;
  std::uint64_t n = 0;
  while (dirent* e = ::readdir(d)) {
    std::string_view name = e->d_name;
    if (!name.empty() && name.find_first_not_of("0123456789") == std::string_view::npos) ++n;
  }
  ::closedir(d);
  return n;
}

std::optional<std::uint64_t> count_threads() {
  // Fourth field of loadavg is "<runnable>/<total scheduling entities>".
  std::ifstream in("/proc/loadavg");
  std::string a, b, c, entities;
  if (!(in >> a >> b >> c >> entities)) return std::nullopt;
  auto slash = entities.find('/');
  if (slash == std::string::npos) return std::nullopt;
  return detail::parse_int<std::uint64_t>(std::string_view(entities).substr(slash + 1));
}

std::optional<std::uint64_t> count_handles() {
  std::ifstream in("/proc/sys/fs/file-nr");
  std::uint64_t allocated = 0;
  if (!(in >> allocated)) return std::nullopt;
  return allocated;
}

void read_memory(PerfSnapshot& s) {
  std::ifstream in("/proc/meminfo");
  std::string key, unit;
  std::uint64_t value = 0;
  std::optional<std::uint64_t> total, available;
  while (in >> key >> value) {
    std::getline(in, unit);
    if (key == "MemTotal:") total = value * 1024;
    if (key == "MemAvailable:") available = value * 1024;
  }
  if (total && *total > 0) {
    s.mem_total_bytes = total;
    if (available && *available <= *total) s.mem_used_bytes = *total - *available;
  }
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string shortest(double v) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

// Up to two decimals, trailing zeros trimmed: 17 -> "17", 8.25 -> "8.25".
std::string human(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string human_signed(double v) {
  std::string s = human(v);
  return s == "0" || s.front() == '-' ? s : "+" + s;
}

template <typename T>
std::string field(const std::optional<T>& v) {
  if (!v) return "?";
  if constexpr (std::is_floating_point_v<T>) {
    return shortest(*v);
  } else {
    return std::to_string(*v);
  }
}

std::optional<std::int64_t> diff(const std::optional<std::uint64_t>& before,
                                 const std::optional<std::uint64_t>& after) {
  if (!before || !after) return std::nullopt;
  return static_cast<std::int64_t>(*after) - static_cast<std::int64_t>(*before);
}

}  // namespace

void validate(const PerfSnapshot& s) {
  if (s.at_ms < 0) malformed("negative timestamp");
  if (s.cpu_percent && !(*s.cpu_percent >= 0.0 && *s.cpu_percent <= 100.0)) {
    malformed("cpu_percent outside [0,100]");
  }
  if (s.mem_total_bytes && *s.mem_total_bytes == 0) malformed("mem_total is zero");
  if (s.mem_used_bytes && s.mem_total_bytes && *s.mem_used_bytes > *s.mem_total_bytes) {
    malformed("mem_used exceeds mem_total");
  }
}

PerfSnapshot sample(const SampleOptions& options) {
  static std::atomic<std::int64_t> last_at{0};

  PerfSnapshot s;
  auto first = read_cpu_times();
  std::this_thread::sleep_for(options.cpu_window);
  auto second = read_cpu_times();
  if (first && second && second->total > first->total) {
    const double total = static_cast<double>(second->total - first->total);
    const double idle = static_cast<double>(second->idle - first->idle);
    s.cpu_percent = std::clamp(100.0 * (total - idle) / total, 0.0, 100.0);
  }
  s.processes = count_processes();
  s.threads = count_threads();
  s.handles = count_handles();
  read_memory(s);

  // Wall clock may stall or step back; keep the per-process sequence strict.
  std::int64_t at = now_ms();
  std::int64_t prev = last_at.load();
  do {
    at = std::max(at, prev + 1);
  } while (!last_at.compare_exchange_weak(prev, at));
  s.at_ms = at;
  return s;
}

PerfDelta delta(const PerfSnapshot& before, const PerfSnapshot& after) {
  PerfDelta d;
  d.before = before;
  d.after = after;
  d.elapsed_ms = after.at_ms - before.at_ms;
  if (before.cpu_percent && after.cpu_percent) {
    d.cpu_percent = *after.cpu_percent - *before.cpu_percent;
  } else {
    d.not_comparable.emplace_back("cpu_percent");
  }
  auto int_field = [&](const char* name, const std::optional<std::uint64_t>& b,
                       const std::optional<std::uint64_t>& a,
                       std::optional<std::int64_t>& out) {
    out = diff(b, a);
    if (!out) d.not_comparable.emplace_back(name);
  };
  int_field("processes", before.processes, after.processes, d.processes);
  int_field("threads", before.threads, after.threads, d.threads);
  int_field("handles", before.handles, after.handles, d.handles);
  int_field("mem_used", before.mem_used_bytes, after.mem_used_bytes, d.mem_used_bytes);
  return d;
}

std::string format_gb(std::int64_t bytes) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", static_cast<double>(bytes) / kBytesPerGb);
  std::string s = buf;
  if (s == "-0.0") s = "0.0";
  return s;
}

std::string render_report(const PerfDelta& d) {
  std::ostringstream out;
  out << "elapsed: " << human(static_cast<double>(d.elapsed_ms) / 1000.0) << " s\n";
  if (d.cpu_percent) {
    out << "cpu_percent: " << human(*d.before.cpu_percent) << " -> "
        << human(*d.after.cpu_percent) << " (delta " << human_signed(*d.cpu_percent)
        << ")\n";
  }
  auto int_line = [&](const char* name, const std::optional<std::uint64_t>& b,
                      const std::optional<std::uint64_t>& a,
                      const std::optional<std::int64_t>& v) {
    if (!v) return;
    out << name << ": " << *b << " -> " << *a << " (delta " << signed_string(*v) << ")\n";
  };
  int_line("processes", d.before.processes, d.after.processes, d.processes);
  int_line("threads", d.before.threads, d.after.threads, d.threads);
  int_line("handles", d.before.handles, d.after.handles, d.handles);
  if (d.mem_used_bytes) {
    std::string gb = *d.mem_used_bytes == 0 ? "0" : format_gb(*d.mem_used_bytes);
    if (*d.mem_used_bytes > 0) gb = "+" + gb;
    out << "mem_used: " << format_gb(static_cast<std::int64_t>(*d.before.mem_used_bytes))
        << " GB -> " << format_gb(static_cast<std::int64_t>(*d.after.mem_used_bytes))
        << " GB (delta " << gb << " GB)";
    if (d.after.mem_total_bytes) {
      out << " of " << format_gb(static_cast<std::int64_t>(*d.after.mem_total_bytes)) << " GB";
    }
    out << "\n";
  }
  if (!d.not_comparable.empty()) {
    out << "not-comparable:";
    for (const auto& name : d.not_comparable) out << ' ' << name;
    out << "\n";
  }
  return out.str();
}

std::string render_snapshot_line(const PerfSnapshot& s) {
  validate(s);
  char at[32];
  std::snprintf(at, sizeof at, "%lld.%03lld", static_cast<long long>(s.at_ms / 1000),
                static_cast<long long>(s.at_ms % 1000));
  return std::string(at) + "\t" + field(s.cpu_percent) + "\t" + field(s.processes) +
         "\t" + field(s.threads) + "\t" + field(s.handles) + "\t" +
         field(s.mem_used_bytes) + "\t" + field(s.mem_total_bytes);
}

PerfSnapshot parse_snapshot_line(std::string_view line) {
  auto f = detail::split(line, '\t');
  if (f.size() != 7) malformed("expected 7 fields");

  PerfSnapshot s;
  {
    auto dot = f[0].find('.');
    if (dot == std::string_view::npos || f[0].size() - dot != 4) malformed("bad timestamp");
    auto secs = detail::parse_int<std::int64_t>(f[0].substr(0, dot));
    auto frac = f[0].substr(dot + 1);
    if (!secs || frac.find_first_not_of("0123456789") != std::string_view::npos) {
      malformed("bad timestamp");
    }
    s.at_ms = *secs * 1000 + std::stoll(std::string(frac));
  }
  if (f[1] != "?") {
    double v = 0;
    auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), v);
    if (ec != std::errc() || ptr != f[1].data() + f[1].size() || !std::isfinite(v)) {
      malformed("bad cpu_percent");
    }
    s.cpu_percent = v;
  }
  auto count = [&](std::string_view text, std::optional<std::uint64_t>& out) {
    if (text == "?") return;
    out = detail::parse_int<std::uint64_t>(text);
    if (!out) malformed("bad counter '" + std::string(text) + "'");
  };
  count(f[2], s.processes);
  count(f[3], s.threads);
  count(f[4], s.handles);
  count(f[5], s.mem_used_bytes);
  count(f[6], s.mem_total_bytes);
  validate(s);
  return s;
}

void append_snapshot(const std::filesystem::path& log, const PerfSnapshot& s) {
  if (!detail::append_durable(log, render_snapshot_line(s) + "\n")) {
    throw Error(Errc::kLogWriteFailed, log.string());
  }
}

std::vector<PerfSnapshot> read_snapshot_log(const std::filesystem::path& log) {
  const std::string data = detail::read_text_file(log);
  auto lines = detail::split_lines(data);
  if (!lines) malformed("missing final newline");
  std::vector<PerfSnapshot> out;
  for (auto line : *lines) {
    if (line.empty() || line.front() == '#') continue;
    out.push_back(parse_snapshot_line(line));
  }
  return out;
}

}  // namespace krdp
