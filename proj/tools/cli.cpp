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

#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "krdp/backup.hpp"
#include "krdp/crossview.hpp"
#include "krdp/detector.hpp"
#include "krdp/error.hpp"
#include "krdp/harness.hpp"
#include "krdp/manifest.hpp"
#include "krdp/perfmon.hpp"
#include "krdp/response.hpp"
#include "krdp/sha256.hpp"
#include "krdp/signatures.hpp"

namespace krdp::cli {
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::kFileUnreadable, p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Error(Errc::kStoreWriteFailed, p.string());
}

bool parse_bool(std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(Errc::kInvalidArgument, "not a boolean: '" + std::string(v) + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string glob_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '*' || c == '?' || c == '[' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

// Relative path of `p` inside `root`, or nullopt if it lies outside.
std::optional<std::string> relative_inside(const fs::path& root, const fs::path& p) {
  std::error_code ec;
  const fs::path r = fs::weakly_canonical(root, ec);
  const fs::path q = fs::weakly_canonical(p, ec);
  auto rel = q.lexically_relative(r);
  if (rel.empty() || *rel.begin() == "..") return std::nullopt;
  std::string s = canonical_path(rel.generic_string());
  if (s.empty()) return std::nullopt;
  return s;
}

struct Context {
  Config config;
  bool machine = false;
  std::ostream& out;
  std::ostream& err;

  const fs::path& need(const std::optional<fs::path>& p, std::string_view key) const {
    if (!p) {
      throw Error(Errc::kInvalidArgument,
                  "no " + std::string(key) + " configured (use --" +
                      std::string(key) + " or the config file)");
    }
    return *p;
  }

  fs::path root() const {
    const fs::path& r = need(config.root, "root");
    std::error_code ec;
    if (!fs::is_directory(r, ec)) throw Error(Errc::kRootUnreadable, r.string());
    return r;
  }

  // User excludes plus the toolkit's own state files when they live in root.
  ExcludeSet excludes() const {
    std::vector<std::string> patterns = config.excludes;
    if (config.root) {
      for (const auto* p : {&config.manifest, &config.backup_store, &config.sigdb,
                            &config.quarantine_store, &config.alert_log}) {
        if (!*p) continue;
        if (auto rel = relative_inside(*config.root, **p)) {
          patterns.push_back("/" + glob_escape(*rel));
        }
      }
    }
    return ExcludeSet(std::move(patterns));
  }

  std::optional<SignatureDb> signatures() const {
    if (!config.sigdb) return std::nullopt;
    return load_signatures(read_text(*config.sigdb));
  }

  // Accepts a path relative to root, or an absolute/cwd-relative path that
  // lies inside root.
  std::string in_root(const std::string& arg) const {
    const fs::path r = root();
    std::error_code ec;
    if (fs::path(arg).is_absolute() || fs::exists(arg, ec)) {
      if (auto rel = relative_inside(r, arg)) {
        if (fs::exists(r / *rel, ec) || fs::path(arg).is_absolute()) return *rel;
      }
    }
    std::string rel = canonical_path(arg);
    if (!is_valid_relative_path(rel)) {
      throw Error(Errc::kInvalidArgument, "'" + arg + "' is not a path inside the root");
    }
    return rel;
  }
};

std::string status_label(FindingStatus s) {
  std::string label(status_token(s));
  for (auto& c : label) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return label;
}

void print_human_finding(std::ostream& out, const ScanFinding& f) {
  out << status_label(f.status) << "  " << f.path;
  if (f.signature_name) out << "  signature=" << *f.signature_name;
  if (f.size_delta && f.status != FindingStatus::kClean) {
    out << "  size " << signed_string(*f.size_delta);
  }
  if (f.diff && f.diff->first_divergence) {
    out << "  first-divergence=" << *f.diff->first_divergence;
  }
  if (f.note) out << "  (" << *f.note << ")";
  out << "\n";
}

void print_summary(std::ostream& out, const StatusCounts& c) {
  out << "clean=" << c.clean << " modified=" << c.modified << " missing=" << c.missing
      << " unknown=" << c.unknown << " sighit=" << c.sighit << "\n";
}

// Pattern-check lines in the format of the original command-line tool: the
// two digests, then the verdict.
void print_compat_pattern(std::ostream& out, const Digest& baseline, const Digest& observed) {
  out << baseline.hex() << "\n" << observed.hex() << "\n";
  out << (baseline == observed ? kPatternCleanMessage : kPatternMatchMessage) << "\n";
}

// ---------------------------------------------------------------------------

int cmd_baseline(Context& ctx) {
  const fs::path root = ctx.root();
  const fs::path& manifest_path = ctx.need(ctx.config.manifest, "manifest");
  SnapshotOptions options;
  options.excludes = ctx.excludes();
  SnapshotResult r = snapshot(root, options);
  save_manifest_file(manifest_path, r.manifest);

  std::size_t backed_up = 0;
  if (ctx.config.backup_store) {
    backed_up = BackupStore(*ctx.config.backup_store).populate(r.manifest, root);
  }
  if (ctx.machine) {
    ctx.out << write_manifest(r.manifest);
  } else {
    ctx.out << "baseline: " << r.manifest.records.size() << " files -> "
            << manifest_path.string() << "\n";
    if (ctx.config.backup_store) {
      ctx.out << "backup: " << backed_up << " new blobs in "
              << ctx.config.backup_store->string() << "\n";
    }
    const auto& s = r.skipped;
    if (s.symlinks + s.special_files + s.excluded + s.unrepresentable > 0) {
      ctx.out << "skipped: symlinks=" << s.symlinks << " special=" << s.special_files
              << " excluded=" << s.excluded << " unrepresentable=" << s.unrepresentable
              << "\n";
    }
  }
  for (const auto& p : r.unreadable) ctx.err << "krdp: unreadable: " << p << "\n";
  if (r.partial()) {
    ctx.err << "krdp: PartialSnapshot: " << r.unreadable.size() << " entries not recorded\n";
    return kExitFindings;
  }
  return kExitClean;
}

int cmd_scan(Context& ctx) {
  const fs::path root = ctx.root();
  const Manifest baseline = load_manifest_file(ctx.need(ctx.config.manifest, "manifest"));
  const auto sigdb = ctx.signatures();
  std::optional<BackupStore> backup;
  if (ctx.config.backup_store) backup.emplace(*ctx.config.backup_store);

  ScanOptions options;
  options.excludes = ctx.excludes();
  options.signatures = sigdb ? &*sigdb : nullptr;
  options.backup = backup ? &*backup : nullptr;
  const ScanReport report = scan(baseline, root, options);

  if (ctx.config.alert_log) {
    for (const auto& f : report.findings) {
      if (f.status != FindingStatus::kClean) alert(f, *ctx.config.alert_log, report.scanned_at);
    }
  }

  if (ctx.machine) {
    ctx.out << render_report(report);
  } else {
    for (const auto& f : report.findings) {
      if (f.status != FindingStatus::kClean) print_human_finding(ctx.out, f);
    }
    print_summary(ctx.out, report.counts);
    if (ctx.config.paper_compat) {
      for (const auto& f : report.findings) {
        if (!f.observed_digest || !f.baseline_digest ||
            *f.observed_digest == *f.baseline_digest) {
          continue;
        }
        ctx.out << f.path << "\n";
        print_compat_pattern(ctx.out, *f.baseline_digest, *f.observed_digest);
        if (f.diff) {
          ctx.out << (f.diff->equal ? kBytesUnchangedMessage : kBytesChangedMessage) << "\n";
        }
      }
    }
  }
  return report.has_findings() ? kExitFindings : kExitClean;
}

int cmd_check(Context& ctx, const std::string& arg) {
  const fs::path root = ctx.root();
  const Manifest baseline = load_manifest_file(ctx.need(ctx.config.manifest, "manifest"));
  const std::string rel = ctx.in_root(arg);
  const FileRecord* rec = lookup(baseline, rel);
  if (!rec) throw Error(Errc::kInvalidArgument, rel + " is not in the baseline");
  const PatternVerdict v = pattern_check(rec->digest, root / rel);

  if (ctx.machine) {
    ScanFinding f;
    f.path = rel;
    f.status = v.equal ? FindingStatus::kClean : FindingStatus::kModified;
    f.baseline_digest = v.baseline_digest;
    f.observed_digest = v.observed_digest;
    ScanReport r;
    r.findings.push_back(f);
    r.counts = tally(r.findings);
    ctx.out << render_report(r);
  } else if (ctx.config.paper_compat) {
    print_compat_pattern(ctx.out, v.baseline_digest, v.observed_digest);
  } else {
    ctx.out << rel << ": " << (v.equal ? "unchanged" : "MODIFIED") << "\n"
            << "  baseline " << v.baseline_digest.hex() << "\n"
            << "  observed " << v.observed_digest.hex() << "\n";
  }
  return v.equal ? kExitClean : kExitFindings;
}

int cmd_diff(Context& ctx, const std::string& clean, const std::string& tainted) {
  const DiffReport d = byte_compare(clean, tainted);
  if (ctx.config.paper_compat && !ctx.machine) {
    ctx.out << (d.equal ? kBytesUnchangedMessage : kBytesChangedMessage) << "\n";
  } else if (ctx.machine) {
    ctx.out << "equal=" << (d.equal ? 1 : 0) << " length_clean=" << d.length_clean
            << " length_tainted=" << d.length_tainted << " first_divergence="
            << (d.first_divergence ? std::to_string(*d.first_divergence) : "-")
            << " size_delta=" << signed_string(d.size_delta()) << "\n";
  } else if (d.equal) {
    ctx.out << "identical (" << d.length_clean << " bytes)\n";
  } else {
    ctx.out << "differ at byte " << *d.first_divergence << " (clean " << d.length_clean
            << " bytes, tainted " << d.length_tainted << " bytes, size "
            << signed_string(d.size_delta()) << ")\n";
  }
  return d.equal ? kExitClean : kExitFindings;
}

int cmd_crossview(Context& ctx, const std::string& observed_file) {
  const fs::path root = ctx.root();
  const Manifest trusted = load_manifest_file(ctx.need(ctx.config.manifest, "manifest"));
  const PathSet observed = observed_file.empty() ? observe(root, ctx.excludes())
                                                 : parse_path_list(read_text(observed_file));
  const ViewDiff d = cross_view_diff(trusted, observed);
  if (ctx.machine) {
    ctx.out << render_view_diff(d);
  } else {
    std::error_code ec;
    for (const auto& p : d.hidden) {
      // Crossview alone cannot tell hiding from deletion; a direct stat can
      // at least rule out deletion.
      if (fs::exists(root / p, ec)) {
        ctx.out << "HIDDEN  " << p << "  (present on disk, absent from observed view)\n";
      } else {
        ctx.out << "HIDDEN-OR-DELETED  " << p << "  (missing on disk)\n";
      }
    }
    for (const auto& p : d.unknown) ctx.out << "UNKNOWN  " << p << "\n";
    ctx.out << "hidden=" << d.hidden.size() << " unknown=" << d.unknown.size()
            << " common=" << d.common << "\n";
  }
  return d.clean() ? kExitClean : kExitFindings;
}

int cmd_quarantine(Context& ctx, const std::string& arg, const std::string& reason) {
  const fs::path root = ctx.root();
  const std::string rel = ctx.in_root(arg);
  auto store = QuarantineStore::open(ctx.need(ctx.config.quarantine_store, "quarantine-store"),
                                     QuarantineStore::Mode::kReadWrite);
  const QuarantineEntry e = store.quarantine(root, rel, reason);
  if (ctx.machine) {
    ctx.out << render_index_line(e) << "\n";
  } else {
    ctx.out << "quarantined " << e.original_path << " as entry " << e.id << " ("
            << e.digest.hex() << ")\n";
  }
  return kExitClean;
}

int cmd_restore(Context& ctx, std::uint64_t id, const std::string& dest) {
  auto store = QuarantineStore::open(ctx.need(ctx.config.quarantine_store, "quarantine-store"),
                                     QuarantineStore::Mode::kReadWrite);
  const fs::path written = store.restore(id, dest);
  ctx.out << (ctx.machine ? "" : "restored entry " + std::to_string(id) + " to ")
          << written.string() << "\n";
  return kExitClean;
}

int cmd_open(Context& ctx, const std::string& arg) {
  const fs::path root = ctx.root();
  const std::string rel = ctx.in_root(arg);
  const auto store = QuarantineStore::open(
      ctx.need(ctx.config.quarantine_store, "quarantine-store"),
      QuarantineStore::Mode::kReadOnly);
  const auto sigdb = ctx.signatures();
  GuardedContent content = guarded_open(root, rel, store, sigdb ? &*sigdb : nullptr);
  if (auto* blocked = std::get_if<PreventionBlocked>(&content)) {
    ctx.err << "PreventionBlocked: " << to_string(blocked->reason) << ": " << rel << ": "
            << blocked->detail << "\n";
    return kExitFindings;
  }
  const auto& bytes = std::get<std::vector<std::uint8_t>>(content);
  ctx.out.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
  return kExitClean;
}

int cmd_perf_snapshot(Context& ctx, const std::string& log, int window_ms) {
  SampleOptions options;
  options.cpu_window = std::chrono::milliseconds(window_ms);
  const PerfSnapshot s = sample(options);
  if (!log.empty()) append_snapshot(log, s);
  ctx.out << render_snapshot_line(s) << "\n";
  return kExitClean;
}

PerfSnapshot last_snapshot(const std::string& path) {
  auto snaps = read_snapshot_log(path);
  if (snaps.empty()) throw Error(Errc::kMalformedSnapshot, path + ": no snapshots");
  return snaps.back();
}

int cmd_perf_delta(Context& ctx, const std::string& before, const std::string& after) {
  const PerfDelta d = delta(last_snapshot(before), last_snapshot(after));
  ctx.out << render_report(d);
  return kExitClean;
}

int cmd_sim_build(Context& ctx, const std::string& spec_path) {
  const fs::path& root = ctx.need(ctx.config.root, "root");
  const Manifest m = harness::build_sandbox(harness::parse_sandbox_spec(read_text(spec_path)), root);
  if (ctx.machine) {
    ctx.out << write_manifest(m);
  } else {
    ctx.out << "built sandbox with " << m.records.size() << " files in " << root.string() << "\n";
  }
  return kExitClean;
}

int cmd_sim_overwrite(Context& ctx, const std::string& arg, std::uint64_t offset,
                      std::uint64_t length, std::uint64_t seed) {
  const std::string rel = ctx.in_root(arg);
  harness::infect_overwrite(ctx.root() / rel, offset, seed, length);
  if (!ctx.machine) ctx.out << "overwrote " << length << " bytes at " << offset << " in " << rel << "\n";
  return kExitClean;
}

int cmd_sim_grow(Context& ctx, const std::string& arg, std::uint64_t target, std::uint64_t seed) {
  const std::string rel = ctx.in_root(arg);
  harness::infect_grow_to(ctx.root() / rel, target, seed);
  if (!ctx.machine) ctx.out << "grew " << rel << " to " << target << " bytes\n";
  return kExitClean;
}

int cmd_sim_hide(Context& ctx, const std::vector<std::string>& paths, const std::string& out_file) {
  const fs::path root = ctx.root();
  std::vector<std::string> rels;
  for (const auto& p : paths) rels.push_back(ctx.in_root(p));
  const PathSet view = harness::hide_from_view(observe(root, ctx.excludes()), rels);
  const std::string text = render_path_list(view);
  if (out_file.empty()) {
    ctx.out << text;
  } else {
    write_text(out_file, text);
    if (!ctx.machine) ctx.out << "observed view with " << view.size() << " paths -> " << out_file << "\n";
  }
  return kExitClean;
}

int cmd_sim_sigdb(Context& ctx, const std::string& out_file, std::uint64_t seed) {
  const std::string text = save_signatures(harness::sample_signature_db(seed));
  if (out_file.empty()) {
    ctx.out << text;
  } else {
    write_text(out_file, text);
  }
  return kExitClean;
}

int cmd_sim_plant(Context& ctx, const std::string& name, const std::string& arg,
                  std::uint64_t seed) {
  const std::string rel = ctx.in_root(arg);
  const SignatureDb db = harness::sample_signature_db(seed);
  const Signature* sig = db.find(name);
  if (!sig) throw Error(Errc::kInvalidArgument, "no sample rootkit named '" + name + "'");
  harness::plant_payload(ctx.root() / rel, seed, *sig);
  if (!ctx.machine) ctx.out << "planted " << name << " payload into " << rel << "\n";
  return kExitClean;
}

}  // namespace

Config parse_config(std::string_view text, const fs::path& base_dir) {
  Config c;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::kInvalidArgument, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    auto as_path = [&] {
      fs::path p(value);
      return p.is_relative() ? base_dir / p : p;
    };
    if (key == "root") c.root = as_path();
    else if (key == "manifest") c.manifest = as_path();
    else if (key == "backup_store") c.backup_store = as_path();
    else if (key == "sigdb") c.sigdb = as_path();
    else if (key == "quarantine_store") c.quarantine_store = as_path();
    else if (key == "alert_log") c.alert_log = as_path();
    else if (key == "exclude") c.excludes.push_back(value);
    else if (key == "paper_compat") c.paper_compat = parse_bool(value);
    else throw Error(Errc::kInvalidArgument, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return c;
}

Config load_config(const fs::path& path) {
  return parse_config(read_text(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

void validate_config(const Config& c) {
  std::vector<std::pair<std::string, fs::path>> paths;
  auto add = [&](const char* name, const std::optional<fs::path>& p) {
    if (p) paths.emplace_back(name, fs::absolute(*p).lexically_normal());
  };
  add("root", c.root);
  add("manifest", c.manifest);
  add("backup_store", c.backup_store);
  add("sigdb", c.sigdb);
  add("quarantine_store", c.quarantine_store);
  add("alert_log", c.alert_log);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      if (paths[i].second == paths[j].second) {
        throw Error(Errc::kInvalidArgument,
                    paths[i].first + " and " + paths[j].first + " are the same path");
      }
    }
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel rootkit detection and prevention toolkit", "krdp"};
  app.require_subcommand(1);

  std::string config_path;
  bool machine = false;
  bool paper_compat = false;
  std::string root, manifest, backup_store, sigdb, quarantine_store, alert_log;
  std::vector<std::string> excludes;

  app.add_option("--config", config_path, "Config file (falls back to $KRDP_CONFIG)");
  app.add_flag("--machine", machine, "Machine-readable output");
  app.add_flag("--paper-compat", paper_compat, "Print pattern/byte verdicts in the classic format");
  app.add_option("--root", root, "Directory tree to protect");
  app.add_option("--manifest", manifest, "Baseline manifest file");
  app.add_option("--backup-store", backup_store, "Content-addressed backup directory");
  app.add_option("--sigdb", sigdb, "Signature database file");
  app.add_option("--quarantine-store", quarantine_store, "Quarantine store directory");
  app.add_option("--alert-log", alert_log, "Alert log file");
  app.add_option("--exclude", excludes, "Glob to exclude (repeatable)");

  std::function<int(Context&)> action;

  auto* baseline = app.add_subcommand("baseline", "Record the trusted baseline of root");
  baseline->callback([&] { action = cmd_baseline; });

  auto* scan_cmd = app.add_subcommand("scan", "Compare root against the baseline");
  scan_cmd->callback([&] { action = cmd_scan; });

  std::string check_path;
  auto* check = app.add_subcommand("check", "Pattern-check one file against its baseline digest");
  check->add_option("path", check_path)->required();
  check->callback([&] { action = [&](Context& c) { return cmd_check(c, check_path); }; });

  std::string diff_clean, diff_tainted;
  auto* diff_cmd = app.add_subcommand("diff", "Byte-compare a clean file with a tainted one");
  diff_cmd->add_option("clean", diff_clean)->required();
  diff_cmd->add_option("tainted", diff_tainted)->required();
  diff_cmd->callback([&] {
    action = [&](Context& c) { return cmd_diff(c, diff_clean, diff_tainted); };
  });

  std::string observed_file;
  auto* xview = app.add_subcommand("crossview", "Find files hidden from the observed view");
  xview->add_option("--observed", observed_file, "Observed path list instead of live enumeration");
  xview->callback([&] { action = [&](Context& c) { return cmd_crossview(c, observed_file); }; });

  std::string q_path, q_reason = "manual";
  auto* quarantine_cmd = app.add_subcommand("quarantine", "Move a file into the quarantine store");
  quarantine_cmd->add_option("path", q_path)->required();
  quarantine_cmd->add_option("--reason", q_reason);
  quarantine_cmd->callback([&] {
    action = [&](Context& c) { return cmd_quarantine(c, q_path, q_reason); };
  });

  std::uint64_t r_id = 0;
  std::string r_dest;
  auto* restore_cmd = app.add_subcommand("restore", "Restore a quarantined file");
  restore_cmd->add_option("id", r_id)->required();
  restore_cmd->add_option("dest", r_dest)->required();
  restore_cmd->callback([&] {
    action = [&](Context& c) { return cmd_restore(c, r_id, r_dest); };
  });

  std::string o_path;
  auto* open_cmd = app.add_subcommand("open", "Print a file unless it is quarantined or a signature hit");
  open_cmd->add_option("path", o_path)->required();
  open_cmd->callback([&] { action = [&](Context& c) { return cmd_open(c, o_path); }; });

  auto* perf = app.add_subcommand("perf", "System performance snapshots");
  perf->require_subcommand(1);
  std::string perf_log;
  int window_ms = 500;
  auto* perf_snap = perf->add_subcommand("snapshot", "Sample the host");
  perf_snap->add_option("--log", perf_log, "Append the snapshot to this log");
  perf_snap->add_option("--window-ms", window_ms, "CPU sampling window")->check(CLI::Range(1, 60000));
  perf_snap->callback([&] {
    action = [&](Context& c) { return cmd_perf_snapshot(c, perf_log, window_ms); };
  });
  std::string perf_before, perf_after;
  auto* perf_delta = perf->add_subcommand("delta", "Difference between two snapshot logs");
  perf_delta->add_option("before", perf_before)->required();
  perf_delta->add_option("after", perf_after)->required();
  perf_delta->callback([&] {
    action = [&](Context& c) { return cmd_perf_delta(c, perf_before, perf_after); };
  });

  auto* sim = app.add_subcommand("simulate", "Deterministic infection simulator");
  sim->require_subcommand(1);
  std::uint64_t sim_seed = harness::kFixtureSeed;
  std::string build_spec;
  auto* sim_build = sim->add_subcommand("build", "Create a sandbox tree in root");
  sim_build->add_option("spec", build_spec)->required();
  sim_build->callback([&] { action = [&](Context& c) { return cmd_sim_build(c, build_spec); }; });

  std::string ow_path;
  std::uint64_t ow_offset = 0, ow_length = 1;
  auto* sim_ow = sim->add_subcommand("overwrite", "Overwrite bytes of a file");
  sim_ow->add_option("path", ow_path)->required();
  sim_ow->add_option("--offset", ow_offset);
  sim_ow->add_option("--length", ow_length);
  sim_ow->add_option("--seed", sim_seed);
  sim_ow->callback([&] {
    action = [&](Context& c) { return cmd_sim_overwrite(c, ow_path, ow_offset, ow_length, sim_seed); };
  });

  std::string grow_path;
  std::uint64_t grow_to = 0;
  auto* sim_grow = sim->add_subcommand("grow", "Append bytes until a file reaches a size");
  sim_grow->add_option("path", grow_path)->required();
  sim_grow->add_option("--to", grow_to)->required();
  sim_grow->add_option("--seed", sim_seed);
  sim_grow->callback([&] {
    action = [&](Context& c) { return cmd_sim_grow(c, grow_path, grow_to, sim_seed); };
  });

  std::vector<std::string> hide_paths;
  std::string hide_out;
  auto* sim_hide = sim->add_subcommand("hide", "Write the observed view of root minus some paths");
  sim_hide->add_option("paths", hide_paths)->required();
  sim_hide->add_option("--out", hide_out, "Output file (default: stdout)");
  sim_hide->callback([&] {
    action = [&](Context& c) { return cmd_sim_hide(c, hide_paths, hide_out); };
  });

  std::string sigdb_out;
  auto* sim_sigdb = sim->add_subcommand("sigdb", "Emit the sample rootkit signature database");
  sim_sigdb->add_option("--out", sigdb_out, "Output file (default: stdout)");
  sim_sigdb->add_option("--seed", sim_seed);
  sim_sigdb->callback([&] {
    action = [&](Context& c) { return cmd_sim_sigdb(c, sigdb_out, sim_seed); };
  });

  std::string plant_name, plant_path;
  auto* sim_plant = sim->add_subcommand("plant", "Replace a file with a sample rootkit payload");
  sim_plant->add_option("name", plant_name)->required();
  sim_plant->add_option("path", plant_path)->required();
  sim_plant->add_option("--seed", sim_seed);
  sim_plant->callback([&] {
    action = [&](Context& c) { return cmd_sim_plant(c, plant_name, plant_path, sim_seed); };
  });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitClean : kExitError;
  }

  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv("KRDP_CONFIG"); env && *env) config_path = env;
    }
    Config config = config_path.empty() ? Config{} : load_config(config_path);
    auto set = [](std::optional<fs::path>& slot, const std::string& v) {
      if (!v.empty()) slot = fs::path(v);
    };
    set(config.root, root);
    set(config.manifest, manifest);
    set(config.backup_store, backup_store);
    set(config.sigdb, sigdb);
    set(config.quarantine_store, quarantine_store);
    set(config.alert_log, alert_log);
    config.excludes.insert(config.excludes.end(), excludes.begin(), excludes.end());
    if (paper_compat) config.paper_compat = true;
    validate_config(config);

    Context ctx{std::move(config), machine, out, err};
    return action(ctx);
  } catch (const std::exception& e) {
    err << "krdp: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace krdp::cli
