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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "krdp/backup.hpp"
#include "krdp/crossview.hpp"
#include "krdp/detector.hpp"
#include "krdp/harness.hpp"
#include "krdp/manifest.hpp"
#include "krdp/perfmon.hpp"
#include "krdp/response.hpp"
#include "krdp/sha256.hpp"
#include "krdp/signatures.hpp"
#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;
using namespace krdp;
using krdp::testing::TempDir;

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records the first failing condition.
  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun krdp_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "krdp");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

Digest random_digest(std::mt19937_64& rng) {
  Digest::Bytes b;
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return Digest(b);
}

// 1. SHA-256 reference vectors and 1000 random inputs against OpenSSL.
Outcome hash_correctness() {
  Outcome o;
  o.require(sha256_bytes("").hex() ==
                "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855",
            "empty-input vector");
  o.require(sha256_bytes("abc").hex() ==
                "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad",
            "\"abc\" vector");
  std::mt19937_64 rng(0x5a5a);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = (i % 100 == 0) ? rng() % (1u << 20) : rng() % 4096;
    const auto data = krdp::testing::random_bytes(rng, n);
    if (sha256_bytes(data).hex() != krdp::testing::openssl_sha256_hex(data)) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches vs OpenSSL");
  if (o.pass) o.detail = "2 vectors + 1000 random inputs, 0 mismatches";
  return o;
}

// 2. Growth scenario: 9216-byte KEYBOARD.SYS grown to 43008 bytes.
Outcome growth_reproduction() {
  Outcome o;
  TempDir dir;
  const std::vector<std::string> state = {
      "--root", (dir / "root").string(), "--manifest", (dir / "manifest").string(),
      "--backup-store", (dir / "backup").string()};
  auto run = [&](std::vector<std::string> args) {
    auto full = state;
    full.insert(full.end(), args.begin(), args.end());
    return krdp_cli(full);
  };
  const fs::path spec = fs::path(KRDP_FIXTURE_DIR) / "table2.spec";
  o.require(run({"simulate", "build", spec.string()}).code == 0, "simulate build failed");
  o.require(run({"baseline"}).code == 0, "baseline failed");
  o.require(run({"simulate", "grow", "KEYBOARD.SYS", "--to", "43008"}).code == 0,
            "simulate grow failed");
  if (!o.pass) return o;

  const Manifest baseline = load_manifest_file(dir / "manifest");
  const BackupStore backup(dir / "backup");
  ScanOptions options;
  options.backup = &backup;
  const ScanReport report = scan(baseline, dir / "root", options);
  o.require(report.findings.size() == 1 && report.counts.modified == 1,
            "expected exactly one Modified finding");
  if (!o.pass) return o;
  const ScanFinding& f = report.findings[0];
  o.require(f.size_delta == 33792, "size_delta != +33792");
  o.require(f.diff && f.diff->first_divergence == 9216u, "first_divergence != 9216");

  const CliRun diff = krdp_cli({"--paper-compat", "diff",
                                backup.path_for(*f.baseline_digest).string(),
                                (dir / "root/KEYBOARD.SYS").string()});
  o.require(diff.out ==
                "The bytes value of the file has changed! The file has been affected by virus\n",
            "--paper-compat diff output differs: " + diff.out);
  if (o.pass) o.detail = "1 Modified, size_delta +33792, first_divergence 9216, compat diff exact";
  return o;
}

// 3. Delta arithmetic on the shipped before/after snapshot fixtures.
Outcome perf_delta_arithmetic() {
  Outcome o;
  const fs::path fixtures = KRDP_FIXTURE_DIR;
  const PerfSnapshot before = read_snapshot_log(fixtures / "perf_before.log").back();
  const PerfSnapshot after = read_snapshot_log(fixtures / "perf_after.log").back();
  const PerfDelta d = delta(before, after);
  o.require(d.cpu_percent == 8.0, "cpu delta != +8");
  o.require(d.threads == 35, "threads delta != +35");
  o.require(d.handles == 53, "handles delta != +53");
  o.require(d.mem_used_bytes == -200'000'000, "mem delta != -0.2 GB");
  const std::string text = render_report(d);
  o.require(text.find("cpu_percent: 17 -> 25 (delta +8)\n") != std::string::npos,
            "report lacks cpu line");
  o.require(text.find("threads: 652 -> 687 (delta +35)\n") != std::string::npos,
            "report lacks threads line");
  o.require(text.find("handles: 16720 -> 16773 (delta +53)\n") != std::string::npos,
            "report lacks handles line");
  o.require(text.find("(delta -0.2 GB)") != std::string::npos, "report lacks memory delta");
  if (o.pass) o.detail = "cpu +8, threads +35, handles +53, mem -0.2 GB";
  return o;
}

// 4. 100 random sandboxes: no false positives; every flip, truncation and
//    growth detected.
Outcome detection_property() {
  Outcome o;
  std::mt19937_64 rng(0xdec7);
  int false_positives = 0;
  int detected = 0;
  int mutations = 0;
  ScanOptions options;
  options.threads = 2;
  for (int s = 0; s < 100; ++s) {
    TempDir dir;
    harness::SandboxSpec spec{.seed = 1000 + static_cast<std::uint64_t>(s), .files = {}};
    const int n = 2 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      spec.files.push_back({"d" + std::to_string(i % 2) + "/f" + std::to_string(i),
                            1 + rng() % 4096});
    }
    const Manifest m = harness::build_sandbox(spec, dir / "root");
    if (scan(m, dir / "root", options).has_findings()) ++false_positives;

    for (int kind = 0; kind < 3; ++kind) {
      const FileRecord& victim = m.records[rng() % m.records.size()];
      const fs::path path = dir / "root" / victim.path;
      const auto original = krdp::testing::read_bytes(path);
      switch (kind) {
        case 0: {
          // Single-byte flip at a random offset, independent of the harness.
          auto bytes = original;
          bytes[rng() % bytes.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
          krdp::testing::write_file(path, bytes);
          break;
        }
        case 1:
          harness::infect_truncate(path, rng() % victim.size);
          break;
        default:
          harness::infect_grow_to(path, victim.size + 1 + rng() % 1024, rng());
      }
      ++mutations;
      const ScanReport r = scan(m, dir / "root", options);
      if (r.counts.modified == 1 && r.counts.non_clean() == 1) ++detected;
      krdp::testing::write_file(path, original);
    }
  }
  o.require(false_positives == 0, std::to_string(false_positives) + " false positives");
  o.require(detected == mutations,
            std::to_string(detected) + "/" + std::to_string(mutations) + " mutations detected");
  if (o.pass) {
    o.detail = "100 sandboxes, 0 false positives, " + std::to_string(detected) + "/" +
               std::to_string(mutations) + " mutations detected";
  }
  return o;
}

// 5. Planted payloads hit their signatures; random digests never do.
Outcome signature_matching() {
  Outcome o;
  TempDir dir;
  const fs::path fixtures = KRDP_FIXTURE_DIR;
  const SignatureDb db = load_signatures(krdp::testing::read_text(fixtures / "rootkit_catalog.sigdb"));
  const Manifest m = harness::build_sandbox(harness::sample_rootkit_sandbox(), dir / "root");
  std::size_t digest_bearing = 0;
  for (const auto& sig : db.entries()) {
    if (!sig.digest) continue;
    ++digest_bearing;
    harness::plant_payload(dir / "root" / (sig.name + "/" + sig.affected_file),
                           harness::kFixtureSeed, sig);
  }
  ScanOptions options;
  options.signatures = &db;
  const ScanReport r = scan(m, dir / "root", options);
  std::size_t hits = 0;
  for (const auto& f : r.findings) {
    const std::string family = f.path.substr(0, f.path.find('/'));
    if (f.status == FindingStatus::kSignatureHit && f.signature_name == family) ++hits;
  }
  o.require(digest_bearing == db.size() && digest_bearing > 0, "fixture DB lacks digests");
  o.require(hits == digest_bearing,
            std::to_string(hits) + "/" + std::to_string(digest_bearing) + " planted payloads hit");

  std::mt19937_64 rng(0x5197);
  int false_hits = 0;
  for (int i = 0; i < 100; ++i) {
    const Digest d = random_digest(rng);
    const bool member = std::any_of(db.entries().begin(), db.entries().end(),
                                    [&](const Signature& s) { return s.digest == d; });
    if ((db.match_digest(d) != nullptr) != member || member) ++false_hits;
  }
  o.require(false_hits == 0, std::to_string(false_hits) + " random digests matched");
  if (o.pass) {
    o.detail = std::to_string(hits) + "/" + std::to_string(digest_bearing) +
               " payload hits, 0/100 random digests matched";
  }
  return o;
}

// 6. Hiding k paths from the observed view reports exactly those paths.
Outcome crossview_hiding() {
  Outcome o;
  TempDir dir;
  harness::SandboxSpec spec{.seed = 6, .files = {}};
  for (int i = 0; i < 200; ++i) {
    spec.files.push_back({"dir" + std::to_string(i % 10) + "/file" + std::to_string(i), 16});
  }
  const Manifest m = harness::build_sandbox(spec, dir / "root");
  const PathSet observed = observe(dir / "root");
  std::mt19937_64 rng(0xc0de);
  for (std::size_t k : {1u, 5u, 50u}) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::string> pick = observed.paths();
      std::shuffle(pick.begin(), pick.end(), rng);
      pick.resize(k);
      const ViewDiff d = cross_view_diff(m, harness::hide_from_view(observed, pick));
      std::vector<std::string> trusted;
      for (const auto& r : m.records) trusted.push_back(r.path);
      const auto view = harness::hide_from_view(observed, pick).paths();
      o.require(d.hidden == krdp::testing::brute_difference(trusted, view),
                "hidden differs from brute force at k=" + std::to_string(k));
      std::sort(pick.begin(), pick.end());
      o.require(d.hidden == pick, "hidden != hidden set at k=" + std::to_string(k));
      o.require(d.unknown.empty(), "spurious unknown paths");
    }
  }
  if (o.pass) o.detail = "k in {1,5,50}, 10 trials each, hidden == brute-force difference";
  return o;
}

// 7. Quarantine blocks, restore is exact, interrupted stores stay consistent.
Outcome prevention_sequence() {
  Outcome o;
  TempDir dir;
  std::mt19937_64 rng(0x9a7e);
  const fs::path root = dir / "root";
  const fs::path store_dir = dir / "store";
  int round_trips = 0;
  {
    auto store = QuarantineStore::open(store_dir, QuarantineStore::Mode::kReadWrite);
    for (int i = 0; i < 50; ++i) {
      const std::string rel = "f" + std::to_string(i);
      const auto data = krdp::testing::random_bytes(rng, rng() % 20000);
      krdp::testing::write_file(root / rel, data);
      const QuarantineEntry e = store.quarantine(root, rel, "acceptance");
      krdp::testing::write_file(root / rel, "decoy");  // re-creation stays blocked
      o.require(std::holds_alternative<PreventionBlocked>(guarded_open(root, rel, store)),
                "guarded_open not blocked after quarantine");
      store.restore(e.id, root / rel);
      const auto reopened = guarded_open(root, rel, store);
      o.require(std::holds_alternative<std::vector<std::uint8_t>>(reopened) &&
                    std::get<std::vector<std::uint8_t>>(reopened) == data,
                "restore not byte-identical");
      if (o.pass) ++round_trips;
    }
  }
  int dangling = 0;
  for (int i = 0; i < 40; ++i) {
    const std::string rel = "crash" + std::to_string(i);
    krdp::testing::write_file(root / rel, krdp::testing::random_bytes(rng, 1 + rng() % 5000));
    const auto stage = i % 2 ? QuarantineStage::kBlobStored : QuarantineStage::kIndexAppended;
    {
      auto store = QuarantineStore::open(store_dir, QuarantineStore::Mode::kReadWrite);
      store.set_fault_injector([stage](QuarantineStage s) {
        if (s == stage) throw std::runtime_error("injected crash");
      });
      try {
        store.quarantine(root, rel, "crash");
      } catch (const std::runtime_error&) {
      }
    }
    const auto reopened = QuarantineStore::open(store_dir, QuarantineStore::Mode::kReadOnly);
    for (const auto& e : reopened.entries()) {
      if (!fs::exists(reopened.blob_path(e.digest))) ++dangling;
    }
    if (!reopened.verify().empty()) ++dangling;
  }
  o.require(dangling == 0, std::to_string(dangling) + " index entries without a valid blob");
  if (o.pass) {
    o.detail = std::to_string(round_trips) +
               " quarantine/block/restore cycles, 40 injected interruptions, 0 dangling entries";
  }
  return o;
}

// 8. parse(render(x)) == x for the four persisted formats.
Outcome round_trips() {
  Outcome o;
  std::mt19937_64 rng(0x7007);
  auto rand_path = [&] { return krdp::testing::random_rel_path(rng); };
  for (int i = 0; i < 200; ++i) {
    Manifest m;
    m.root_label = "root" + std::to_string(rng() % 100);
    m.created_at = static_cast<std::int64_t>(rng() % 2'000'000'000);
    std::set<std::string> paths;
    const std::size_t n = rng() % 40;
    while (paths.size() < n) paths.insert(rand_path());
    for (const auto& p : paths) {
      m.records.push_back({p, rng() % 1'000'000, random_digest(rng),
                           static_cast<std::int64_t>(rng() % 2'000'000'000)});
    }
    o.require(read_manifest(write_manifest(m)) == m, "manifest round trip");

    SignatureDb db;
    const std::size_t k = rng() % 20;
    for (std::size_t j = 0; j < k; ++j) {
      Signature s{"Sig." + std::to_string(j), "file" + std::to_string(rng() % 9) + ".dll",
                  rng() % 100000, std::nullopt};
      if (rng() % 2) s.digest = random_digest(rng);
      db.add(std::move(s));
    }
    o.require(load_signatures(save_signatures(db)) == db, "signature DB round trip");

    PerfSnapshot snap;
    snap.at_ms = static_cast<std::int64_t>(rng() % 2'000'000'000'000ULL);
    if (rng() % 4) snap.cpu_percent = std::uniform_real_distribution<double>(0, 100)(rng);
    if (rng() % 4) snap.processes = rng() % 1000;
    if (rng() % 4) snap.threads = rng() % 10000;
    if (rng() % 4) snap.handles = rng() % 100000;
    if (rng() % 4) {
      snap.mem_total_bytes = 1 + rng() % (1ULL << 36);
      snap.mem_used_bytes = rng() % *snap.mem_total_bytes;
    }
    o.require(parse_snapshot_line(render_snapshot_line(snap)) == snap, "snapshot round trip");

    QuarantineEntry e{1 + rng() % 100000, rand_path(), random_digest(rng),
                      static_cast<std::int64_t>(rng() % 2'000'000'000),
                      "reason " + std::to_string(rng() % 50)};
    o.require(parse_index_line(render_index_line(e)) == e, "quarantine index round trip");
  }
  if (o.pass) o.detail = "200 random instances of each of 4 formats";
  return o;
}

// 9. Legacy-format pattern check on a modified file.
Outcome legacy_check_format() {
  Outcome o;
  TempDir dir;
  const std::vector<std::string> state = {"--root", (dir / "root").string(), "--manifest",
                                          (dir / "manifest").string()};
  auto run = [&](std::vector<std::string> args) {
    auto full = state;
    full.insert(full.end(), args.begin(), args.end());
    return krdp_cli(full);
  };
  const fs::path spec = fs::path(KRDP_FIXTURE_DIR) / "table2.spec";
  o.require(run({"simulate", "build", spec.string()}).code == 0, "simulate build failed");
  o.require(run({"baseline"}).code == 0, "baseline failed");
  o.require(run({"simulate", "overwrite", "KEYBOARD.SYS", "--offset", "100", "--length", "1"})
                    .code == 0,
            "simulate overwrite failed");
  const CliRun r = run({"--paper-compat", "check", "KEYBOARD.SYS"});
  const auto lines = lines_of(r.out);
  o.require(r.code == cli::kExitFindings, "exit code " + std::to_string(r.code));
  o.require(lines.size() == 3 && lines[0] != lines[1], "expected two distinct digest lines");
  o.require(!lines.empty() && lines.back() == "The virus pattern matches with the file",
            "final line: " + (lines.empty() ? std::string() : lines.back()));
  if (o.pass) o.detail = "final line exact";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"hash correctness", hash_correctness},
      {"growth scenario reproduction", growth_reproduction},
      {"performance delta arithmetic", perf_delta_arithmetic},
      {"detection soundness/completeness", detection_property},
      {"signature matching", signature_matching},
      {"cross-view hiding", crossview_hiding},
      {"prevention sequence", prevention_sequence},
      {"format round trips", round_trips},
      {"legacy-format pattern check output", legacy_check_format},
  };
  const auto start = std::chrono::steady_clock::now();
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, check] = criteria[i];
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << name
              << " -- " << outcome.detail << "\n";
  }
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed in "
            << secs << " s\n";
  return failures == 0 ? 0 : 1;
}
