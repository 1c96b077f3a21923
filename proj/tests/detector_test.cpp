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

#include "krdp/detector.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "krdp/error.hpp"
#include "krdp/harness.hpp"
#include "krdp/sha256.hpp"
#include "test_util.hpp"

namespace krdp {
namespace {

using testing::TempDir;

ScanOptions fixed_scan() {
  ScanOptions o;
  o.scanned_at = 100;
  return o;
}

TEST(PatternCheck, Examples) {
  TempDir dir;
  testing::write_file(dir / "f", "hello world");
  const Digest base = sha256_bytes("hello world");
  const auto same = pattern_check(base, dir / "f");
  EXPECT_TRUE(same.equal);
  EXPECT_EQ(same.observed_digest, base);

  testing::write_file(dir / "f", "hello worle");
  const auto flipped = pattern_check(base, dir / "f");
  EXPECT_FALSE(flipped.equal);
  EXPECT_EQ(flipped.observed_digest.hex(), testing::openssl_sha256_hex("hello worle"));
  EXPECT_EQ(flipped.baseline_digest, base);
}

TEST(PatternCheck, KeyboardSysGrowth) {
  TempDir dir;
  const Manifest m = harness::build_sandbox(harness::keyboard_sys_sandbox(), dir / "root");
  ASSERT_EQ(m.records.size(), 1u);
  harness::infect_grow_to(dir / "root" / m.records[0].path, harness::kKeyboardSysInfectedSize,
                          harness::kFixtureSeed);
  EXPECT_FALSE(pattern_check(m.records[0].digest, dir / "root" / m.records[0].path).equal);
}

TEST(PatternCheck, DefinitionalConsistency) {
  TempDir dir;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto data = testing::random_bytes(rng, rng() % 3000);
    testing::write_file(dir / "f", data);
    const Digest d = (i % 2) ? sha256_bytes(data) : sha256_bytes(testing::random_bytes(rng, 8));
    ASSERT_EQ(pattern_check(d, dir / "f").equal, sha256_file(dir / "f") == d);
  }
}

TEST(ByteCompare, Examples) {
  TempDir dir;
  testing::write_file(dir / "e1", "");
  testing::write_file(dir / "e2", "");
  const auto empty = byte_compare(dir / "e1", dir / "e2");
  EXPECT_TRUE(empty.equal);
  EXPECT_EQ(empty.length_clean, 0u);
  EXPECT_EQ(empty.length_tainted, 0u);
  EXPECT_FALSE(empty.first_divergence.has_value());

  testing::write_file(dir / "abc", "abc");
  testing::write_file(dir / "abd", "abd");
  const auto d = byte_compare(dir / "abc", dir / "abd");
  EXPECT_FALSE(d.equal);
  EXPECT_EQ(d.first_divergence, 2u);
  EXPECT_EQ(d.length_clean, 3u);
  EXPECT_EQ(d.length_tainted, 3u);
}

TEST(ByteCompare, AppendedGrowth) {
  TempDir dir;
  std::mt19937_64 rng(6);
  auto clean = testing::random_bytes(rng, 9216);
  auto tainted = clean;
  const auto extra = testing::random_bytes(rng, 33792);
  tainted.insert(tainted.end(), extra.begin(), extra.end());
  testing::write_file(dir / "clean", clean);
  testing::write_file(dir / "tainted", tainted);
  const auto d = byte_compare(dir / "clean", dir / "tainted");
  EXPECT_FALSE(d.equal);
  EXPECT_EQ(d.first_divergence, 9216u);
  EXPECT_EQ(d.size_delta(), 33792);
  // Shrinking is the mirror image.
  const auto r = byte_compare(dir / "tainted", dir / "clean");
  EXPECT_EQ(r.first_divergence, 9216u);
  EXPECT_EQ(r.size_delta(), -33792);
}

TEST(ByteCompare, AgreesWithNaiveOracle) {
  TempDir dir;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 60; ++i) {
    const std::size_t n = (i % 10 == 0) ? (1u << 20) : rng() % 200000;
    auto a = testing::random_bytes(rng, n);
    auto b = a;
    switch (rng() % 5) {
      case 0:
        break;  // identical
      case 1:
        if (!b.empty()) b[rng() % b.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        break;
      case 2:
        b.resize(b.empty() ? 0 : rng() % b.size());
        break;
      case 3:
        b.resize(b.size() + 1 + rng() % 1000, 0);
        break;
      default:
        b = testing::random_bytes(rng, rng() % 200000);
    }
    testing::write_file(dir / "a", a);
    testing::write_file(dir / "b", b);
    const auto got = byte_compare(dir / "a", dir / "b");
    const auto want = testing::naive_diff(a, b);
    ASSERT_EQ(got.equal, want.equal);
    ASSERT_EQ(got.first_divergence, want.first_divergence);
    ASSERT_EQ(got.length_clean, a.size());
    ASSERT_EQ(got.length_tainted, b.size());
  }
}

TEST(ByteCompare, MissingFileThrows) {
  TempDir dir;
  testing::write_file(dir / "a", "a");
  EXPECT_THROW(byte_compare(dir / "a", dir / "nope"), Error);
}

class ScanFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    harness::SandboxSpec spec{.seed = 77, .files = {}};
    for (int i = 0; i < 12; ++i) {
      spec.files.push_back({"dir" + std::to_string(i % 3) + "/file" + std::to_string(i) + ".bin",
                            static_cast<std::uint64_t>(100 + 997 * i)});
    }
    baseline_ = harness::build_sandbox(spec, root());
  }
  std::filesystem::path root() const { return dir_.path() / "root"; }

  TempDir dir_;
  Manifest baseline_;
};

TEST_F(ScanFixture, PristineTreeIsAllClean) {
  const auto r = scan(baseline_, root(), fixed_scan());
  EXPECT_EQ(r.counts.clean, baseline_.records.size());
  EXPECT_FALSE(r.has_findings());
  EXPECT_EQ(r.scanned_at, 100);
}

TEST_F(ScanFixture, OneModifiedFile) {
  harness::infect_overwrite(root() / baseline_.records[4].path, 10, 1, 5);
  const auto r = scan(baseline_, root(), fixed_scan());
  EXPECT_EQ(r.counts.modified, 1u);
  EXPECT_EQ(r.counts.clean, baseline_.records.size() - 1);
  EXPECT_EQ(r.counts.non_clean(), 1u);
  for (const auto& f : r.findings) {
    if (f.status == FindingStatus::kModified) {
      EXPECT_EQ(f.path, baseline_.records[4].path);
      EXPECT_EQ(f.size_delta, 0);
      EXPECT_FALSE(f.diff.has_value());  // no backup store configured
    }
  }
}

TEST_F(ScanFixture, MissingAndUnknown) {
  std::filesystem::remove(root() / baseline_.records[0].path);
  testing::write_file(root() / "new.txt", "new");
  const auto r = scan(baseline_, root(), fixed_scan());
  EXPECT_EQ(r.counts.missing, 1u);
  EXPECT_EQ(r.counts.unknown, 1u);
  for (const auto& f : r.findings) {
    if (f.status == FindingStatus::kMissing) {
      EXPECT_EQ(f.path, baseline_.records[0].path);
      EXPECT_FALSE(f.observed_digest.has_value());
      EXPECT_TRUE(f.baseline_digest.has_value());
    }
    if (f.status == FindingStatus::kUnknown) {
      EXPECT_EQ(f.path, "new.txt");
      EXPECT_EQ(f.observed_digest, sha256_bytes("new"));
      EXPECT_FALSE(f.baseline_digest.has_value());
    }
  }
}

TEST_F(ScanFixture, SignatureHitWithPlantedPayload) {
  const SignatureDb db = harness::sample_signature_db(harness::kFixtureSeed);
  const Signature& sig = db.entries().front();
  harness::plant_payload(root() / baseline_.records[2].path, harness::kFixtureSeed, sig);
  testing::write_file(root() / "dropped.bin",
                      harness::payload_bytes(harness::kFixtureSeed, sig.name, sig.size_bytes));
  auto o = fixed_scan();
  o.signatures = &db;
  const auto r = scan(baseline_, root(), o);
  EXPECT_EQ(r.counts.sighit, 2u);
  EXPECT_EQ(r.counts.non_clean(), 2u);
  for (const auto& f : r.findings) {
    if (f.path == baseline_.records[2].path || f.path == "dropped.bin") {
      EXPECT_EQ(f.status, FindingStatus::kSignatureHit);
      EXPECT_EQ(f.signature_name, sig.name);
    }
  }
}

TEST_F(ScanFixture, BackupStoreAddsDiff) {
  BackupStore backup(dir_.path() / "backup");
  EXPECT_EQ(backup.populate(baseline_, root()), baseline_.records.size());
  EXPECT_EQ(backup.populate(baseline_, root()), 0u);
  const auto& rec = baseline_.records[5];
  harness::infect_grow_to(root() / rec.path, rec.size + 4000, 3);
  auto o = fixed_scan();
  o.backup = &backup;
  const auto r = scan(baseline_, root(), o);
  ASSERT_EQ(r.counts.modified, 1u);
  for (const auto& f : r.findings) {
    if (f.status != FindingStatus::kModified) {
      EXPECT_FALSE(f.diff.has_value());
      continue;
    }
    ASSERT_TRUE(f.diff.has_value());
    EXPECT_EQ(f.diff->first_divergence, rec.size);
    EXPECT_EQ(f.diff->size_delta(), 4000);
    EXPECT_EQ(f.size_delta, 4000);
  }
}

TEST_F(ScanFixture, ThreadCountDoesNotChangeFindings) {
  harness::infect_overwrite(root() / baseline_.records[1].path, 0, 9, 1);
  std::filesystem::remove(root() / baseline_.records[7].path);
  auto o1 = fixed_scan();
  o1.threads = 1;
  auto o8 = fixed_scan();
  o8.threads = 8;
  EXPECT_EQ(scan(baseline_, root(), o1).findings, scan(baseline_, root(), o8).findings);
}

TEST(Scan, SoundnessAndCompletenessProperty) {
  std::mt19937_64 rng(1234);
  for (int round = 0; round < 25; ++round) {
    TempDir dir;
    harness::SandboxSpec spec{.seed = rng(), .files = {}};
    std::set<std::string> names;
    const int n = 1 + static_cast<int>(rng() % 10);
    while (static_cast<int>(names.size()) < n) names.insert("f" + std::to_string(rng() % 1000));
    for (const auto& name : names) spec.files.push_back({name, 1 + rng() % 5000});
    const Manifest m = harness::build_sandbox(spec, dir / "root");

    auto r = scan(m, dir / "root", fixed_scan());
    ASSERT_FALSE(r.has_findings()) << "false positive on unmutated tree";

    const auto& victim = m.records[rng() % m.records.size()];
    const auto path = dir / "root" / victim.path;
    switch (round % 3) {
      case 0:
        harness::infect_overwrite(path, rng() % victim.size, rng(), 1);
        break;
      case 1:
        harness::infect_truncate(path, rng() % victim.size);
        break;
      default:
        harness::infect_grow_to(path, victim.size + 1 + rng() % 100, rng());
    }
    r = scan(m, dir / "root", fixed_scan());
    ASSERT_EQ(r.counts.modified, 1u);
    ASSERT_EQ(r.counts.non_clean(), 1u);
  }
}

TEST(Scan, VerdictPartition) {
  std::mt19937_64 rng(55);
  for (int round = 0; round < 10; ++round) {
    TempDir dir;
    harness::SandboxSpec spec{.seed = rng(), .files = {}};
    for (int i = 0; i < 15; ++i) spec.files.push_back({"p" + std::to_string(i), rng() % 300});
    const Manifest m = harness::build_sandbox(spec, dir / "root");
    // Random mix of deletions, modifications and additions.
    for (const auto& rec : m.records) {
      switch (rng() % 4) {
        case 0: std::filesystem::remove(dir / "root" / rec.path); break;
        case 1: harness::infect_grow_to(dir / "root" / rec.path, rec.size + 1, 1); break;
        default: break;
      }
    }
    for (int i = 0; i < 5; ++i) testing::write_file(dir / "root" / ("q" + std::to_string(rng() % 20)), "x");

    const auto r = scan(m, dir / "root", fixed_scan());
    std::map<std::string, int> seen;
    for (const auto& f : r.findings) ++seen[f.path];
    for (const auto& rec : m.records) ASSERT_EQ(seen[rec.path], 1) << rec.path;
    for (const auto& p : walk_tree(dir / "root", {}).files) ASSERT_EQ(seen[p], 1) << p;
    for (const auto& [p, count] : seen) ASSERT_EQ(count, 1);
    for (std::size_t i = 1; i < r.findings.size(); ++i) {
      ASSERT_LT(r.findings[i - 1].path, r.findings[i].path);
    }
    ASSERT_EQ(r.counts, tally(r.findings));
  }
}

TEST(Scan, NameOnlySignatureNeverHits) {
  TempDir dir;
  const Manifest m = harness::build_sandbox(harness::keyboard_sys_sandbox(), dir / "root");
  SignatureDb db;
  db.add({"Name.Only", "KEYBOARD.SYS", 9216, std::nullopt});
  harness::infect_grow_to(dir / "root" / m.records[0].path, 10000, 1);
  ScanOptions o = fixed_scan();
  o.signatures = &db;
  const auto r = scan(m, dir / "root", o);
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].status, FindingStatus::kModified);
  ASSERT_TRUE(r.findings[0].note.has_value());
  EXPECT_NE(r.findings[0].note->find("Name.Only"), std::string::npos);
}

TEST(Report, StatusTokens) {
  for (auto s : kAllStatuses) EXPECT_EQ(parse_status(status_token(s)), s);
  EXPECT_FALSE(parse_status("Clean").has_value());
}

TEST(Report, RandomRoundTrips) {
  std::mt19937_64 rng(31);
  auto rd = [&] {
    Digest::Bytes b;
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    return Digest(b);
  };
  for (int round = 0; round < 100; ++round) {
    ScanReport r;
    std::set<std::string> paths;
    const std::size_t n = rng() % 30;
    while (paths.size() < n) paths.insert(testing::random_rel_path(rng));
    for (const auto& p : paths) {
      ScanFinding f;
      f.path = p;
      f.status = kAllStatuses[rng() % kAllStatuses.size()];
      switch (f.status) {
        case FindingStatus::kClean:
          f.baseline_digest = f.observed_digest = rd();
          f.size_delta = 0;
          break;
        case FindingStatus::kModified:
          f.baseline_digest = rd();
          f.observed_digest = rd();
          f.size_delta = static_cast<std::int64_t>(rng() % 20000) - 10000;
          break;
        case FindingStatus::kMissing:
          f.baseline_digest = rd();
          break;
        case FindingStatus::kUnknown:
          f.observed_digest = rd();
          break;
        case FindingStatus::kSignatureHit:
          f.observed_digest = rd();
          f.signature_name = "Sig." + std::to_string(rng() % 100);
          if (rng() % 2) {
            f.baseline_digest = rd();
            f.size_delta = static_cast<std::int64_t>(rng() % 100);
          }
          break;
      }
      r.findings.push_back(f);
    }
    r.counts = tally(r.findings);
    const std::string text = render_report(r);
    const ScanReport back = parse_report(text);
    ASSERT_EQ(back.findings, r.findings);
    ASSERT_EQ(back.counts, r.counts);
    ASSERT_EQ(render_report(back), text);
  }
}

TEST(Report, RejectsInconsistentSummary) {
  ScanReport r;
  ScanFinding f;
  f.path = "a";
  f.status = FindingStatus::kUnknown;
  f.observed_digest = sha256_bytes("a");
  r.findings.push_back(f);
  r.counts = tally(r.findings);
  std::string text = render_report(r);
  text.replace(text.find("unknown=1"), 9, "unknown=2");
  EXPECT_THROW(parse_report(text), Error);
}

TEST(Report, SignedString) {
  EXPECT_EQ(signed_string(33792), "+33792");
  EXPECT_EQ(signed_string(-3), "-3");
  EXPECT_EQ(signed_string(0), "0");
}

}  // namespace
}  // namespace krdp
