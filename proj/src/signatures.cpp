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

#include "krdp/signatures.hpp"

#include <algorithm>
#include <cctype>

#include "io.hpp"
#include "krdp/error.hpp"

namespace krdp {
namespace {

constexpr std::string_view kHeader = "KRDP-SIGDB v1";

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) ==
           std::tolower(static_cast<unsigned char>(y));
  });
}

}  // namespace

void SignatureDb::add(Signature sig) {
  if (sig.name.empty() || detail::has_line_break_or_tab(sig.name) ||
      sig.name == "-") {
    throw Error(Errc::kInvalidArgument, "bad signature name '" + sig.name + "'");
  }
  if (sig.affected_file.empty() ||
      detail::has_line_break_or_tab(sig.affected_file)) {
    throw Error(Errc::kInvalidArgument,
                "bad affected file for '" + sig.name + "'");
  }
  if (by_name_.contains(sig.name)) {
    throw Error(Errc::kDuplicateSignatureName, sig.name);
  }
  const std::size_t index = entries_.size();
  by_name_.emplace(sig.name, index);
  // Several families may share one payload digest; the first one wins.
  if (sig.digest) digest_index_.try_emplace(*sig.digest, index);
  entries_.push_back(std::move(sig));
}

const Signature* SignatureDb::match_digest(const Digest& d) const {
  auto it = digest_index_.find(d);
  return it == digest_index_.end() ? nullptr : &entries_[it->second];
}

std::vector<const Signature*> SignatureDb::by_affected_file(
    std::string_view filename) const {
  std::vector<const Signature*> out;
  for (const auto& e : entries_) {
    if (iequals(e.affected_file, filename)) out.push_back(&e);
  }
  return out;
}

const Signature* SignatureDb::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : &entries_[it->second];
}

SignatureDb load_signatures(std::string_view data) {
  auto lines = detail::split_lines(data);
  if (!lines || lines->empty() || (*lines)[0] != kHeader) {
    throw Error(Errc::kMalformedSignatureDb, "bad header");
  }
  SignatureDb db;
  for (std::size_t i = 1; i < lines->size(); ++i) {
    const std::string where = "line " + std::to_string(i + 1) + ": ";
    auto fields = detail::split((*lines)[i], '\t');
    if (fields.size() != 4) {
      throw Error(Errc::kMalformedSignatureDb, where + "expected 4 fields");
    }
    Signature sig;
    sig.name = std::string(fields[0]);
    sig.affected_file = std::string(fields[1]);
    auto size = detail::parse_int<std::uint64_t>(fields[2]);
    if (!size) throw Error(Errc::kMalformedSignatureDb, where + "bad size");
    sig.size_bytes = *size;
    if (fields[3] != "-") {
      sig.digest = Digest::parse(fields[3]);
      if (!sig.digest) {
        throw Error(Errc::kMalformedSignatureDb, where + "bad digest");
      }
    }
    try {
      db.add(std::move(sig));
    } catch (const Error& e) {
      if (e.code() == Errc::kDuplicateSignatureName) throw;
      throw Error(Errc::kMalformedSignatureDb, where + e.what());
    }
  }
  return db;
}

std::string save_signatures(const SignatureDb& db) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& e : db.entries()) {
    out += e.name;
    out += '\t';
    out += e.affected_file;
    out += '\t';
    out += std::to_string(e.size_bytes);
    out += '\t';
    out += e.digest ? e.digest->hex() : std::string("-");
    out += '\n';
  }
  return out;
}

}  // namespace krdp
