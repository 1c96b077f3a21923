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

#include "krdp/backup.hpp"

#include <string_view>

#include "io.hpp"
#include "krdp/error.hpp"
#include "krdp/sha256.hpp"

namespace krdp {

std::filesystem::path BackupStore::path_for(const Digest& d) const {
  return dir_ / d.hex();
}

bool BackupStore::contains(const Digest& d) const {
  std::error_code ec;
  return std::filesystem::is_regular_file(path_for(d), ec);
}

std::size_t BackupStore::populate(const Manifest& m,
                                  const std::filesystem::path& root) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(Errc::kStoreWriteFailed, dir_.string() + ": " + ec.message());

  std::size_t written = 0;
  for (const auto& rec : m.records) {
    if (contains(rec.digest)) continue;
    std::vector<std::uint8_t> bytes;
    try {
      bytes = detail::read_file(root / rec.path);
    } catch (const Error&) {
      continue;
    }
    if (sha256_bytes(bytes) != rec.digest) continue;
    detail::write_file_atomic(
        path_for(rec.digest),
        std::string_view(reinterpret_cast<const char*>(bytes.data()),
                         bytes.size()),
        0444);
    ++written;
  }
  return written;
}

}  // namespace krdp
