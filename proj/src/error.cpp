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

#include "krdp/error.hpp"

namespace krdp {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kFileUnreadable: return "FileUnreadable";
    case Errc::kRootUnreadable: return "RootUnreadable";
    case Errc::kRootNotEmpty: return "RootNotEmpty";
    case Errc::kMalformedManifest: return "MalformedManifest";
    case Errc::kMalformedSignatureDb: return "MalformedSignatureDb";
    case Errc::kDuplicateSignatureName: return "DuplicateSignatureName";
    case Errc::kMalformedReport: return "MalformedReport";
    case Errc::kMalformedViewDiff: return "MalformedViewDiff";
    case Errc::kMalformedSnapshot: return "MalformedSnapshot";
    case Errc::kMalformedSandboxSpec: return "MalformedSandboxSpec";
    case Errc::kMalformedQuarantineIndex: return "MalformedQuarantineIndex";
    case Errc::kMalformedAlert: return "MalformedAlert";
    case Errc::kTargetSmallerThanFile: return "TargetSmallerThanFile";
    case Errc::kStoreWriteFailed: return "StoreWriteFailed";
    case Errc::kStoreLocked: return "StoreLocked";
    case Errc::kUnknownEntry: return "UnknownEntry";
    case Errc::kDigestMismatchOnRestore: return "DigestMismatchOnRestore";
    case Errc::kLogWriteFailed: return "LogWriteFailed";
    case Errc::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace krdp
