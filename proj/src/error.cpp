// Copyright 2026 The contactflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "error.hpp"

namespace cf {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimension: return "dimension error";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kNumeric: return "numeric error";
    case ErrorCode::kCapability: return "capability error";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kVersionMismatch: return "version mismatch";
    case ErrorCode::kTruncated: return "truncated stream";
    case ErrorCode::kChecksum: return "checksum failure";
    case ErrorCode::kGap: return "stream gap";
    case ErrorCode::kAnnotation: return "annotation error";
    case ErrorCode::kUsage: return "usage error";
    case ErrorCode::kMissingData: return "missing data";
    case ErrorCode::kIncompatible: return "incompatible";
  }
  return "unknown error";
}

}  // namespace cf
