// Copyright 2026 The SumGD Engine Authors.
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

#include "sumgd/error.hpp"

namespace sumgd {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnnormalizedDistribution: return "UnnormalizedDistribution";
    case ErrorCode::kInfiniteDivergence: return "InfiniteDivergence";
    case ErrorCode::kEmptyDistribution: return "EmptyDistribution";
    case ErrorCode::kInvalidTopP: return "InvalidTopP";
    case ErrorCode::kContextOverflow: return "ContextOverflow";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kImageUnsupported: return "ImageUnsupported";
    case ErrorCode::kCapabilityMissing: return "CapabilityMissing";
    case ErrorCode::kEmptySummary: return "EmptySummary";
    case ErrorCode::kMissingContrastContext: return "MissingContrastContext";
    case ErrorCode::kMissingAnnotation: return "MissingAnnotation";
    case ErrorCode::kInvalidN: return "InvalidN";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kIncompatibleRuns: return "IncompatibleRuns";
    case ErrorCode::kDataError: return "DataError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kUsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace sumgd
