// Copyright 2026 The retrosmooth Authors
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

#include "retrosmooth/error.hpp"

namespace retrosmooth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidFactorization: return "InvalidFactorization";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidInstrument: return "InvalidInstrument";
    case ErrorCode::UnknownOutcome: return "UnknownOutcome";
    case ErrorCode::ZeroProbabilityRecord: return "ZeroProbabilityRecord";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::EvidenceOutsideSupport: return "EvidenceOutsideSupport";
    case ErrorCode::MissingClassicalRegister: return "MissingClassicalRegister";
    case ErrorCode::InvalidPOVM: return "InvalidPOVM";
    case ErrorCode::InvalidExtension: return "InvalidExtension";
    case ErrorCode::NotClassicalLimit: return "NotClassicalLimit";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace retrosmooth
