// Copyright 2026 The maskpipe Authors.
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

#include "maskpipe/error.hpp"

namespace maskpipe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BackendFailure: return "BackendFailure";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidScene: return "InvalidScene";
    case ErrorCode::ModelNotFound: return "ModelNotFound";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::OutOfOrderFrame: return "OutOfOrderFrame";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
    case ErrorCode::TruncatedPixelData: return "TruncatedPixelData";
    case ErrorCode::UnsupportedColorSpace: return "UnsupportedColorSpace";
    case ErrorCode::MalformedFrameMarker: return "MalformedFrameMarker";
    case ErrorCode::TruncatedFrame: return "TruncatedFrame";
    case ErrorCode::EmptyDirectory: return "EmptyDirectory";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::UnknownFlag: return "UnknownFlag";
    case ErrorCode::MissingRequired: return "MissingRequired";
  }
  return "Unknown";
}

}  // namespace maskpipe
