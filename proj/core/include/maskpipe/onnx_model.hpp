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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace maskpipe {

/// One graph input or output. Symbolic or missing extents are reported as -1.
struct OnnxValueInfo {
  std::string name;
  std::int32_t elem_type = 0;  // TensorProto.DataType, 1 = float
  std::vector<std::int64_t> dims;
};

/// The parts of an ONNX model this project relies on: the I/O signature and
/// the number of scalar weights stored as graph initializers.
struct OnnxModelInfo {
  std::vector<OnnxValueInfo> inputs;   // excludes inputs that are initializers
  std::vector<OnnxValueInfo> outputs;
  std::int64_t parameter_count = 0;
};

/// Decodes the protobuf wire format directly; no ONNX runtime is needed.
/// Throws SignatureMismatch on malformed data.
OnnxModelInfo parse_onnx_model_info(std::span<const std::uint8_t> bytes);

/// Throws ModelNotFound when the file cannot be read.
OnnxModelInfo read_onnx_model_info(const std::filesystem::path& path);

}  // namespace maskpipe
