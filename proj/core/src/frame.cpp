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

#include "maskpipe/frame.hpp"

#include <string>

#include "maskpipe/error.hpp"

namespace maskpipe {

namespace {

void check_dims(FrameDims dims) {
  if (!dims.valid()) {
    throw Error(ErrorCode::DimensionMismatch,
                "frame dimensions must be positive, got " + std::to_string(dims.width) +
                    "x" + std::to_string(dims.height));
  }
}

}  // namespace

Frame::Frame(FrameDims dims, std::int64_t index) : dims_(dims), index_(index) {
  check_dims(dims);
  pixels_.assign(static_cast<std::size_t>(dims.pixel_count()) * 3, 0);
}

Frame::Frame(FrameDims dims, std::vector<std::uint8_t> pixels, std::int64_t index,
             std::optional<double> timestamp_ms)
    : dims_(dims), pixels_(std::move(pixels)), index_(index), timestamp_ms_(timestamp_ms) {
  check_dims(dims);
  const auto expected = static_cast<std::size_t>(dims.pixel_count()) * 3;
  if (pixels_.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch,
                "pixel buffer holds " + std::to_string(pixels_.size()) + " bytes, expected " +
                    std::to_string(expected));
  }
}

}  // namespace maskpipe
