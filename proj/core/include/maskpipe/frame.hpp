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
#include <optional>
#include <span>
#include <vector>

#include "maskpipe/geometry.hpp"

namespace maskpipe {

/// Decoded 8-bit RGB raster, row-major and interleaved.
class Frame {
 public:
  Frame() = default;
  /// Black frame of the given size.
  Frame(FrameDims dims, std::int64_t index = 0);
  /// Takes ownership of pixels; throws DimensionMismatch unless
  /// pixels.size() == width * height * 3.
  Frame(FrameDims dims, std::vector<std::uint8_t> pixels, std::int64_t index = 0,
        std::optional<double> timestamp_ms = std::nullopt);

  FrameDims dims() const noexcept { return dims_; }
  std::int32_t width() const noexcept { return dims_.width; }
  std::int32_t height() const noexcept { return dims_.height; }
  std::int64_t index() const noexcept { return index_; }
  std::optional<double> timestamp_ms() const noexcept { return timestamp_ms_; }

  void set_index(std::int64_t index) noexcept { index_ = index; }
  void set_timestamp_ms(std::optional<double> ts) noexcept { timestamp_ms_ = ts; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  const std::uint8_t* at(std::int32_t x, std::int32_t y) const noexcept {
    return pixels_.data() + (static_cast<std::size_t>(y) * dims_.width + x) * 3;
  }
  std::uint8_t* at(std::int32_t x, std::int32_t y) noexcept {
    return pixels_.data() + (static_cast<std::size_t>(y) * dims_.width + x) * 3;
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  FrameDims dims_{};
  std::vector<std::uint8_t> pixels_ = std::vector<std::uint8_t>(3, 0);
  std::int64_t index_ = 0;
  std::optional<double> timestamp_ms_;
};

}  // namespace maskpipe
