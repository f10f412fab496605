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
#include <string_view>

namespace maskpipe {

/// Raster size in pixels. Both extents are at least 1 for a valid raster.
struct FrameDims {
  std::int32_t width = 1;
  std::int32_t height = 1;

  bool valid() const noexcept { return width >= 1 && height >= 1; }
  std::int64_t pixel_count() const noexcept {
    return std::int64_t{width} * height;
  }
  double diagonal() const noexcept;

  friend bool operator==(const FrameDims&, const FrameDims&) = default;
};

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

/// Axis-aligned box in continuous pixel coordinates. (x, y) is the top-left
/// corner, y grows downward. Rounding to pixel indices happens only when a
/// box is rasterized (see crop_rect).
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const noexcept { return x + w; }
  double bottom() const noexcept { return y + h; }
  double area() const noexcept { return w * h; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Integer pixel rectangle, half-open: columns [x, x + w), rows [y, y + h).
struct PixelRect {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t w = 0;
  std::int32_t h = 0;

  bool empty() const noexcept { return w <= 0 || h <= 0; }

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

enum class MaskLabel : std::uint8_t { Mask, NoMask };

/// "Mask" / "No_Mask", the class names used in logs and overlays.
std::string_view label_name(MaskLabel label) noexcept;

/// Intersection of b with [0, width] x [0, height]. An empty intersection
/// collapses to a zero-width and/or zero-height box at the clamped corner.
BoundingBox clamp_box(const BoundingBox& b, FrameDims dims) noexcept;

Point2D centroid(const BoundingBox& b) noexcept;

double distance(Point2D a, Point2D b) noexcept;

/// Intersection over union; 0 when the union has zero area.
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Rasterizes a box that already lies inside the raster: floor of the corner,
/// round (half away from zero) of the extents, then re-clamped to the raster.
PixelRect crop_rect(const BoundingBox& b, FrameDims dims) noexcept;

}  // namespace maskpipe
