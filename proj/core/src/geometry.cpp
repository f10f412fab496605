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

#include "maskpipe/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace maskpipe {

double FrameDims::diagonal() const noexcept {
  return std::hypot(static_cast<double>(width), static_cast<double>(height));
}

std::string_view label_name(MaskLabel label) noexcept {
  return label == MaskLabel::Mask ? "Mask" : "No_Mask";
}

BoundingBox clamp_box(const BoundingBox& b, FrameDims dims) noexcept {
  const double max_x = dims.width;
  const double max_y = dims.height;
  const double x0 = std::clamp(b.x, 0.0, max_x);
  const double y0 = std::clamp(b.y, 0.0, max_y);
  const double x1 = std::clamp(b.x + b.w, 0.0, max_x);
  const double y1 = std::clamp(b.y + b.h, 0.0, max_y);
  // An axis that needs no clamping keeps its extent bit for bit.
  const double w = (x0 == b.x && x1 == b.x + b.w) ? b.w : std::max(0.0, x1 - x0);
  const double h = (y0 == b.y && y1 == b.y + b.h) ? b.h : std::max(0.0, y1 - y0);
  return {x0, y0, std::max(0.0, w), std::max(0.0, h)};
}

Point2D centroid(const BoundingBox& b) noexcept {
  return {b.x + b.w / 2.0, b.y + b.h / 2.0};
}

double distance(Point2D a, Point2D b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double ix = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

PixelRect crop_rect(const BoundingBox& b, FrameDims dims) noexcept {
  const auto clamp_i = [](double v, std::int32_t hi) {
    return static_cast<std::int32_t>(std::clamp(v, 0.0, static_cast<double>(hi)));
  };
  const std::int32_t x = clamp_i(std::floor(b.x), dims.width);
  const std::int32_t y = clamp_i(std::floor(b.y), dims.height);
  const std::int32_t w = clamp_i(std::round(b.w), dims.width - x);
  const std::int32_t h = clamp_i(std::round(b.h), dims.height - y);
  return {x, y, w, h};
}

}  // namespace maskpipe
