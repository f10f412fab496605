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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "maskpipe/detection.hpp"
#include "maskpipe/frame.hpp"
#include "maskpipe/geometry.hpp"

namespace maskpipe {

enum class ChannelLayout : std::uint8_t { Interleaved, Planar };

/// Classifier input contract: target size plus per-channel affine
/// normalization out = (pixel / 255 - mean) / scale.
struct PreprocessSpec {
  std::int32_t target_width = 224;
  std::int32_t target_height = 224;
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> scale{1.0, 1.0, 1.0};
  ChannelLayout layout = ChannelLayout::Interleaved;

  /// Throws InvalidConfig on non-positive targets or zero scale.
  void validate() const;

  friend bool operator==(const PreprocessSpec&, const PreprocessSpec&) = default;
};

/// Owned 8-bit RGB sub-raster. A zero-sized patch marks an empty crop.
struct Patch {
  std::int32_t width = 0;
  std::int32_t height = 0;
  std::vector<std::uint8_t> pixels;

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  const std::uint8_t* at(std::int32_t x, std::int32_t y) const noexcept {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  friend bool operator==(const Patch&, const Patch&) = default;
};

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> data;

  std::int64_t element_count() const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// Where a batch element came from: the Stage-1 detection and the expanded,
/// clamped box that was cropped for it.
struct RoiProvenance {
  Detection detection;
  BoundingBox roi_box;
};

/// Stacked classifier inputs with leading batch extent N, shape
/// [N, H, W, 3] (interleaved) or [N, 3, H, W] (planar).
struct TensorBatch {
  Tensor tensor;
  std::vector<RoiProvenance> provenance;
  /// Detections whose rasterized crop was empty; not part of the tensor.
  std::vector<RoiProvenance> skipped;

  std::size_t size() const noexcept { return provenance.size(); }
};

/// Scales width and height by (1 + ratio) about the center, then clamps.
BoundingBox expand_box(const BoundingBox& b, double ratio, FrameDims dims) noexcept;

/// Copies the rasterized box (see crop_rect). The box must already be clamped.
Patch crop(const Frame& frame, const BoundingBox& b);

/// Bilinear resize with half-pixel centers and edge clamping. Each channel is
/// interpolated independently and rounded half-up to 8 bits.
Patch resize_bilinear(const Patch& patch, std::int32_t target_width, std::int32_t target_height);

/// Throws DimensionMismatch when the patch is not at the preprocess target size.
Tensor normalize(const Patch& patch, const PreprocessSpec& spec);

/// Tensor shape for a batch of n elements under spec.
std::vector<std::int64_t> batch_shape(const PreprocessSpec& spec, std::int64_t n);

/// expand -> clamp -> crop -> resize -> normalize for every detection, in
/// order. Zero-area crops are dropped and recorded in TensorBatch::skipped.
TensorBatch process_detections(const Frame& frame, std::span<const Detection> dets,
                               const PreprocessSpec& spec, double expansion_ratio);

/// Crop and resize only (no normalization); empty patch for zero-area crops.
Patch extract_roi(const Frame& frame, const BoundingBox& roi_box, const PreprocessSpec& spec);

}  // namespace maskpipe
