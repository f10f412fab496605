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

#include "maskpipe/roi.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "maskpipe/error.hpp"

namespace maskpipe {

void PreprocessSpec::validate() const {
  if (target_width < 1 || target_height < 1) {
    throw Error(ErrorCode::InvalidConfig, "preprocess target must be at least 1x1");
  }
  for (double s : scale) {
    if (s == 0.0 || !std::isfinite(s)) {
      throw Error(ErrorCode::InvalidConfig, "preprocess scale components must be finite and nonzero");
    }
  }
  for (double m : mean) {
    if (!std::isfinite(m)) throw Error(ErrorCode::InvalidConfig, "preprocess mean must be finite");
  }
}

std::int64_t Tensor::element_count() const noexcept {
  std::int64_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

BoundingBox expand_box(const BoundingBox& b, double ratio, FrameDims dims) noexcept {
  const double factor = 1.0 + ratio;
  const Point2D c = centroid(b);
  const double w = b.w * factor;
  const double h = b.h * factor;
  return clamp_box({c.x - w / 2.0, c.y - h / 2.0, w, h}, dims);
}

Patch crop(const Frame& frame, const BoundingBox& b) {
  const PixelRect r = crop_rect(b, frame.dims());
  if (r.empty()) return {};
  Patch p;
  p.width = r.w;
  p.height = r.h;
  p.pixels.resize(static_cast<std::size_t>(r.w) * r.h * 3);
  const std::size_t row_bytes = static_cast<std::size_t>(r.w) * 3;
  for (std::int32_t y = 0; y < r.h; ++y) {
    std::memcpy(p.pixels.data() + y * row_bytes, frame.at(r.x, r.y + y), row_bytes);
  }
  return p;
}

namespace {

struct Tap {
  std::int32_t i0;
  std::int32_t i1;
  double frac;
};

std::vector<Tap> make_taps(std::int32_t src, std::int32_t dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const double step = static_cast<double>(src) / dst;
  for (std::int32_t i = 0; i < dst; ++i) {
    double s = (i + 0.5) * step - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const auto i0 = static_cast<std::int32_t>(std::floor(s));
    taps[i] = {i0, std::min(i0 + 1, src - 1), s - i0};
  }
  return taps;
}

}  // namespace

Patch resize_bilinear(const Patch& patch, std::int32_t target_width, std::int32_t target_height) {
  if (patch.empty() || target_width < 1 || target_height < 1) return {};
  Patch out;
  out.width = target_width;
  out.height = target_height;
  out.pixels.resize(static_cast<std::size_t>(target_width) * target_height * 3);

  const auto xt = make_taps(patch.width, target_width);
  const auto yt = make_taps(patch.height, target_height);

  // Horizontal pass of one source row, cached because consecutive output
  // rows share source rows when upscaling.
  const std::size_t row_len = static_cast<std::size_t>(target_width) * 3;
  std::vector<double> cache[2] = {std::vector<double>(row_len), std::vector<double>(row_len)};
  std::int32_t cached[2] = {-1, -1};
  // Returns the cache slot holding row sy, never evicting slot `keep`.
  // Source rows are visited in ascending order, so the lower row is stale.
  const auto horizontal = [&](std::int32_t sy, int keep) -> int {
    for (int k = 0; k < 2; ++k) {
      if (cached[k] == sy) return k;
    }
    const int slot = keep >= 0 ? 1 - keep : (cached[0] <= cached[1] ? 0 : 1);
    const std::uint8_t* row = patch.at(0, sy);
    double* h = cache[slot].data();
    for (const Tap& tx : xt) {
      const std::uint8_t* a = row + static_cast<std::size_t>(tx.i0) * 3;
      const std::uint8_t* b = row + static_cast<std::size_t>(tx.i1) * 3;
      for (int c = 0; c < 3; ++c) *h++ = a[c] + (b[c] - a[c]) * tx.frac;
    }
    cached[slot] = sy;
    return slot;
  };

  std::uint8_t* dst = out.pixels.data();
  for (const Tap& ty : yt) {
    const int t = horizontal(ty.i0, -1);
    const double* top = cache[t].data();
    const double* bot = cache[horizontal(ty.i1, t)].data();
    for (std::size_t i = 0; i < row_len; ++i) {
      const double v = top[i] + (bot[i] - top[i]) * ty.frac;
      // v is a convex combination of bytes, so truncating v + 0.5 is floor.
      dst[i] = static_cast<std::uint8_t>(std::min(v + 0.5, 255.0));
    }
    dst += row_len;
  }
  return out;
}

namespace {

using ChannelLut = std::array<std::array<float, 256>, 3>;

ChannelLut make_lut(const PreprocessSpec& spec) {
  ChannelLut lut{};
  for (int c = 0; c < 3; ++c) {
    for (int v = 0; v < 256; ++v) {
      lut[c][v] = static_cast<float>((v / 255.0 - spec.mean[c]) / spec.scale[c]);
    }
  }
  return lut;
}

// Writes one normalized element into dst, which must hold W*H*3 floats.
void normalize_into(const Patch& patch, const PreprocessSpec& spec, const ChannelLut& lut,
                    float* dst) {
  if (patch.width != spec.target_width || patch.height != spec.target_height) {
    throw Error(ErrorCode::DimensionMismatch,
                "patch is " + std::to_string(patch.width) + "x" + std::to_string(patch.height) +
                    ", preprocess expects " + std::to_string(spec.target_width) + "x" +
                    std::to_string(spec.target_height));
  }
  const std::size_t plane = static_cast<std::size_t>(patch.width) * patch.height;
  const std::uint8_t* src = patch.pixels.data();
  if (spec.layout == ChannelLayout::Interleaved) {
    for (std::size_t i = 0; i < plane; ++i) {
      dst[i * 3 + 0] = lut[0][src[i * 3 + 0]];
      dst[i * 3 + 1] = lut[1][src[i * 3 + 1]];
      dst[i * 3 + 2] = lut[2][src[i * 3 + 2]];
    }
  } else {
    for (std::size_t i = 0; i < plane; ++i) {
      dst[i] = lut[0][src[i * 3 + 0]];
      dst[plane + i] = lut[1][src[i * 3 + 1]];
      dst[2 * plane + i] = lut[2][src[i * 3 + 2]];
    }
  }
}

}  // namespace

Tensor normalize(const Patch& patch, const PreprocessSpec& spec) {
  Tensor t;
  if (spec.layout == ChannelLayout::Interleaved) {
    t.shape = {spec.target_height, spec.target_width, 3};
  } else {
    t.shape = {3, spec.target_height, spec.target_width};
  }
  t.data.resize(static_cast<std::size_t>(spec.target_width) * spec.target_height * 3);
  normalize_into(patch, spec, make_lut(spec), t.data.data());
  return t;
}

std::vector<std::int64_t> batch_shape(const PreprocessSpec& spec, std::int64_t n) {
  if (spec.layout == ChannelLayout::Interleaved) {
    return {n, spec.target_height, spec.target_width, 3};
  }
  return {n, 3, spec.target_height, spec.target_width};
}

Patch extract_roi(const Frame& frame, const BoundingBox& roi_box, const PreprocessSpec& spec) {
  Patch p = crop(frame, roi_box);
  if (p.empty()) return p;
  return resize_bilinear(p, spec.target_width, spec.target_height);
}

TensorBatch process_detections(const Frame& frame, std::span<const Detection> dets,
                               const PreprocessSpec& spec, double expansion_ratio) {
  TensorBatch batch;
  const std::size_t element = static_cast<std::size_t>(spec.target_width) * spec.target_height * 3;
  std::vector<Patch> patches;
  patches.reserve(dets.size());
  for (const Detection& det : dets) {
    const BoundingBox roi = expand_box(det.box, expansion_ratio, frame.dims());
    Patch p = extract_roi(frame, roi, spec);
    if (p.empty()) {
      batch.skipped.push_back({det, roi});
      continue;
    }
    batch.provenance.push_back({det, roi});
    patches.push_back(std::move(p));
  }

  const auto n = static_cast<std::int64_t>(patches.size());
  batch.tensor.shape = batch_shape(spec, n);
  batch.tensor.data.resize(element * patches.size());
  const ChannelLut lut = make_lut(spec);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    normalize_into(patches[i], spec, lut, batch.tensor.data.data() + i * element);
  }
  return batch;
}

}  // namespace maskpipe
