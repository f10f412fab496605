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

#include <gtest/gtest.h>

#include "maskpipe/error.hpp"
#include "maskpipe/frame.hpp"
#include "maskpipe/geometry.hpp"
#include "test_support.hpp"

namespace maskpipe {
namespace {

constexpr FrameDims k1080{1920, 1080};

TEST(ClampBox, PartiallyOutsideIsIntersected) {
  EXPECT_EQ(clamp_box({-10, -10, 120, 120}, k1080), (BoundingBox{0, 0, 110, 110}));
}

TEST(ClampBox, InteriorIsUnchanged) {
  EXPECT_EQ(clamp_box({100, 100, 50, 50}, k1080), (BoundingBox{100, 100, 50, 50}));
}

TEST(ClampBox, FullyOutsideCollapsesToZeroWidth) {
  EXPECT_EQ(clamp_box({2000, 0, 50, 50}, k1080), (BoundingBox{1920, 0, 0, 50}));
}

TEST(ClampBox, AboveAndLeftCollapsesAtOrigin) {
  const auto b = clamp_box({-100, -100, 20, 20}, k1080);
  EXPECT_EQ(b.x, 0);
  EXPECT_EQ(b.y, 0);
  EXPECT_EQ(b.area(), 0);
}

TEST(Centroid, Examples) {
  EXPECT_EQ(centroid({0, 0, 10, 10}), (Point2D{5, 5}));
  EXPECT_EQ(centroid({90, 90, 120, 120}), (Point2D{150, 150}));
  EXPECT_EQ(centroid({3, 7, 0, 0}), (Point2D{3, 7}));
}

TEST(Iou, Examples) {
  const BoundingBox a{0, 0, 10, 10};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, {20, 20, 5, 5}), 0.0);
  EXPECT_DOUBLE_EQ(iou(a, {5, 0, 10, 10}), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(iou({1, 1, 0, 0}, {1, 1, 0, 0}), 0.0);
}

TEST(Distance, Euclidean) { EXPECT_DOUBLE_EQ(distance({0, 0}, {3, 4}), 5.0); }

TEST(FrameDimsTest, Diagonal) { EXPECT_DOUBLE_EQ((FrameDims{3, 4}).diagonal(), 5.0); }

TEST(LabelName, Names) {
  EXPECT_EQ(label_name(MaskLabel::Mask), "Mask");
  EXPECT_EQ(label_name(MaskLabel::NoMask), "No_Mask");
}

TEST(CropRect, FloorCornerRoundExtent) {
  EXPECT_EQ(crop_rect({10.6, 20.2, 4.5, 3.5}, k1080), (PixelRect{10, 20, 5, 4}));
}

TEST(CropRect, ReclampedToRaster) {
  EXPECT_EQ(crop_rect({8.9, 0, 1.1, 2}, FrameDims{10, 10}), (PixelRect{8, 0, 1, 2}));
  EXPECT_EQ(crop_rect({9.5, 9.5, 0.5, 0.5}, FrameDims{10, 10}), (PixelRect{9, 9, 1, 1}));
  EXPECT_TRUE(crop_rect({5, 5, 0.4, 3}, FrameDims{10, 10}).empty());
}

TEST(FrameTest, RejectsWrongBufferLength) {
  try {
    Frame f(FrameDims{2, 2}, std::vector<std::uint8_t>(11));
    FAIL() << "expected DimensionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(FrameTest, BlackFrameAndAccess) {
  Frame f(FrameDims{4, 3}, 7);
  EXPECT_EQ(f.pixels().size(), 36u);
  EXPECT_EQ(f.index(), 7);
  f.at(3, 2)[1] = 9;
  EXPECT_EQ(f.pixels()[(2 * 4 + 3) * 3 + 1], 9);
}

// Properties over random boxes, some far outside the raster.

BoundingBox random_box(mptest::Rng& rng, FrameDims d) {
  return {rng.uniform(-d.width, 2.0 * d.width), rng.uniform(-d.height, 2.0 * d.height),
          rng.uniform(0, 1.5 * d.width), rng.uniform(0, 1.5 * d.height)};
}

TEST(GeometryProperty, ClampIdempotentAndShrinking) {
  mptest::Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const FrameDims d{static_cast<std::int32_t>(rng.integer(1, 4000)),
                      static_cast<std::int32_t>(rng.integer(1, 4000))};
    const auto b = random_box(rng, d);
    const auto c = clamp_box(b, d);
    ASSERT_EQ(clamp_box(c, d), c);
    ASSERT_LE(c.area(), b.area() + 1e-9);
    const auto p = centroid(c);
    ASSERT_GE(p.x, 0);
    ASSERT_LE(p.x, d.width);
    ASSERT_GE(p.y, 0);
    ASSERT_LE(p.y, d.height);
    ASSERT_GE(c.w, 0);
    ASSERT_GE(c.h, 0);
  }
}

TEST(GeometryProperty, IouSymmetricAndBounded) {
  mptest::Rng rng(12);
  const FrameDims d{640, 480};
  for (int i = 0; i < 10000; ++i) {
    const auto a = random_box(rng, d);
    const auto b = rng.coin() ? random_box(rng, d) : BoundingBox{a.x + rng.uniform(-5, 5), a.y, a.w, a.h};
    const double ab = iou(a, b);
    ASSERT_DOUBLE_EQ(ab, iou(b, a));
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 1.0);
  }
}

}  // namespace
}  // namespace maskpipe
