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

#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "maskpipe/error.hpp"
#include "maskpipe/tracker.hpp"
#include "match_instances.hpp"
#include "test_support.hpp"

namespace maskpipe {
namespace {

constexpr FrameDims kDims{640, 480};

ClassifiedDetection cd(BoundingBox b, MaskLabel l = MaskLabel::Mask, double conf = 1.0) {
  return {{b, 1.0}, {l, conf}};
}

Assignment match_points(const mptest::MatchInstance& m) {
  std::vector<TrackId> ids(m.tracks.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return match(m.tracks, ids, m.dets, m.gate);
}

TEST(TrackerConfigTest, DefaultsAndValidation) {
  TrackerConfig cfg;
  EXPECT_EQ(cfg.max_disappeared, 5);
  EXPECT_DOUBLE_EQ(cfg.max_match_distance_frac, 0.10);
  EXPECT_EQ(cfg.label_history_len, 5);
  CentroidTracker t(cfg);
  EXPECT_TRUE(t.tracks().empty());
  EXPECT_EQ(t.next_id(), 0u);
  for (auto bad : {TrackerConfig{.max_disappeared = -1}, TrackerConfig{.max_match_distance_frac = -0.1},
                   TrackerConfig{.label_history_len = 0},
                   TrackerConfig{.max_match_distance_frac = std::numeric_limits<double>::quiet_NaN()}}) {
    try {
      CentroidTracker x(bad);
      ADD_FAILURE() << "accepted invalid config";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    }
  }
}

TEST(Match, NearbyMatchedFarNot) {
  const std::vector<Point2D> tracks{{100, 100}};
  const std::vector<TrackId> ids{0};
  const std::vector<Point2D> near{{103, 100}};
  const std::vector<Point2D> far{{600, 100}};
  EXPECT_EQ(match(tracks, ids, near, 50), (Assignment{{0, 0}}));
  EXPECT_TRUE(match(tracks, ids, far, 50).empty());
}

TEST(Match, TiesGoToLowerTrackIdThenDetection) {
  // Both tracks are 10 px from the single detection.
  const std::vector<Point2D> tracks{{0, 0}, {20, 0}};
  const std::vector<Point2D> dets{{10, 0}};
  EXPECT_EQ(match(tracks, std::vector<TrackId>{7, 3}, dets, 50), (Assignment{{1, 0}}));
  EXPECT_EQ(match(tracks, std::vector<TrackId>{3, 7}, dets, 50), (Assignment{{0, 0}}));
  const std::vector<Point2D> one{{10, 0}};
  const std::vector<Point2D> two{{0, 0}, {20, 0}};
  EXPECT_EQ(match(one, std::vector<TrackId>{0}, two, 50), (Assignment{{0, 0}}));
}

TEST(Match, CrossingPairAgreesWithExhaustive) {
  const std::vector<Point2D> tracks{{0, 0}, {100, 0}};
  const std::vector<Point2D> dets{{95, 4}, {6, -3}};
  mptest::MatchInstance m{tracks, dets, 50};
  auto greedy = match_points(m);
  std::sort(greedy.begin(), greedy.end());
  EXPECT_EQ(greedy, mptest::exhaustive_assignment(m.distances(), m.gate));
}

TEST(Match, ClusteredInstancesAgreeWithExhaustive) {
  mptest::Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    const auto m = mptest::clustered_instance(rng);
    auto greedy = match_points(m);
    std::sort(greedy.begin(), greedy.end());
    ASSERT_EQ(greedy, mptest::exhaustive_assignment(m.distances(), m.gate)) << "instance " << i;
  }
}

TEST(Match, InjectiveAndGatedProperty) {
  mptest::Rng rng(78);
  for (int i = 0; i < 2000; ++i) {
    const auto m = mptest::dense_instance(rng, rng.uniform(0, 120));
    const auto a = match_points(m);
    std::set<std::size_t> ts, ds;
    for (const auto& [t, d] : a) {
      ASSERT_TRUE(ts.insert(t).second);
      ASSERT_TRUE(ds.insert(d).second);
      ASSERT_LE(distance(m.tracks[t], m.dets[d]), m.gate);
    }
    // Greedy is maximal: no unmatched eligible pair remains.
    for (std::size_t t = 0; t < m.tracks.size(); ++t) {
      for (std::size_t d = 0; d < m.dets.size(); ++d) {
        if (!ts.count(t) && !ds.count(d)) ASSERT_GT(distance(m.tracks[t], m.dets[d]), m.gate);
      }
    }
  }
}

TEST(Update, NewDetectionsGetSequentialIds) {
  CentroidTracker t;
  const std::vector<ClassifiedDetection> d{cd({10, 10, 50, 50}), cd({300, 200, 50, 50}, MaskLabel::NoMask)};
  const auto out = t.update(d, kDims, 0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, 0u);
  EXPECT_EQ(out[1].id, 1u);
  EXPECT_EQ(out[1].label, MaskLabel::NoMask);
  EXPECT_FALSE(out[0].coasting);
}

TEST(Update, FiveMissesCoastSixthRemoves) {
  CentroidTracker t;
  const BoundingBox box{100.25, 80.5, 60.125, 70};
  ASSERT_EQ(t.update(std::vector{cd(box)}, kDims, 0).size(), 1u);
  for (int k = 1; k <= 5; ++k) {
    const auto out = t.update({}, kDims, k);
    ASSERT_EQ(out.size(), 1u) << "miss " << k;
    EXPECT_TRUE(out[0].coasting);
    EXPECT_EQ(out[0].box, box);
    EXPECT_EQ(out[0].id, 0u);
    EXPECT_EQ(t.tracks()[0].frames_since_seen, k);
  }
  EXPECT_TRUE(t.update({}, kDims, 6).empty());
  EXPECT_TRUE(t.tracks().empty());
  const auto again = t.update(std::vector{cd(box)}, kDims, 7);
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].id, 1u);
}

TEST(Update, ShortDropoutKeepsIdentity) {
  CentroidTracker t;
  BoundingBox box{100, 100, 50, 50};
  t.update(std::vector{cd(box)}, kDims, 0);
  for (int k = 1; k <= 3; ++k) t.update({}, kDims, k);
  box.x += 4;
  const auto out = t.update(std::vector{cd(box)}, kDims, 4);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, 0u);
  EXPECT_FALSE(out[0].coasting);
  EXPECT_EQ(out[0].box, box);
}

TEST(Update, ZeroMaxDisappearedNeverCoasts) {
  mptest::Rng rng(5);
  CentroidTracker t(TrackerConfig{.max_disappeared = 0, .max_match_distance_frac = 1.0});
  for (int f = 0; f < 300; ++f) {
    std::vector<ClassifiedDetection> d;
    const auto n = rng.integer(0, 4);
    for (int k = 0; k < n; ++k) d.push_back(cd({rng.uniform(0, 600), rng.uniform(0, 440), rng.uniform(5, 40), rng.uniform(5, 40)}));
    const auto out = t.update(d, kDims, f);
    ASSERT_EQ(out.size(), d.size());
    std::multiset<std::tuple<double, double, double, double>> a, b;
    for (const auto& o : out) {
      ASSERT_FALSE(o.coasting);
      a.insert({o.box.x, o.box.y, o.box.w, o.box.h});
    }
    for (const auto& x : d) {
      const auto c = clamp_box(x.detection.box, kDims);
      b.insert({c.x, c.y, c.w, c.h});
    }
    ASSERT_EQ(a, b);
  }
}

TEST(Update, MatchedTrackTakesClampedBox) {
  CentroidTracker t;
  t.update(std::vector{cd({600, 100, 60, 50})}, kDims, 0);
  const auto out = t.update(std::vector{cd({602, 100, 60, 50})}, kDims, 1);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, 0u);
  EXPECT_EQ(out[0].box, (BoundingBox{602, 100, 38, 50}));
}

TEST(Update, OutOfOrderFrame) {
  CentroidTracker t;
  t.update({}, kDims, 3);
  for (std::int64_t bad : {3, 2}) {
    try {
      t.update({}, kDims, bad);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::OutOfOrderFrame);
    }
  }
  EXPECT_NO_THROW(t.update({}, kDims, 10));
}

TEST(Update, LabelHistoryIsBounded) {
  CentroidTracker t(TrackerConfig{.label_history_len = 3});
  const BoundingBox box{10, 10, 40, 40};
  for (int f = 0; f < 10; ++f) t.update(std::vector{cd(box, f < 7 ? MaskLabel::Mask : MaskLabel::NoMask)}, kDims, f);
  ASSERT_EQ(t.tracks().size(), 1u);
  EXPECT_EQ(t.tracks()[0].label_history.size(), 3u);
  EXPECT_EQ(t.update(std::vector{cd(box, MaskLabel::Mask)}, kDims, 10)[0].label, MaskLabel::NoMask);
}

TEST(Update, CoastingKeepsSmoothedLabel) {
  CentroidTracker t;
  const BoundingBox box{10, 10, 40, 40};
  t.update(std::vector{cd(box, MaskLabel::NoMask, 0.8)}, kDims, 0);
  const auto out = t.update({}, kDims, 1);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].label, MaskLabel::NoMask);
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.8);
}

// Random multi-face streams with gaps, used by the invariant checks below.
struct RandomStream {
  std::vector<std::vector<ClassifiedDetection>> frames;
  std::vector<std::vector<int>> present;  // face ordinals per frame
};

RandomStream random_stream(std::uint64_t seed, int frames) {
  mptest::Rng rng(seed);
  const int n = static_cast<int>(rng.integer(1, 4));
  std::vector<BoundingBox> boxes;
  std::vector<Point2D> vel;
  for (int i = 0; i < n; ++i) {
    boxes.push_back({40.0 + 140 * i, rng.uniform(40, 300), 40, 40});
    vel.push_back({rng.uniform(-0.5, 0.5), rng.uniform(-1, 1)});
  }
  RandomStream s;
  for (int f = 0; f < frames; ++f) {
    std::vector<ClassifiedDetection> d;
    std::vector<int> p;
    for (int i = 0; i < n; ++i) {
      boxes[i].x += vel[i].x;
      boxes[i].y += vel[i].y;
      if (boxes[i].y < 10 || boxes[i].y > 420) vel[i].y = -vel[i].y;
      if (rng.uniform(0, 1) < 0.15) continue;
      d.push_back(cd(boxes[i], i % 2 ? MaskLabel::Mask : MaskLabel::NoMask));
      p.push_back(i);
    }
    s.frames.push_back(d);
    s.present.push_back(p);
  }
  return s;
}

TEST(UpdateProperty, IdsNeverReusedAndIncreasing) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_stream(seed, 1000);
    CentroidTracker t(TrackerConfig{.max_disappeared = 1});
    std::set<TrackId> retired, live;
    TrackId max_seen = 0;
    bool any = false;
    for (int f = 0; f < 1000; ++f) {
      const auto out = t.update(s.frames[f], kDims, f);
      std::set<TrackId> now;
      for (std::size_t k = 0; k < out.size(); ++k) {
        if (k > 0) ASSERT_LT(out[k - 1].id, out[k].id);
        ASSERT_FALSE(retired.count(out[k].id)) << "id reused";
        if (!live.count(out[k].id) && any) ASSERT_GT(out[k].id, max_seen);
        now.insert(out[k].id);
        max_seen = std::max(max_seen, out[k].id);
        any = true;
      }
      for (auto id : live) {
        if (!now.count(id)) retired.insert(id);
      }
      live = now;
    }
  }
}

TEST(UpdateProperty, CoastedBoxEqualsLastDetectedBox) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_stream(seed, 300);
    CentroidTracker t;
    std::map<TrackId, BoundingBox> last;
    for (int f = 0; f < 300; ++f) {
      const auto out = t.update(s.frames[f], kDims, f);
      for (const auto& o : out) {
        if (o.coasting) {
          ASSERT_TRUE(last.count(o.id));
          ASSERT_EQ(o.box, last[o.id]);
        } else {
          last[o.id] = o.box;
        }
      }
      for (const auto& tr : t.tracks()) ASSERT_LE(tr.frames_since_seen, t.config().max_disappeared);
    }
  }
}

TEST(UpdateProperty, AbsentExactlyAfterThreshold) {
  for (int max_dis : {0, 1, 2, 5}) {
    CentroidTracker t(TrackerConfig{.max_disappeared = max_dis});
    const BoundingBox box{200, 200, 40, 40};
    t.update(std::vector{cd(box)}, kDims, 0);
    for (int k = 1; k <= max_dis + 3; ++k) {
      const auto out = t.update({}, kDims, k);
      ASSERT_EQ(out.size(), k <= max_dis ? 1u : 0u) << "max_disappeared " << max_dis << " miss " << k;
    }
  }
}

TEST(UpdateProperty, Deterministic) {
  const auto s = random_stream(9, 400);
  CentroidTracker a, b;
  for (int f = 0; f < 400; ++f) ASSERT_EQ(a.update(s.frames[f], kDims, f), b.update(s.frames[f], kDims, f));
}

TEST(SmoothLabel, Examples) {
  Track t;
  t.label_history = {{MaskLabel::Mask, 1}, {MaskLabel::Mask, 1}, {MaskLabel::NoMask, 1}};
  EXPECT_EQ(smooth_label(t).label, MaskLabel::Mask);
  t.label_history = {{MaskLabel::Mask, 1}, {MaskLabel::NoMask, 1}};
  EXPECT_EQ(smooth_label(t).label, MaskLabel::NoMask);
  t.label_history = {{MaskLabel::NoMask, 1}, {MaskLabel::Mask, 1}};
  EXPECT_EQ(smooth_label(t).label, MaskLabel::Mask);
  t.label_history = {{MaskLabel::Mask, 0.9}, {MaskLabel::Mask, 0.7}, {MaskLabel::NoMask, 0.8}};
  const auto r = smooth_label(t);
  EXPECT_EQ(r.label, MaskLabel::Mask);
  EXPECT_NEAR(r.confidence, 0.8, 1e-12);
}

TEST(SmoothLabel, EmptyHistory) {
  try {
    (void)smooth_label(Track{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyHistory);
  }
}

}  // namespace
}  // namespace maskpipe
