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
#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "maskpipe/detection.hpp"
#include "maskpipe/geometry.hpp"

namespace maskpipe {

using TrackId = std::uint64_t;

struct TrackerConfig {
  /// Consecutive missed frames a track survives while coasting. Five frames
  /// suits 30 FPS streams; scale it with the frame rate.
  std::int32_t max_disappeared = 5;
  /// Match gate as a fraction of the frame diagonal.
  double max_match_distance_frac = 0.10;
  std::int32_t label_history_len = 5;

  /// Throws InvalidConfig on negative or non-finite fields.
  void validate() const;

  friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

struct LabelObservation {
  MaskLabel label = MaskLabel::NoMask;
  double confidence = 0.0;
};

struct Track {
  TrackId id = 0;
  BoundingBox box;
  Point2D center;
  std::int32_t frames_since_seen = 0;
  std::deque<LabelObservation> label_history;  // oldest first
  std::int64_t age = 0;
};

struct TrackOutput {
  TrackId id = 0;
  BoundingBox box;
  MaskLabel label = MaskLabel::NoMask;
  double confidence = 0.0;
  bool coasting = false;

  friend bool operator==(const TrackOutput&, const TrackOutput&) = default;
};

/// Partial injective map: (track index, detection index) pairs, ordered by
/// track index.
using Assignment = std::vector<std::pair<std::size_t, std::size_t>>;

/// Greedy global nearest-centroid matching. Repeatedly takes the closest
/// unmatched (track, detection) pair with distance <= max_dist; ties go to
/// the lower track id, then the lower detection index.
Assignment match(std::span<const Point2D> track_centers, std::span<const TrackId> track_ids,
                 std::span<const Point2D> det_centers, double max_dist);

Assignment match(std::span<const Track> tracks, std::span<const ClassifiedDetection> dets,
                 double max_dist);

/// Majority label over the history; ties go to the most recent observation.
/// Confidence is the mean over observations carrying the winning label.
/// Throws EmptyHistory on an empty history.
LabelObservation smooth_label(const Track& track);

/// Per-stream centroid tracker state. Not thread-safe: one instance per
/// stream, updated in frame order.
class CentroidTracker {
 public:
  explicit CentroidTracker(TrackerConfig cfg = {});

  /// Advances one frame. Matched tracks take the detection's clamped box,
  /// unmatched tracks coast until they exceed max_disappeared misses, and
  /// unmatched detections open new tracks. Returns live tracks by id.
  /// Throws OutOfOrderFrame unless frame_index is greater than the last one.
  std::vector<TrackOutput> update(std::span<const ClassifiedDetection> dets, FrameDims dims,
                                  std::int64_t frame_index);

  const std::vector<Track>& tracks() const noexcept { return tracks_; }
  const TrackerConfig& config() const noexcept { return cfg_; }
  TrackId next_id() const noexcept { return next_id_; }

 private:
  TrackerConfig cfg_;
  std::vector<Track> tracks_;  // sorted by id
  TrackId next_id_ = 0;
  std::optional<std::int64_t> last_frame_;
};

}  // namespace maskpipe
