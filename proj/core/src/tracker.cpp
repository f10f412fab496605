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

#include "maskpipe/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "maskpipe/error.hpp"

namespace maskpipe {

void TrackerConfig::validate() const {
  if (max_disappeared < 0) {
    throw Error(ErrorCode::InvalidConfig, "max_disappeared must be >= 0");
  }
  if (!(max_match_distance_frac >= 0.0) || !std::isfinite(max_match_distance_frac)) {
    throw Error(ErrorCode::InvalidConfig, "max_match_distance_frac must be a finite value >= 0");
  }
  if (label_history_len < 1) {
    throw Error(ErrorCode::InvalidConfig, "label_history_len must be >= 1");
  }
}

Assignment match(std::span<const Point2D> track_centers, std::span<const TrackId> track_ids,
                 std::span<const Point2D> det_centers, double max_dist) {
  struct Candidate {
    double dist;
    TrackId id;
    std::size_t track;
    std::size_t det;
  };
  std::vector<Candidate> pairs;
  pairs.reserve(track_centers.size() * det_centers.size());
  for (std::size_t t = 0; t < track_centers.size(); ++t) {
    for (std::size_t d = 0; d < det_centers.size(); ++d) {
      const double dist = distance(track_centers[t], det_centers[d]);
      if (dist <= max_dist) pairs.push_back({dist, track_ids[t], t, d});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.dist, a.id, a.det) < std::tie(b.dist, b.id, b.det);
  });

  std::vector<bool> track_used(track_centers.size(), false);
  std::vector<bool> det_used(det_centers.size(), false);
  Assignment out;
  for (const Candidate& c : pairs) {
    if (track_used[c.track] || det_used[c.det]) continue;
    track_used[c.track] = true;
    det_used[c.det] = true;
    out.emplace_back(c.track, c.det);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Assignment match(std::span<const Track> tracks, std::span<const ClassifiedDetection> dets,
                 double max_dist) {
  std::vector<Point2D> tc;
  std::vector<TrackId> ids;
  std::vector<Point2D> dc;
  tc.reserve(tracks.size());
  ids.reserve(tracks.size());
  dc.reserve(dets.size());
  for (const Track& t : tracks) {
    tc.push_back(t.center);
    ids.push_back(t.id);
  }
  for (const auto& d : dets) dc.push_back(centroid(d.detection.box));
  return match(tc, ids, dc, max_dist);
}

LabelObservation smooth_label(const Track& track) {
  const auto& hist = track.label_history;
  if (hist.empty()) {
    throw Error(ErrorCode::EmptyHistory, "track " + std::to_string(track.id) + " has no labels");
  }
  std::size_t mask_votes = 0;
  double mask_conf = 0.0;
  double nomask_conf = 0.0;
  for (const auto& obs : hist) {
    if (obs.label == MaskLabel::Mask) {
      ++mask_votes;
      mask_conf += obs.confidence;
    } else {
      nomask_conf += obs.confidence;
    }
  }
  const std::size_t nomask_votes = hist.size() - mask_votes;
  MaskLabel winner = hist.back().label;
  if (mask_votes > nomask_votes) winner = MaskLabel::Mask;
  if (nomask_votes > mask_votes) winner = MaskLabel::NoMask;
  if (winner == MaskLabel::Mask) {
    return {winner, mask_conf / static_cast<double>(mask_votes)};
  }
  return {winner, nomask_conf / static_cast<double>(nomask_votes)};
}

CentroidTracker::CentroidTracker(TrackerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<TrackOutput> CentroidTracker::update(std::span<const ClassifiedDetection> dets,
                                                 FrameDims dims, std::int64_t frame_index) {
  if (last_frame_ && frame_index <= *last_frame_) {
    throw Error(ErrorCode::OutOfOrderFrame, "frame " + std::to_string(frame_index) +
                                                " does not follow frame " +
                                                std::to_string(*last_frame_));
  }
  last_frame_ = frame_index;

  const double gate = cfg_.max_match_distance_frac * dims.diagonal();
  const Assignment assignment = match(tracks_, dets, gate);

  std::vector<bool> matched_track(tracks_.size(), false);
  std::vector<bool> matched_det(dets.size(), false);
  const auto history_len = static_cast<std::size_t>(cfg_.label_history_len);
  const auto observe = [history_len](Track& t, const Classification& c) {
    t.label_history.push_back({c.label, c.confidence});
    while (t.label_history.size() > history_len) t.label_history.pop_front();
  };

  for (const auto& [ti, di] : assignment) {
    Track& t = tracks_[ti];
    t.box = clamp_box(dets[di].detection.box, dims);
    t.center = centroid(t.box);
    t.frames_since_seen = 0;
    observe(t, dets[di].classification);
    matched_track[ti] = true;
    matched_det[di] = true;
  }

  std::vector<Track> survivors;
  survivors.reserve(tracks_.size() + dets.size());
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Track& t = tracks_[i];
    ++t.age;
    if (!matched_track[i] && ++t.frames_since_seen > cfg_.max_disappeared) continue;
    survivors.push_back(std::move(t));
  }
  for (std::size_t d = 0; d < dets.size(); ++d) {
    if (matched_det[d]) continue;
    Track t;
    t.id = next_id_++;
    t.box = clamp_box(dets[d].detection.box, dims);
    t.center = centroid(t.box);
    observe(t, dets[d].classification);
    survivors.push_back(std::move(t));
  }
  tracks_ = std::move(survivors);

  std::vector<TrackOutput> out;
  out.reserve(tracks_.size());
  for (const Track& t : tracks_) {
    const LabelObservation shown = smooth_label(t);
    out.push_back({t.id, t.box, shown.label, shown.confidence, t.frames_since_seen > 0});
  }
  return out;
}

}  // namespace maskpipe
