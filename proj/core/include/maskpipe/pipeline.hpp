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
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "maskpipe/backends.hpp"
#include "maskpipe/frame.hpp"
#include "maskpipe/media.hpp"
#include "maskpipe/roi.hpp"
#include "maskpipe/tracker.hpp"

namespace maskpipe {

/// Which box is logged, drawn and tracked.
enum class BoxSource : std::uint8_t {
  Roi,  // expanded, clamped box that Stage 2 classified
  Raw,  // Stage-1 box as detected
};

struct PipelineConfig {
  BackendSpec detector{.name = "synthetic", .kind = BackendKind::Detector};
  BackendSpec classifier{.name = "synthetic", .kind = BackendKind::Classifier};
  double detector_threshold = kDefaultDetectorThreshold;
  double classifier_threshold = kDefaultClassifierThreshold;
  double expansion_ratio = 0.20;
  TrackerConfig tracker;
  bool tracking_enabled = true;  // streams only; single images bypass tracking
  bool annotate = false;
  bool draw_coasting_distinct = true;
  BoxSource box_source = BoxSource::Roi;

  /// Throws InvalidConfig for out-of-range fields.
  void validate() const;
};

struct StageTimings {
  double detect_ms = 0.0;
  double roi_ms = 0.0;
  double classify_ms = 0.0;
  double track_ms = 0.0;
  double annotate_ms = 0.0;

  double total_ms() const noexcept {
    return detect_ms + roi_ms + classify_ms + track_ms + annotate_ms;
  }
};

struct FrameResult {
  std::int64_t frame_index = 0;
  /// Tracker output for streams; classified detections (id = position,
  /// never coasting) when tracking is bypassed.
  std::vector<TrackOutput> tracks;
  /// Detections dropped because the rasterized ROI was empty.
  std::size_t skipped = 0;
  StageTimings timings;
  std::optional<Frame> annotated;
};

/// Per-stream state: the tracker plus the frame-order guard.
struct StreamState {
  explicit StreamState(const TrackerConfig& cfg) : tracker(cfg) {}
  CentroidTracker tracker;
  std::optional<std::int64_t> last_index;
};

/// Two-stage detector -> ROI block -> classifier cascade. Holds shared,
/// immutable backend handles; any number of streams may use one Pipeline
/// concurrently, each with its own StreamState.
class Pipeline {
 public:
  Pipeline(std::shared_ptr<const FaceDetector> detector,
           std::shared_ptr<const MaskClassifier> classifier, PipelineConfig cfg);

  /// Loads both backends from cfg.detector / cfg.classifier.
  static Pipeline from_config(const PipelineConfig& cfg, const BackendContext& ctx = {});

  /// Stage 1 + ROI block + Stage 2, no tracking. Backend errors are rethrown
  /// as BackendFailure naming the stage.
  FrameResult process_image(const Frame& frame) const;

  /// process_image followed by a tracker update (unless tracking is
  /// disabled). Throws OutOfOrderFrame when indices do not increase.
  FrameResult process_stream_frame(StreamState& state, const Frame& frame) const;

  StreamState new_stream() const { return StreamState(cfg_.tracker); }

  const PipelineConfig& config() const noexcept { return cfg_; }
  const FaceDetector& detector() const noexcept { return *detector_; }
  const MaskClassifier& classifier() const noexcept { return *classifier_; }

 private:
  struct Classified {
    std::vector<ClassifiedDetection> faces;
    std::size_t skipped = 0;
  };
  Classified run_stages(const Frame& frame, StageTimings& timings) const;
  void finish(const Frame& frame, FrameResult& result) const;

  std::shared_ptr<const FaceDetector> detector_;
  std::shared_ptr<const MaskClassifier> classifier_;
  PipelineConfig cfg_;
};

struct AnnotateOptions {
  bool draw_coasting_distinct = true;
};

/// Copy of frame with a 3-pixel border per result (1 pixel for coasting
/// tracks when draw_coasting_distinct), green for Mask and red for NoMask,
/// and "<label> <id>" in a 5x7 bitmap font above the box. Labels that would
/// leave the raster are skipped.
Frame annotate(const Frame& frame, const std::vector<TrackOutput>& results,
               const AnnotateOptions& opts = {});

/// Pixel rectangle covered by the label of a box, if it fits in the raster.
std::optional<PixelRect> label_rect(const TrackOutput& result, FrameDims dims);

/// Frames of a synthetic scene, rendered on demand.
class SceneSource : public FrameSource {
 public:
  SceneSource(SceneSpec scene, std::int64_t frames) : scene_(std::move(scene)), frames_(frames) {}
  std::optional<Frame> next() override;
  SourceKind kind() const noexcept override { return SourceKind::Synthetic; }

 private:
  SceneSpec scene_;
  std::int64_t frames_;
  std::int64_t pos_ = 0;
};

struct StreamSink {
  std::ostream* jsonl = nullptr;               // one record per frame
  std::optional<std::filesystem::path> frame_dir;  // annotated frame_NNNNNN.ppm
};

struct StreamSummary {
  std::int64_t frames = 0;
  std::int64_t faces = 0;  // track outputs summed over frames
  std::int64_t mask = 0;
  std::int64_t no_mask = 0;
  std::int64_t coasting = 0;
  std::int64_t skipped = 0;
  std::int64_t distinct_ids = 0;
  double wall_ms = 0.0;
  double mean_fps = 0.0;
  StageTimings mean_timings;
};

struct RunOptions {
  /// Decode frame t+1 on a second thread while frame t is processed.
  bool pipelined = false;
};

/// Drives a whole source through one stream. Decode errors abort the run
/// with the failing frame index in the message.
StreamSummary run_stream(const Pipeline& pipeline, FrameSource& source, const StreamSink& sink,
                         const RunOptions& opts = {});

}  // namespace maskpipe
