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

#include "maskpipe/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <set>

#include "maskpipe/error.hpp"

namespace maskpipe {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Runs a backend call, attributing failures to the named stage.
template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BackendFailure) throw;
    throw Error(ErrorCode::BackendFailure, std::string(stage) + " stage: " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::BackendFailure, std::string(stage) + " stage: " + e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(detector_threshold >= 0.0 && detector_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "detector threshold must lie in [0, 1]");
  }
  if (!(classifier_threshold > 0.0 && classifier_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "classifier threshold must lie in (0, 1)");
  }
  if (!(expansion_ratio >= 0.0) || !std::isfinite(expansion_ratio)) {
    throw Error(ErrorCode::InvalidConfig, "expansion ratio must be a finite value >= 0");
  }
  if (detector.kind != BackendKind::Detector || classifier.kind != BackendKind::Classifier) {
    throw Error(ErrorCode::InvalidConfig, "backend kinds are swapped");
  }
  classifier.preprocess.validate();
  tracker.validate();
}

Pipeline::Pipeline(std::shared_ptr<const FaceDetector> detector,
                   std::shared_ptr<const MaskClassifier> classifier, PipelineConfig cfg)
    : detector_(std::move(detector)), classifier_(std::move(classifier)), cfg_(std::move(cfg)) {
  if (!detector_ || !classifier_) throw Error(ErrorCode::InvalidConfig, "pipeline needs both backends");
  cfg_.validate();
}

Pipeline Pipeline::from_config(const PipelineConfig& cfg, const BackendContext& ctx) {
  cfg.validate();
  return Pipeline(load_detector(cfg.detector, ctx), load_classifier(cfg.classifier), cfg);
}

Pipeline::Classified Pipeline::run_stages(const Frame& frame, StageTimings& timings) const {
  auto t0 = Clock::now();
  const std::vector<Detection> dets =
      in_stage("detect", [&] { return detector_->detect(frame, cfg_.detector_threshold); });
  timings.detect_ms = elapsed_ms(t0);

  t0 = Clock::now();
  const TensorBatch batch =
      process_detections(frame, dets, classifier_->preprocess(), cfg_.expansion_ratio);
  timings.roi_ms = elapsed_ms(t0);

  t0 = Clock::now();
  const std::vector<Classification> labels =
      in_stage("classify", [&] { return classifier_->classify_batch(batch, cfg_.classifier_threshold); });
  timings.classify_ms = elapsed_ms(t0);

  Classified out;
  out.skipped = batch.skipped.size();
  out.faces.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const RoiProvenance& p = batch.provenance[i];
    const BoundingBox box =
        cfg_.box_source == BoxSource::Roi ? p.roi_box : clamp_box(p.detection.box, frame.dims());
    out.faces.push_back({{box, p.detection.score}, labels[i]});
  }
  return out;
}

void Pipeline::finish(const Frame& frame, FrameResult& result) const {
  if (!cfg_.annotate) return;
  const auto t0 = Clock::now();
  result.annotated = annotate(frame, result.tracks, {cfg_.draw_coasting_distinct});
  result.timings.annotate_ms = elapsed_ms(t0);
}

FrameResult Pipeline::process_image(const Frame& frame) const {
  FrameResult result;
  result.frame_index = frame.index();
  Classified c = run_stages(frame, result.timings);
  result.skipped = c.skipped;
  result.tracks.reserve(c.faces.size());
  for (std::size_t i = 0; i < c.faces.size(); ++i) {
    const auto& f = c.faces[i];
    result.tracks.push_back({static_cast<TrackId>(i), f.detection.box, f.classification.label,
                             f.classification.confidence, false});
  }
  finish(frame, result);
  return result;
}

FrameResult Pipeline::process_stream_frame(StreamState& state, const Frame& frame) const {
  if (state.last_index && frame.index() <= *state.last_index) {
    throw Error(ErrorCode::OutOfOrderFrame, "frame " + std::to_string(frame.index()) +
                                                " does not follow frame " +
                                                std::to_string(*state.last_index));
  }
  if (!cfg_.tracking_enabled) {
    FrameResult result = process_image(frame);
    state.last_index = frame.index();
    return result;
  }

  FrameResult result;
  result.frame_index = frame.index();
  Classified c = run_stages(frame, result.timings);
  result.skipped = c.skipped;
  const auto t0 = Clock::now();
  result.tracks = state.tracker.update(c.faces, frame.dims(), frame.index());
  result.timings.track_ms = elapsed_ms(t0);
  state.last_index = frame.index();
  finish(frame, result);
  return result;
}

// ---------------------------------------------------------------------------
// Annotation

namespace {

struct Glyph {
  char ch;
  const char* rows[7];
};

// 5x7 glyphs for the characters that appear in labels.
constexpr Glyph kFont[] = {
    {'M', {"#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"}},
    {'N', {"#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"}},
    {'a', {".....", ".....", ".###.", "....#", ".####", "#...#", ".####"}},
    {'k', {"#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#."}},
    {'o', {".....", ".....", ".###.", "#...#", "#...#", "#...#", ".###."}},
    {'s', {".....", ".....", ".####", "#....", ".###.", "....#", "####."}},
    {'_', {".....", ".....", ".....", ".....", ".....", ".....", "#####"}},
    {'0', {".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."}},
    {'1', {"..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."}},
    {'2', {".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"}},
    {'3', {"#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."}},
    {'4', {"...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."}},
    {'5', {"#####", "#....", "####.", "....#", "....#", "#...#", ".###."}},
    {'6', {"..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."}},
    {'7', {"#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."}},
    {'8', {".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."}},
    {'9', {".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."}},
};

constexpr std::int32_t kGlyphW = 5;
constexpr std::int32_t kGlyphH = 7;
constexpr std::int32_t kAdvance = kGlyphW + 1;
constexpr std::int32_t kLabelGap = 2;

const Glyph* find_glyph(char c) {
  for (const Glyph& g : kFont) {
    if (g.ch == c) return &g;
  }
  return nullptr;
}

std::string label_text(const TrackOutput& r) {
  return std::string(label_name(r.label)) + " " + std::to_string(r.id);
}

void put(Frame& f, std::int32_t x, std::int32_t y, const std::uint8_t rgb[3]) {
  std::uint8_t* p = f.at(x, y);
  p[0] = rgb[0];
  p[1] = rgb[1];
  p[2] = rgb[2];
}

}  // namespace

std::optional<PixelRect> label_rect(const TrackOutput& result, FrameDims dims) {
  const PixelRect box = crop_rect(clamp_box(result.box, dims), dims);
  const auto len = static_cast<std::int32_t>(label_text(result).size());
  const PixelRect r{box.x, box.y - kLabelGap - kGlyphH, len * kAdvance - 1, kGlyphH};
  if (r.y < 0 || r.x + r.w > dims.width) return std::nullopt;
  return r;
}

Frame annotate(const Frame& frame, const std::vector<TrackOutput>& results,
               const AnnotateOptions& opts) {
  static constexpr std::uint8_t kGreen[3] = {0, 255, 0};
  static constexpr std::uint8_t kRed[3] = {255, 0, 0};
  Frame out = frame;
  for (const TrackOutput& r : results) {
    const std::uint8_t* color = r.label == MaskLabel::Mask ? kGreen : kRed;
    const PixelRect b = crop_rect(clamp_box(r.box, frame.dims()), frame.dims());
    if (!b.empty()) {
      const std::int32_t t = (r.coasting && opts.draw_coasting_distinct) ? 1 : 3;
      const std::int32_t tx = std::min(t, b.w);
      const std::int32_t ty = std::min(t, b.h);
      for (std::int32_t y = b.y; y < b.y + b.h; ++y) {
        const bool edge_row = y < b.y + ty || y >= b.y + b.h - ty;
        for (std::int32_t x = b.x; x < b.x + b.w; ++x) {
          if (edge_row || x < b.x + tx || x >= b.x + b.w - tx) put(out, x, y, color);
        }
      }
    }
    const auto lr = label_rect(r, frame.dims());
    if (!lr) continue;
    const std::string text = label_text(r);
    for (std::size_t i = 0; i < text.size(); ++i) {
      const Glyph* g = find_glyph(text[i]);
      if (!g) continue;
      const std::int32_t gx = lr->x + static_cast<std::int32_t>(i) * kAdvance;
      for (std::int32_t row = 0; row < kGlyphH; ++row) {
        for (std::int32_t col = 0; col < kGlyphW; ++col) {
          if (g->rows[row][col] == '#') put(out, gx + col, lr->y + row, color);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Streams

std::optional<Frame> SceneSource::next() {
  if (pos_ >= frames_) return std::nullopt;
  Frame f = render_scene(scene_, pos_).frame;
  f.set_timestamp_ms(static_cast<double>(pos_) * 1000.0 / frame_rate());
  ++pos_;
  return f;
}

namespace {

std::optional<Frame> pull(FrameSource& source, std::int64_t expected_index) {
  try {
    return source.next();
  } catch (const Error& e) {
    throw Error(e.code(), "decoding frame " + std::to_string(expected_index) + ": " + e.what());
  }
}

}  // namespace

StreamSummary run_stream(const Pipeline& pipeline, FrameSource& source, const StreamSink& sink,
                         const RunOptions& opts) {
  StreamSummary summary;
  StreamState state = pipeline.new_stream();
  std::set<TrackId> ids;
  StageTimings totals;
  const auto start = Clock::now();

  std::int64_t expected = 0;
  std::optional<Frame> current = pull(source, expected);
  while (current) {
    std::future<std::optional<Frame>> prefetch;
    if (opts.pipelined) {
      prefetch = std::async(std::launch::async, [&source, n = expected + 1] { return pull(source, n); });
    }

    FrameResult result = pipeline.process_stream_frame(state, *current);
    if (sink.jsonl) *sink.jsonl << write_jsonl({result.frame_index, result.tracks});
    if (sink.frame_dir && result.annotated) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%06lld.ppm", static_cast<long long>(result.frame_index));
      write_ppm_file(*result.annotated, *sink.frame_dir / name);
    }

    ++summary.frames;
    summary.skipped += static_cast<std::int64_t>(result.skipped);
    for (const TrackOutput& t : result.tracks) {
      ++summary.faces;
      (t.label == MaskLabel::Mask ? summary.mask : summary.no_mask) += 1;
      if (t.coasting) ++summary.coasting;
      ids.insert(t.id);
    }
    totals.detect_ms += result.timings.detect_ms;
    totals.roi_ms += result.timings.roi_ms;
    totals.classify_ms += result.timings.classify_ms;
    totals.track_ms += result.timings.track_ms;
    totals.annotate_ms += result.timings.annotate_ms;

    ++expected;
    current = opts.pipelined ? prefetch.get() : pull(source, expected);
  }

  summary.wall_ms = elapsed_ms(start);
  summary.distinct_ids = static_cast<std::int64_t>(ids.size());
  if (summary.frames > 0) {
    const auto n = static_cast<double>(summary.frames);
    summary.mean_timings = {totals.detect_ms / n, totals.roi_ms / n, totals.classify_ms / n,
                            totals.track_ms / n, totals.annotate_ms / n};
    if (summary.wall_ms > 0) summary.mean_fps = n * 1000.0 / summary.wall_ms;
  }
  return summary;
}

}  // namespace maskpipe
