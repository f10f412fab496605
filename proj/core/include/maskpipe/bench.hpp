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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maskpipe/pipeline.hpp"
#include "maskpipe/scene.hpp"

namespace maskpipe {

enum class BenchStage : std::uint8_t { Detect, Roi, Classify, EndToEnd };

std::string_view stage_name(BenchStage stage) noexcept;
std::optional<BenchStage> parse_stage(std::string_view name) noexcept;

/// "480p" -> 854x480, "720p" -> 1280x720, "1080p" -> 1920x1080, or "WxH".
std::optional<FrameDims> parse_resolution(std::string_view text) noexcept;
std::string resolution_name(FrameDims dims);

struct BenchConfig {
  std::vector<FrameDims> resolutions{{854, 480}, {1280, 720}, {1920, 1080}};
  std::int32_t iterations = 100;
  std::int32_t warmup = 10;
  std::vector<BenchStage> stages{BenchStage::Detect, BenchStage::Roi, BenchStage::Classify,
                                 BenchStage::EndToEnd};
  /// When > 1, also measures aggregate end-to-end throughput of this many
  /// concurrent streams sharing the backends.
  std::int32_t streams = 1;

  void validate() const;
};

struct SampleStats {
  std::int64_t count = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double stddev_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;

  friend bool operator==(const SampleStats&, const SampleStats&) = default;
};

/// Order-insensitive summary; percentiles interpolate linearly between
/// closest ranks, stddev is the population standard deviation.
SampleStats summarize(std::span<const double> samples_ms);

/// Runs `warmup` discarded calls, then times each of `iterations` calls on
/// the monotonic clock. Exceptions from stage abort the measurement.
SampleStats time_stage(const std::function<void()>& stage, std::int32_t iterations,
                       std::int32_t warmup);

struct BenchRow {
  BenchStage stage = BenchStage::Detect;
  FrameDims dims;
  SampleStats stats;

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct BackendInfo {
  std::string role;  // "detector" | "classifier"
  std::string name;
  std::optional<std::int64_t> parameter_count;

  friend bool operator==(const BackendInfo&, const BackendInfo&) = default;
};

struct ThroughputRow {
  FrameDims dims;
  std::int32_t streams = 1;
  double frames_per_second = 0.0;

  friend bool operator==(const ThroughputRow&, const ThroughputRow&) = default;
};

struct BenchReport {
  std::vector<BenchRow> rows;  // resolution-major, stages in config order
  std::vector<BackendInfo> backends;
  std::vector<ThroughputRow> throughput;

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

/// Deterministic three-face scene scaled to dims, used as benchmark input.
SceneSpec bench_scene(FrameDims dims);

using PipelineFactory = std::function<Pipeline(const SceneSpec&)>;

/// Times every requested stage at every resolution on a synthesized frame.
/// Errors are rethrown as BackendFailure naming the stage and resolution.
BenchReport run_benchmark(const BenchConfig& cfg, const PipelineFactory& make_pipeline);
BenchReport run_benchmark(const BenchConfig& cfg, const PipelineConfig& pipeline_cfg);

std::string report_to_text(const BenchReport& report);
std::string report_to_json(const BenchReport& report);
BenchReport report_from_json(const std::string& text);

}  // namespace maskpipe
