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

#include "maskpipe/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "maskpipe/error.hpp"

namespace maskpipe {

std::string_view stage_name(BenchStage stage) noexcept {
  switch (stage) {
    case BenchStage::Detect: return "detect";
    case BenchStage::Roi: return "roi";
    case BenchStage::Classify: return "classify";
    case BenchStage::EndToEnd: return "end_to_end";
  }
  return "?";
}

std::optional<BenchStage> parse_stage(std::string_view name) noexcept {
  for (auto s : {BenchStage::Detect, BenchStage::Roi, BenchStage::Classify, BenchStage::EndToEnd}) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<FrameDims> parse_resolution(std::string_view text) noexcept {
  if (text == "480p") return FrameDims{854, 480};
  if (text == "720p") return FrameDims{1280, 720};
  if (text == "1080p") return FrameDims{1920, 1080};
  const auto x = text.find('x');
  if (x == std::string_view::npos || x == 0 || x + 1 >= text.size()) return std::nullopt;
  const auto digits = [](std::string_view s) -> std::optional<std::int32_t> {
    if (s.empty() || s.size() > 6) return std::nullopt;
    std::int32_t v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
    }
    return v;
  };
  auto w = digits(text.substr(0, x));
  auto h = digits(text.substr(x + 1));
  if (!w || !h || *w < 1 || *h < 1) return std::nullopt;
  return FrameDims{*w, *h};
}

std::string resolution_name(FrameDims dims) {
  return std::to_string(dims.width) + "x" + std::to_string(dims.height);
}

void BenchConfig::validate() const {
  if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "bench iterations must be >= 1");
  if (warmup < 0) throw Error(ErrorCode::InvalidConfig, "bench warmup must be >= 0");
  if (streams < 1) throw Error(ErrorCode::InvalidConfig, "bench streams must be >= 1");
  if (resolutions.empty()) throw Error(ErrorCode::InvalidConfig, "bench needs at least one resolution");
  if (stages.empty()) throw Error(ErrorCode::InvalidConfig, "bench needs at least one stage");
  for (auto d : resolutions) {
    if (!d.valid()) throw Error(ErrorCode::InvalidConfig, "bench resolution must be positive");
  }
}

SampleStats summarize(std::span<const double> samples_ms) {
  SampleStats s;
  if (samples_ms.empty()) return s;
  std::vector<double> v(samples_ms.begin(), samples_ms.end());
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  const auto percentile = [&v](double q) {
    const double rank = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (v[hi] - v[lo]) * (rank - static_cast<double>(lo));
  };
  s.count = static_cast<std::int64_t>(v.size());
  // Summing the sorted values keeps the mean independent of sample order.
  s.mean_ms = std::accumulate(v.begin(), v.end(), 0.0) / n;
  s.p50_ms = percentile(0.50);
  s.p95_ms = percentile(0.95);
  double sq = 0.0;
  for (double x : v) sq += (x - s.mean_ms) * (x - s.mean_ms);
  s.stddev_ms = std::sqrt(sq / n);
  s.min_ms = v.front();
  s.max_ms = v.back();
  s.mean_ms = std::clamp(s.mean_ms, s.min_ms, s.max_ms);
  return s;
}

SampleStats time_stage(const std::function<void()>& stage, std::int32_t iterations,
                       std::int32_t warmup) {
  if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "iterations must be >= 1");
  for (std::int32_t i = 0; i < warmup; ++i) stage();
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(iterations));
  for (std::int32_t i = 0; i < iterations; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    stage();
    samples.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return summarize(samples);
}

SceneSpec bench_scene(FrameDims dims) {
  SceneSpec scene;
  scene.dims = dims;
  const double side = std::max(16.0, std::min(dims.width, dims.height) / 5.0);
  const double y = dims.height * 0.3;
  const double xs[] = {0.15, 0.45, 0.75};
  const MaskLabel labels[] = {MaskLabel::Mask, MaskLabel::NoMask, MaskLabel::Mask};
  for (int i = 0; i < 3; ++i) {
    SceneFace f;
    f.box = {dims.width * xs[i], y, side, side * 1.1};
    f.label = labels[i];
    scene.faces.push_back(f);
  }
  return scene;
}

namespace {

template <typename F>
auto attributed(BenchStage stage, FrameDims dims, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::BackendFailure, "bench stage " + std::string(stage_name(stage)) + " at " +
                                               resolution_name(dims) + ": " + e.what());
  }
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg, const PipelineFactory& make_pipeline) {
  cfg.validate();
  BenchReport report;
  for (const FrameDims dims : cfg.resolutions) {
    const SceneSpec scene = bench_scene(dims);
    const Pipeline pipeline = make_pipeline(scene);
    if (report.backends.empty()) {
      report.backends.push_back({"detector", std::string(pipeline.detector().name()),
                                 pipeline.detector().parameter_count()});
      report.backends.push_back({"classifier", std::string(pipeline.classifier().name()),
                                 pipeline.classifier().parameter_count()});
    }
    const Frame frame = render_scene(scene, 0).frame;
    const PipelineConfig& pc = pipeline.config();
    const auto& spec = pipeline.classifier().preprocess();

    // Inputs for the isolated stages come from one untimed pass.
    std::vector<Detection> dets;
    TensorBatch batch;
    attributed(BenchStage::Detect, dims, [&] {
      dets = pipeline.detector().detect(frame, pc.detector_threshold);
      batch = process_detections(frame, dets, spec, pc.expansion_ratio);
      return 0;
    });

    for (const BenchStage stage : cfg.stages) {
      std::function<void()> fn;
      switch (stage) {
        case BenchStage::Detect:
          fn = [&] { (void)pipeline.detector().detect(frame, pc.detector_threshold); };
          break;
        case BenchStage::Roi:
          fn = [&] { (void)process_detections(frame, dets, spec, pc.expansion_ratio); };
          break;
        case BenchStage::Classify:
          fn = [&] { (void)pipeline.classifier().classify_batch(batch, pc.classifier_threshold); };
          break;
        case BenchStage::EndToEnd:
          fn = [&] { (void)pipeline.process_image(frame); };
          break;
      }
      report.rows.push_back(
          {stage, dims, attributed(stage, dims, [&] { return time_stage(fn, cfg.iterations, cfg.warmup); })});
    }

    if (cfg.streams > 1) {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<std::thread> workers;
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.streams));
      for (std::int32_t s = 0; s < cfg.streams; ++s) {
        workers.emplace_back([&, s] {
          try {
            for (std::int32_t i = 0; i < cfg.iterations; ++i) (void)pipeline.process_image(frame);
          } catch (...) {
            errors[static_cast<std::size_t>(s)] = std::current_exception();
          }
        });
      }
      for (auto& w : workers) w.join();
      for (auto& e : errors) {
        if (e) attributed(BenchStage::EndToEnd, dims, [&]() -> int { std::rethrow_exception(e); });
      }
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      report.throughput.push_back(
          {dims, cfg.streams, secs > 0 ? cfg.streams * static_cast<double>(cfg.iterations) / secs : 0.0});
    }
  }
  return report;
}

BenchReport run_benchmark(const BenchConfig& cfg, const PipelineConfig& pipeline_cfg) {
  return run_benchmark(cfg, [&pipeline_cfg](const SceneSpec& scene) {
    BackendContext ctx;
    ctx.scene = scene;
    return Pipeline::from_config(pipeline_cfg, ctx);
  });
}

std::string report_to_text(const BenchReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-11s %10s %10s %10s %10s\n", "stage", "resolution",
                "mean_ms", "p50_ms", "p95_ms", "stddev_ms");
  out << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof(line), "%-12s %-11s %10.3f %10.3f %10.3f %10.3f\n",
                  std::string(stage_name(r.stage)).c_str(), resolution_name(r.dims).c_str(),
                  r.stats.mean_ms, r.stats.p50_ms, r.stats.p95_ms, r.stats.stddev_ms);
    out << line;
  }
  for (const auto& b : report.backends) {
    out << b.role << ": " << b.name;
    if (b.parameter_count) {
      std::snprintf(line, sizeof(line), " (%.2fM parameters)", *b.parameter_count / 1e6);
      out << line;
    }
    out << "\n";
  }
  for (const auto& t : report.throughput) {
    std::snprintf(line, sizeof(line), "throughput %s x%d streams: %.1f frames/s\n",
                  resolution_name(t.dims).c_str(), t.streams, t.frames_per_second);
    out << line;
  }
  return out.str();
}

std::string report_to_json(const BenchReport& report) {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    j["rows"].push_back({{"stage", stage_name(r.stage)},
                         {"width", r.dims.width},
                         {"height", r.dims.height},
                         {"samples", r.stats.count},
                         {"mean_ms", r.stats.mean_ms},
                         {"p50_ms", r.stats.p50_ms},
                         {"p95_ms", r.stats.p95_ms},
                         {"stddev_ms", r.stats.stddev_ms},
                         {"min_ms", r.stats.min_ms},
                         {"max_ms", r.stats.max_ms}});
  }
  j["backends"] = nlohmann::ordered_json::array();
  for (const auto& b : report.backends) {
    nlohmann::ordered_json jb = {{"role", b.role}, {"name", b.name}};
    jb["parameter_count"] = nullptr;
    if (b.parameter_count) jb["parameter_count"] = *b.parameter_count;
    j["backends"].push_back(jb);
  }
  j["throughput"] = nlohmann::ordered_json::array();
  for (const auto& t : report.throughput) {
    j["throughput"].push_back({{"width", t.dims.width},
                               {"height", t.dims.height},
                               {"streams", t.streams},
                               {"frames_per_second", t.frames_per_second}});
  }
  return j.dump(2) + "\n";
}

BenchReport report_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    BenchReport report;
    for (const auto& r : j.at("rows")) {
      const auto stage = parse_stage(r.at("stage").get<std::string>());
      if (!stage) throw Error(ErrorCode::SchemaViolation, "unknown bench stage in report");
      SampleStats s;
      s.count = r.at("samples").get<std::int64_t>();
      s.mean_ms = r.at("mean_ms").get<double>();
      s.p50_ms = r.at("p50_ms").get<double>();
      s.p95_ms = r.at("p95_ms").get<double>();
      s.stddev_ms = r.at("stddev_ms").get<double>();
      s.min_ms = r.at("min_ms").get<double>();
      s.max_ms = r.at("max_ms").get<double>();
      report.rows.push_back({*stage, {r.at("width").get<std::int32_t>(), r.at("height").get<std::int32_t>()}, s});
    }
    for (const auto& b : j.at("backends")) {
      BackendInfo info{b.at("role").get<std::string>(), b.at("name").get<std::string>(), std::nullopt};
      if (!b.at("parameter_count").is_null()) info.parameter_count = b["parameter_count"].get<std::int64_t>();
      report.backends.push_back(std::move(info));
    }
    for (const auto& t : j.at("throughput")) {
      report.throughput.push_back({{t.at("width").get<std::int32_t>(), t.at("height").get<std::int32_t>()},
                                   t.at("streams").get<std::int32_t>(),
                                   t.at("frames_per_second").get<double>()});
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("bad bench report: ") + e.what());
  }
}

}  // namespace maskpipe
