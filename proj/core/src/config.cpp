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

#include "maskpipe/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <string_view>

namespace maskpipe {

namespace {

using json = nlohmann::json;

[[noreturn]] void schema(const std::string& ptr, const std::string& msg) {
  throw ConfigError(ErrorCode::SchemaViolation, ptr, msg);
}

[[noreturn]] void invalid(const std::string& ptr, const std::string& msg) {
  throw ConfigError(ErrorCode::InvalidValue, ptr, msg);
}

// Checks that `obj` is an object whose keys are all in `allowed`.
const json& object_at(const json& obj, const std::string& ptr,
                      std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) schema(ptr, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) schema(ptr + "/" + key, "unknown key");
  }
  return obj;
}

double number(const json& v, const std::string& ptr) {
  if (!v.is_number()) schema(ptr, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) invalid(ptr, "must be finite");
  return d;
}

std::int64_t integer(const json& v, const std::string& ptr) {
  if (!v.is_number_integer()) schema(ptr, "expected an integer");
  return v.get<std::int64_t>();
}

bool boolean(const json& v, const std::string& ptr) {
  if (!v.is_boolean()) schema(ptr, "expected true or false");
  return v.get<bool>();
}

std::string string(const json& v, const std::string& ptr) {
  if (!v.is_string()) schema(ptr, "expected a string");
  return v.get<std::string>();
}

std::array<double, 3> triple(const json& v, const std::string& ptr) {
  if (!v.is_array() || v.size() != 3) schema(ptr, "expected an array of 3 numbers");
  return {number(v[0], ptr + "/0"), number(v[1], ptr + "/1"), number(v[2], ptr + "/2")};
}

FrameDims dims_pair(const json& v, const std::string& ptr) {
  if (!v.is_array() || v.size() != 2) schema(ptr, "expected [width, height]");
  const auto w = integer(v[0], ptr + "/0");
  const auto h = integer(v[1], ptr + "/1");
  if (w < 1 || w > 65535) invalid(ptr + "/0", "width must lie in [1, 65535]");
  if (h < 1 || h > 65535) invalid(ptr + "/1", "height must lie in [1, 65535]");
  return {static_cast<std::int32_t>(w), static_cast<std::int32_t>(h)};
}

void apply_detector(const json& j, PipelineConfig& cfg) {
  const std::string p = "/detector";
  object_at(j, p, {"backend", "threshold", "model_path"});
  if (j.contains("backend")) cfg.detector.name = string(j["backend"], p + "/backend");
  if (j.contains("threshold")) {
    const double t = number(j["threshold"], p + "/threshold");
    if (t < 0.0 || t > 1.0) invalid(p + "/threshold", "must lie in [0, 1]");
    cfg.detector_threshold = t;
  }
  if (j.contains("model_path")) cfg.detector.model_path = string(j["model_path"], p + "/model_path");
}

void apply_preprocess(const json& j, PreprocessSpec& spec) {
  const std::string p = "/classifier/preprocess";
  object_at(j, p, {"target", "mean", "scale", "layout"});
  if (j.contains("target")) {
    const FrameDims d = dims_pair(j["target"], p + "/target");
    spec.target_width = d.width;
    spec.target_height = d.height;
  }
  if (j.contains("mean")) spec.mean = triple(j["mean"], p + "/mean");
  if (j.contains("scale")) {
    spec.scale = triple(j["scale"], p + "/scale");
    for (int c = 0; c < 3; ++c) {
      if (spec.scale[c] == 0.0) invalid(p + "/scale/" + std::to_string(c), "must be nonzero");
    }
  }
  if (j.contains("layout")) {
    const auto layout = string(j["layout"], p + "/layout");
    if (layout == "interleaved") {
      spec.layout = ChannelLayout::Interleaved;
    } else if (layout == "planar") {
      spec.layout = ChannelLayout::Planar;
    } else {
      invalid(p + "/layout", "must be \"interleaved\" or \"planar\"");
    }
  }
}

void apply_classifier(const json& j, PipelineConfig& cfg) {
  const std::string p = "/classifier";
  object_at(j, p, {"backend", "threshold", "model_path", "mask_index", "preprocess"});
  if (j.contains("backend")) cfg.classifier.name = string(j["backend"], p + "/backend");
  if (j.contains("threshold")) {
    const double t = number(j["threshold"], p + "/threshold");
    if (t <= 0.0 || t >= 1.0) invalid(p + "/threshold", "must lie in (0, 1)");
    cfg.classifier_threshold = t;
  }
  if (j.contains("model_path")) cfg.classifier.model_path = string(j["model_path"], p + "/model_path");
  if (j.contains("mask_index")) {
    const auto m = integer(j["mask_index"], p + "/mask_index");
    if (m < 0 || m > 1024) invalid(p + "/mask_index", "must lie in [0, 1024]");
    cfg.classifier.mask_index = static_cast<int>(m);
  }
  if (j.contains("preprocess")) apply_preprocess(j["preprocess"], cfg.classifier.preprocess);
}

void apply_tracker(const json& j, PipelineConfig& cfg) {
  const std::string p = "/tracker";
  object_at(j, p, {"enabled", "max_disappeared", "max_distance_frac", "label_history"});
  if (j.contains("enabled")) cfg.tracking_enabled = boolean(j["enabled"], p + "/enabled");
  if (j.contains("max_disappeared")) {
    const auto v = integer(j["max_disappeared"], p + "/max_disappeared");
    if (v < 0 || v > 1'000'000) invalid(p + "/max_disappeared", "must lie in [0, 1000000]");
    cfg.tracker.max_disappeared = static_cast<std::int32_t>(v);
  }
  if (j.contains("max_distance_frac")) {
    const double v = number(j["max_distance_frac"], p + "/max_distance_frac");
    if (v < 0.0) invalid(p + "/max_distance_frac", "must be >= 0");
    cfg.tracker.max_match_distance_frac = v;
  }
  if (j.contains("label_history")) {
    const auto v = integer(j["label_history"], p + "/label_history");
    if (v < 1 || v > 10'000) invalid(p + "/label_history", "must lie in [1, 10000]");
    cfg.tracker.label_history_len = static_cast<std::int32_t>(v);
  }
}

void apply_output(const json& j, PipelineConfig& cfg) {
  const std::string p = "/output";
  object_at(j, p, {"annotate", "draw_coasting_distinct", "box_source"});
  if (j.contains("annotate")) cfg.annotate = boolean(j["annotate"], p + "/annotate");
  if (j.contains("draw_coasting_distinct")) {
    cfg.draw_coasting_distinct = boolean(j["draw_coasting_distinct"], p + "/draw_coasting_distinct");
  }
  if (j.contains("box_source")) {
    const auto s = string(j["box_source"], p + "/box_source");
    if (s == "roi") {
      cfg.box_source = BoxSource::Roi;
    } else if (s == "raw") {
      cfg.box_source = BoxSource::Raw;
    } else {
      invalid(p + "/box_source", "must be \"roi\" or \"raw\"");
    }
  }
}

void apply_bench(const json& j, BenchConfig& cfg) {
  const std::string p = "/bench";
  object_at(j, p, {"resolutions", "iterations", "warmup", "stages", "streams"});
  if (j.contains("resolutions")) {
    const auto& r = j["resolutions"];
    if (!r.is_array() || r.empty()) schema(p + "/resolutions", "expected a non-empty array");
    cfg.resolutions.clear();
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string ptr = p + "/resolutions/" + std::to_string(i);
      if (r[i].is_string()) {
        const auto d = parse_resolution(r[i].get<std::string>());
        if (!d) invalid(ptr, "expected 480p, 720p, 1080p or WxH");
        cfg.resolutions.push_back(*d);
      } else {
        cfg.resolutions.push_back(dims_pair(r[i], ptr));
      }
    }
  }
  if (j.contains("iterations")) {
    const auto v = integer(j["iterations"], p + "/iterations");
    if (v < 1 || v > 10'000'000) invalid(p + "/iterations", "must be >= 1");
    cfg.iterations = static_cast<std::int32_t>(v);
  }
  if (j.contains("warmup")) {
    const auto v = integer(j["warmup"], p + "/warmup");
    if (v < 0 || v > 10'000'000) invalid(p + "/warmup", "must be >= 0");
    cfg.warmup = static_cast<std::int32_t>(v);
  }
  if (j.contains("stages")) {
    const auto& s = j["stages"];
    if (!s.is_array() || s.empty()) schema(p + "/stages", "expected a non-empty array");
    cfg.stages.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string ptr = p + "/stages/" + std::to_string(i);
      const auto stage = parse_stage(string(s[i], ptr));
      if (!stage) invalid(ptr, "expected detect, roi, classify or end_to_end");
      cfg.stages.push_back(*stage);
    }
  }
  if (j.contains("streams")) {
    const auto v = integer(j["streams"], p + "/streams");
    if (v < 1 || v > 1024) invalid(p + "/streams", "must lie in [1, 1024]");
    cfg.streams = static_cast<std::int32_t>(v);
  }
}

}  // namespace

json merge_config(json base, const json& overlay) {
  if (!base.is_object() || !overlay.is_object()) return overlay;
  for (const auto& [key, value] : overlay.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object()) {
      base[key] = merge_config(base[key], value);
    } else {
      base[key] = value;
    }
  }
  return base;
}

AppConfig config_from_json(const json& doc) {
  object_at(doc, "", {"detector", "classifier", "roi", "tracker", "output", "bench"});
  AppConfig cfg;
  if (doc.contains("detector")) apply_detector(doc["detector"], cfg.pipeline);
  if (doc.contains("classifier")) apply_classifier(doc["classifier"], cfg.pipeline);
  if (doc.contains("roi")) {
    const auto& roi = object_at(doc["roi"], "/roi", {"expansion"});
    if (roi.contains("expansion")) {
      const double e = number(roi["expansion"], "/roi/expansion");
      if (e < 0.0) invalid("/roi/expansion", "must be >= 0");
      cfg.pipeline.expansion_ratio = e;
    }
  }
  if (doc.contains("tracker")) apply_tracker(doc["tracker"], cfg.pipeline);
  if (doc.contains("output")) apply_output(doc["output"], cfg.pipeline);
  if (doc.contains("bench")) apply_bench(doc["bench"], cfg.bench);
  cfg.pipeline.validate();
  cfg.bench.validate();
  return cfg;
}

AppConfig load_config(const std::optional<std::filesystem::path>& path, const json& overrides) {
  json doc = json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path->string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(ErrorCode::SchemaViolation, "", std::string("invalid JSON: ") + e.what());
    }
  }
  return config_from_json(merge_config(std::move(doc), overrides));
}

json config_to_json(const AppConfig& cfg) {
  const PipelineConfig& p = cfg.pipeline;
  json det = {{"backend", p.detector.name}, {"threshold", p.detector_threshold}};
  if (p.detector.model_path) det["model_path"] = *p.detector.model_path;
  const PreprocessSpec& pp = p.classifier.preprocess;
  json cls = {{"backend", p.classifier.name},
              {"threshold", p.classifier_threshold},
              {"mask_index", p.classifier.mask_index},
              {"preprocess",
               {{"target", {pp.target_width, pp.target_height}},
                {"mean", pp.mean},
                {"scale", pp.scale},
                {"layout", pp.layout == ChannelLayout::Interleaved ? "interleaved" : "planar"}}}};
  if (p.classifier.model_path) cls["model_path"] = *p.classifier.model_path;
  json res = json::array();
  for (auto d : cfg.bench.resolutions) res.push_back({d.width, d.height});
  json stages = json::array();
  for (auto s : cfg.bench.stages) stages.push_back(stage_name(s));
  return {{"detector", det},
          {"classifier", cls},
          {"roi", {{"expansion", p.expansion_ratio}}},
          {"tracker",
           {{"enabled", p.tracking_enabled},
            {"max_disappeared", p.tracker.max_disappeared},
            {"max_distance_frac", p.tracker.max_match_distance_frac},
            {"label_history", p.tracker.label_history_len}}},
          {"output",
           {{"annotate", p.annotate},
            {"draw_coasting_distinct", p.draw_coasting_distinct},
            {"box_source", p.box_source == BoxSource::Roi ? "roi" : "raw"}}},
          {"bench",
           {{"resolutions", res},
            {"iterations", cfg.bench.iterations},
            {"warmup", cfg.bench.warmup},
            {"stages", stages},
            {"streams", cfg.bench.streams}}}};
}

}  // namespace maskpipe
