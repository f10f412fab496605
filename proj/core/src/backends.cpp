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

#include "maskpipe/backends.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "maskpipe/error.hpp"

namespace maskpipe {

std::vector<Detection> FaceDetector::detect(const Frame& frame, double conf_threshold) const {
  if (!(conf_threshold >= 0.0 && conf_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "detector threshold must lie in [0, 1]");
  }
  std::vector<Detection> dets = candidates(frame);
  std::erase_if(dets, [&](const Detection& d) {
    return !(d.score >= conf_threshold) || !(d.box.w > 0.0) || !(d.box.h > 0.0);
  });
  for (auto& d : dets) d.score = std::clamp(d.score, 0.0, 1.0);
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.box.x != b.box.x) return a.box.x < b.box.x;
    return a.box.y < b.box.y;
  });
  return dets;
}

std::vector<Classification> MaskClassifier::classify_batch(const TensorBatch& batch,
                                                           double threshold) const {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "classifier threshold must lie in (0, 1)");
  }
  const auto n = static_cast<std::int64_t>(batch.size());
  const auto expected = batch_shape(preprocess(), n);
  if (batch.tensor.shape != expected ||
      static_cast<std::int64_t>(batch.tensor.data.size()) != batch.tensor.element_count()) {
    std::ostringstream msg;
    msg << "batch tensor shape [";
    for (std::size_t i = 0; i < batch.tensor.shape.size(); ++i) {
      msg << (i ? "," : "") << batch.tensor.shape[i];
    }
    msg << "] does not match preprocess spec [";
    for (std::size_t i = 0; i < expected.size(); ++i) msg << (i ? "," : "") << expected[i];
    msg << "]";
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
  if (n == 0) return {};

  const std::vector<double> probs = mask_probabilities(batch);
  if (probs.size() != batch.size()) {
    throw Error(ErrorCode::BackendFailure, std::string(name()) + " returned " +
                                               std::to_string(probs.size()) + " scores for " +
                                               std::to_string(batch.size()) + " inputs");
  }
  std::vector<Classification> out;
  out.reserve(probs.size());
  for (double p : probs) {
    p = std::clamp(p, 0.0, 1.0);
    if (p >= threshold) {
      out.push_back({MaskLabel::Mask, p});
    } else {
      out.push_back({MaskLabel::NoMask, 1.0 - p});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Detection> OracleDetector::candidates(const Frame& frame) const {
  std::vector<Detection> out;
  for (const auto& gt : scene_ground_truth(scene_, frame.index())) out.push_back({gt.box, 1.0});
  return out;
}

ScriptedDetector::ScriptedDetector(SceneSpec scene, DropoutSchedule dropouts)
    : scene_(std::move(scene)), dropouts_(std::move(dropouts)) {
  for (const auto& [frame, face] : dropouts_) {
    if (face >= scene_.faces.size()) {
      throw Error(ErrorCode::InvalidScene, "dropout at frame " + std::to_string(frame) +
                                               " references missing face " + std::to_string(face));
    }
  }
}

std::vector<Detection> ScriptedDetector::candidates(const Frame& frame) const {
  std::vector<Detection> out;
  for (const auto& gt : scene_ground_truth(scene_, frame.index())) {
    if (dropouts_.contains({frame.index(), gt.ordinal})) continue;
    out.push_back({gt.box, 1.0});
  }
  return out;
}

namespace {

bool is_skin(const std::uint8_t* p) noexcept {
  return p[0] > p[2] + 60 && p[0] > p[1];
}

}  // namespace

std::vector<Detection> PixelScanDetector::candidates(const Frame& frame) const {
  const std::int32_t w = frame.width();
  const std::int32_t h = frame.height();
  const auto* px = frame.pixels().data();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::int32_t> stack;
  std::vector<Detection> out;

  for (std::int32_t y = 0; y < h; ++y) {
    for (std::int32_t x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (seen[idx] || !is_skin(px + idx * 3)) continue;
      std::int32_t x0 = x, x1 = x, y0 = y, y1 = y;
      seen[idx] = 1;
      stack.push_back(static_cast<std::int32_t>(idx));
      while (!stack.empty()) {
        const std::int32_t cur = stack.back();
        stack.pop_back();
        const std::int32_t cx = cur % w;
        const std::int32_t cy = cur / w;
        x0 = std::min(x0, cx);
        x1 = std::max(x1, cx);
        y0 = std::min(y0, cy);
        y1 = std::max(y1, cy);
        const auto visit = [&](std::int32_t nx, std::int32_t ny) {
          const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
          if (!seen[n] && is_skin(px + n * 3)) {
            seen[n] = 1;
            stack.push_back(static_cast<std::int32_t>(n));
          }
        };
        if (cx > 0) visit(cx - 1, cy);
        if (cx + 1 < w) visit(cx + 1, cy);
        if (cy > 0) visit(cx, cy - 1);
        if (cy + 1 < h) visit(cx, cy + 1);
      }
      const std::int32_t bw = x1 - x0 + 1;
      const std::int32_t bh = y1 - y0 + 1;
      if (bw >= min_side_ && bh >= min_side_) {
        out.push_back({{static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(bw),
                        static_cast<double>(bh)},
                       1.0});
      }
    }
  }
  return out;
}

MarkerClassifier::MarkerClassifier(PreprocessSpec preprocess, double min_fraction)
    : preprocess_(preprocess), min_fraction_(min_fraction) {
  preprocess_.validate();
}

std::vector<double> MarkerClassifier::mask_probabilities(const TensorBatch& batch) const {
  const PreprocessSpec& spec = preprocess_;
  const std::size_t plane = static_cast<std::size_t>(spec.target_width) * spec.target_height;
  const std::size_t element = plane * 3;
  std::vector<double> out;
  out.reserve(batch.size());
  for (std::size_t n = 0; n < batch.size(); ++n) {
    const float* t = batch.tensor.data.data() + n * element;
    std::size_t dark = 0;
    std::size_t bright = 0;
    for (std::size_t i = 0; i < plane; ++i) {
      double v[3];
      for (int c = 0; c < 3; ++c) {
        const float raw = spec.layout == ChannelLayout::Interleaved ? t[i * 3 + c] : t[c * plane + i];
        v[c] = (raw * spec.scale[c] + spec.mean[c]) * 255.0;
      }
      if (v[0] < 40.0 && v[1] < 40.0 && v[2] < 40.0) ++dark;
      if (v[0] > 215.0 && v[1] > 215.0 && v[2] > 215.0) ++bright;
    }
    const double need = min_fraction_ * static_cast<double>(plane);
    out.push_back(static_cast<double>(dark) >= need && static_cast<double>(bright) >= need ? 1.0 : 0.0);
  }
  return out;
}

void busy_wait(std::chrono::nanoseconds duration) {
  const auto until = std::chrono::steady_clock::now() + duration;
  while (std::chrono::steady_clock::now() < until) {
  }
}

std::vector<Detection> DelayedDetector::candidates(const Frame& frame) const {
  busy_wait(delay_);
  return inner_->candidates(frame);
}

std::vector<double> DelayedClassifier::mask_probabilities(const TensorBatch& batch) const {
  busy_wait(delay_);
  return inner_->mask_probabilities(batch);
}

std::vector<Detection> OnnxDetector::candidates(const Frame&) const {
  throw Error(ErrorCode::BackendFailure,
              "cannot run " + path_ + ": this build has no ONNX inference runtime");
}

std::vector<double> OnnxClassifier::mask_probabilities(const TensorBatch&) const {
  throw Error(ErrorCode::BackendFailure,
              "cannot run " + path_ + ": this build has no ONNX inference runtime");
}

// ---------------------------------------------------------------------------

namespace {

std::string dims_string(const std::vector<std::int64_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += dims[i] < 0 ? "?" : std::to_string(dims[i]);
  }
  return s + "]";
}

bool extent_matches(std::int64_t model, std::int64_t declared) {
  return model < 0 || model == declared;
}

const OnnxValueInfo& first_input(const OnnxModelInfo& info, const std::string& path) {
  if (info.inputs.empty()) {
    throw Error(ErrorCode::SignatureMismatch, path + " declares no graph inputs");
  }
  if (info.outputs.empty()) {
    throw Error(ErrorCode::SignatureMismatch, path + " declares no graph outputs");
  }
  const auto& in = info.inputs.front();
  if (in.elem_type != 0 && in.elem_type != 1) {
    throw Error(ErrorCode::SignatureMismatch, path + " input '" + in.name + "' is not float32");
  }
  if (in.dims.size() != 4) {
    throw Error(ErrorCode::SignatureMismatch,
                path + " input '" + in.name + "' has shape " + dims_string(in.dims) +
                    ", expected a rank-4 image batch");
  }
  return in;
}

void check_classifier_signature(const OnnxModelInfo& info, const BackendSpec& spec,
                                const std::string& path) {
  const auto& in = first_input(info, path);
  const auto& pp = spec.preprocess;
  const bool interleaved = pp.layout == ChannelLayout::Interleaved;
  const std::int64_t h = interleaved ? in.dims[1] : in.dims[2];
  const std::int64_t w = interleaved ? in.dims[2] : in.dims[3];
  const std::int64_t c = interleaved ? in.dims[3] : in.dims[1];
  if (!extent_matches(h, pp.target_height) || !extent_matches(w, pp.target_width) ||
      !extent_matches(c, 3)) {
    throw Error(ErrorCode::SignatureMismatch,
                path + " input shape " + dims_string(in.dims) + " disagrees with preprocess " +
                    std::to_string(pp.target_width) + "x" + std::to_string(pp.target_height) +
                    (interleaved ? " interleaved" : " planar"));
  }
  const auto& out = info.outputs.front();
  const std::int64_t classes = out.dims.empty() ? -1 : out.dims.back();
  if (spec.mask_index < 0 || (classes >= 0 && classes != 1 && spec.mask_index >= classes) ||
      (classes == 1 && spec.mask_index != 0)) {
    throw Error(ErrorCode::SignatureMismatch,
                path + " output shape " + dims_string(out.dims) + " has no class index " +
                    std::to_string(spec.mask_index));
  }
}

void check_detector_signature(const OnnxModelInfo& info, const std::string& path) {
  const auto& in = first_input(info, path);
  if (!extent_matches(in.dims[1], 3) && !extent_matches(in.dims[3], 3)) {
    throw Error(ErrorCode::SignatureMismatch,
                path + " input shape " + dims_string(in.dims) + " is not a 3-channel image batch");
  }
}

OnnxModelInfo open_model(const BackendSpec& spec) {
  if (!spec.model_path || spec.model_path->empty()) {
    throw Error(ErrorCode::ModelNotFound, "backend '" + spec.name + "' requires model_path");
  }
  if (!std::filesystem::is_regular_file(*spec.model_path)) {
    throw Error(ErrorCode::ModelNotFound, "model file not found: " + *spec.model_path);
  }
  return read_onnx_model_info(*spec.model_path);
}

SceneSpec scene_for(const BackendSpec& spec, const BackendContext& ctx, DropoutSchedule& dropouts) {
  dropouts = ctx.dropouts;
  if (ctx.scene) return *ctx.scene;
  if (!spec.model_path) {
    throw Error(ErrorCode::ModelNotFound,
                "backend '" + spec.name + "' needs a scene (context or model_path scene JSON)");
  }
  std::ifstream in(*spec.model_path);
  if (!in) throw Error(ErrorCode::ModelNotFound, "scene file not found: " + *spec.model_path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto [scene, file_dropouts] = scene_from_json(text);
  if (dropouts.empty()) dropouts = std::move(file_dropouts);
  return scene;
}

}  // namespace

std::shared_ptr<const FaceDetector> load_detector(const BackendSpec& spec, const BackendContext& ctx) {
  if (spec.kind != BackendKind::Detector) {
    throw Error(ErrorCode::UnsupportedKind, "'" + spec.name + "' was not declared as a detector");
  }
  if (spec.name == "synthetic") return std::make_shared<PixelScanDetector>();
  if (spec.name == "oracle" || spec.name == "scripted") {
    DropoutSchedule dropouts;
    SceneSpec scene = scene_for(spec, ctx, dropouts);
    if (spec.name == "oracle") return std::make_shared<OracleDetector>(std::move(scene));
    return std::make_shared<ScriptedDetector>(std::move(scene), std::move(dropouts));
  }
  if (spec.name == "onnx") {
    OnnxModelInfo info = open_model(spec);
    check_detector_signature(info, *spec.model_path);
    return std::make_shared<OnnxDetector>(*spec.model_path, std::move(info));
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown detector backend '" + spec.name + "'");
}

std::shared_ptr<const MaskClassifier> load_classifier(const BackendSpec& spec) {
  if (spec.kind != BackendKind::Classifier) {
    throw Error(ErrorCode::UnsupportedKind, "'" + spec.name + "' was not declared as a classifier");
  }
  spec.preprocess.validate();
  if (spec.name == "synthetic") return std::make_shared<MarkerClassifier>(spec.preprocess);
  if (spec.name == "onnx") {
    OnnxModelInfo info = open_model(spec);
    check_classifier_signature(info, spec, *spec.model_path);
    return std::make_shared<OnnxClassifier>(*spec.model_path, std::move(info), spec.preprocess,
                                            spec.mask_index);
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown classifier backend '" + spec.name + "'");
}

BackendHandle load_backend(const BackendSpec& spec, const BackendContext& ctx) {
  if (spec.kind == BackendKind::Detector) return load_detector(spec, ctx);
  return load_classifier(spec);
}

}  // namespace maskpipe
