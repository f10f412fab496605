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

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "maskpipe/detection.hpp"
#include "maskpipe/frame.hpp"
#include "maskpipe/onnx_model.hpp"
#include "maskpipe/roi.hpp"
#include "maskpipe/scene.hpp"

namespace maskpipe {

inline constexpr double kDefaultDetectorThreshold = 0.5;
inline constexpr double kDefaultClassifierThreshold = 0.5;

/// Stage 1. Implementations provide candidate faces; detect() applies the
/// score threshold and the output ordering so every backend honors them.
///
/// Handles are shared between stream workers, so implementations must be
/// safe to call concurrently through the const interface.
class FaceDetector {
 public:
  virtual ~FaceDetector() = default;

  /// Detections with score >= conf_threshold, sorted by descending score,
  /// then ascending x, then ascending y. Boxes are not clamped here.
  std::vector<Detection> detect(const Frame& frame, double conf_threshold) const;

  virtual std::string_view name() const noexcept = 0;
  virtual std::optional<std::int64_t> parameter_count() const noexcept { return std::nullopt; }

 protected:
  virtual std::vector<Detection> candidates(const Frame& frame) const = 0;

  friend class DelayedDetector;
};

/// Stage 2. Implementations return p(Mask) per batch element.
class MaskClassifier {
 public:
  virtual ~MaskClassifier() = default;

  /// One Classification per batch element, in batch order. The label is
  /// Mask iff p(Mask) >= threshold. Throws ShapeMismatch when the tensor
  /// disagrees with preprocess().
  std::vector<Classification> classify_batch(const TensorBatch& batch, double threshold) const;

  virtual const PreprocessSpec& preprocess() const noexcept = 0;
  virtual std::string_view name() const noexcept = 0;
  virtual std::optional<std::int64_t> parameter_count() const noexcept { return std::nullopt; }

 protected:
  virtual std::vector<double> mask_probabilities(const TensorBatch& batch) const = 0;

  friend class DelayedClassifier;
};

// ---------------------------------------------------------------------------
// Built-in deterministic backends.

/// Reports the scene's ground truth for frame.index(), score 1.0.
class OracleDetector : public FaceDetector {
 public:
  explicit OracleDetector(SceneSpec scene) : scene_(std::move(scene)) {}
  std::string_view name() const noexcept override { return "oracle"; }
  const SceneSpec& scene() const noexcept { return scene_; }

 protected:
  std::vector<Detection> candidates(const Frame& frame) const override;

 private:
  SceneSpec scene_;
};

/// Oracle detector that misses the (frame, face) pairs in its schedule.
class ScriptedDetector : public FaceDetector {
 public:
  ScriptedDetector(SceneSpec scene, DropoutSchedule dropouts);
  std::string_view name() const noexcept override { return "scripted"; }

 protected:
  std::vector<Detection> candidates(const Frame& frame) const override;

 private:
  SceneSpec scene_;
  DropoutSchedule dropouts_;
};

/// Finds the skin-tone rectangles of synthetic scenes by scanning every
/// pixel and labelling connected components, so its cost grows with the
/// pixel count. Works on any raster, including decoded files.
class PixelScanDetector : public FaceDetector {
 public:
  explicit PixelScanDetector(std::int32_t min_side = 8) : min_side_(min_side) {}
  std::string_view name() const noexcept override { return "synthetic"; }

 protected:
  std::vector<Detection> candidates(const Frame& frame) const override;

 private:
  std::int32_t min_side_;
};

/// Reads the synthetic mask marker: an ROI is Mask when it contains both a
/// dark and a bright population, each covering at least min_fraction of it.
class MarkerClassifier : public MaskClassifier {
 public:
  explicit MarkerClassifier(PreprocessSpec preprocess = {}, double min_fraction = 0.02);
  const PreprocessSpec& preprocess() const noexcept override { return preprocess_; }
  std::string_view name() const noexcept override { return "synthetic"; }

 protected:
  std::vector<double> mask_probabilities(const TensorBatch& batch) const override;

 private:
  PreprocessSpec preprocess_;
  double min_fraction_;
};

/// Spins on the monotonic clock for the given duration.
void busy_wait(std::chrono::nanoseconds duration);

/// Adds a calibrated busy-wait to every call of the wrapped detector.
class DelayedDetector : public FaceDetector {
 public:
  DelayedDetector(std::shared_ptr<const FaceDetector> inner, std::chrono::nanoseconds delay)
      : inner_(std::move(inner)), delay_(delay) {}
  std::string_view name() const noexcept override { return inner_->name(); }

 protected:
  std::vector<Detection> candidates(const Frame& frame) const override;

 private:
  std::shared_ptr<const FaceDetector> inner_;
  std::chrono::nanoseconds delay_;
};

class DelayedClassifier : public MaskClassifier {
 public:
  DelayedClassifier(std::shared_ptr<const MaskClassifier> inner, std::chrono::nanoseconds delay)
      : inner_(std::move(inner)), delay_(delay) {}
  const PreprocessSpec& preprocess() const noexcept override { return inner_->preprocess(); }
  std::string_view name() const noexcept override { return inner_->name(); }

 protected:
  std::vector<double> mask_probabilities(const TensorBatch& batch) const override;

 private:
  std::shared_ptr<const MaskClassifier> inner_;
  std::chrono::nanoseconds delay_;
};

// ---------------------------------------------------------------------------
// Exported models.

/// A detector backed by an ONNX file whose signature has been verified.
/// Inference needs an ONNX runtime, which this build does not link; calls
/// therefore raise BackendFailure.
class OnnxDetector : public FaceDetector {
 public:
  OnnxDetector(std::string path, OnnxModelInfo info) : path_(std::move(path)), info_(std::move(info)) {}
  std::string_view name() const noexcept override { return "onnx"; }
  std::optional<std::int64_t> parameter_count() const noexcept override { return info_.parameter_count; }
  const OnnxModelInfo& model_info() const noexcept { return info_; }

 protected:
  std::vector<Detection> candidates(const Frame& frame) const override;

 private:
  std::string path_;
  OnnxModelInfo info_;
};

class OnnxClassifier : public MaskClassifier {
 public:
  OnnxClassifier(std::string path, OnnxModelInfo info, PreprocessSpec preprocess, int mask_index)
      : path_(std::move(path)), info_(std::move(info)), preprocess_(preprocess), mask_index_(mask_index) {}
  const PreprocessSpec& preprocess() const noexcept override { return preprocess_; }
  std::string_view name() const noexcept override { return "onnx"; }
  std::optional<std::int64_t> parameter_count() const noexcept override { return info_.parameter_count; }
  int mask_index() const noexcept { return mask_index_; }

 protected:
  std::vector<double> mask_probabilities(const TensorBatch& batch) const override;

 private:
  std::string path_;
  OnnxModelInfo info_;
  PreprocessSpec preprocess_;
  int mask_index_;
};

// ---------------------------------------------------------------------------
// Loading.

enum class BackendKind : std::uint8_t { Detector, Classifier };

struct BackendSpec {
  std::string name;
  BackendKind kind = BackendKind::Detector;
  PreprocessSpec preprocess{};  // used by classifiers only
  std::optional<std::string> model_path{};
  int mask_index = 0;  // which classifier output is p(Mask)
};

/// Inputs that built-in backends may need besides their spec.
struct BackendContext {
  std::optional<SceneSpec> scene;
  DropoutSchedule dropouts;
};

using BackendHandle =
    std::variant<std::shared_ptr<const FaceDetector>, std::shared_ptr<const MaskClassifier>>;

/// Detector names: oracle, scripted, synthetic, onnx. Classifier names:
/// synthetic, onnx. oracle/scripted take their scene from ctx, or else from
/// a scene JSON at model_path.
///
/// Errors: UnsupportedKind for unknown names or a name used with the wrong
/// kind; ModelNotFound when a required file is absent; SignatureMismatch
/// when an ONNX file disagrees with the declared kind or preprocess.
BackendHandle load_backend(const BackendSpec& spec, const BackendContext& ctx = {});

std::shared_ptr<const FaceDetector> load_detector(const BackendSpec& spec, const BackendContext& ctx = {});
std::shared_ptr<const MaskClassifier> load_classifier(const BackendSpec& spec);

}  // namespace maskpipe
