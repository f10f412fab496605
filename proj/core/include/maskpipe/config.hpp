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

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "maskpipe/bench.hpp"
#include "maskpipe/error.hpp"
#include "maskpipe/pipeline.hpp"

namespace maskpipe {

/// Schema or value error located by a JSON pointer such as "/roi/expansion".
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::string pointer, const std::string& message)
      : Error(code, "at " + (pointer.empty() ? std::string("/") : pointer) + ": " + message),
        pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

struct AppConfig {
  PipelineConfig pipeline;
  BenchConfig bench;
};

/// Recursively overlays `overlay` onto `base`; objects merge key by key,
/// every other value replaces.
nlohmann::json merge_config(nlohmann::json base, const nlohmann::json& overlay);

/// Validates a config document and applies it over the defaults. Unknown
/// keys and wrong types raise SchemaViolation; out-of-range values raise
/// InvalidValue. Every key is optional.
///
///   {"detector":   {"backend", "threshold", "model_path"},
///    "classifier": {"backend", "threshold", "model_path", "mask_index",
///                   "preprocess": {"target": [w,h], "mean": [3], "scale": [3],
///                                  "layout": "interleaved"|"planar"}},
///    "roi":        {"expansion"},
///    "tracker":    {"enabled", "max_disappeared", "max_distance_frac", "label_history"},
///    "output":     {"annotate", "draw_coasting_distinct", "box_source": "roi"|"raw"},
///    "bench":      {"resolutions": ["480p" | "WxH" | [w,h]], "iterations", "warmup",
///                   "stages", "streams"}}
AppConfig config_from_json(const nlohmann::json& doc);

/// defaults <- file at `path` (if any) <- `overrides`, then validation.
/// Errors: IoError for unreadable files, SchemaViolation for invalid JSON.
AppConfig load_config(const std::optional<std::filesystem::path>& path,
                      const nlohmann::json& overrides = nlohmann::json::object());

/// The effective configuration as a complete config document.
nlohmann::json config_to_json(const AppConfig& cfg);

}  // namespace maskpipe
