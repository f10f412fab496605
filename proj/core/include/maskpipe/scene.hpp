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
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "maskpipe/frame.hpp"
#include "maskpipe/geometry.hpp"

namespace maskpipe {

// Synthetic scenes are the ground truth for the deterministic backends. A face
// is drawn as a filled skin-tone rectangle on a gray background; a Mask face
// additionally carries a 2x2 black/white checker in the upper half.
namespace scene_palette {
inline constexpr std::uint8_t kBackground[3] = {128, 128, 128};
inline constexpr std::uint8_t kSkin[3] = {224, 172, 105};
inline constexpr std::uint8_t kMarkerDark[3] = {0, 0, 0};
inline constexpr std::uint8_t kMarkerBright[3] = {255, 255, 255};
}  // namespace scene_palette

struct SceneFace {
  BoundingBox box;  // position at frame 0
  MaskLabel label = MaskLabel::NoMask;
  std::int64_t visible_from_frame = 0;
  std::int64_t visible_to_frame = std::numeric_limits<std::int64_t>::max();
  double vx = 0.0;  // pixels per frame
  double vy = 0.0;
};

struct SceneSpec {
  FrameDims dims{640, 480};
  std::vector<SceneFace> faces;
};

/// (frame_index, face_ordinal) pairs at which the scripted detector misses.
using DropoutSchedule = std::set<std::pair<std::int64_t, std::size_t>>;

struct GroundTruthFace {
  std::size_t ordinal = 0;  // index into SceneSpec::faces
  BoundingBox box;          // moved and clamped to the raster
  MaskLabel label = MaskLabel::NoMask;
};

struct RenderedScene {
  Frame frame;
  std::vector<GroundTruthFace> faces;
};

/// Faces visible at frame_index, in ordinal order. Faces that have moved
/// completely off the raster are omitted. Throws InvalidScene for faces
/// with non-positive size.
std::vector<GroundTruthFace> scene_ground_truth(const SceneSpec& spec, std::int64_t frame_index);

/// Deterministic raster plus ground truth for frame_index.
RenderedScene render_scene(const SceneSpec& spec, std::int64_t frame_index);

/// Options for make_random_scene.
struct RandomSceneOptions {
  std::size_t min_faces = 1;
  std::size_t max_faces = 4;
  std::int64_t frames = 50;       // motion stays inside each face's lane for this long
  double min_face_frac = 0.35;    // face side relative to its grid cell
  double max_face_frac = 0.55;
  double max_speed = 3.0;         // pixels per frame, per axis
};

/// Random scene whose faces live in disjoint grid cells, so that expanded
/// ROIs never overlap another face and trajectories never cross.
SceneSpec make_random_scene(std::uint64_t seed, FrameDims dims, const RandomSceneOptions& opts = {});

/// JSON form: {"width","height","faces":[{"box":[x,y,w,h],"label":"Mask"|"No_Mask",
/// "visible_from","visible_to","velocity":[vx,vy]}],"dropouts":[[frame,face],...]}.
std::string scene_to_json(const SceneSpec& spec, const DropoutSchedule& dropouts = {});
std::pair<SceneSpec, DropoutSchedule> scene_from_json(const std::string& text);

}  // namespace maskpipe
