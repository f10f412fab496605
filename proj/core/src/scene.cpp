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

#include "maskpipe/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "maskpipe/error.hpp"

namespace maskpipe {

namespace {

BoundingBox moved_box(const SceneFace& face, std::int64_t frame_index) {
  const auto t = static_cast<double>(frame_index);
  return {face.box.x + face.vx * t, face.box.y + face.vy * t, face.box.w, face.box.h};
}

// Pixel columns whose centers fall in [lo, hi), clipped to [0, limit).
std::pair<std::int32_t, std::int32_t> covered_span(double lo, double hi, std::int32_t limit) {
  const double first = std::ceil(lo - 0.5);
  const double last = std::ceil(hi - 0.5);
  const auto a = static_cast<std::int32_t>(std::clamp(first, 0.0, static_cast<double>(limit)));
  const auto b = static_cast<std::int32_t>(std::clamp(last, 0.0, static_cast<double>(limit)));
  return {a, b};
}

void fill(Frame& frame, double x0, double y0, double x1, double y1, const std::uint8_t rgb[3]) {
  const auto [cx0, cx1] = covered_span(x0, x1, frame.width());
  const auto [cy0, cy1] = covered_span(y0, y1, frame.height());
  for (std::int32_t y = cy0; y < cy1; ++y) {
    for (std::int32_t x = cx0; x < cx1; ++x) {
      std::uint8_t* p = frame.at(x, y);
      p[0] = rgb[0];
      p[1] = rgb[1];
      p[2] = rgb[2];
    }
  }
}

void check_faces(const SceneSpec& spec) {
  for (std::size_t i = 0; i < spec.faces.size(); ++i) {
    const auto& f = spec.faces[i];
    if (!(f.box.w > 0.0) || !(f.box.h > 0.0)) {
      throw Error(ErrorCode::InvalidScene, "face " + std::to_string(i) + " has non-positive size");
    }
  }
}

}  // namespace

std::vector<GroundTruthFace> scene_ground_truth(const SceneSpec& spec, std::int64_t frame_index) {
  check_faces(spec);
  std::vector<GroundTruthFace> out;
  for (std::size_t i = 0; i < spec.faces.size(); ++i) {
    const SceneFace& f = spec.faces[i];
    if (frame_index < f.visible_from_frame || frame_index > f.visible_to_frame) continue;
    const BoundingBox clamped = clamp_box(moved_box(f, frame_index), spec.dims);
    if (clamped.w <= 0.0 || clamped.h <= 0.0) continue;
    out.push_back({i, clamped, f.label});
  }
  return out;
}

RenderedScene render_scene(const SceneSpec& spec, std::int64_t frame_index) {
  if (!spec.dims.valid()) throw Error(ErrorCode::InvalidScene, "scene dimensions must be positive");
  RenderedScene out{Frame(spec.dims, frame_index), scene_ground_truth(spec, frame_index)};
  Frame& frame = out.frame;

  auto px = frame.pixels();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    px[i] = scene_palette::kBackground[0];
    px[i + 1] = scene_palette::kBackground[1];
    px[i + 2] = scene_palette::kBackground[2];
  }

  for (const GroundTruthFace& gt : out.faces) {
    const SceneFace& f = spec.faces[gt.ordinal];
    const BoundingBox b = moved_box(f, frame_index);
    fill(frame, b.x, b.y, b.right(), b.bottom(), scene_palette::kSkin);
    if (f.label != MaskLabel::Mask) continue;
    const double mx0 = b.x + 0.25 * b.w;
    const double mx1 = b.x + 0.75 * b.w;
    const double my0 = b.y + 0.10 * b.h;
    const double my1 = b.y + 0.45 * b.h;
    const double mxm = (mx0 + mx1) / 2.0;
    const double mym = (my0 + my1) / 2.0;
    fill(frame, mx0, my0, mxm, mym, scene_palette::kMarkerDark);
    fill(frame, mxm, my0, mx1, mym, scene_palette::kMarkerBright);
    fill(frame, mx0, mym, mxm, my1, scene_palette::kMarkerBright);
    fill(frame, mxm, mym, mx1, my1, scene_palette::kMarkerDark);
  }
  return out;
}

SceneSpec make_random_scene(std::uint64_t seed, FrameDims dims, const RandomSceneOptions& opts) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    if (hi <= lo) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const std::size_t lo_n = std::max<std::size_t>(opts.min_faces, 0);
  const std::size_t hi_n = std::max(lo_n, opts.max_faces);
  const auto n = static_cast<std::size_t>(
      std::uniform_int_distribution<std::size_t>(lo_n, hi_n)(rng));

  SceneSpec spec;
  spec.dims = dims;
  if (n == 0) return spec;

  const auto cols = static_cast<std::int32_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const auto rows = static_cast<std::int32_t>((n + cols - 1) / cols);
  const double cw = static_cast<double>(dims.width) / cols;
  const double ch = static_cast<double>(dims.height) / rows;
  const double frames = static_cast<double>(std::max<std::int64_t>(opts.frames, 1));

  std::vector<std::size_t> cells(static_cast<std::size_t>(cols * rows));
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
  std::shuffle(cells.begin(), cells.end(), rng);

  for (std::size_t k = 0; k < n; ++k) {
    const double cell_x = static_cast<double>(cells[k] % cols) * cw;
    const double cell_y = static_cast<double>(cells[k] / cols) * ch;
    const double side = std::max(16.0, uniform(opts.min_face_frac, opts.max_face_frac) *
                                           std::min(cw, ch));
    const double margin = 0.15 * side + 2.0;

    SceneFace face;
    face.label = (rng() & 1U) ? MaskLabel::Mask : MaskLabel::NoMask;
    face.box.w = side;
    face.box.h = side * uniform(0.9, 1.2);
    if (face.box.h > ch - 2 * margin) face.box.h = std::max(8.0, ch - 2 * margin);

    auto place = [&](double cell_origin, double cell_len, double extent, double& pos, double& vel) {
      const double lo = cell_origin + margin;
      const double hi = cell_origin + cell_len - margin - extent;
      const double room = std::max(0.0, hi - lo);
      const double vmax = std::min(opts.max_speed, room / frames);
      vel = uniform(-vmax, vmax);
      const double travel = std::abs(vel) * (frames - 1);
      double start = uniform(lo, std::max(lo, hi - travel));
      if (vel < 0) start += travel;
      pos = start;
    };
    place(cell_x, cw, face.box.w, face.box.x, face.vx);
    place(cell_y, ch, face.box.h, face.box.y, face.vy);
    spec.faces.push_back(face);
  }
  return spec;
}

std::string scene_to_json(const SceneSpec& spec, const DropoutSchedule& dropouts) {
  nlohmann::ordered_json j;
  j["width"] = spec.dims.width;
  j["height"] = spec.dims.height;
  j["faces"] = nlohmann::ordered_json::array();
  for (const auto& f : spec.faces) {
    nlohmann::ordered_json jf;
    jf["box"] = {f.box.x, f.box.y, f.box.w, f.box.h};
    jf["label"] = std::string(label_name(f.label));
    jf["visible_from"] = f.visible_from_frame;
    jf["visible_to"] = f.visible_to_frame;
    jf["velocity"] = {f.vx, f.vy};
    j["faces"].push_back(jf);
  }
  if (!dropouts.empty()) {
    j["dropouts"] = nlohmann::ordered_json::array();
    for (const auto& [frame, face] : dropouts) j["dropouts"].push_back({frame, face});
  }
  return j.dump(2);
}

std::pair<SceneSpec, DropoutSchedule> scene_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SceneSpec spec;
    spec.dims = {j.at("width").get<std::int32_t>(), j.at("height").get<std::int32_t>()};
    if (!spec.dims.valid()) throw Error(ErrorCode::InvalidScene, "scene dimensions must be positive");
    for (const auto& jf : j.at("faces")) {
      SceneFace f;
      const auto& b = jf.at("box");
      f.box = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
               b.at(3).get<double>()};
      const auto label = jf.value("label", std::string("No_Mask"));
      if (label == "Mask") {
        f.label = MaskLabel::Mask;
      } else if (label == "No_Mask") {
        f.label = MaskLabel::NoMask;
      } else {
        throw Error(ErrorCode::InvalidScene, "unknown face label '" + label + "'");
      }
      f.visible_from_frame = jf.value("visible_from", std::int64_t{0});
      f.visible_to_frame = jf.value("visible_to", std::numeric_limits<std::int64_t>::max());
      if (jf.contains("velocity")) {
        f.vx = jf["velocity"].at(0).get<double>();
        f.vy = jf["velocity"].at(1).get<double>();
      }
      spec.faces.push_back(f);
    }
    check_faces(spec);
    DropoutSchedule dropouts;
    if (j.contains("dropouts")) {
      for (const auto& d : j["dropouts"]) {
        const auto face = d.at(1).get<std::size_t>();
        if (face >= spec.faces.size()) {
          throw Error(ErrorCode::InvalidScene, "dropout references missing face " + std::to_string(face));
        }
        dropouts.emplace(d.at(0).get<std::int64_t>(), face);
      }
    }
    return {std::move(spec), std::move(dropouts)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidScene, std::string("bad scene JSON: ") + e.what());
  }
}

}  // namespace maskpipe
