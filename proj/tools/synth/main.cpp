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

// Renders synthetic scenes to PPM directories or Y4M streams.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "maskpipe/error.hpp"
#include "maskpipe/media.hpp"
#include "maskpipe/scene.hpp"

namespace fs = std::filesystem;
using namespace maskpipe;

int main(int argc, char** argv) {
  CLI::App app{"Synthetic scene renderer", "maskpipe-synth"};
  std::optional<std::string> scene_path;
  std::optional<std::uint64_t> seed;
  std::int32_t width = 640;
  std::int32_t height = 480;
  std::int64_t frames = 50;
  std::size_t min_faces = 1;
  std::size_t max_faces = 4;
  std::optional<std::string> out_dir;
  std::optional<std::string> y4m;
  std::optional<std::string> scene_out;

  auto* src = app.add_option_group("source");
  src->add_option("--scene", scene_path, "scene JSON file");
  src->add_option("--seed", seed, "generate a random scene");
  src->require_option(1);
  app.add_option("--width", width, "random scene width")->check(CLI::Range(16, 8192));
  app.add_option("--height", height, "random scene height")->check(CLI::Range(16, 8192));
  app.add_option("--min-faces", min_faces, "random scene minimum face count");
  app.add_option("--max-faces", max_faces, "random scene maximum face count");
  app.add_option("--frames", frames, "frames to render")->check(CLI::Range(1, 1000000));
  app.add_option("--out-dir", out_dir, "write frame_NNNNNN.ppm files here");
  app.add_option("--y4m", y4m, "write a Y4M stream (- for stdout)");
  app.add_option("--scene-out", scene_out, "write the scene JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    SceneSpec scene;
    DropoutSchedule dropouts;
    if (scene_path) {
      std::ifstream in(*scene_path);
      if (!in) throw Error(ErrorCode::IoError, "cannot read " + *scene_path);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      std::tie(scene, dropouts) = scene_from_json(text);
    } else {
      RandomSceneOptions opts;
      opts.min_faces = min_faces;
      opts.max_faces = max_faces;
      opts.frames = frames;
      scene = make_random_scene(*seed, {width, height}, opts);
    }
    if (scene_out) {
      std::ofstream out(*scene_out, std::ios::binary);
      out << scene_to_json(scene, dropouts) << "\n";
    }
    if (out_dir) fs::create_directories(*out_dir);
    std::ofstream y4m_file;
    std::optional<Y4mWriter> writer;
    if (y4m) {
      std::ostream* os = &std::cout;
      if (*y4m != "-") {
        y4m_file.open(*y4m, std::ios::binary);
        if (!y4m_file) throw Error(ErrorCode::IoError, "cannot write " + *y4m);
        os = &y4m_file;
      }
      writer.emplace(*os, scene.dims);
    }
    for (std::int64_t t = 0; t < frames; ++t) {
      const Frame frame = render_scene(scene, t).frame;
      if (out_dir) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%06lld.ppm", static_cast<long long>(t));
        write_ppm_file(frame, fs::path(*out_dir) / name);
      }
      if (writer) writer->write(frame);
    }
  } catch (const std::exception& e) {
    std::cerr << "maskpipe-synth: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
