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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include <CLI11.hpp>

#include "maskpipe/backends.hpp"
#include "maskpipe/bench.hpp"
#include "maskpipe/media.hpp"
#include "maskpipe/pipeline.hpp"
#include "maskpipe/roi.hpp"

namespace maskpipe::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> detector;
  std::optional<std::string> detector_model;
  std::optional<double> detector_threshold;
  std::optional<std::string> classifier;
  std::optional<std::string> classifier_model;
  std::optional<double> classifier_threshold;
  std::optional<double> expansion;
  std::optional<std::int64_t> max_disappeared;
  std::optional<double> max_distance_frac;
  std::optional<std::int64_t> label_history;
  std::optional<std::string> box_source;
  bool no_tracking = false;
  bool annotate = false;

  std::string resolutions;
  std::optional<std::int64_t> iterations;
  std::optional<std::int64_t> warmup;
  std::string stages;
  std::optional<std::int64_t> streams;
};

json overrides_from(const Flags& f) {
  json o = json::object();
  if (f.detector) o["detector"]["backend"] = *f.detector;
  if (f.detector_model) o["detector"]["model_path"] = *f.detector_model;
  if (f.detector_threshold) o["detector"]["threshold"] = *f.detector_threshold;
  if (f.classifier) o["classifier"]["backend"] = *f.classifier;
  if (f.classifier_model) o["classifier"]["model_path"] = *f.classifier_model;
  if (f.classifier_threshold) o["classifier"]["threshold"] = *f.classifier_threshold;
  if (f.expansion) o["roi"]["expansion"] = *f.expansion;
  if (f.max_disappeared) o["tracker"]["max_disappeared"] = *f.max_disappeared;
  if (f.max_distance_frac) o["tracker"]["max_distance_frac"] = *f.max_distance_frac;
  if (f.label_history) o["tracker"]["label_history"] = *f.label_history;
  if (f.no_tracking) o["tracker"]["enabled"] = false;
  if (f.annotate) o["output"]["annotate"] = true;
  if (f.box_source) o["output"]["box_source"] = *f.box_source;
  if (!f.resolutions.empty()) {
    for (const auto& r : split_list(f.resolutions)) o["bench"]["resolutions"].push_back(r);
  }
  if (!f.stages.empty()) {
    for (const auto& s : split_list(f.stages)) o["bench"]["stages"].push_back(s);
  }
  if (f.iterations) o["bench"]["iterations"] = *f.iterations;
  if (f.warmup) o["bench"]["warmup"] = *f.warmup;
  if (f.streams) o["bench"]["streams"] = *f.streams;
  return o;
}

void add_override_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON config file (fallback: $MASKPIPE_CONFIG)");
  app.add_option("--detector", f.detector, "detector backend: synthetic, oracle, scripted, onnx");
  app.add_option("--detector-model", f.detector_model, "detector model or scene file");
  app.add_option("--detector-threshold", f.detector_threshold, "detection score threshold");
  app.add_option("--classifier", f.classifier, "classifier backend: synthetic, onnx");
  app.add_option("--classifier-model", f.classifier_model, "classifier model file");
  app.add_option("--classifier-threshold", f.classifier_threshold, "p(Mask) decision threshold");
  app.add_option("--expansion", f.expansion, "ROI expansion ratio");
  app.add_option("--max-disappeared", f.max_disappeared, "frames a track may coast");
  app.add_option("--max-distance-frac", f.max_distance_frac, "match gate as a fraction of the diagonal");
  app.add_option("--label-history", f.label_history, "label smoothing window");
  app.add_option("--box-source", f.box_source, "logged box: roi or raw");
  app.add_flag("--no-tracking", f.no_tracking, "disable the tracker in stream mode");
  app.add_flag("--annotate", f.annotate, "force annotation on");
}

}  // namespace

Command parse_cli(const std::vector<std::string>& args) {
  CLI::App app{"Face-mask detection pipeline", "maskpipe"};
  app.require_subcommand(1);
  Flags flags;
  add_override_flags(app, flags);

  ImageCommand image;
  auto* image_cmd = app.add_subcommand("image", "process one PPM image");
  image_cmd->add_option("--input", image.input, "input .ppm")->required();
  image_cmd->add_option("--out", image.out_image, "annotated output .ppm");
  image_cmd->add_option("--jsonl", image.out_jsonl, "detection record file (default stdout)");

  StreamCommand stream;
  auto* stream_cmd = app.add_subcommand("stream", "process a Y4M file, PPM directory or stdin");
  stream_cmd->add_option("--input", stream.input, "file, directory or - for Y4M on stdin")
      ->required();
  stream_cmd->add_option("--out-dir", stream.out_dir, "directory for annotated frames");
  stream_cmd->add_option("--jsonl", stream.out_jsonl, "detection record file (default stdout)");
  stream_cmd->add_flag("--pipelined", stream.pipelined, "decode the next frame concurrently");

  BenchCommand bench;
  auto* bench_cmd = app.add_subcommand("bench", "time pipeline stages across resolutions");
  bench_cmd->add_option("--resolutions", flags.resolutions, "comma list of 480p, 720p, 1080p or WxH");
  bench_cmd->add_option("--iterations", flags.iterations, "timed iterations per cell");
  bench_cmd->add_option("--warmup", flags.warmup, "discarded iterations per cell");
  bench_cmd->add_option("--stages", flags.stages, "comma list of detect, roi, classify, end_to_end");
  bench_cmd->add_option("--streams", flags.streams, "parallel streams for throughput");
  bench_cmd->add_option("--json", bench.json_report, "write the report as JSON");

  PrepareDatasetCommand prep;
  auto* prep_cmd = app.add_subcommand("prepare-dataset", "extract face ROIs from raw images");
  prep_cmd->add_option("--raw-dir", prep.raw_dir, "directory of raw .ppm images")->required();
  prep_cmd->add_option("--out-dir", prep.out_dir, "directory for face crops")->required();
  prep_cmd->add_option("--jobs", prep.jobs, "worker threads")->check(CLI::Range(1, 256));

  for (auto* sub : {image_cmd, stream_cmd, bench_cmd, prep_cmd}) sub->fallthrough();

  if (!args.empty() && !args.front().empty() && args.front()[0] != '-' &&
      std::as_const(app)
          .get_subcommands(std::function<bool(const CLI::App*)>(
              [&](const CLI::App* sub) { return sub->get_name() == args.front(); }))
          .empty()) {
    throw UsageError(ErrorCode::UnknownFlag, "unknown subcommand: " + args.front() +
                                                 "\nRun with --help for usage.");
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    throw HelpRequested{subs.empty() ? app.help() : subs.front()->help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ExtrasError& e) {
    throw UsageError(ErrorCode::UnknownFlag, std::string(e.what()) + "\nRun with --help for usage.");
  } catch (const CLI::RequiredError& e) {
    throw UsageError(ErrorCode::MissingRequired, std::string(e.what()) + "\nRun with --help for usage.");
  } catch (const CLI::ParseError& e) {
    throw UsageError(ErrorCode::InvalidValue, std::string(e.what()) + "\nRun with --help for usage.");
  }

  Command cmd;
  if (image_cmd->parsed()) {
    cmd.action = image;
  } else if (stream_cmd->parsed()) {
    cmd.action = stream;
  } else if (bench_cmd->parsed()) {
    cmd.action = bench;
  } else {
    cmd.action = prep;
  }
  if (flags.config) cmd.config_path = *flags.config;
  cmd.overrides = overrides_from(flags);

  // Flag values are checked on their own so that a bad flag is a usage
  // error rather than a runtime failure.
  try {
    (void)config_from_json(cmd.overrides);
  } catch (const ConfigError& e) {
    throw UsageError(ErrorCode::InvalidValue, std::string("bad flag value: ") + e.what());
  } catch (const Error& e) {
    throw UsageError(ErrorCode::InvalidValue, std::string("bad flag value: ") + e.what());
  }
  return cmd;
}

std::optional<fs::path> resolve_config_path(const Command& cmd) {
  if (cmd.config_path) return cmd.config_path;
  if (const char* env = std::getenv("MASKPIPE_CONFIG"); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return std::nullopt;
}

AppConfig load_command_config(const Command& cmd) {
  return load_config(resolve_config_path(cmd), cmd.overrides);
}

DatasetCounts prepare_dataset(const fs::path& raw_dir, const fs::path& out_dir,
                              const AppConfig& cfg, std::int32_t jobs) {
  if (!fs::is_directory(raw_dir)) {
    throw Error(ErrorCode::IoError, "not a directory: " + raw_dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(raw_dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  fs::create_directories(out_dir);

  const PipelineConfig& pc = cfg.pipeline;
  const auto detector = load_detector(pc.detector);
  const PreprocessSpec& spec = pc.classifier.preprocess;

  std::atomic<std::size_t> next{0};
  std::atomic<std::int64_t> faces_out{0}, skipped{0}, faces_skipped{0};
  std::mutex err_mu;
  std::exception_ptr first_error;

  const auto work = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        Frame frame;
        try {
          frame = read_ppm_file(files[i]);
        } catch (const Error&) {
          ++skipped;
          continue;
        }
        const auto dets = detector->detect(frame, pc.detector_threshold);
        const std::string stem = files[i].stem().string();
        int k = 0;
        for (const auto& d : dets) {
          const BoundingBox roi = expand_box(d.box, pc.expansion_ratio, frame.dims());
          Patch patch = extract_roi(frame, roi, spec);
          if (patch.empty()) {
            ++faces_skipped;
            continue;
          }
          const Frame crop_frame(FrameDims{patch.width, patch.height}, std::move(patch.pixels));
          write_ppm_file(crop_frame, out_dir / (stem + "_face" + std::to_string(k++) + ".ppm"));
          ++faces_out;
        }
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        next = files.size();
      }
    }
  };

  const auto n = static_cast<std::size_t>(std::clamp<std::int64_t>(
      std::min<std::int64_t>(jobs, static_cast<std::int64_t>(files.size())), 1, 256));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  return {static_cast<std::int64_t>(files.size()), faces_out.load(), skipped.load(),
          faces_skipped.load()};
}

namespace {

// Opens the JSONL destination; "-" and absent both mean `out`.
std::ostream& jsonl_stream(const std::optional<std::string>& path, std::ofstream& file,
                           std::ostream& out) {
  if (!path || *path == "-") return out;
  file.open(*path, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, "cannot write " + *path);
  return file;
}

int run_image(const ImageCommand& c, AppConfig cfg, std::ostream& out) {
  if (c.out_image) cfg.pipeline.annotate = true;
  const Pipeline pipeline = Pipeline::from_config(cfg.pipeline);
  const Frame frame = read_ppm_file(c.input);
  const FrameResult result = pipeline.process_image(frame);
  std::ofstream file;
  std::ostream& sink = jsonl_stream(c.out_jsonl, file, out);
  sink << write_jsonl({result.frame_index, result.tracks});
  sink.flush();
  if (c.out_image && result.annotated) write_ppm_file(*result.annotated, *c.out_image);
  return 0;
}

int run_stream_cmd(const StreamCommand& c, AppConfig cfg, std::ostream& out, std::ostream& log) {
  if (c.out_dir) {
    cfg.pipeline.annotate = true;
    fs::create_directories(*c.out_dir);
  }
  const Pipeline pipeline = Pipeline::from_config(cfg.pipeline);
  auto source = open_source(c.input);
  std::ofstream file;
  StreamSink sink;
  sink.jsonl = &jsonl_stream(c.out_jsonl, file, out);
  sink.frame_dir = c.out_dir;
  const StreamSummary s = run_stream(pipeline, *source, sink, RunOptions{c.pipelined});
  sink.jsonl->flush();
  log << "frames " << s.frames << ", faces " << s.faces << " (mask " << s.mask << ", no_mask "
      << s.no_mask << ", coasting " << s.coasting << "), skipped " << s.skipped << ", tracks "
      << s.distinct_ids << ", " << format_real(s.mean_fps) << " fps\n";
  return 0;
}

int run_bench_cmd(const BenchCommand& c, const AppConfig& cfg, std::ostream& out) {
  const BenchReport report = run_benchmark(cfg.bench, cfg.pipeline);
  out << report_to_text(report);
  if (c.json_report) {
    std::ofstream f(*c.json_report, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + c.json_report->string());
    f << report_to_json(report);
  }
  return 0;
}

}  // namespace

int execute(const Command& cmd, std::ostream& out, std::ostream& log) {
  AppConfig cfg = load_command_config(cmd);
  if (const auto* c = std::get_if<ImageCommand>(&cmd.action)) return run_image(*c, cfg, out);
  if (const auto* c = std::get_if<StreamCommand>(&cmd.action)) {
    return run_stream_cmd(*c, cfg, out, log);
  }
  if (const auto* c = std::get_if<BenchCommand>(&cmd.action)) return run_bench_cmd(*c, cfg, out);
  const auto& c = std::get<PrepareDatasetCommand>(cmd.action);
  const DatasetCounts n = prepare_dataset(c.raw_dir, c.out_dir, cfg, c.jobs);
  out << "images_in " << n.images_in << "\nfaces_out " << n.faces_out << "\nskipped " << n.skipped
      << "\nfaces_skipped " << n.faces_skipped << "\n";
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Command cmd;
  try {
    cmd = parse_cli(args);
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const UsageError& e) {
    err << "maskpipe: " << e.what() << "\n";
    return 2;
  }
  try {
    return execute(cmd, out, err);
  } catch (const std::exception& e) {
    err << "maskpipe: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace maskpipe::cli
