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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "maskpipe/config.hpp"
#include "maskpipe/error.hpp"

namespace maskpipe::cli {

struct ImageCommand {
  std::string input;
  std::optional<std::filesystem::path> out_image;
  std::optional<std::string> out_jsonl;  // "-" or absent means standard output
};

struct StreamCommand {
  std::string input;  // file, directory or "-" for Y4M on standard input
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::string> out_jsonl;
  bool pipelined = false;
};

struct BenchCommand {
  std::optional<std::filesystem::path> json_report;
};

struct PrepareDatasetCommand {
  std::filesystem::path raw_dir;
  std::filesystem::path out_dir;
  std::int32_t jobs = 1;
};

using Action = std::variant<ImageCommand, StreamCommand, BenchCommand, PrepareDatasetCommand>;

struct Command {
  Action action;
  std::optional<std::filesystem::path> config_path;
  /// Flag values as a partial config document, applied over the file.
  nlohmann::json overrides = nlohmann::json::object();
};

/// Bad command line. Code is UnknownFlag, MissingRequired or InvalidValue.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Thrown by parse_cli for --help; carries the rendered help text.
struct HelpRequested {
  std::string text;
};

/// args excludes the program name.
Command parse_cli(const std::vector<std::string>& args);

/// Command's --config, else MASKPIPE_CONFIG when set and non-empty.
std::optional<std::filesystem::path> resolve_config_path(const Command& cmd);

AppConfig load_command_config(const Command& cmd);

struct DatasetCounts {
  std::int64_t images_in = 0;      // candidate files seen, readable or not
  std::int64_t faces_out = 0;      // crops written
  std::int64_t skipped = 0;        // files that failed to decode
  std::int64_t faces_skipped = 0;  // detections whose clamped ROI was empty

  friend bool operator==(const DatasetCounts&, const DatasetCounts&) = default;
};

/// Runs Stage 1 and the ROI block (no normalization) over every regular
/// file in raw_dir and writes <stem>_face<k>.ppm crops at the classifier's
/// target size. Files are spread over up to `jobs` worker threads.
DatasetCounts prepare_dataset(const std::filesystem::path& raw_dir,
                              const std::filesystem::path& out_dir, const AppConfig& cfg,
                              std::int32_t jobs = 1);

/// Executes a parsed command. Results go to `out`, progress and summaries
/// to `log`. Returns the process exit code; library errors propagate.
int execute(const Command& cmd, std::ostream& out, std::ostream& log);

/// parse + execute with the documented exit codes: 0 success, 1 runtime
/// failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maskpipe::cli
