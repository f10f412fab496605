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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maskpipe/frame.hpp"
#include "maskpipe/tracker.hpp"

namespace maskpipe {

// ---------------------------------------------------------------------------
// PPM (binary P6, maxval 255)

/// Parses a P6 image. '#' comments are allowed between header tokens.
/// Errors: MalformedHeader, UnsupportedMaxval, TruncatedPixelData.
Frame read_ppm(std::span<const std::uint8_t> bytes);
Frame read_ppm_file(const std::filesystem::path& path);

/// Canonical encoding: "P6\n<w> <h>\n255\n" followed by the pixel bytes.
std::vector<std::uint8_t> write_ppm(const Frame& frame);
void write_ppm_file(const Frame& frame, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Frame sources

enum class SourceKind : std::uint8_t { SingleImage, ImageDir, Y4mStream, Synthetic };

/// Sequential frame iterator. Frames carry indices 0, 1, 2, ... with no gaps.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  /// Next frame, or nullopt once the source is exhausted.
  virtual std::optional<Frame> next() = 0;
  virtual SourceKind kind() const noexcept = 0;
  virtual double frame_rate() const noexcept { return 30.0; }
};

/// 4:2:0 YUV4MPEG2 reader (C420, C420jpeg, C420mpeg2; C420jpeg when the tag
/// is absent). Planes are converted to RGB with limited-range BT.601 and
/// nearest-neighbour chroma upsampling.
class Y4mSource : public FrameSource {
 public:
  /// Reads the stream header immediately. The stream must outlive the source.
  /// Errors: MalformedHeader, UnsupportedColorSpace.
  explicit Y4mSource(std::istream& in);
  /// Owns the file stream.
  explicit Y4mSource(const std::filesystem::path& path);
  ~Y4mSource() override;

  /// Errors: MalformedFrameMarker, TruncatedFrame.
  std::optional<Frame> next() override;
  SourceKind kind() const noexcept override { return SourceKind::Y4mStream; }
  double frame_rate() const noexcept override { return fps_; }
  FrameDims dims() const noexcept { return dims_; }
  const std::string& color_space() const noexcept { return colorspace_; }

 private:
  void read_header();

  std::unique_ptr<std::istream> owned_;
  std::istream* in_;
  FrameDims dims_{};
  double fps_ = 30.0;
  std::string colorspace_ = "420jpeg";
  std::int64_t index_ = 0;
  std::vector<std::uint8_t> planes_;
};

/// Converts one 4:2:0 frame. y has w*h samples; cb/cr have
/// ceil(w/2)*ceil(h/2) samples each.
void yuv420_to_rgb(std::span<const std::uint8_t> y, std::span<const std::uint8_t> cb,
                   std::span<const std::uint8_t> cr, FrameDims dims, std::span<std::uint8_t> rgb);

/// Writes a Y4M stream (C420jpeg) from RGB frames; chroma is the mean of
/// each 2x2 block. Used to produce test footage.
class Y4mWriter {
 public:
  Y4mWriter(std::ostream& out, FrameDims dims, int fps_num = 30, int fps_den = 1);
  void write(const Frame& frame);

 private:
  std::ostream& out_;
  FrameDims dims_;
};

/// .ppm files of a directory in byte-wise lexicographic filename order, so
/// "f_10.ppm" precedes "f_9.ppm". Files are decoded lazily.
/// Errors: EmptyDirectory on construction; DimensionMismatch when a file's
/// size differs from the first file's.
class ImageDirSource : public FrameSource {
 public:
  explicit ImageDirSource(const std::filesystem::path& dir, double fps = 30.0);
  std::optional<Frame> next() override;
  SourceKind kind() const noexcept override { return SourceKind::ImageDir; }
  double frame_rate() const noexcept override { return fps_; }
  const std::vector<std::filesystem::path>& files() const noexcept { return files_; }

 private:
  std::vector<std::filesystem::path> files_;
  std::size_t pos_ = 0;
  std::optional<FrameDims> dims_;
  double fps_;
};

/// Sorted .ppm paths of a directory (byte-wise filename order). Throws
/// EmptyDirectory when there are none.
std::vector<std::filesystem::path> list_ppm_files(const std::filesystem::path& dir);

class SingleImageSource : public FrameSource {
 public:
  explicit SingleImageSource(Frame frame) : frame_(std::move(frame)) { frame_->set_index(0); }
  std::optional<Frame> next() override {
    auto f = std::move(frame_);
    frame_.reset();
    return f;
  }
  SourceKind kind() const noexcept override { return SourceKind::SingleImage; }

 private:
  std::optional<Frame> frame_;
};

/// Opens "-" as Y4M on stdin, a directory as an image directory, a .y4m
/// file as a stream, and anything else as a single PPM image.
std::unique_ptr<FrameSource> open_source(const std::string& input);

// ---------------------------------------------------------------------------
// JSONL detection records

struct DetectionRecord {
  std::int64_t frame_index = 0;
  std::vector<TrackOutput> tracks;
};

/// Up to 4 fractional digits, trailing zeros and a trailing '.' trimmed;
/// negative zero prints as "0".
std::string format_real(double value);

/// One newline-terminated JSON object with keys in fixed order:
/// {"frame_index":N,"tracks":[{"id","label","confidence","box":{x,y,w,h},"coasting"}]}
std::string write_jsonl(const DetectionRecord& record);

}  // namespace maskpipe
