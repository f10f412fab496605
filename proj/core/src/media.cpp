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

#include "maskpipe/media.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "maskpipe/error.hpp"

namespace maskpipe {

// ---------------------------------------------------------------------------
// PPM

namespace {

class HeaderCursor {
 public:
  explicit HeaderCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and comments, then reads an unsigned decimal token.
  std::uint64_t number(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorCode::MalformedHeader, std::string("expected ") + what);
    }
    std::uint64_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1ULL << 32)) throw Error(ErrorCode::MalformedHeader, std::string(what) + " too large");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::MalformedHeader, "missing whitespace after maxval");
    }
    ++pos_;
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Frame read_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw Error(ErrorCode::MalformedHeader, "not a binary P6 image");
  }
  HeaderCursor cur(bytes);
  cur.advance(2);
  const auto w = cur.number("width");
  const auto h = cur.number("height");
  const auto maxval = cur.number("maxval");
  if (w == 0 || h == 0 || w > (1U << 20) || h > (1U << 20)) {
    throw Error(ErrorCode::MalformedHeader, "invalid dimensions");
  }
  if (maxval != 255) {
    throw Error(ErrorCode::UnsupportedMaxval, "maxval " + std::to_string(maxval) + " (only 255 is supported)");
  }
  cur.single_whitespace();
  const std::size_t need = static_cast<std::size_t>(w * h * 3);
  if (bytes.size() - cur.pos() < need) {
    throw Error(ErrorCode::TruncatedPixelData, "expected " + std::to_string(need) + " pixel bytes, found " +
                                                   std::to_string(bytes.size() - cur.pos()));
  }
  auto data = bytes.subspan(cur.pos(), need);
  return Frame({static_cast<std::int32_t>(w), static_cast<std::int32_t>(h)},
               std::vector<std::uint8_t>(data.begin(), data.end()));
}

Frame read_ppm_file(const std::filesystem::path& path) { return read_ppm(slurp(path)); }

std::vector<std::uint8_t> write_ppm(const Frame& frame) {
  const std::string header =
      "P6\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), frame.pixels().begin(), frame.pixels().end());
  return out;
}

void write_ppm_file(const Frame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const auto bytes = write_ppm(frame);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

// ---------------------------------------------------------------------------
// YUV 4:2:0 -> RGB, limited-range BT.601 in 16.16 fixed point.

namespace {

constexpr std::int32_t kLuma = 76309;     // 255/219
constexpr std::int32_t kCrToR = 104597;   // 1.402 * 255/224
constexpr std::int32_t kCbToG = 25675;    // 1.772 * 0.114/0.587 * 255/224
constexpr std::int32_t kCrToG = 53279;    // 1.402 * 0.299/0.587 * 255/224
constexpr std::int32_t kCbToB = 132201;   // 1.772 * 255/224

inline std::uint8_t clamp_fixed(std::int32_t v) {
  v = (v + 32768) >> 16;
  return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

}  // namespace

void yuv420_to_rgb(std::span<const std::uint8_t> y, std::span<const std::uint8_t> cb,
                   std::span<const std::uint8_t> cr, FrameDims dims, std::span<std::uint8_t> rgb) {
  const std::int32_t cw = (dims.width + 1) / 2;
  for (std::int32_t row = 0; row < dims.height; ++row) {
    const std::uint8_t* yrow = y.data() + static_cast<std::size_t>(row) * dims.width;
    const std::uint8_t* cbrow = cb.data() + static_cast<std::size_t>(row / 2) * cw;
    const std::uint8_t* crrow = cr.data() + static_cast<std::size_t>(row / 2) * cw;
    std::uint8_t* out = rgb.data() + static_cast<std::size_t>(row) * dims.width * 3;
    for (std::int32_t col = 0; col < dims.width; ++col) {
      const std::int32_t yy = kLuma * (yrow[col] - 16);
      const std::int32_t u = cbrow[col / 2] - 128;
      const std::int32_t v = crrow[col / 2] - 128;
      out[0] = clamp_fixed(yy + kCrToR * v);
      out[1] = clamp_fixed(yy - kCbToG * u - kCrToG * v);
      out[2] = clamp_fixed(yy + kCbToB * u);
      out += 3;
    }
  }
}

// ---------------------------------------------------------------------------
// Y4M reader

Y4mSource::Y4mSource(std::istream& in) : in_(&in) { read_header(); }

Y4mSource::Y4mSource(const std::filesystem::path& path)
    : owned_(std::make_unique<std::ifstream>(path, std::ios::binary)), in_(owned_.get()) {
  if (!*owned_) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  read_header();
}

Y4mSource::~Y4mSource() = default;

namespace {

// Reads up to and excluding '\n'. Returns false on EOF before any byte.
bool read_line(std::istream& in, std::string& line, std::size_t limit, bool& saw_newline) {
  line.clear();
  saw_newline = false;
  char c;
  while (line.size() < limit && in.get(c)) {
    if (c == '\n') {
      saw_newline = true;
      return true;
    }
    line.push_back(c);
  }
  return !line.empty();
}

}  // namespace

void Y4mSource::read_header() {
  std::string line;
  bool newline = false;
  if (!read_line(*in_, line, 4096, newline) || !newline) {
    throw Error(ErrorCode::MalformedHeader, "missing YUV4MPEG2 header line");
  }
  std::istringstream tags(line);
  std::string magic;
  tags >> magic;
  if (magic != "YUV4MPEG2") throw Error(ErrorCode::MalformedHeader, "missing YUV4MPEG2 signature");

  bool got_w = false, got_h = false, got_f = false;
  std::string tag;
  while (tags >> tag) {
    const char key = tag[0];
    const std::string value = tag.substr(1);
    try {
      switch (key) {
        case 'W':
          dims_.width = std::stoi(value);
          got_w = true;
          break;
        case 'H':
          dims_.height = std::stoi(value);
          got_h = true;
          break;
        case 'F': {
          const auto colon = value.find(':');
          if (colon == std::string::npos) throw Error(ErrorCode::MalformedHeader, "bad frame rate " + tag);
          const double num = std::stod(value.substr(0, colon));
          const double den = std::stod(value.substr(colon + 1));
          if (!(num > 0) || !(den > 0)) throw Error(ErrorCode::MalformedHeader, "bad frame rate " + tag);
          fps_ = num / den;
          got_f = true;
          break;
        }
        case 'C':
          colorspace_ = value;
          break;
        default:
          break;  // I, A, X tags do not affect decoding
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::MalformedHeader, "bad header tag " + tag);
    }
  }
  if (!got_w || !got_h || !got_f) {
    throw Error(ErrorCode::MalformedHeader, "header must carry W, H and F parameters");
  }
  if (!dims_.valid()) throw Error(ErrorCode::MalformedHeader, "non-positive frame size");
  if (colorspace_ != "420" && colorspace_ != "420jpeg" && colorspace_ != "420mpeg2") {
    throw Error(ErrorCode::UnsupportedColorSpace, "C" + colorspace_ + " (expected a 4:2:0 color space)");
  }
}

std::optional<Frame> Y4mSource::next() {
  std::string line;
  bool newline = false;
  if (!read_line(*in_, line, 1024, newline)) return std::nullopt;
  if (!newline || line.rfind("FRAME", 0) != 0 || (line.size() > 5 && line[5] != ' ')) {
    throw Error(ErrorCode::MalformedFrameMarker, "frame " + std::to_string(index_) + ": bad FRAME marker");
  }
  const std::size_t luma = static_cast<std::size_t>(dims_.pixel_count());
  const std::size_t chroma =
      static_cast<std::size_t>((dims_.width + 1) / 2) * static_cast<std::size_t>((dims_.height + 1) / 2);
  planes_.resize(luma + 2 * chroma);
  in_->read(reinterpret_cast<char*>(planes_.data()), static_cast<std::streamsize>(planes_.size()));
  if (static_cast<std::size_t>(in_->gcount()) != planes_.size()) {
    throw Error(ErrorCode::TruncatedFrame, "frame " + std::to_string(index_) + ": expected " +
                                               std::to_string(planes_.size()) + " bytes, got " +
                                               std::to_string(in_->gcount()));
  }
  std::vector<std::uint8_t> rgb(luma * 3);
  std::span<const std::uint8_t> all(planes_);
  yuv420_to_rgb(all.subspan(0, luma), all.subspan(luma, chroma), all.subspan(luma + chroma, chroma),
                dims_, rgb);
  const std::int64_t idx = index_++;
  return Frame(dims_, std::move(rgb), idx, static_cast<double>(idx) * 1000.0 / fps_);
}

// ---------------------------------------------------------------------------
// Y4M writer

Y4mWriter::Y4mWriter(std::ostream& out, FrameDims dims, int fps_num, int fps_den)
    : out_(out), dims_(dims) {
  out_ << "YUV4MPEG2 W" << dims.width << " H" << dims.height << " F" << fps_num << ":" << fps_den
       << " Ip A1:1 C420jpeg\n";
}

void Y4mWriter::write(const Frame& frame) {
  if (frame.dims() != dims_) throw Error(ErrorCode::DimensionMismatch, "frame size differs from stream");
  const auto to_byte = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
  };
  const std::int32_t w = dims_.width, h = dims_.height;
  const std::int32_t cw = (w + 1) / 2, ch = (h + 1) / 2;
  std::vector<std::uint8_t> y(static_cast<std::size_t>(w) * h);
  std::vector<std::uint8_t> cb(static_cast<std::size_t>(cw) * ch);
  std::vector<std::uint8_t> cr(cb.size());
  for (std::int32_t r = 0; r < h; ++r) {
    for (std::int32_t c = 0; c < w; ++c) {
      const std::uint8_t* p = frame.at(c, r);
      y[static_cast<std::size_t>(r) * w + c] =
          to_byte(16.0 + (65.481 * p[0] + 128.553 * p[1] + 24.966 * p[2]) / 255.0);
    }
  }
  for (std::int32_t r = 0; r < ch; ++r) {
    for (std::int32_t c = 0; c < cw; ++c) {
      double sum[3] = {0, 0, 0};
      int n = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const std::int32_t sx = 2 * c + dx, sy = 2 * r + dy;
          if (sx >= w || sy >= h) continue;
          const std::uint8_t* p = frame.at(sx, sy);
          for (int k = 0; k < 3; ++k) sum[k] += p[k];
          ++n;
        }
      }
      const double R = sum[0] / n, G = sum[1] / n, B = sum[2] / n;
      cb[static_cast<std::size_t>(r) * cw + c] = to_byte(128.0 + (-37.797 * R - 74.203 * G + 112.0 * B) / 255.0);
      cr[static_cast<std::size_t>(r) * cw + c] = to_byte(128.0 + (112.0 * R - 93.786 * G - 18.214 * B) / 255.0);
    }
  }
  out_ << "FRAME\n";
  out_.write(reinterpret_cast<const char*>(y.data()), static_cast<std::streamsize>(y.size()));
  out_.write(reinterpret_cast<const char*>(cb.data()), static_cast<std::streamsize>(cb.size()));
  out_.write(reinterpret_cast<const char*>(cr.data()), static_cast<std::streamsize>(cr.size()));
}

// ---------------------------------------------------------------------------
// Image directories

std::vector<std::filesystem::path> list_ppm_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") files.push_back(entry.path());
  }
  if (files.empty()) throw Error(ErrorCode::EmptyDirectory, dir.string() + " contains no .ppm files");
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

ImageDirSource::ImageDirSource(const std::filesystem::path& dir, double fps)
    : files_(list_ppm_files(dir)), fps_(fps) {}

std::optional<Frame> ImageDirSource::next() {
  if (pos_ >= files_.size()) return std::nullopt;
  const auto idx = static_cast<std::int64_t>(pos_);
  Frame f = read_ppm_file(files_[pos_++]);
  if (dims_ && f.dims() != *dims_) {
    throw Error(ErrorCode::DimensionMismatch, "frame " + std::to_string(idx) + " (" +
                                                  files_[pos_ - 1].filename().string() +
                                                  ") differs in size from frame 0");
  }
  dims_ = f.dims();
  f.set_index(idx);
  f.set_timestamp_ms(static_cast<double>(idx) * 1000.0 / fps_);
  return f;
}

std::unique_ptr<FrameSource> open_source(const std::string& input) {
  if (input == "-") return std::make_unique<Y4mSource>(std::cin);
  const std::filesystem::path path(input);
  if (std::filesystem::is_directory(path)) return std::make_unique<ImageDirSource>(path);
  if (path.extension() == ".y4m") return std::make_unique<Y4mSource>(path);
  return std::make_unique<SingleImageSource>(read_ppm_file(path));
}

// ---------------------------------------------------------------------------
// JSONL

std::string format_real(double value) {
  if (!std::isfinite(value)) return "null";
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.4f", value);
  std::string s(buf.data());
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string write_jsonl(const DetectionRecord& record) {
  std::string out;
  out.reserve(64 + record.tracks.size() * 128);
  out += "{\"frame_index\":";
  out += std::to_string(record.frame_index);
  out += ",\"tracks\":[";
  for (std::size_t i = 0; i < record.tracks.size(); ++i) {
    const TrackOutput& t = record.tracks[i];
    if (i) out += ',';
    out += "{\"id\":";
    out += std::to_string(t.id);
    out += ",\"label\":\"";
    out += label_name(t.label);
    out += "\",\"confidence\":";
    out += format_real(t.confidence);
    out += ",\"box\":{\"x\":";
    out += format_real(t.box.x);
    out += ",\"y\":";
    out += format_real(t.box.y);
    out += ",\"w\":";
    out += format_real(t.box.w);
    out += ",\"h\":";
    out += format_real(t.box.h);
    out += "},\"coasting\":";
    out += t.coasting ? "true" : "false";
    out += '}';
  }
  out += "]}\n";
  return out;
}

}  // namespace maskpipe
