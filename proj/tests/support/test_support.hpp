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

// Shared helpers for the unit and acceptance tests: seeded generators,
// scratch directories and reference implementations that deliberately do
// not reuse any library code.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

namespace mptest {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g_); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(g_);
  }
  std::uint8_t byte() { return static_cast<std::uint8_t>(integer(0, 255)); }
  bool coin() { return integer(0, 1) == 1; }
  std::vector<std::uint8_t> bytes(std::size_t n) {
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = byte();
    return v;
  }
  std::mt19937_64& engine() { return g_; }

 private:
  std::mt19937_64 g_;
};

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("maskpipe_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  out << data;
}

// ---------------------------------------------------------------------------
// Reference bilinear resize, one output sample at a time in double precision.
// Source sample position u = (i + 1/2) * src / dst - 1/2, pulled back into
// [0, src - 1]; the right/bottom neighbour is clamped to the last sample.

inline std::vector<std::uint8_t> naive_bilinear(const std::vector<std::uint8_t>& src, int sw, int sh,
                                                int dw, int dh) {
  std::vector<std::uint8_t> dst(static_cast<std::size_t>(dw) * dh * 3);
  for (int oy = 0; oy < dh; ++oy) {
    for (int ox = 0; ox < dw; ++ox) {
      double u = (ox + 0.5) * static_cast<double>(sw) / dw - 0.5;
      double v = (oy + 0.5) * static_cast<double>(sh) / dh - 0.5;
      u = std::min(std::max(u, 0.0), static_cast<double>(sw - 1));
      v = std::min(std::max(v, 0.0), static_cast<double>(sh - 1));
      const int x0 = static_cast<int>(u);
      const int y0 = static_cast<int>(v);
      const int x1 = x0 + 1 < sw ? x0 + 1 : x0;
      const int y1 = y0 + 1 < sh ? y0 + 1 : y0;
      const double a = u - x0;
      const double b = v - y0;
      for (int c = 0; c < 3; ++c) {
        auto px = [&](int x, int y) {
          return static_cast<double>(src[(static_cast<std::size_t>(y) * sw + x) * 3 + c]);
        };
        const double top = px(x0, y0) * (1 - a) + px(x1, y0) * a;
        const double bot = px(x0, y1) * (1 - a) + px(x1, y1) * a;
        const double val = top * (1 - b) + bot * b;
        dst[(static_cast<std::size_t>(oy) * dw + ox) * 3 + c] =
            static_cast<std::uint8_t>(std::min(255.0, std::floor(val + 0.5)));
      }
    }
  }
  return dst;
}

// ---------------------------------------------------------------------------
// Limited-range BT.601 in double precision from the published coefficients.

struct Rgb {
  int r, g, b;
};

inline int round_clamp(double v) {
  return static_cast<int>(std::min(255.0, std::max(0.0, std::floor(v + 0.5))));
}

inline Rgb bt601_reference(int y, int cb, int cr) {
  const double yy = (255.0 / 219.0) * (y - 16);
  const double pb = (255.0 / 224.0) * (cb - 128);
  const double pr = (255.0 / 224.0) * (cr - 128);
  const double kr = 0.299, kb = 0.114, kg = 1.0 - kr - kb;
  const double r = yy + 2.0 * (1.0 - kr) * pr;
  const double b = yy + 2.0 * (1.0 - kb) * pb;
  const double g = yy - (2.0 * kb * (1.0 - kb) / kg) * pb - (2.0 * kr * (1.0 - kr) / kg) * pr;
  return {round_clamp(r), round_clamp(g), round_clamp(b)};
}

// ---------------------------------------------------------------------------
// Exhaustive assignment: among all partial injective maps using only gated
// pairs, the one with the most pairs, then the smallest total distance.

using PairList = std::vector<std::pair<std::size_t, std::size_t>>;

inline PairList exhaustive_assignment(const std::vector<std::vector<double>>& dist, double gate) {
  const std::size_t n = dist.size();
  const std::size_t m = n ? dist[0].size() : 0;
  PairList best, cur;
  double best_sum = std::numeric_limits<double>::infinity();
  std::vector<bool> used(m, false);
  auto rec = [&](auto&& self, std::size_t t, double sum) -> void {
    if (t == n) {
      if (cur.size() > best.size() || (cur.size() == best.size() && sum < best_sum)) {
        best = cur;
        best_sum = sum;
      }
      return;
    }
    self(self, t + 1, sum);
    for (std::size_t d = 0; d < m; ++d) {
      if (used[d] || dist[t][d] > gate) continue;
      used[d] = true;
      cur.emplace_back(t, d);
      self(self, t + 1, sum + dist[t][d]);
      cur.pop_back();
      used[d] = false;
    }
  };
  rec(rec, 0, 0.0);
  std::sort(best.begin(), best.end());
  return best;
}

// ---------------------------------------------------------------------------
// Minimal ONNX (protobuf wire format) writer for signature tests.

class ProtoWriter {
 public:
  void varint(std::uint32_t field, std::uint64_t v) {
    key(field, 0);
    raw_varint(v);
  }
  void bytes(std::uint32_t field, const std::string& s) {
    key(field, 2);
    raw_varint(s.size());
    out_ += s;
  }
  void packed(std::uint32_t field, const std::vector<std::int64_t>& values) {
    ProtoWriter inner;
    for (auto v : values) inner.raw_varint(static_cast<std::uint64_t>(v));
    bytes(field, inner.out_);
  }
  const std::string& str() const { return out_; }

 private:
  void key(std::uint32_t field, std::uint32_t wire) { raw_varint((field << 3) | wire); }
  void raw_varint(std::uint64_t v) {
    while (v >= 0x80) {
      out_.push_back(static_cast<char>((v & 0x7f) | 0x80));
      v >>= 7;
    }
    out_.push_back(static_cast<char>(v));
  }
  std::string out_;
};

struct FakeTensor {
  std::string name;
  std::vector<std::int64_t> dims;  // -1 encodes a symbolic extent
};

inline std::string value_info(const FakeTensor& t, int elem_type = 1) {
  ProtoWriter shape;
  for (auto d : t.dims) {
    ProtoWriter dim;
    if (d < 0) {
      dim.bytes(2, "batch");
    } else {
      dim.varint(1, static_cast<std::uint64_t>(d));
    }
    shape.bytes(1, dim.str());
  }
  ProtoWriter tensor;
  tensor.varint(1, static_cast<std::uint64_t>(elem_type));
  tensor.bytes(2, shape.str());
  ProtoWriter type;
  type.bytes(1, tensor.str());
  ProtoWriter vi;
  vi.bytes(1, t.name);
  vi.bytes(2, type.str());
  return vi.str();
}

/// ModelProto with one graph; initializers contribute dims only.
inline std::string fake_onnx_model(const std::vector<FakeTensor>& inputs,
                                   const std::vector<FakeTensor>& outputs,
                                   const std::vector<FakeTensor>& initializers,
                                   bool packed_dims = true) {
  ProtoWriter graph;
  graph.bytes(2, "g");
  for (const auto& init : initializers) {
    ProtoWriter t;
    if (packed_dims) {
      t.packed(1, init.dims);
    } else {
      for (auto d : init.dims) t.varint(1, static_cast<std::uint64_t>(d));
    }
    t.varint(2, 1);
    t.bytes(8, init.name);
    graph.bytes(5, t.str());
  }
  for (const auto& in : inputs) graph.bytes(11, value_info(in));
  for (const auto& out : outputs) graph.bytes(12, value_info(out));
  ProtoWriter model;
  model.varint(1, 8);
  model.bytes(2, "maskpipe-test");
  model.bytes(7, graph.str());
  return model.str();
}

}  // namespace mptest
