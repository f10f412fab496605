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

#include "maskpipe/onnx_model.hpp"

#include <fstream>
#include <iterator>
#include <optional>
#include <set>

#include "maskpipe/error.hpp"

namespace maskpipe {

namespace {

enum WireType : std::uint32_t { kVarint = 0, kFixed64 = 1, kLen = 2, kFixed32 = 5 };

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::SignatureMismatch, "malformed ONNX model: " + what);
}

// Cursor over one protobuf message.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const noexcept { return pos_ >= bytes_.size(); }

  std::uint64_t varint() {
    std::uint64_t value = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (pos_ >= bytes_.size()) malformed("truncated varint");
      const std::uint8_t b = bytes_[pos_++];
      value |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) return value;
    }
    malformed("varint too long");
  }

  // Returns (field number, wire type).
  std::pair<std::uint32_t, std::uint32_t> tag() {
    const std::uint64_t t = varint();
    return {static_cast<std::uint32_t>(t >> 3), static_cast<std::uint32_t>(t & 7)};
  }

  std::span<const std::uint8_t> bytes() {
    const std::uint64_t n = varint();
    if (n > bytes_.size() - pos_) malformed("length-delimited field overruns buffer");
    auto out = bytes_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return out;
  }

  std::string string() {
    auto b = bytes();
    return {b.begin(), b.end()};
  }

  void skip(std::uint32_t wire) {
    switch (wire) {
      case kVarint: varint(); break;
      case kFixed64: advance(8); break;
      case kLen: bytes(); break;
      case kFixed32: advance(4); break;
      default: malformed("unsupported wire type " + std::to_string(wire));
    }
  }

 private:
  void advance(std::size_t n) {
    if (n > bytes_.size() - pos_) malformed("fixed field overruns buffer");
    pos_ += n;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::int64_t parse_dimension(std::span<const std::uint8_t> msg) {
  Reader r(msg);
  std::int64_t value = -1;
  while (!r.done()) {
    auto [field, wire] = r.tag();
    if (field == 1 && wire == kVarint) {
      value = static_cast<std::int64_t>(r.varint());
    } else {
      r.skip(wire);
    }
  }
  return value;
}

void parse_tensor_type(std::span<const std::uint8_t> msg, OnnxValueInfo& info) {
  Reader r(msg);
  while (!r.done()) {
    auto [field, wire] = r.tag();
    if (field == 1 && wire == kVarint) {
      info.elem_type = static_cast<std::int32_t>(r.varint());
    } else if (field == 2 && wire == kLen) {
      Reader shape(r.bytes());
      while (!shape.done()) {
        auto [sf, sw] = shape.tag();
        if (sf == 1 && sw == kLen) {
          info.dims.push_back(parse_dimension(shape.bytes()));
        } else {
          shape.skip(sw);
        }
      }
    } else {
      r.skip(wire);
    }
  }
}

OnnxValueInfo parse_value_info(std::span<const std::uint8_t> msg) {
  OnnxValueInfo info;
  Reader r(msg);
  while (!r.done()) {
    auto [field, wire] = r.tag();
    if (field == 1 && wire == kLen) {
      info.name = r.string();
    } else if (field == 2 && wire == kLen) {
      Reader type(r.bytes());
      while (!type.done()) {
        auto [tf, tw] = type.tag();
        if (tf == 1 && tw == kLen) {
          parse_tensor_type(type.bytes(), info);
        } else {
          type.skip(tw);
        }
      }
    } else {
      r.skip(wire);
    }
  }
  return info;
}

// Returns (name, element count) of an initializer TensorProto.
std::pair<std::string, std::int64_t> parse_initializer(std::span<const std::uint8_t> msg) {
  Reader r(msg);
  std::string name;
  std::int64_t count = 1;
  while (!r.done()) {
    auto [field, wire] = r.tag();
    if (field == 1 && wire == kVarint) {
      count *= static_cast<std::int64_t>(r.varint());
    } else if (field == 1 && wire == kLen) {
      Reader packed(r.bytes());
      while (!packed.done()) count *= static_cast<std::int64_t>(packed.varint());
    } else if (field == 8 && wire == kLen) {
      name = r.string();
    } else {
      r.skip(wire);
    }
  }
  return {name, count};
}

}  // namespace

OnnxModelInfo parse_onnx_model_info(std::span<const std::uint8_t> bytes) {
  Reader model(bytes);
  std::optional<std::span<const std::uint8_t>> graph;
  while (!model.done()) {
    auto [field, wire] = model.tag();
    if (field == 7 && wire == kLen) {
      graph = model.bytes();
    } else {
      model.skip(wire);
    }
  }
  if (!graph) malformed("no graph");

  OnnxModelInfo info;
  std::vector<OnnxValueInfo> inputs;
  std::set<std::string> initializer_names;
  Reader g(*graph);
  while (!g.done()) {
    auto [field, wire] = g.tag();
    if (field == 5 && wire == kLen) {
      auto [name, count] = parse_initializer(g.bytes());
      info.parameter_count += count;
      initializer_names.insert(std::move(name));
    } else if (field == 11 && wire == kLen) {
      inputs.push_back(parse_value_info(g.bytes()));
    } else if (field == 12 && wire == kLen) {
      info.outputs.push_back(parse_value_info(g.bytes()));
    } else {
      g.skip(wire);
    }
  }
  for (auto& in : inputs) {
    if (!initializer_names.contains(in.name)) info.inputs.push_back(std::move(in));
  }
  return info;
}

OnnxModelInfo read_onnx_model_info(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ModelNotFound, "cannot open model file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_onnx_model_info(bytes);
}

}  // namespace maskpipe
