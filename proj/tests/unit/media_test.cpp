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

#include <gtest/gtest.h>

#include <sstream>

#include "maskpipe/error.hpp"
#include "maskpipe/media.hpp"
#include "maskpipe/scene.hpp"
#include "test_support.hpp"

namespace maskpipe {
namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::IoError;
}

// y4m helpers -------------------------------------------------------------

std::string y4m_header(int w, int h, const std::string& extra = " F30:1 Ip A1:1 C420jpeg") {
  return "YUV4MPEG2 W" + std::to_string(w) + " H" + std::to_string(h) + extra + "\n";
}

std::string y4m_frame(int w, int h, std::uint8_t y, std::uint8_t cb, std::uint8_t cr) {
  const std::size_t cw = (w + 1) / 2, ch = (h + 1) / 2;
  std::string s = "FRAME\n";
  s.append(static_cast<std::size_t>(w) * h, static_cast<char>(y));
  s.append(cw * ch, static_cast<char>(cb));
  s.append(cw * ch, static_cast<char>(cr));
  return s;
}

TEST(Ppm, ReadsMinimalImage) {
  const auto f = read_ppm(bytes_of(std::string("P6 2 1 255\n") + "\x01\x02\x03\x04\x05\x06"));
  EXPECT_EQ(f.width(), 2);
  EXPECT_EQ(f.height(), 1);
  EXPECT_EQ(std::vector<std::uint8_t>(f.pixels().begin(), f.pixels().end()),
            (std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6}));
}

TEST(Ppm, CommentsInHeader) {
  const auto f = read_ppm(bytes_of(std::string("P6\n# made by hand\n1 # width\n1\n# max\n255\n") + "abc"));
  EXPECT_EQ(f.pixels()[0], 'a');
}

TEST(Ppm, Errors) {
  EXPECT_EQ(code_of([] { (void)read_ppm(bytes_of("P6 1 1 65535\n\0\0\0\0\0\0")); }), ErrorCode::UnsupportedMaxval);
  EXPECT_EQ(code_of([] { (void)read_ppm(bytes_of("P3 1 1 255\n0 0 0")); }), ErrorCode::MalformedHeader);
  EXPECT_EQ(code_of([] { (void)read_ppm(bytes_of("P6 1 x 255\n")); }), ErrorCode::MalformedHeader);
  EXPECT_EQ(code_of([] { (void)read_ppm(bytes_of("P6 0 1 255\n")); }), ErrorCode::MalformedHeader);
  EXPECT_EQ(code_of([] { (void)read_ppm(bytes_of("P6 2 2 255\nabc")); }), ErrorCode::TruncatedPixelData);
  EXPECT_EQ(code_of([] { (void)read_ppm({}); }), ErrorCode::MalformedHeader);
}

TEST(Ppm, CanonicalBlackPixel) {
  const auto bytes = write_ppm(Frame({1, 1}));
  EXPECT_EQ(std::string(bytes.begin(), bytes.end()), std::string("P6\n1 1\n255\n\0\0\0", 14));
}

TEST(Ppm, FullHdSize) {
  const auto bytes = write_ppm(Frame({1920, 1080}));
  const std::string header = "P6\n1920 1080\n255\n";
  EXPECT_EQ(bytes.size(), header.size() + 6220800u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(header.size())), header);
}

TEST(Ppm, RoundTripProperty) {
  mptest::Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const FrameDims d{static_cast<std::int32_t>(rng.integer(1, 70)), static_cast<std::int32_t>(rng.integer(1, 70))};
    const Frame f(d, rng.bytes(static_cast<std::size_t>(d.pixel_count()) * 3));
    const auto bytes = write_ppm(f);
    const auto g = read_ppm(bytes);
    ASSERT_EQ(g.dims(), d);
    ASSERT_EQ(write_ppm(g), bytes);
  }
}

TEST(Ppm, FileRoundTrip) {
  mptest::TempDir dir;
  const auto r = render_scene(make_random_scene(3, {64, 48}), 0);
  write_ppm_file(r.frame, dir / "a.ppm");
  EXPECT_EQ(read_ppm_file(dir / "a.ppm").pixels().size(), r.frame.pixels().size());
  EXPECT_EQ(code_of([&] { (void)read_ppm_file(dir / "missing.ppm"); }), ErrorCode::IoError);
}

TEST(Y4m, WhiteAndBlackPoints) {
  std::istringstream in(y4m_header(4, 2) + y4m_frame(4, 2, 235, 128, 128) + y4m_frame(4, 2, 16, 128, 128));
  Y4mSource src(in);
  const auto white = src.next();
  ASSERT_TRUE(white);
  for (auto v : white->pixels()) ASSERT_EQ(v, 255);
  const auto black = src.next();
  ASSERT_TRUE(black);
  for (auto v : black->pixels()) ASSERT_EQ(v, 0);
  EXPECT_EQ(black->index(), 1);
  EXPECT_FALSE(src.next());
}

TEST(Y4m, HeaderGrammar) {
  std::istringstream in(y4m_header(2, 2, " F30:1"));
  Y4mSource src(in);
  EXPECT_DOUBLE_EQ(src.frame_rate(), 30.0);
  EXPECT_EQ(src.color_space(), "420jpeg");
  EXPECT_EQ(src.dims(), (FrameDims{2, 2}));
  std::istringstream ntsc(y4m_header(2, 2, " F30000:1001 C420mpeg2 XYSCSS=420MPEG2"));
  Y4mSource s2(ntsc);
  EXPECT_NEAR(s2.frame_rate(), 29.97, 0.001);
  EXPECT_EQ(s2.color_space(), "420mpeg2");
}

TEST(Y4m, Errors) {
  std::istringstream c444(y4m_header(2, 2, " F25:1 C444"));
  EXPECT_EQ(code_of([&] { Y4mSource s(c444); }), ErrorCode::UnsupportedColorSpace);
  std::istringstream nomagic("YUV4MPEG W2 H2 F25:1\n");
  EXPECT_EQ(code_of([&] { Y4mSource s(nomagic); }), ErrorCode::MalformedHeader);
  std::istringstream nofps("YUV4MPEG2 W2 H2\n");
  EXPECT_EQ(code_of([&] { Y4mSource s(nofps); }), ErrorCode::MalformedHeader);

  std::istringstream badmarker(y4m_header(2, 2) + "FRAMX\n" + std::string(6, '\0'));
  Y4mSource s1(badmarker);
  EXPECT_EQ(code_of([&] { (void)s1.next(); }), ErrorCode::MalformedFrameMarker);

  std::istringstream truncated(y4m_header(4, 4) + "FRAME\n" + std::string(10, '\0'));
  Y4mSource s2(truncated);
  EXPECT_EQ(code_of([&] { (void)s2.next(); }), ErrorCode::TruncatedFrame);
}

TEST(Y4m, FrameParametersOnMarkerAreAccepted) {
  std::string f = y4m_frame(2, 2, 16, 128, 128);
  f.replace(0, 6, "FRAME Ixyz\n");
  std::istringstream in(y4m_header(2, 2) + f);
  Y4mSource src(in);
  EXPECT_TRUE(src.next());
}

TEST(Y4m, OddSizesAndNearestChroma) {
  // 3x3 luma, 2x2 chroma. Chroma column 1 / row 1 covers pixel 2 only.
  std::string planes(9, static_cast<char>(126));
  const std::string cb = {static_cast<char>(128), static_cast<char>(240), static_cast<char>(128), static_cast<char>(128)};
  const std::string cr(4, static_cast<char>(128));
  std::istringstream in(y4m_header(3, 3) + "FRAME\n" + planes + cb + cr);
  Y4mSource src(in);
  const auto f = src.next();
  ASSERT_TRUE(f);
  const auto gray = mptest::bt601_reference(126, 128, 128);
  const auto blue = mptest::bt601_reference(126, 240, 128);
  EXPECT_NEAR(f->at(1, 0)[2], gray.b, 1);
  EXPECT_NEAR(f->at(2, 0)[2], blue.b, 1);
  EXPECT_NEAR(f->at(2, 1)[2], blue.b, 1);
  EXPECT_NEAR(f->at(2, 2)[2], gray.b, 1);
}

TEST(Y4m, RandomPlanesMatchScalarReference) {
  mptest::Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const FrameDims d{static_cast<std::int32_t>(rng.integer(1, 40)), static_cast<std::int32_t>(rng.integer(1, 40))};
    const std::size_t cw = (d.width + 1) / 2, ch = (d.height + 1) / 2;
    const auto y = rng.bytes(static_cast<std::size_t>(d.pixel_count()));
    const auto cb = rng.bytes(cw * ch);
    const auto cr = rng.bytes(cw * ch);
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(d.pixel_count()) * 3);
    yuv420_to_rgb(y, cb, cr, d, rgb);
    for (int py = 0; py < d.height; ++py) {
      for (int px = 0; px < d.width; ++px) {
        const std::size_t c = static_cast<std::size_t>(py / 2) * cw + px / 2;
        const auto ref = mptest::bt601_reference(y[static_cast<std::size_t>(py) * d.width + px], cb[c], cr[c]);
        const std::uint8_t* got = &rgb[(static_cast<std::size_t>(py) * d.width + px) * 3];
        ASSERT_LE(std::abs(got[0] - ref.r), 1);
        ASSERT_LE(std::abs(got[1] - ref.g), 1);
        ASSERT_LE(std::abs(got[2] - ref.b), 1);
      }
    }
  }
}

TEST(Y4m, WriterReaderKeepsFlatColorsExact) {
  // Flat regions survive 4:2:0 subsampling, so the round trip is within the
  // BT.601 quantization error.
  const auto s = make_random_scene(4, {64, 48});
  std::stringstream buf;
  Y4mWriter w(buf, s.dims);
  for (int t = 0; t < 3; ++t) w.write(render_scene(s, t).frame);
  Y4mSource src(buf);
  EXPECT_EQ(src.dims(), s.dims);
  int n = 0;
  while (auto f = src.next()) {
    const auto ref = render_scene(s, n).frame;
    EXPECT_LE(std::abs(int{f->at(0, 0)[0]} - int{ref.at(0, 0)[0]}), 2);
    ++n;
  }
  EXPECT_EQ(n, 3);
}

TEST(ImageDir, OrdersByteWise) {
  mptest::TempDir dir;
  for (int i = 0; i < 11; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "f_%d.ppm", i);
    Frame f({2, 2});
    f.at(0, 0)[0] = static_cast<std::uint8_t>(i);
    write_ppm_file(f, dir / name);
  }
  mptest::write_bytes(dir / "notes.txt", "ignored");
  ImageDirSource src(dir.path());
  ASSERT_EQ(src.files().size(), 11u);
  EXPECT_EQ(src.files()[1].filename(), "f_1.ppm");
  EXPECT_EQ(src.files()[2].filename(), "f_10.ppm");
  EXPECT_EQ(src.files().back().filename(), "f_9.ppm");
  std::vector<int> order;
  std::int64_t idx = 0;
  while (auto f = src.next()) {
    EXPECT_EQ(f->index(), idx++);
    order.push_back(f->at(0, 0)[0]);
  }
  EXPECT_EQ(order, (std::vector<int>{0, 1, 10, 2, 3, 4, 5, 6, 7, 8, 9}));
}

TEST(ImageDir, TenFramesInNameOrder) {
  mptest::TempDir dir;
  for (int i = 0; i < 10; ++i) write_ppm_file(Frame({3, 2}), dir / ("f_00" + std::to_string(i) + ".ppm"));
  ImageDirSource src(dir.path());
  int n = 0;
  while (src.next()) ++n;
  EXPECT_EQ(n, 10);
}

TEST(ImageDir, EmptyAndMixedDims) {
  mptest::TempDir dir;
  EXPECT_EQ(code_of([&] { ImageDirSource s(dir.path()); }), ErrorCode::EmptyDirectory);
  write_ppm_file(Frame({2, 2}), dir / "a.ppm");
  write_ppm_file(Frame({3, 2}), dir / "b.ppm");
  ImageDirSource src(dir.path());
  EXPECT_TRUE(src.next());
  EXPECT_EQ(code_of([&] { (void)src.next(); }), ErrorCode::DimensionMismatch);
}

TEST(OpenSource, DispatchesOnInput) {
  mptest::TempDir dir;
  write_ppm_file(Frame({2, 2}), dir / "a.ppm");
  mptest::write_bytes(dir / "v.y4m", y4m_header(2, 2) + y4m_frame(2, 2, 16, 128, 128));
  EXPECT_EQ(open_source((dir / "a.ppm").string())->kind(), SourceKind::SingleImage);
  EXPECT_EQ(open_source(dir.path().string())->kind(), SourceKind::ImageDir);
  auto y = open_source((dir / "v.y4m").string());
  EXPECT_EQ(y->kind(), SourceKind::Y4mStream);
  EXPECT_TRUE(y->next());
  EXPECT_FALSE(y->next());
}

TEST(Jsonl, EmptyTracks) { EXPECT_EQ(write_jsonl({0, {}}), "{\"frame_index\":0,\"tracks\":[]}\n"); }

TEST(Jsonl, OneTrackKeyOrder) {
  const DetectionRecord r{12, {{3, {10.5, 20.25, 30, 40.125}, MaskLabel::NoMask, 1.0, true}}};
  EXPECT_EQ(write_jsonl(r),
            "{\"frame_index\":12,\"tracks\":[{\"id\":3,\"label\":\"No_Mask\",\"confidence\":1,"
            "\"box\":{\"x\":10.5,\"y\":20.25,\"w\":30,\"h\":40.125},\"coasting\":true}]}\n");
}

TEST(Jsonl, NumberFormatting) {
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(0.5), "0.5");
  EXPECT_EQ(format_real(0.123456), "0.1235");
  EXPECT_EQ(format_real(-0.00001), "0");
  EXPECT_EQ(format_real(-2.5), "-2.5");
  EXPECT_EQ(format_real(1920), "1920");
  EXPECT_EQ(format_real(0.99995), "1");
}

TEST(Jsonl, Deterministic) {
  mptest::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    DetectionRecord r{i, {}};
    for (int k = 0; k < 3; ++k) {
      r.tracks.push_back({static_cast<TrackId>(k), {rng.uniform(0, 1000), rng.uniform(0, 1000), rng.uniform(0, 99), rng.uniform(0, 99)},
                          rng.coin() ? MaskLabel::Mask : MaskLabel::NoMask, rng.uniform(0.5, 1), rng.coin()});
    }
    const auto line = write_jsonl(r);
    ASSERT_EQ(line, write_jsonl(r));
    ASSERT_EQ(std::count(line.begin(), line.end(), '\n'), 1);
    ASSERT_EQ(line.back(), '\n');
  }
}

}  // namespace
}  // namespace maskpipe
