#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "demotrace/image_io.hpp"
#include "test_util.hpp"

using namespace demotrace;
using demotrace::testing::TempDir;

namespace {

std::uint32_t le32(const std::string& s, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(s[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + 3])) << 24;
}

float le_float(const std::string& s, std::size_t at) {
  const std::uint32_t bits = le32(s, at);
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

}  // namespace

TEST(DepthFile, LayoutAndInvalidEncoding) {
  DepthImage d(3, 2, 1.5f);
  d(1, 0) = kInvalidDepth;
  d(2, 1) = 0.25f;
  const std::string bytes = encode_depth(d);
  ASSERT_EQ(bytes.size(), 12u + 6 * 4);
  EXPECT_EQ(bytes.substr(0, 4), "DPT1");
  EXPECT_EQ(le32(bytes, 4), 3u);
  EXPECT_EQ(le32(bytes, 8), 2u);
  EXPECT_EQ(le_float(bytes, 12), 1.5f);
  EXPECT_EQ(le_float(bytes, 16), 0.0f);
  EXPECT_EQ(le_float(bytes, 12 + 5 * 4), 0.25f);

  const DepthImage back = decode_depth(bytes);
  ASSERT_TRUE(back.same_shape(d));
  EXPECT_TRUE(std::isnan(back(1, 0)));
  EXPECT_EQ(back(0, 0), 1.5f);
  EXPECT_EQ(back(2, 1), 0.25f);
  EXPECT_EQ(encode_depth(back), bytes);
}

TEST(DepthFile, RejectsMalformed) {
  EXPECT_EQ(code_of([] { decode_depth("DPT1"); }), ErrorCode::kFormat);
  EXPECT_EQ(code_of([] { decode_depth(std::string("XXXX\1\0\0\0\1\0\0\0\0\0\0\0", 16)); }), ErrorCode::kFormat);
  std::string truncated = encode_depth(DepthImage(4, 4, 1.0f));
  truncated.pop_back();
  EXPECT_EQ(code_of([&] { decode_depth(truncated); }), ErrorCode::kFormat);
}

TEST(FlowFile, RoundTripInterleaved) {
  FlowField f(2, 2);
  f(0, 0) = {1.0f, -2.0f};
  f(1, 1) = {0.5f, 3.25f};
  const std::string bytes = encode_flow(f);
  EXPECT_EQ(bytes.substr(0, 4), "FLW1");
  ASSERT_EQ(bytes.size(), 12u + 8 * 4);
  EXPECT_EQ(le_float(bytes, 12), 1.0f);
  EXPECT_EQ(le_float(bytes, 16), -2.0f);
  EXPECT_EQ(decode_flow(bytes), f);
}

TEST(MaskFile, WriteReadAndForeignVariants) {
  std::mt19937_64 rng(1);
  const MaskImage m = demotrace::testing::random_mask(rng, 13, 7, 0.5);
  const std::string bytes = encode_mask(m);
  ASSERT_EQ(bytes.size(), 12u + 13 * 7);
  EXPECT_EQ(bytes.substr(0, 12), "P5\n13 7\n255\n");
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(static_cast<unsigned char>(bytes[12 + i]), m.data()[i] ? 255 : 0);
  EXPECT_EQ(decode_mask(bytes), m);

  // Comments, other maxvals and 16-bit samples; any nonzero sample is set.
  const std::string commented = "P5\n# made elsewhere\n2 1\n# note\n1\n" + std::string("\x01\x00", 2);
  MaskImage expect(2, 1);
  expect(0, 0) = 1;
  EXPECT_EQ(decode_mask(commented), expect);
  const std::string wide = "P5 2 1 65535\n" + std::string("\x00\x00\x01\x00", 4);
  MaskImage expect_wide(2, 1);
  expect_wide(1, 0) = 1;
  EXPECT_EQ(decode_mask(wide), expect_wide);
  EXPECT_EQ(code_of([] { decode_mask("P2\n1 1\n255\n0"); }), ErrorCode::kFormat);
  EXPECT_EQ(code_of([] { decode_mask("P5\n2 2\n255\n\x01"); }), ErrorCode::kFormat);
}

TEST(Files, AtomicWriteAndMissingInput) {
  TempDir dir("io");
  const auto path = dir.path() / "d.dpt";
  write_depth(path, DepthImage(5, 4, 2.0f));
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  EXPECT_EQ(read_depth(path)(4, 3), 2.0f);
  write_mask(dir.path() / "m.pgm", MaskImage(3, 3, 1));
  EXPECT_EQ(popcount(read_mask(dir.path() / "m.pgm")), 9u);
  EXPECT_EQ(code_of([&] { read_depth(dir.path() / "absent.dpt"); }), ErrorCode::kMissingInput);
}
