#include "demotrace/image_io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace demotrace {
namespace {

namespace fs = std::filesystem;

constexpr std::size_t kHeaderSize = 12;
constexpr std::uint32_t kMaxDimension = 1u << 15;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(std::string_view in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

float get_f32(std::string_view in, std::size_t offset) { return std::bit_cast<float>(get_u32(in, offset)); }

std::string raster_header(std::string_view magic, int width, int height, std::size_t payload) {
  std::string out;
  out.reserve(kHeaderSize + payload);
  out.append(magic);
  put_u32(out, static_cast<std::uint32_t>(width));
  put_u32(out, static_cast<std::uint32_t>(height));
  return out;
}

// Returns (width, height) after checking magic and total length.
std::pair<int, int> parse_raster_header(std::string_view bytes, std::string_view magic, std::size_t bytes_per_pixel) {
  if (bytes.size() < kHeaderSize || bytes.substr(0, 4) != magic) {
    throw Error(ErrorCode::kFormat, "missing " + std::string(magic) + " header");
  }
  const std::uint32_t w = get_u32(bytes, 4);
  const std::uint32_t h = get_u32(bytes, 8);
  if (w > kMaxDimension || h > kMaxDimension) throw Error(ErrorCode::kFormat, "implausible raster size");
  const std::size_t expected = kHeaderSize + static_cast<std::size_t>(w) * h * bytes_per_pixel;
  if (bytes.size() != expected) {
    throw Error(ErrorCode::kFormat, "payload size does not match " + std::to_string(w) + "x" + std::to_string(h));
  }
  return {static_cast<int>(w), static_cast<int>(h)};
}

}  // namespace

void write_bytes_atomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingInput, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string encode_depth(const DepthImage& depth) {
  std::string out = raster_header("DPT1", depth.width(), depth.height(), depth.size() * 4);
  for (float d : depth.data()) put_f32(out, is_valid_depth(d) ? d : 0.0f);
  return out;
}

DepthImage decode_depth(std::string_view bytes) {
  const auto [w, h] = parse_raster_header(bytes, "DPT1", 4);
  DepthImage depth(w, h);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const float d = get_f32(bytes, kHeaderSize + 4 * i);
    depth.data()[i] = is_valid_depth(d) ? d : kInvalidDepth;
  }
  return depth;
}

void write_depth(const fs::path& path, const DepthImage& depth) { write_bytes_atomic(path, encode_depth(depth)); }

DepthImage read_depth(const fs::path& path) { return decode_depth(read_bytes(path)); }

std::string encode_flow(const FlowField& flow) {
  std::string out = raster_header("FLW1", flow.width(), flow.height(), flow.size() * 8);
  for (const Flow& f : flow.data()) {
    put_f32(out, f.du);
    put_f32(out, f.dv);
  }
  return out;
}

FlowField decode_flow(std::string_view bytes) {
  const auto [w, h] = parse_raster_header(bytes, "FLW1", 8);
  FlowField flow(w, h);
  for (std::size_t i = 0; i < flow.size(); ++i) {
    Flow f{get_f32(bytes, kHeaderSize + 8 * i), get_f32(bytes, kHeaderSize + 8 * i + 4)};
    if (!std::isfinite(f.du) || !std::isfinite(f.dv)) throw Error(ErrorCode::kFormat, "non-finite flow value");
    flow.data()[i] = f;
  }
  return flow;
}

void write_flow(const fs::path& path, const FlowField& flow) { write_bytes_atomic(path, encode_flow(flow)); }

FlowField read_flow(const fs::path& path) { return decode_flow(read_bytes(path)); }

std::string encode_mask(const MaskImage& mask) {
  std::string out = "P5\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) out[header + i] = static_cast<char>(mask.data()[i] ? 255 : 0);
  return out;
}

MaskImage decode_mask(std::string_view bytes) {
  std::size_t pos = 0;
  auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space_and_comments();
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      throw Error(ErrorCode::kFormat, "malformed PGM header");
    }
    long value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      value = value * 10 + (bytes[pos++] - '0');
      if (value > (1L << 20)) throw Error(ErrorCode::kFormat, "PGM header value too large");
    }
    return static_cast<int>(value);
  };

  if (bytes.size() < 2 || bytes.substr(0, 2) != "P5") throw Error(ErrorCode::kFormat, "not a binary PGM");
  pos = 2;
  const int w = read_int();
  const int h = read_int();
  const int maxval = read_int();
  if (maxval <= 0 || maxval > 65535) throw Error(ErrorCode::kFormat, "invalid PGM maxval");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw Error(ErrorCode::kFormat, "malformed PGM header");
  }
  ++pos;
  const std::size_t bpp = maxval < 256 ? 1 : 2;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() - pos != n * bpp) throw Error(ErrorCode::kFormat, "PGM payload size mismatch");
  MaskImage mask(w, h);
  for (std::size_t i = 0; i < n; ++i) {
    bool set = bytes[pos + bpp * i] != 0;
    if (bpp == 2) set = set || bytes[pos + 2 * i + 1] != 0;
    mask.data()[i] = set ? 1 : 0;
  }
  return mask;
}

void write_mask(const fs::path& path, const MaskImage& mask) { write_bytes_atomic(path, encode_mask(mask)); }

MaskImage read_mask(const fs::path& path) { return decode_mask(read_bytes(path)); }

}  // namespace demotrace
