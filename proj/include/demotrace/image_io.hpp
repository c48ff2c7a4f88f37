#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "demotrace/imaging.hpp"

namespace demotrace {

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written artifact.
void write_bytes_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_bytes(const std::filesystem::path& path);

// "DPT1", uint32 LE width, uint32 LE height, float32 LE meters row-major;
// 0.0 on disk is invalid (NaN in memory).
std::string encode_depth(const DepthImage& depth);
DepthImage decode_depth(std::string_view bytes);
void write_depth(const std::filesystem::path& path, const DepthImage& depth);
DepthImage read_depth(const std::filesystem::path& path);

// "FLW1", same header, interleaved (du, dv) float32 LE.
std::string encode_flow(const FlowField& flow);
FlowField decode_flow(std::string_view bytes);
void write_flow(const std::filesystem::path& path, const FlowField& flow);
FlowField read_flow(const std::filesystem::path& path);

// Binary PGM (P5). Written with maxval 255 and set pixels as 255; on read any
// nonzero sample is set.
std::string encode_mask(const MaskImage& mask);
MaskImage decode_mask(std::string_view bytes);
void write_mask(const std::filesystem::path& path, const MaskImage& mask);
MaskImage read_mask(const std::filesystem::path& path);

}  // namespace demotrace
