#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "demotrace/geometry.hpp"
#include "demotrace/imaging.hpp"

namespace demotrace {

struct GaussianSplat {
  Point3 mean = Point3::Zero();          // scene frame, m
  Vec3 scale = Vec3::Constant(0.01);     // m, all > 0
  Eigen::Vector4d orientation{1, 0, 0, 0};  // unit quaternion (w, x, y, z)
  double opacity = 1.0;                  // [0, 1]

  void validate() const;
};

// Strict: a splat outside the camera frustum votes negative.
// Neutral: it abstains.
enum class FrustumPolicy { kStrict, kNeutral };

FrustumPolicy parse_policy(std::string_view name);
std::string_view policy_name(FrustumPolicy policy);

enum class Vote : std::uint8_t { kAbstain, kPositive, kNegative };

struct VoteCount {
  std::uint32_t positive = 0;
  std::uint32_t negative = 0;
  std::uint32_t abstain = 0;

  std::uint32_t total() const { return positive + negative + abstain; }
};

using VoteTally = std::vector<VoteCount>;

struct SegmentationView {
  MaskImage mask;
  Intrinsics intrinsics;
  PoseSE3 camera_to_scene;
};

inline constexpr double kDefaultNearPlane = 0.01;
inline constexpr double kDefaultRatioThreshold = 0.7;

// Mean in camera frame has z > z_near and projects inside
// [0, width) × [0, height).
bool in_frustum(const GaussianSplat& splat, const Intrinsics& intr, const PoseSE3& camera_to_scene,
                double z_near = kDefaultNearPlane);

// Votes from the projection of each splat mean; the splat footprint is not
// rasterised.
std::vector<Vote> vote_view(const std::vector<GaussianSplat>& splats, const SegmentationView& view,
                            FrustumPolicy policy, double z_near = kDefaultNearPlane);

VoteTally tally_votes(const std::vector<GaussianSplat>& splats, const std::vector<SegmentationView>& views,
                      FrustumPolicy policy, double z_near = kDefaultNearPlane);

// Ascending indices of splats with positive / (positive + negative) >=
// ratio_threshold. Splats without effective votes are excluded.
// Throws kNoViews.
std::vector<std::size_t> segment(const std::vector<GaussianSplat>& splats, const std::vector<SegmentationView>& views,
                                 FrustumPolicy policy, double ratio_threshold = kDefaultRatioThreshold,
                                 double z_near = kDefaultNearPlane);

// Mean of the selected splat means.
Point3 splat_centroid(const std::vector<GaussianSplat>& splats, const std::vector<std::size_t>& indices);

// "SPL1", uint32 LE count, then per splat mean(3), scale(3), quaternion
// wxyz(4), opacity(1), all float32 LE.
std::string encode_splats(const std::vector<GaussianSplat>& splats);
std::vector<GaussianSplat> decode_splats(std::string_view bytes);
void write_splats(const std::filesystem::path& path, const std::vector<GaussianSplat>& splats);
std::vector<GaussianSplat> read_splats(const std::filesystem::path& path);

}  // namespace demotrace
