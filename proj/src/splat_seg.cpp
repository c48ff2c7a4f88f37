#include "demotrace/splat_seg.hpp"

#include <bit>
#include <cmath>

#include "demotrace/image_io.hpp"
#include "demotrace/mask_transfer.hpp"
#include "demotrace/parallel.hpp"

namespace demotrace {
namespace {

constexpr std::size_t kFloatsPerSplat = 11;

void put_f32(std::string& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(std::string_view in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

}  // namespace

void GaussianSplat::validate() const {
  if (!mean.allFinite()) throw Error(ErrorCode::kInvalidArgument, "splat mean is not finite");
  if (!(scale.array() > 0.0).all()) throw Error(ErrorCode::kInvalidArgument, "splat scale must be positive");
  if (std::abs(orientation.norm() - 1.0) > 1e-6) {
    throw Error(ErrorCode::kInvalidArgument, "splat orientation is not a unit quaternion");
  }
  if (!(opacity >= 0.0 && opacity <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "splat opacity outside [0,1]");
}

FrustumPolicy parse_policy(std::string_view name) {
  if (name == "strict") return FrustumPolicy::kStrict;
  if (name == "neutral") return FrustumPolicy::kNeutral;
  throw Error(ErrorCode::kInvalidArgument, "unknown frustum policy '" + std::string(name) + "'");
}

std::string_view policy_name(FrustumPolicy policy) {
  return policy == FrustumPolicy::kStrict ? "strict" : "neutral";
}

bool in_frustum(const GaussianSplat& splat, const Intrinsics& intr, const PoseSE3& camera_to_scene, double z_near) {
  const Point3 p = transform_point(inverse(camera_to_scene), splat.mean);
  if (!(p.z() > z_near)) return false;
  const Projection proj = project(intr, p);
  return proj.pixel.u >= 0.0 && proj.pixel.u < intr.width && proj.pixel.v >= 0.0 && proj.pixel.v < intr.height;
}

std::vector<Vote> vote_view(const std::vector<GaussianSplat>& splats, const SegmentationView& view,
                            FrustumPolicy policy, double z_near) {
  const Intrinsics& intr = view.intrinsics;
  if (view.mask.width() != intr.width || view.mask.height() != intr.height) {
    throw Error(ErrorCode::kDimensionMismatch, "view mask does not match its intrinsics");
  }
  const PoseSE3 scene_to_camera = inverse(view.camera_to_scene);
  const Vote outside = policy == FrustumPolicy::kStrict ? Vote::kNegative : Vote::kAbstain;
  std::vector<Vote> votes(splats.size(), outside);
  for (std::size_t i = 0; i < splats.size(); ++i) {
    const Point3 p = transform_point(scene_to_camera, splats[i].mean);
    if (!(p.z() > z_near)) continue;
    const Projection proj = project(intr, p);
    if (!(proj.pixel.u >= 0.0 && proj.pixel.u < intr.width && proj.pixel.v >= 0.0 && proj.pixel.v < intr.height)) {
      continue;
    }
    // Rounding can reach the far edge for coordinates in [w - 0.5, w).
    const int u = std::min(nearest_pixel(proj.pixel.u), intr.width - 1);
    const int v = std::min(nearest_pixel(proj.pixel.v), intr.height - 1);
    votes[i] = view.mask(u, v) != 0 ? Vote::kPositive : Vote::kNegative;
  }
  return votes;
}

VoteTally tally_votes(const std::vector<GaussianSplat>& splats, const std::vector<SegmentationView>& views,
                      FrustumPolicy policy, double z_near) {
  std::vector<std::vector<Vote>> per_view(views.size());
  parallel_for(0, views.size(), [&](std::size_t i) { per_view[i] = vote_view(splats, views[i], policy, z_near); });
  VoteTally tally(splats.size());
  for (const auto& votes : per_view) {
    for (std::size_t i = 0; i < votes.size(); ++i) {
      switch (votes[i]) {
        case Vote::kPositive: ++tally[i].positive; break;
        case Vote::kNegative: ++tally[i].negative; break;
        case Vote::kAbstain: ++tally[i].abstain; break;
      }
    }
  }
  return tally;
}

std::vector<std::size_t> segment(const std::vector<GaussianSplat>& splats, const std::vector<SegmentationView>& views,
                                 FrustumPolicy policy, double ratio_threshold, double z_near) {
  if (views.empty()) throw Error(ErrorCode::kNoViews, "segmentation needs at least one view");
  if (!(ratio_threshold >= 0.0 && ratio_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ratio threshold must lie in [0, 1]");
  }
  const VoteTally tally = tally_votes(splats, views, policy, z_near);
  std::vector<std::size_t> included;
  for (std::size_t i = 0; i < tally.size(); ++i) {
    const std::uint32_t effective = tally[i].positive + tally[i].negative;
    if (effective == 0) continue;
    if (static_cast<double>(tally[i].positive) / effective >= ratio_threshold) included.push_back(i);
  }
  return included;
}

Point3 splat_centroid(const std::vector<GaussianSplat>& splats, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw Error(ErrorCode::kInvalidArgument, "centroid of an empty splat set");
  Point3 sum = Point3::Zero();
  for (std::size_t i : indices) sum += splats.at(i).mean;
  return sum / static_cast<double>(indices.size());
}

std::string encode_splats(const std::vector<GaussianSplat>& splats) {
  std::string out = "SPL1";
  const auto count = static_cast<std::uint32_t>(splats.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((count >> (8 * i)) & 0xFFu));
  out.reserve(out.size() + splats.size() * kFloatsPerSplat * 4);
  for (const GaussianSplat& s : splats) {
    for (int k = 0; k < 3; ++k) put_f32(out, static_cast<float>(s.mean[k]));
    for (int k = 0; k < 3; ++k) put_f32(out, static_cast<float>(s.scale[k]));
    for (int k = 0; k < 4; ++k) put_f32(out, static_cast<float>(s.orientation[k]));
    put_f32(out, static_cast<float>(s.opacity));
  }
  return out;
}

std::vector<GaussianSplat> decode_splats(std::string_view bytes) {
  if (bytes.size() < 8 || bytes.substr(0, 4) != "SPL1") throw Error(ErrorCode::kFormat, "missing SPL1 header");
  const std::uint32_t count = get_u32(bytes, 4);
  if ((bytes.size() - 8) / (kFloatsPerSplat * 4) != count || (bytes.size() - 8) % (kFloatsPerSplat * 4) != 0) {
    throw Error(ErrorCode::kFormat, "splat payload size does not match count");
  }
  std::vector<GaussianSplat> splats(count);
  std::size_t off = 8;
  auto next = [&] {
    const float f = std::bit_cast<float>(get_u32(bytes, off));
    off += 4;
    return static_cast<double>(f);
  };
  for (GaussianSplat& s : splats) {
    for (int k = 0; k < 3; ++k) s.mean[k] = next();
    for (int k = 0; k < 3; ++k) s.scale[k] = next();
    for (int k = 0; k < 4; ++k) s.orientation[k] = next();
    s.opacity = next();
  }
  return splats;
}

void write_splats(const std::filesystem::path& path, const std::vector<GaussianSplat>& splats) {
  write_bytes_atomic(path, encode_splats(splats));
}

std::vector<GaussianSplat> read_splats(const std::filesystem::path& path) { return decode_splats(read_bytes(path)); }

}  // namespace demotrace
