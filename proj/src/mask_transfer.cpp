#include "demotrace/mask_transfer.hpp"

#include <cmath>

#include "demotrace/parallel.hpp"

namespace demotrace {

void CameraTrack::validate() const {
  intrinsics.validate();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].index <= entries[i - 1].index) {
      throw Error(ErrorCode::kInvalidArgument, "camera track indices must be strictly increasing");
    }
    if (!entries[i].camera_to_scene.is_valid()) {
      throw Error(ErrorCode::kInvalidArgument, "camera track contains an invalid pose");
    }
  }
}

std::size_t closest_scene_camera(const PoseSE3& demo_pose, const CameraTrack& track, double lambda) {
  if (track.entries.empty()) throw Error(ErrorCode::kEmptyTrack, "scene camera track is empty");
  const CameraTrackEntry* best = nullptr;
  double best_dist = 0.0;
  for (const CameraTrackEntry& e : track.entries) {
    const double d = camera_distance(demo_pose, e.camera_to_scene, lambda);
    if (best == nullptr || d < best_dist || (d == best_dist && e.index < best->index)) {
      best = &e;
      best_dist = d;
    }
  }
  return best->index;
}

MaskImage reproject_mask(const MaskImage& mask, const DepthImage& depth, const Intrinsics& intr_src,
                         const PoseSE3& pose_src, const Intrinsics& intr_dst, const PoseSE3& pose_dst) {
  if (!mask.same_shape(depth)) throw Error(ErrorCode::kDimensionMismatch, "mask and depth dimensions differ");
  if (mask.width() != intr_src.width || mask.height() != intr_src.height) {
    throw Error(ErrorCode::kDimensionMismatch, "mask does not match source intrinsics");
  }
  // Source camera -> destination camera in one rigid transform.
  const PoseSE3 src_to_dst = compose(inverse(pose_dst), pose_src);
  MaskImage out(intr_dst.width, intr_dst.height);
  // Per-row hit lists, merged afterwards; a set-bit union is order-free.
  std::vector<std::vector<std::size_t>> hits(static_cast<std::size_t>(mask.height()));
  parallel_for(0, hits.size(), [&](std::size_t row) {
    const int v = static_cast<int>(row);
    for (int u = 0; u < mask.width(); ++u) {
      if (mask(u, v) == 0 || !is_valid_depth(depth(u, v))) continue;
      const Point3 p_src = backproject(intr_src, {static_cast<double>(u), static_cast<double>(v)}, depth(u, v));
      const Point3 p_dst = transform_point(src_to_dst, p_src);
      if (!(p_dst.z() > 0.0)) continue;
      const Projection proj = project(intr_dst, p_dst);
      const int du = nearest_pixel(proj.pixel.u);
      const int dv = nearest_pixel(proj.pixel.v);
      if (out.contains(du, dv)) hits[row].push_back(static_cast<std::size_t>(dv) * out.width() + du);
    }
  });
  for (const auto& row : hits) {
    for (std::size_t idx : row) out.data()[idx] = 1;
  }
  return out;
}

BBox transfer_bbox(const MaskImage& mask, const DepthImage& depth, const Intrinsics& intr_src,
                   const PoseSE3& pose_src, const Intrinsics& intr_dst, const PoseSE3& pose_dst, int margin) {
  if (margin < 0) throw Error(ErrorCode::kInvalidArgument, "margin must be non-negative");
  const auto box = tight_bbox(reproject_mask(mask, depth, intr_src, pose_src, intr_dst, pose_dst));
  if (!box) throw Error(ErrorCode::kEmptyReprojection, "no mask pixel transferred into the destination view");
  return expand_bbox(*box, margin, intr_dst.width, intr_dst.height);
}

}  // namespace demotrace
