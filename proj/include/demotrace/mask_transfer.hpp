#pragma once

#include <cstddef>
#include <vector>

#include "demotrace/geometry.hpp"
#include "demotrace/imaging.hpp"

namespace demotrace {

struct CameraTrackEntry {
  std::size_t index = 0;
  PoseSE3 camera_to_scene;
};

// Registered scene-video cameras.
struct CameraTrack {
  std::vector<CameraTrackEntry> entries;  // strictly increasing index
  Intrinsics intrinsics;

  void validate() const;
};

// Track frame index minimising camera_distance to demo_pose; ties go to the
// lower frame index. Throws kEmptyTrack.
std::size_t closest_scene_camera(const PoseSE3& demo_pose, const CameraTrack& track,
                                 double lambda = kDefaultCameraLambda);

// Forward-splats every set pixel with valid depth from the source camera
// into the destination camera (nearest pixel, no hole filling, no z-test).
// Poses are camera-to-scene.
MaskImage reproject_mask(const MaskImage& mask, const DepthImage& depth, const Intrinsics& intr_src,
                         const PoseSE3& pose_src, const Intrinsics& intr_dst, const PoseSE3& pose_dst);

inline constexpr int kDefaultTransferMargin = 5;

// Tight bbox of the reprojected mask grown by `margin` and clamped to the
// destination image. Throws kEmptyReprojection if nothing lands in view.
BBox transfer_bbox(const MaskImage& mask, const DepthImage& depth, const Intrinsics& intr_src,
                   const PoseSE3& pose_src, const Intrinsics& intr_dst, const PoseSE3& pose_dst,
                   int margin = kDefaultTransferMargin);

// Nearest pixel to a continuous image coordinate (pixel centers are
// integral).
inline int nearest_pixel(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace demotrace
