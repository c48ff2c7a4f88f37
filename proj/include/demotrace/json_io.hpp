#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "demotrace/contact.hpp"
#include "demotrace/geometry.hpp"
#include "demotrace/imaging.hpp"
#include "demotrace/mask_transfer.hpp"
#include "demotrace/trajectory.hpp"

namespace demotrace {

using Json = nlohmann::json;

// 16 numbers, row-major 4×4 homogeneous matrix.
Json pose_to_json(const PoseSE3& pose);
PoseSE3 pose_from_json(const Json& j);

// {fx, fy, cx, cy, width, height}
Json intrinsics_to_json(const Intrinsics& intr);
Intrinsics intrinsics_from_json(const Json& j);

// [u_min, v_min, u_max, v_max]
Json bbox_to_json(const BBox& box);
BBox bbox_from_json(const Json& j);

Json point_to_json(const Point3& p);
Point3 point_from_json(const Json& j);

// {intrinsics, entries: [{index, matrix}]}
Json camera_track_to_json(const CameraTrack& track);
CameraTrack camera_track_from_json(const Json& j);

// {frame_tag, entries: [{index, matrix}]}
Json pose_track_to_json(const PoseTrack& track);
PoseTrack pose_track_from_json(const Json& j);

// [{position_object, position_scene, support}]
Json contacts_to_json(const std::vector<ContactPoint>& contacts);
std::vector<ContactPoint> contacts_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
// Pretty-printed with a trailing newline, written atomically.
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace demotrace
