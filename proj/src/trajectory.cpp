#include "demotrace/trajectory.hpp"

#include <cstdio>

namespace demotrace {

FrameTag parse_frame_tag(std::string_view name) {
  if (name == "camera") return FrameTag::kCamera;
  if (name == "scene") return FrameTag::kScene;
  throw Error(ErrorCode::kFormat, "unknown frame tag '" + std::string(name) + "'");
}

std::string_view frame_tag_name(FrameTag tag) { return tag == FrameTag::kCamera ? "camera" : "scene"; }

void PoseTrack::validate() const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].index <= entries[i - 1].index) {
      throw Error(ErrorCode::kInvalidArgument, "pose track indices must be strictly increasing");
    }
    if (!entries[i].pose.is_valid()) throw Error(ErrorCode::kInvalidArgument, "pose track contains an invalid pose");
  }
}

PoseTrack to_scene_track(const PoseTrack& track, const PoseSE3& cam_in_scene) {
  if (track.frame != FrameTag::kCamera) throw Error(ErrorCode::kWrongFrameTag, "expected a camera-frame track");
  PoseTrack out{FrameTag::kScene, {}};
  out.entries.reserve(track.entries.size());
  for (const PoseTrackEntry& e : track.entries) out.entries.push_back({e.index, compose(cam_in_scene, e.pose)});
  return out;
}

PoseTrack align_start(const PoseTrack& track, const Point3& scene_start) {
  if (track.entries.empty()) throw Error(ErrorCode::kEmptyTrack, "cannot align an empty track");
  const Vec3 delta = scene_start - track.entries.front().pose.translation();
  PoseTrack out = track;
  for (PoseTrackEntry& e : out.entries) e.pose.translation() += delta;
  out.entries.front().pose.translation() = scene_start;
  return out;
}

std::vector<PoseError> pose_errors(const PoseTrack& estimate, const PoseTrack& truth) {
  if (estimate.entries.size() != truth.entries.size()) {
    throw Error(ErrorCode::kFrameMismatch, "tracks have different lengths");
  }
  std::vector<PoseError> out;
  out.reserve(estimate.entries.size());
  for (std::size_t i = 0; i < estimate.entries.size(); ++i) {
    const PoseTrackEntry& e = estimate.entries[i];
    const PoseTrackEntry& g = truth.entries[i];
    if (e.index != g.index) throw Error(ErrorCode::kFrameMismatch, "tracks cover different frames");
    out.push_back({e.index, (e.pose.translation() - g.pose.translation()).norm(),
                   geodesic_angle(e.pose.rotation(), g.pose.rotation())});
  }
  return out;
}

MarkerSet make_markers(const PoseTrack& scene_track, const std::vector<ContactPoint>& contacts) {
  if (scene_track.entries.empty()) throw Error(ErrorCode::kEmptyTrack, "cannot export markers for an empty track");
  const PoseSE3& first = scene_track.entries.front().pose;
  MarkerSet m;
  m.start = first.translation();
  m.end = scene_track.entries.back().pose.translation();
  for (const ContactPoint& c : contacts) m.contacts.push_back(transform_point(first, c.position_object));
  return m;
}

std::string markers_to_ply(const MarkerSet& markers) {
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(markers.contacts.size() + 2) +
                    "\nproperty double x\nproperty double y\nproperty double z\n"
                    "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  auto vertex = [&out](const Point3& p, Rgb c) {
    char line[160];
    std::snprintf(line, sizeof(line), "%.17g %.17g %.17g %u %u %u\n", p.x(), p.y(), p.z(), unsigned{c.r},
                  unsigned{c.g}, unsigned{c.b});
    out += line;
  };
  vertex(markers.start, kStartColor);
  vertex(markers.end, kEndColor);
  for (const Point3& p : markers.contacts) vertex(p, kContactColor);
  return out;
}

}  // namespace demotrace
