#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "demotrace/contact.hpp"
#include "demotrace/geometry.hpp"

namespace demotrace {

enum class FrameTag { kCamera, kScene };

FrameTag parse_frame_tag(std::string_view name);
std::string_view frame_tag_name(FrameTag tag);

struct PoseTrackEntry {
  std::size_t index = 0;
  PoseSE3 pose;  // object-to-<frame>
};

struct PoseTrack {
  FrameTag frame = FrameTag::kCamera;
  std::vector<PoseTrackEntry> entries;  // strictly increasing index

  void validate() const;
};

struct PoseError {
  std::size_t index = 0;
  double translation = 0.0;  // m
  double rotation = 0.0;     // rad
};

// entry ↦ cam_in_scene ∘ entry. Throws kWrongFrameTag unless tagged camera.
PoseTrack to_scene_track(const PoseTrack& track, const PoseSE3& cam_in_scene);

// Shifts every translation by scene_start − t_first; rotations are untouched
// and the first entry lands on scene_start exactly. Throws kEmptyTrack.
PoseTrack align_start(const PoseTrack& track, const Point3& scene_start);

// Throws kFrameMismatch unless both tracks cover the same frame indices.
std::vector<PoseError> pose_errors(const PoseTrack& estimate, const PoseTrack& truth);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kContactColor{255, 0, 0};
inline constexpr Rgb kStartColor{0, 255, 0};
inline constexpr Rgb kEndColor{0, 0, 255};

struct MarkerSet {
  std::vector<Point3> contacts;  // red
  Point3 start = Point3::Zero();  // green
  Point3 end = Point3::Zero();    // blue
};

// Contacts are placed with the first-entry pose. Throws kEmptyTrack.
MarkerSet make_markers(const PoseTrack& scene_track, const std::vector<ContactPoint>& contacts);

// ASCII PLY: start, end, then contacts, each with x y z red green blue.
std::string markers_to_ply(const MarkerSet& markers);

}  // namespace demotrace
