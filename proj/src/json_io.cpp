#include "demotrace/json_io.hpp"

#include "demotrace/image_io.hpp"

namespace demotrace {
namespace {

// Wraps nlohmann's type errors so callers only ever see demotrace::Error.
template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json pose_to_json(const PoseSE3& pose) {
  const Mat4 m = pose.matrix();
  Json arr = Json::array();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) arr.push_back(m(r, c));
  }
  return arr;
}

PoseSE3 pose_from_json(const Json& j) {
  return guarded("pose", [&] {
    if (!j.is_array() || j.size() != 16) throw Error(ErrorCode::kFormat, "pose must be 16 numbers");
    Mat4 m;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) m(r, c) = j.at(4 * r + c).get<double>();
    }
    return PoseSE3::from_matrix(m);
  });
}

Json intrinsics_to_json(const Intrinsics& intr) {
  return {{"fx", intr.fx}, {"fy", intr.fy}, {"cx", intr.cx},
          {"cy", intr.cy}, {"width", intr.width}, {"height", intr.height}};
}

Intrinsics intrinsics_from_json(const Json& j) {
  return guarded("intrinsics", [&] {
    Intrinsics intr{j.at("fx").get<double>(), j.at("fy").get<double>(), j.at("cx").get<double>(),
                    j.at("cy").get<double>(), j.at("width").get<int>(),  j.at("height").get<int>()};
    intr.validate();
    return intr;
  });
}

Json bbox_to_json(const BBox& box) { return Json::array({box.u_min, box.v_min, box.u_max, box.v_max}); }

BBox bbox_from_json(const Json& j) {
  return guarded("bbox", [&] {
    if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::kFormat, "bbox must be 4 integers");
    BBox b{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
    if (b.u_min > b.u_max || b.v_min > b.v_max) throw Error(ErrorCode::kFormat, "bbox corners are inverted");
    return b;
  });
}

Json point_to_json(const Point3& p) { return Json::array({p.x(), p.y(), p.z()}); }

Point3 point_from_json(const Json& j) {
  return guarded("point", [&] {
    if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::kFormat, "point must be 3 numbers");
    return Point3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  });
}

Json camera_track_to_json(const CameraTrack& track) {
  Json entries = Json::array();
  for (const CameraTrackEntry& e : track.entries) {
    entries.push_back({{"index", e.index}, {"matrix", pose_to_json(e.camera_to_scene)}});
  }
  return {{"intrinsics", intrinsics_to_json(track.intrinsics)}, {"entries", entries}};
}

CameraTrack camera_track_from_json(const Json& j) {
  return guarded("camera track", [&] {
    CameraTrack track;
    track.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    for (const Json& e : j.at("entries")) {
      track.entries.push_back({e.at("index").get<std::size_t>(), pose_from_json(e.at("matrix"))});
    }
    track.validate();
    return track;
  });
}

Json pose_track_to_json(const PoseTrack& track) {
  Json entries = Json::array();
  for (const PoseTrackEntry& e : track.entries) {
    entries.push_back({{"index", e.index}, {"matrix", pose_to_json(e.pose)}});
  }
  return {{"frame_tag", std::string(frame_tag_name(track.frame))}, {"entries", entries}};
}

PoseTrack pose_track_from_json(const Json& j) {
  return guarded("pose track", [&] {
    PoseTrack track;
    track.frame = parse_frame_tag(j.at("frame_tag").get<std::string>());
    for (const Json& e : j.at("entries")) {
      track.entries.push_back({e.at("index").get<std::size_t>(), pose_from_json(e.at("matrix"))});
    }
    track.validate();
    return track;
  });
}

Json contacts_to_json(const std::vector<ContactPoint>& contacts) {
  Json arr = Json::array();
  for (const ContactPoint& c : contacts) {
    arr.push_back({{"position_object", point_to_json(c.position_object)},
                   {"position_scene", point_to_json(c.position_scene)},
                   {"support", c.support}});
  }
  return arr;
}

std::vector<ContactPoint> contacts_from_json(const Json& j) {
  return guarded("contacts", [&] {
    std::vector<ContactPoint> out;
    for (const Json& c : j) {
      out.push_back({point_from_json(c.at("position_object")), point_from_json(c.at("position_scene")),
                     c.at("support").get<std::uint64_t>()});
    }
    return out;
  });
}

Json read_json(const std::filesystem::path& path) {
  const std::string text = read_bytes(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) { write_bytes_atomic(path, j.dump(2) + "\n"); }

}  // namespace demotrace
