#include "demotrace/fixtures.hpp"

#include <cmath>
#include <cstdio>

#include <spdlog/spdlog.h>

#include "demotrace/image_io.hpp"
#include "demotrace/json_io.hpp"
#include "demotrace/pipeline.hpp"
#include "demotrace/trajectory.hpp"

namespace demotrace::synth {
namespace {

PoseSE3 translation(const Vec3& t) { return PoseSE3(Mat3::Identity(), t); }

Body static_body(std::string name, BodyRole role, std::vector<Primitive> parts, const PoseSE3& pose = {}) {
  return Body{std::move(name), role, std::move(parts), {pose}};
}

Body table() { return static_body("table", BodyRole::kBackground, {Box{{0, 0, -0.02}, {0.7, 0.7, 0.02}}}); }

// `count` cameras on an arc of `span` radians starting at `phase`, at
// `radius` and `height`, all looking at target.
CameraTrack orbit_track(std::size_t count, double radius, double height, const Point3& target, double phase,
                        double span = 2.0 * M_PI) {
  CameraTrack track;
  track.intrinsics = default_intrinsics();
  for (std::size_t i = 0; i < count; ++i) {
    const double a = phase + span * static_cast<double>(i) / static_cast<double>(count);
    const Point3 eye(radius * std::cos(a), radius * std::sin(a), height);
    track.entries.push_back({i, look_at(eye, target, Vec3::UnitZ())});
  }
  return track;
}

std::vector<std::size_t> every_nth(std::size_t count, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; i += n) out.push_back(i);
  return out;
}

// Kettle: box body with a spherical lid, frame origin at the surface-area
// centroid so that surface splats average to the object position.
Body kettle_body(const Point3& base) {
  const Box body{{0, 0, 0.09}, {0.08, 0.06, 0.09}};
  const Sphere lid{{0, 0, 0.18}, 0.045};
  const double ab = surface_area(body);
  const double al = surface_area(lid);
  const Point3 c = (ab * body.center + al * lid.center) / (ab + al);
  Body b;
  b.name = "kettle";
  b.role = BodyRole::kObject;
  b.parts = {Box{body.center - c, body.half_extents}, Sphere{lid.center - c, lid.radius}};
  b.poses = {translation(base + c)};
  return b;
}

constexpr double kHandRadius = 0.007;

// Hand lying on the kettle's front face; it approaches along −y at 2 cm per
// frame and stays attached once it touches. The forearm trails to the right.
void add_kettle_hand(PrimitiveScene& scene, std::size_t object_index, std::size_t touch) {
  const Body& object = scene.bodies[object_index];
  const double face_y = -0.06 - kHandRadius;
  Body hand{"hand", BodyRole::kHand, {Capsule{{-0.03, 0, 0}, {0.03, 0, 0}, kHandRadius}}, {}};
  Body arm{"arm", BodyRole::kHuman, {Capsule{{0.045, -0.04, 0}, {0.30, -0.26, 0.04}, 0.03}}, {}};
  for (std::size_t f = 0; f < scene.frame_count; ++f) {
    const double gap = f < touch ? 0.02 * static_cast<double>(touch - f) : 0.0;
    const PoseSE3 attach = f < touch ? object.pose(0) : object.pose(f);
    const PoseSE3 pose = compose(attach, translation({0, face_y - gap, 0}));
    hand.poses.push_back(pose);
    arm.poses.push_back(pose);
  }
  scene.bodies.push_back(std::move(hand));
  scene.bodies.push_back(std::move(arm));
}

// After the touch the kettle slides right and lifts in an arc while yawing.
void script_kettle_motion(Body& kettle, std::size_t frames, std::size_t touch) {
  const PoseSE3 rest = kettle.poses.front();
  kettle.poses.clear();
  for (std::size_t f = 0; f < frames; ++f) {
    double s = 0.0;
    if (f > touch && frames > touch + 1) {
      s = static_cast<double>(f - touch) / static_cast<double>(frames - 1 - touch);
    }
    const Vec3 shift(0.15 * s, 0.0, 0.08 * std::sin(M_PI * s));
    kettle.poses.emplace_back(rotation_about(Vec3::UnitZ(), 0.15 * s) * rest.rotation(), rest.translation() + shift);
  }
}

Fixture base_fixture(std::string name, std::size_t frames) {
  Fixture fx;
  fx.name = std::move(name);
  fx.scene.frame_count = frames;
  fx.demo_intrinsics = default_intrinsics();
  fx.scene_track = orbit_track(30, 0.85, 0.45, {0, 0, 0.1}, -M_PI / 2);
  fx.view_frames = every_nth(fx.scene_track.entries.size(), 3);
  fx.shell = BackgroundShell{{0, 0, 0.1}, 0.25, 0.45, 0.0};
  return fx;
}

Fixture kettle_fixture(std::size_t frames, bool walker) {
  Fixture fx = base_fixture(walker ? "occlusion" : "kettle", frames);
  fx.touch_frame = frames / 4;
  fx.scene.bodies.push_back(table());
  fx.scene.bodies.push_back(kettle_body({0, 0, 0}));
  fx.object_body = 1;
  script_kettle_motion(fx.scene.bodies[1], frames, fx.touch_frame);
  add_kettle_hand(fx.scene, fx.object_body, fx.touch_frame);
  if (walker) {
    // A bystander crosses between camera and kettle over frames F/2 … 3F/4.
    Body person{"bystander", BodyRole::kHuman, {Capsule{{0, 0, 0.12}, {0, 0, 1.48}, 0.12}}, {}};
    const double begin = static_cast<double>(frames) / 2.0;
    const double end = 3.0 * static_cast<double>(frames) / 4.0;
    for (std::size_t f = 0; f < frames; ++f) {
      const double s = std::clamp((static_cast<double>(f) - begin) / (end - begin), 0.0, 1.0);
      const bool present = static_cast<double>(f) >= begin && static_cast<double>(f) <= end;
      const double x = present ? -0.8 + 1.6 * s : 5.0;
      person.poses.push_back(translation({x, -0.4, 0}));
    }
    fx.scene.bodies.push_back(std::move(person));
  }
  fx.demo_camera = look_at({0.05, -0.75, 0.35}, {0, 0, 0.12}, Vec3::UnitZ());
  fx.demo_camera_registered = compose(translation({0.015, -0.01, 0.01}), fx.demo_camera);
  return fx;
}

// Cabinet door swinging open about a vertical hinge with constant angular
// acceleration, pulled at its handle and filmed from the hinge side.
Fixture door_fixture(std::size_t frames) {
  Fixture fx = base_fixture("door", frames);
  fx.touch_frame = 0;
  fx.scene.bodies.push_back(table());
  fx.scene.bodies.push_back(
      static_body("cabinet", BodyRole::kBackground, {Box{{0, 0.16, 0.3}, {0.21, 0.15, 0.3}}}));
  // Angle ω0·f + ½·α·f², reaching 0.6 rad on the last frame.
  const double last = static_cast<double>(frames - 1);
  const double omega0 = 0.008;
  const double alpha = std::max(0.0, 2.0 * (0.6 - omega0 * last) / (last * last));
  std::vector<double> angles;
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = static_cast<double>(f);
    angles.push_back(-(omega0 * t + 0.5 * alpha * t * t));
  }
  const Box panel{{0, 0, 0.3}, {0.2, 0.01, 0.28}};
  fx.scene.bodies.push_back(
      make_hinged_panel("door", BodyRole::kObject, panel, {-0.2, -0.01, 0}, Vec3::UnitZ(), angles));
  fx.object_body = 2;
  Body hand{"hand", BodyRole::kHand, {Capsule{{0.16, -0.01 - kHandRadius, -0.04}, {0.16, -0.01 - kHandRadius, 0.04},
                                              kHandRadius}},
            fx.scene.bodies[2].poses};
  Body arm{"arm", BodyRole::kHuman, {Capsule{{0.2, -0.045, 0.0}, {0.45, -0.08, -0.05}, 0.03}},
           fx.scene.bodies[2].poses};
  fx.scene.bodies.push_back(std::move(hand));
  fx.scene.bodies.push_back(std::move(arm));
  fx.demo_camera = look_at({-0.7, -0.6, 0.55}, {0.05, 0, 0.3}, Vec3::UnitZ());
  fx.demo_camera_registered = compose(translation({0.015, -0.01, 0.01}), fx.demo_camera);
  fx.scene_track = orbit_track(30, 1.1, 0.6, {0, 0, 0.3}, -M_PI / 2 - 1.0, 2.0);
  fx.shell = BackgroundShell{{0, 0, 0.3}, 0.4, 0.6, 0.0};
  return fx;
}

std::string frame_stem(std::size_t f) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%06zu", f);
  return buf;
}

Json optional_bbox(const MaskImage& m) {
  const auto b = tight_bbox(m);
  return b ? bbox_to_json(*b) : Json(nullptr);
}

MaskImage valid_mask(const DepthImage& d) {
  MaskImage m(d.width(), d.height());
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = is_valid_depth(d.data()[i]) ? 1 : 0;
  return m;
}

}  // namespace

FixtureKind parse_fixture_kind(std::string_view name) {
  if (name == "kettle") return FixtureKind::kKettle;
  if (name == "door") return FixtureKind::kDoor;
  if (name == "occlusion") return FixtureKind::kOcclusion;
  throw Error(ErrorCode::kInvalidArgument, "unknown scene '" + std::string(name) + "'");
}

std::string_view fixture_kind_name(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::kKettle: return "kettle";
    case FixtureKind::kDoor: return "door";
    case FixtureKind::kOcclusion: return "occlusion";
  }
  return "?";
}

Intrinsics default_intrinsics() { return Intrinsics{720.0, 720.0, 479.5, 359.5, 960, 720}; }

PrimitiveScene Fixture::scene_recording() const {
  PrimitiveScene out;
  out.frame_count = 1;
  for (std::size_t i = 0; i < scene.bodies.size(); ++i) {
    const Body& b = scene.bodies[i];
    if (b.role != BodyRole::kBackground && i != object_body) continue;
    out.bodies.push_back(Body{b.name, b.role, b.parts, {b.pose(0)}});
  }
  return out;
}

Fixture make_fixture(FixtureKind kind, std::size_t frames) {
  if (frames < 2) throw Error(ErrorCode::kInvalidArgument, "a fixture needs at least two frames");
  Fixture fx;
  switch (kind) {
    case FixtureKind::kKettle: fx = kettle_fixture(frames, false); break;
    case FixtureKind::kOcclusion: fx = kettle_fixture(frames, true); break;
    case FixtureKind::kDoor: fx = door_fixture(frames); break;
  }
  fx.scene.validate();
  return fx;
}

TranslatingBox make_translating_box(std::size_t frames) {
  TranslatingBox tb;
  tb.intrinsics = default_intrinsics();
  tb.camera = PoseSE3::identity();
  tb.scene.frame_count = frames;
  Body box{"box", BodyRole::kObject, {Box{{0, 0, 0}, {0.08, 0.06, 0.05}}}, {}};
  for (std::size_t f = 0; f < frames; ++f) {
    box.poses.push_back(translation({-0.15 + 0.005 * static_cast<double>(f), 0.02, 1.0}));
  }
  tb.scene.bodies.push_back(std::move(box));
  tb.scene.validate();
  return tb;
}

void write_fixture(const Fixture& fx, const std::filesystem::path& dir, const FixtureOptions& options) {
  namespace fs = std::filesystem;
  fx.scene.validate();
  if (options.flow_stride == 0) throw Error(ErrorCode::kInvalidArgument, "flow stride must be positive");
  fs::create_directories(dir / "demo" / "frames");
  fs::create_directories(dir / "scene");

  const Intrinsics& intr = fx.demo_intrinsics;
  const std::size_t frames = fx.scene.frame_count;
  const RoleMask object_role = role_bit(BodyRole::kObject);
  const DepthNoise noise{options.depth_sigma, options.seed};

  Manifest m;
  m.base_dir = dir;
  m.demo_intrinsics = intr;
  m.demo_camera_pose = "demo/camera_pose.json";
  m.object_track = "demo/object_track.json";
  m.scene_track = "scene/track.json";
  m.views = "scene/views.json";
  m.splats = "scene/splats.spl";
  m.ground_truth = "truth.json";
  m.params.motion.stride = static_cast<int>(options.flow_stride);

  Json object_bboxes = Json::array();
  PoseTrack object_track{FrameTag::kCamera, {}};
  PoseTrack truth_track{FrameTag::kScene, {}};
  const PoseSE3 scene_to_camera = inverse(fx.demo_camera);
  const Body& object = fx.scene.bodies.at(fx.object_body);

  for (std::size_t f = 0; f < frames; ++f) {
    const Render full = render(fx.scene, intr, fx.demo_camera, f);
    const DepthImage rendered = render(fx.scene, intr, fx.demo_camera, f, object_role).depth;
    DepthImage sensor = full.depth;
    add_depth_noise(sensor, noise, f);

    const std::string stem = "demo/frames/" + frame_stem(f);
    DemoFrame df;
    df.index = f;
    df.depth = stem + "_depth.dpt";
    df.rendered = stem + "_rendered.dpt";
    df.human = stem + "_human.pgm";
    df.hand = stem + "_hand.pgm";
    df.object = stem + "_object.pgm";
    write_depth(dir / df.depth, sensor);
    write_depth(dir / df.rendered, rendered);
    write_mask(dir / df.human, visible_mask(full, fx.scene, role_bit(BodyRole::kHuman)));
    write_mask(dir / df.hand, visible_mask(full, fx.scene, role_bit(BodyRole::kHand)));
    write_mask(dir / df.object, visible_mask(full, fx.scene, object_role));
    if (f % options.flow_stride == 0 && f + 1 < frames) {
      df.flow = stem + "_flow.flw";
      write_flow(dir / df.flow, analytic_flow(full, fx.scene, intr, fx.demo_camera, f));
    }
    m.frames.push_back(df);

    object_bboxes.push_back(optional_bbox(valid_mask(rendered)));
    object_track.entries.push_back({f, compose(scene_to_camera, object.pose(f))});
    truth_track.entries.push_back({f, object.pose(f)});
    spdlog::debug("fixture {}: frame {} written", fx.name, f);
  }

  const PrimitiveScene recording = fx.scene_recording();
  Json scene_bboxes = Json::array();
  for (const CameraTrackEntry& e : fx.scene_track.entries) {
    scene_bboxes.push_back(optional_bbox(silhouette_mask(recording, object_role, fx.scene_track.intrinsics,
                                                         e.camera_to_scene, 0)));
  }
  Json views = Json::array();
  for (std::size_t k : fx.view_frames) {
    const CameraTrackEntry& e = fx.scene_track.entries.at(k);
    char name[32];
    std::snprintf(name, sizeof name, "view_%03zu.pgm", e.index);
    write_mask(dir / "scene" / name,
               coverage_mask(recording, object_role, fx.scene_track.intrinsics, e.camera_to_scene, 0));
    views.push_back({{"mask", name},
                     {"intrinsics", intrinsics_to_json(fx.scene_track.intrinsics)},
                     {"pose", pose_to_json(e.camera_to_scene)}});
  }
  write_json(dir / m.views, {{"views", views}});
  write_json(dir / m.scene_track, camera_track_to_json(fx.scene_track));

  const SplatSample sample =
      sample_splats(recording, fx.n_object_splats, fx.n_background_splats, options.seed, fx.shell);
  write_splats(dir / m.splats, sample.splats);

  write_json(dir / m.demo_camera_pose, pose_to_json(fx.demo_camera_registered));
  write_json(dir / m.object_track, pose_track_to_json(object_track));

  Json contacts = Json::array();
  for (const Point3& p : ground_truth_contacts(fx.scene, fx.object_body, 0, frames)) {
    contacts.push_back(point_to_json(p));
  }
  write_json(dir / m.ground_truth, {{"scene", fx.name},
                                    {"touch_frame", fx.touch_frame},
                                    {"object_bboxes", object_bboxes},
                                    {"scene_bboxes", scene_bboxes},
                                    {"object_splats", sample.object_indices},
                                    {"object_scene_track", pose_track_to_json(truth_track)},
                                    {"contacts", contacts}});
  write_json(dir / "manifest.json", manifest_to_json(m));
}

}  // namespace demotrace::synth
