#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "demotrace/mask_transfer.hpp"
#include "demotrace/synth.hpp"

namespace demotrace::synth {

enum class FixtureKind { kKettle, kDoor, kOcclusion };
FixtureKind parse_fixture_kind(std::string_view name);
std::string_view fixture_kind_name(FixtureKind kind);

// 960×720 pinhole camera with a 67° horizontal field of view.
Intrinsics default_intrinsics();

// A scripted demonstration plus the static scene recording it is matched
// against.
struct Fixture {
  std::string name;
  PrimitiveScene scene;
  std::size_t object_body = 0;
  Intrinsics demo_intrinsics;
  PoseSE3 demo_camera;             // true camera-to-scene
  PoseSE3 demo_camera_registered;  // with a registration offset
  CameraTrack scene_track;         // orbit around the object at rest
  std::vector<std::size_t> view_frames;  // scene frames used for segmentation
  std::size_t touch_frame = 0;           // first frame the hand touches
  BackgroundShell shell;
  std::size_t n_object_splats = 500;
  std::size_t n_background_splats = 500;

  // Static bodies and the object at frame 0, without hand or human.
  PrimitiveScene scene_recording() const;
};

Fixture make_fixture(FixtureKind kind, std::size_t frames = 60);

// Box translating parallel to the image plane, seen by a static camera.
struct TranslatingBox {
  PrimitiveScene scene;  // body 0 is the box
  Intrinsics intrinsics;
  PoseSE3 camera;
};
TranslatingBox make_translating_box(std::size_t frames = 60);

struct FixtureOptions {
  std::uint64_t seed = 42;
  double depth_sigma = 0.0;
  std::size_t flow_stride = 6;  // flow is written on multiples of this
};

// Writes manifest.json, truth.json and every referenced input under dir.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir, const FixtureOptions& options = {});

}  // namespace demotrace::synth
