#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "demotrace/geometry.hpp"
#include "demotrace/imaging.hpp"
#include "demotrace/splat_seg.hpp"

namespace demotrace::synth {

struct Sphere {
  Point3 center = Point3::Zero();
  double radius = 0.0;
};

struct Box {
  Point3 center = Point3::Zero();
  Vec3 half_extents = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
};

struct Capsule {
  Point3 a = Point3::Zero();
  Point3 b = Point3::Zero();
  double radius = 0.0;
};

using Primitive = std::variant<Sphere, Box, Capsule>;

// Signed distance from p to the primitive surface (negative inside).
double signed_distance(const Primitive& prim, const Point3& p);
double surface_area(const Primitive& prim);

// Ray o + t·d, t > t_min. Returns the nearest entry parameter.
std::optional<double> intersect(const Primitive& prim, const Point3& origin, const Vec3& dir, double t_min = 1e-9);

enum class BodyRole : std::uint8_t { kBackground = 1, kObject = 2, kHand = 4, kHuman = 8 };
using RoleMask = std::uint8_t;
inline constexpr RoleMask kAllRoles = 0x0F;
constexpr RoleMask role_bit(BodyRole r) { return static_cast<RoleMask>(r); }

// A rigid set of primitives with a body-to-scene pose per frame. A body with
// a single pose is static.
struct Body {
  std::string name;
  BodyRole role = BodyRole::kBackground;
  std::vector<Primitive> parts;  // body frame
  std::vector<PoseSE3> poses;

  const PoseSE3& pose(std::size_t frame) const { return poses.size() == 1 ? poses.front() : poses.at(frame); }
};

struct PrimitiveScene {
  std::vector<Body> bodies;
  std::size_t frame_count = 1;

  // Positive primitive sizes and a pose for every frame of every moving body.
  void validate() const;
};

// Box panel rotating about a hinge line. `panel` is given in the scene frame
// at angle zero; angles are radians per frame.
Body make_hinged_panel(std::string name, BodyRole role, const Box& panel, const Point3& hinge_point,
                       const Vec3& hinge_axis, const std::vector<double>& angles);

// Per-pixel nearest hit of a pinhole render.
struct Render {
  DepthImage depth;            // camera z, NaN on miss
  Image<std::int16_t> body;    // body index, -1 on miss
};

Render render(const PrimitiveScene& scene, const Intrinsics& intr, const PoseSE3& camera_to_scene, std::size_t frame,
              RoleMask roles = kAllRoles);

struct DepthNoise {
  double sigma = 0.0;  // m
  std::uint64_t seed = 0;
};

DepthImage raycast_depth(const PrimitiveScene& scene, const Intrinsics& intr, const PoseSE3& camera_to_scene,
                         std::size_t frame, RoleMask roles = kAllRoles, const DepthNoise& noise = {});

// Adds seeded Gaussian noise to valid pixels; deterministic per (seed, frame).
void add_depth_noise(DepthImage& depth, const DepthNoise& noise, std::size_t frame);

// Pixels hit when only `roles` are rendered.
MaskImage silhouette_mask(const PrimitiveScene& scene, RoleMask roles, const Intrinsics& intr,
                          const PoseSE3& camera_to_scene, std::size_t frame);

// Pixels of a full render whose nearest hit belongs to `roles`.
MaskImage visible_mask(const Render& full, const PrimitiveScene& scene, RoleMask roles);

// Pixels whose center or any of whose four corners sees `roles` as the
// nearest hit; a superset of visible_mask that also keeps partially covered
// boundary pixels.
MaskImage coverage_mask(const PrimitiveScene& scene, RoleMask roles, const Intrinsics& intr,
                        const PoseSE3& camera_to_scene, std::size_t frame);

// Displacement of every hit pixel between `frame` and `frame + 1` under the
// hit body's motion; zero elsewhere. The camera is static.
FlowField analytic_flow(const PrimitiveScene& scene, const Intrinsics& intr, const PoseSE3& camera_to_scene,
                        std::size_t frame);
FlowField analytic_flow(const Render& full, const PrimitiveScene& scene, const Intrinsics& intr,
                        const PoseSE3& camera_to_scene, std::size_t frame);

// Portable uniform draws from the standardised mt19937_64 engine.
double uniform01(std::mt19937_64& rng);
double standard_normal(std::mt19937_64& rng);

// Region for background splats: a spherical shell around `center` limited to
// z >= z_min.
struct BackgroundShell {
  Point3 center = Point3::Zero();
  double inner_radius = 0.25;
  double outer_radius = 0.45;
  double z_min = 0.0;
};

struct SplatSample {
  std::vector<GaussianSplat> splats;
  std::vector<std::size_t> object_indices;  // ascending
};

// Object splats lie on the surfaces of object-role bodies at `frame`,
// area-weighted; background splats fill the shell. Order is shuffled.
SplatSample sample_splats(const PrimitiveScene& scene, std::size_t n_object, std::size_t n_background,
                          std::uint64_t seed, const BackgroundShell& shell, std::size_t frame = 0);

// Regular sampling of the body's part surfaces in the body frame, with
// points buried inside another part of the same body dropped.
std::vector<Point3> surface_grid(const Body& body, double spacing);

inline constexpr double kContactSurfaceDistance = 0.005;

// Object-frame surface points of `object_body` lying within `tau` of any
// hand-role surface at some frame in [frame_begin, frame_end).
std::vector<Point3> ground_truth_contacts(const PrimitiveScene& scene, std::size_t object_body,
                                          std::size_t frame_begin, std::size_t frame_end,
                                          double tau = kContactSurfaceDistance, double spacing = 0.002);

}  // namespace demotrace::synth
