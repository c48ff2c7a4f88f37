#include "demotrace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "demotrace/parallel.hpp"

namespace demotrace::synth {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::optional<double> intersect_sphere(const Point3& c, double r, const Point3& o, const Vec3& d, double t_min) {
  const Vec3 oc = o - c;
  const double a = d.squaredNorm();
  const double b = oc.dot(d);
  const double cc = oc.squaredNorm() - r * r;
  const double disc = b * b - a * cc;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double t0 = (-b - s) / a;
  if (t0 > t_min) return t0;
  const double t1 = (-b + s) / a;
  if (t1 > t_min) return t1;
  return std::nullopt;
}

// Tests the six face rectangles in the box frame.
std::optional<double> intersect_box(const Box& box, const Point3& o, const Vec3& d, double t_min) {
  const Vec3 lo = box.rotation.transpose() * (o - box.center);
  const Vec3 ld = box.rotation.transpose() * d;
  const Vec3& h = box.half_extents;
  const double slack = 1e-12 * h.maxCoeff();
  double best = kInf;
  for (int k = 0; k < 3; ++k) {
    if (ld[k] == 0.0) continue;
    for (double side : {-1.0, 1.0}) {
      const double t = (side * h[k] - lo[k]) / ld[k];
      if (!(t > t_min) || t >= best) continue;
      const Vec3 p = lo + t * ld;
      const int j = (k + 1) % 3;
      const int l = (k + 2) % 3;
      if (std::abs(p[j]) <= h[j] + slack && std::abs(p[l]) <= h[l] + slack) best = t;
    }
  }
  if (best == kInf) return std::nullopt;
  return best;
}

std::optional<double> intersect_capsule(const Capsule& cap, const Point3& o, const Vec3& d, double t_min) {
  double best = kInf;
  const Vec3 ba = cap.b - cap.a;
  const Vec3 oa = o - cap.a;
  const double baba = ba.squaredNorm();
  const double bard = ba.dot(d);
  const double baoa = ba.dot(oa);
  const double qa = baba * d.squaredNorm() - bard * bard;
  const double qb = baba * oa.dot(d) - baoa * bard;
  const double qc = baba * oa.squaredNorm() - baoa * baoa - cap.radius * cap.radius * baba;
  if (qa > 0.0) {
    const double disc = qb * qb - qa * qc;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      for (double t : {(-qb - s) / qa, (-qb + s) / qa}) {
        const double y = baoa + t * bard;
        if (t > t_min && y > 0.0 && y < baba) {
          best = std::min(best, t);
          break;
        }
      }
    }
  }
  for (const Point3& end : {cap.a, cap.b}) {
    if (auto t = intersect_sphere(end, cap.radius, o, d, t_min)) best = std::min(best, *t);
  }
  if (best == kInf) return std::nullopt;
  return best;
}

double segment_distance(const Point3& a, const Point3& b, const Point3& p) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

struct BoundingSphere {
  Point3 center = Point3::Zero();
  double radius = 0.0;
};

BoundingSphere part_bounds(const Primitive& prim) {
  return std::visit(Overloaded{
                        [](const Sphere& s) { return BoundingSphere{s.center, s.radius}; },
                        [](const Box& b) { return BoundingSphere{b.center, b.half_extents.norm()}; },
                        [](const Capsule& c) {
                          return BoundingSphere{0.5 * (c.a + c.b), 0.5 * (c.b - c.a).norm() + c.radius};
                        },
                    },
                    prim);
}

BoundingSphere body_bounds(const Body& body) {
  if (body.parts.empty()) return {};
  Point3 c = Point3::Zero();
  for (const Primitive& p : body.parts) c += part_bounds(p).center;
  c /= static_cast<double>(body.parts.size());
  double r = 0.0;
  for (const Primitive& p : body.parts) {
    const BoundingSphere b = part_bounds(p);
    r = std::max(r, (b.center - c).norm() + b.radius);
  }
  return {c, r};
}

// Per-body ray setup for one render: body-frame camera center, the matrix
// mapping camera-frame ray directions into the body frame, and a conservative
// pixel rectangle outside of which the body cannot be hit.
struct BodyView {
  std::size_t index = 0;
  Point3 origin;
  Mat3 dir_to_body;
  int u0 = 0, u1 = -1, v0 = 0, v1 = -1;
};

std::vector<BodyView> prepare_views(const PrimitiveScene& scene, const Intrinsics& intr,
                                    const PoseSE3& camera_to_scene, std::size_t frame, RoleMask roles) {
  std::vector<BodyView> views;
  const PoseSE3 scene_to_camera = inverse(camera_to_scene);
  for (std::size_t i = 0; i < scene.bodies.size(); ++i) {
    const Body& body = scene.bodies[i];
    if ((role_bit(body.role) & roles) == 0 || body.parts.empty()) continue;
    const PoseSE3& pose = body.pose(frame);
    BodyView v;
    v.index = i;
    v.origin = pose.rotation().transpose() * (camera_to_scene.translation() - pose.translation());
    v.dir_to_body = pose.rotation().transpose() * camera_to_scene.rotation();

    const BoundingSphere bs = body_bounds(body);
    const Point3 c = transform_point(scene_to_camera, transform_point(pose, bs.center));
    const double r = bs.radius * (1.0 + 1e-9) + 1e-9;
    if (c.z() - r <= 1e-6) {
      v.u0 = 0;
      v.u1 = intr.width - 1;
      v.v0 = 0;
      v.v1 = intr.height - 1;
    } else {
      const double zn = c.z() - r;
      const double zf = c.z() + r;
      const double xl = std::min((c.x() - r) / zn, (c.x() - r) / zf);
      const double xh = std::max((c.x() + r) / zn, (c.x() + r) / zf);
      const double yl = std::min((c.y() - r) / zn, (c.y() - r) / zf);
      const double yh = std::max((c.y() + r) / zn, (c.y() + r) / zf);
      v.u0 = std::max(0, static_cast<int>(std::floor(intr.fx * xl + intr.cx)) - 1);
      v.u1 = std::min(intr.width - 1, static_cast<int>(std::ceil(intr.fx * xh + intr.cx)) + 1);
      v.v0 = std::max(0, static_cast<int>(std::floor(intr.fy * yl + intr.cy)) - 1);
      v.v1 = std::min(intr.height - 1, static_cast<int>(std::ceil(intr.fy * yh + intr.cy)) + 1);
    }
    if (v.u0 <= v.u1 && v.v0 <= v.v1) views.push_back(v);
  }
  return views;
}

struct Hit {
  double t = kInf;
  int body = -1;
};

}  // namespace

double signed_distance(const Primitive& prim, const Point3& p) {
  return std::visit(Overloaded{
                        [&](const Sphere& s) { return (p - s.center).norm() - s.radius; },
                        [&](const Box& b) {
                          const Vec3 q = (b.rotation.transpose() * (p - b.center)).cwiseAbs() - b.half_extents;
                          return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
                        },
                        [&](const Capsule& c) { return segment_distance(c.a, c.b, p) - c.radius; },
                    },
                    prim);
}

double surface_area(const Primitive& prim) {
  return std::visit(Overloaded{
                        [](const Sphere& s) { return 4.0 * M_PI * s.radius * s.radius; },
                        [](const Box& b) {
                          const Vec3& h = b.half_extents;
                          return 8.0 * (h.x() * h.y() + h.y() * h.z() + h.x() * h.z());
                        },
                        [](const Capsule& c) {
                          return 2.0 * M_PI * c.radius * (c.b - c.a).norm() + 4.0 * M_PI * c.radius * c.radius;
                        },
                    },
                    prim);
}

std::optional<double> intersect(const Primitive& prim, const Point3& origin, const Vec3& dir, double t_min) {
  return std::visit(Overloaded{
                        [&](const Sphere& s) { return intersect_sphere(s.center, s.radius, origin, dir, t_min); },
                        [&](const Box& b) { return intersect_box(b, origin, dir, t_min); },
                        [&](const Capsule& c) { return intersect_capsule(c, origin, dir, t_min); },
                    },
                    prim);
}

void PrimitiveScene::validate() const {
  if (frame_count < 1) throw Error(ErrorCode::kInvalidArgument, "scene needs at least one frame");
  if (bodies.size() > static_cast<std::size_t>(std::numeric_limits<std::int16_t>::max())) {
    throw Error(ErrorCode::kInvalidArgument, "too many bodies");
  }
  for (const Body& body : bodies) {
    if (body.poses.size() != 1 && body.poses.size() < frame_count) {
      throw Error(ErrorCode::kInvalidArgument, "body '" + body.name + "' lacks a pose schedule for every frame");
    }
    for (const Primitive& prim : body.parts) {
      const bool ok = std::visit(Overloaded{
                                     [](const Sphere& s) { return s.radius > 0.0; },
                                     [](const Box& b) { return (b.half_extents.array() > 0.0).all(); },
                                     [](const Capsule& c) { return c.radius > 0.0; },
                                 },
                                 prim);
      if (!ok) throw Error(ErrorCode::kInvalidArgument, "body '" + body.name + "' has a degenerate primitive");
    }
  }
}

Body make_hinged_panel(std::string name, BodyRole role, const Box& panel, const Point3& hinge_point,
                       const Vec3& hinge_axis, const std::vector<double>& angles) {
  Body body;
  body.name = std::move(name);
  body.role = role;
  body.parts.push_back(Box{Point3::Zero(), panel.half_extents, Mat3::Identity()});
  const PoseSE3 rest(panel.rotation, panel.center);
  for (double angle : angles) {
    const Mat3 r = rotation_about(hinge_axis, angle);
    body.poses.emplace_back(r * rest.rotation(), r * (rest.translation() - hinge_point) + hinge_point);
  }
  if (body.poses.empty()) body.poses.push_back(rest);
  return body;
}

Render render(const PrimitiveScene& scene, const Intrinsics& intr, const PoseSE3& camera_to_scene, std::size_t frame,
              RoleMask roles) {
  intr.validate();
  const std::vector<BodyView> views = prepare_views(scene, intr, camera_to_scene, frame, roles);
  Render out{DepthImage(intr.width, intr.height, kInvalidDepth), Image<std::int16_t>(intr.width, intr.height, -1)};
  parallel_for(0, static_cast<std::size_t>(intr.height), [&](std::size_t row) {
    const int v = static_cast<int>(row);
    const double y = (v - intr.cy) / intr.fy;
    for (int u = 0; u < intr.width; ++u) {
      // Camera-frame direction with unit z, so the hit parameter is depth.
      const Vec3 dir_cam((u - intr.cx) / intr.fx, y, 1.0);
      Hit hit;
      for (const BodyView& bv : views) {
        if (u < bv.u0 || u > bv.u1 || v < bv.v0 || v > bv.v1) continue;
        const Vec3 d = bv.dir_to_body * dir_cam;
        for (const Primitive& prim : scene.bodies[bv.index].parts) {
          if (auto t = intersect(prim, bv.origin, d); t && *t < hit.t) {
            hit.t = *t;
            hit.body = static_cast<int>(bv.index);
          }
        }
      }
      if (hit.body >= 0) {
        out.depth(u, v) = static_cast<float>(hit.t);
        out.body(u, v) = static_cast<std::int16_t>(hit.body);
      }
    }
  });
  return out;
}

void add_depth_noise(DepthImage& depth, const DepthNoise& noise, std::size_t frame) {
  if (!(noise.sigma > 0.0)) return;
  parallel_for(0, static_cast<std::size_t>(depth.height()), [&](std::size_t row) {
    std::seed_seq seq{static_cast<std::uint32_t>(noise.seed), static_cast<std::uint32_t>(noise.seed >> 32),
                      static_cast<std::uint32_t>(frame), static_cast<std::uint32_t>(row)};
    std::mt19937_64 rng(seq);
    float* r = depth.row(static_cast<int>(row));
    for (int u = 0; u < depth.width(); ++u) {
      const double n = standard_normal(rng);
      if (!is_valid_depth(r[u])) continue;
      const float noisy = static_cast<float>(r[u] + noise.sigma * n);
      r[u] = noisy > 0.0f ? noisy : kInvalidDepth;
    }
  });
}

DepthImage raycast_depth(const PrimitiveScene& scene, const Intrinsics& intr, const PoseSE3& camera_to_scene,
                         std::size_t frame, RoleMask roles, const DepthNoise& noise) {
  DepthImage depth = render(scene, intr, camera_to_scene, frame, roles).depth;
  add_depth_noise(depth, noise, frame);
  return depth;
}

MaskImage silhouette_mask(const PrimitiveScene& scene, RoleMask roles, const Intrinsics& intr,
                          const PoseSE3& camera_to_scene, std::size_t frame) {
  const Render r = render(scene, intr, camera_to_scene, frame, roles);
  MaskImage m(intr.width, intr.height);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = r.body.data()[i] >= 0 ? 1 : 0;
  return m;
}

MaskImage visible_mask(const Render& full, const PrimitiveScene& scene, RoleMask roles) {
  MaskImage m(full.body.width(), full.body.height());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const int b = full.body.data()[i];
    m.data()[i] = b >= 0 && (role_bit(scene.bodies[static_cast<std::size_t>(b)].role) & roles) != 0 ? 1 : 0;
  }
  return m;
}

MaskImage coverage_mask(const PrimitiveScene& scene, RoleMask roles, const Intrinsics& intr,
                        const PoseSE3& camera_to_scene, std::size_t frame) {
  MaskImage m = visible_mask(render(scene, intr, camera_to_scene, frame), scene, roles);
  // Corner (i, j) sits at pixel coordinate (i − ½, j − ½).
  Intrinsics corners = intr;
  corners.cx += 0.5;
  corners.cy += 0.5;
  corners.width += 1;
  corners.height += 1;
  const MaskImage c = visible_mask(render(scene, corners, camera_to_scene, frame), scene, roles);
  for (int v = 0; v < m.height(); ++v) {
    for (int u = 0; u < m.width(); ++u) {
      m(u, v) |= c(u, v) | c(u + 1, v) | c(u, v + 1) | c(u + 1, v + 1);
    }
  }
  return m;
}

FlowField analytic_flow(const PrimitiveScene& scene, const Intrinsics& intr, const PoseSE3& camera_to_scene,
                        std::size_t frame) {
  return analytic_flow(render(scene, intr, camera_to_scene, frame), scene, intr, camera_to_scene, frame);
}

FlowField analytic_flow(const Render& full, const PrimitiveScene& scene, const Intrinsics& intr,
                        const PoseSE3& camera_to_scene, std::size_t frame) {
  if (frame + 1 >= scene.frame_count) {
    throw Error(ErrorCode::kInvalidArgument, "flow needs frame + 1 inside the schedule");
  }
  // For each body: camera frame at t  ->  camera frame at t+1 under its motion.
  const PoseSE3 scene_to_camera = inverse(camera_to_scene);
  std::vector<PoseSE3> motion;
  std::vector<bool> still;
  motion.reserve(scene.bodies.size());
  for (const Body& b : scene.bodies) {
    still.push_back(b.pose(frame + 1) == b.pose(frame));
    motion.push_back(compose(scene_to_camera,
                             compose(b.pose(frame + 1), compose(inverse(b.pose(frame)), camera_to_scene))));
  }
  FlowField flow(intr.width, intr.height);
  parallel_for(0, static_cast<std::size_t>(intr.height), [&](std::size_t row) {
    const int v = static_cast<int>(row);
    for (int u = 0; u < intr.width; ++u) {
      const int b = full.body(u, v);
      if (b < 0 || still[static_cast<std::size_t>(b)]) continue;
      const Point3 p = backproject(intr, {static_cast<double>(u), static_cast<double>(v)}, full.depth(u, v));
      const Point3 q = transform_point(motion[static_cast<std::size_t>(b)], p);
      if (!(q.z() > 0.0)) continue;
      const Projection proj = project(intr, q);
      flow(u, v) = {static_cast<float>(proj.pixel.u - u), static_cast<float>(proj.pixel.v - v)};
    }
  });
  return flow;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {

Vec3 random_unit_vector(std::mt19937_64& rng) {
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double phi = 2.0 * M_PI * uniform01(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

Point3 random_surface_point(const Primitive& prim, std::mt19937_64& rng) {
  return std::visit(
      Overloaded{
          [&](const Sphere& s) -> Point3 { return s.center + s.radius * random_unit_vector(rng); },
          [&](const Box& b) -> Point3 {
            const Vec3& h = b.half_extents;
            const double areas[3] = {h.y() * h.z(), h.x() * h.z(), h.x() * h.y()};
            double pick = uniform01(rng) * (areas[0] + areas[1] + areas[2]);
            int axis = 0;
            while (axis < 2 && pick >= areas[axis]) pick -= areas[axis++];
            Vec3 q;
            for (int k = 0; k < 3; ++k) q[k] = (2.0 * uniform01(rng) - 1.0) * h[k];
            q[axis] = uniform01(rng) < 0.5 ? -h[axis] : h[axis];
            return b.center + b.rotation * q;
          },
          [&](const Capsule& c) -> Point3 {
            const Vec3 axis = c.b - c.a;
            const double len = axis.norm();
            const double side = 2.0 * M_PI * c.radius * len;
            const double caps = 4.0 * M_PI * c.radius * c.radius;
            if (uniform01(rng) * (side + caps) < side) {
              const Vec3 n = axis / len;
              const Vec3 e1 = n.unitOrthogonal();
              const Vec3 e2 = n.cross(e1);
              const double phi = 2.0 * M_PI * uniform01(rng);
              return c.a + uniform01(rng) * axis + c.radius * (std::cos(phi) * e1 + std::sin(phi) * e2);
            }
            const Vec3 dir = random_unit_vector(rng);
            const bool at_b = dir.dot(axis) > 0.0;
            return (at_b ? c.b : c.a) + c.radius * dir;
          },
      },
      prim);
}

Eigen::Vector4d random_quaternion(std::mt19937_64& rng) {
  Eigen::Vector4d q(standard_normal(rng), standard_normal(rng), standard_normal(rng), standard_normal(rng));
  const double n = q.norm();
  return n > 0.0 ? Eigen::Vector4d(q / n) : Eigen::Vector4d(1, 0, 0, 0);
}

GaussianSplat make_splat(const Point3& mean, std::mt19937_64& rng) {
  GaussianSplat s;
  s.mean = mean;
  s.scale = Vec3(0.002 + 0.004 * uniform01(rng), 0.002 + 0.004 * uniform01(rng), 0.002 + 0.004 * uniform01(rng));
  s.orientation = random_quaternion(rng);
  s.opacity = 0.5 + 0.5 * uniform01(rng);
  return s;
}

std::vector<Point3> fibonacci_sphere(const Point3& c, double r, std::size_t n) {
  std::vector<Point3> pts;
  pts.reserve(n);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    pts.push_back(c + r * Vec3(s * std::cos(phi), s * std::sin(phi), z));
  }
  return pts;
}

std::vector<Point3> primitive_grid(const Primitive& prim, double spacing) {
  std::vector<Point3> pts;
  std::visit(Overloaded{
                 [&](const Sphere& s) {
                   const auto n = static_cast<std::size_t>(std::ceil(surface_area(s) / (spacing * spacing)));
                   pts = fibonacci_sphere(s.center, s.radius, std::max<std::size_t>(n, 1));
                 },
                 [&](const Box& b) {
                   const Vec3& h = b.half_extents;
                   for (int axis = 0; axis < 3; ++axis) {
                     const int j = (axis + 1) % 3;
                     const int l = (axis + 2) % 3;
                     const int nj = std::max(1, static_cast<int>(std::ceil(2.0 * h[j] / spacing)));
                     const int nl = std::max(1, static_cast<int>(std::ceil(2.0 * h[l] / spacing)));
                     for (double side : {-1.0, 1.0}) {
                       for (int a = 0; a < nj; ++a) {
                         for (int c = 0; c < nl; ++c) {
                           Vec3 q;
                           q[axis] = side * h[axis];
                           q[j] = -h[j] + (a + 0.5) * 2.0 * h[j] / nj;
                           q[l] = -h[l] + (c + 0.5) * 2.0 * h[l] / nl;
                           pts.push_back(b.center + b.rotation * q);
                         }
                       }
                     }
                   }
                 },
                 [&](const Capsule& c) {
                   const Vec3 axis = c.b - c.a;
                   const double len = axis.norm();
                   const Vec3 n = axis / len;
                   const Vec3 e1 = n.unitOrthogonal();
                   const Vec3 e2 = n.cross(e1);
                   const int nl = std::max(1, static_cast<int>(std::ceil(len / spacing)));
                   const int nc = std::max(3, static_cast<int>(std::ceil(2.0 * M_PI * c.radius / spacing)));
                   for (int i = 0; i < nl; ++i) {
                     for (int k = 0; k < nc; ++k) {
                       const double phi = 2.0 * M_PI * k / nc;
                       pts.push_back(c.a + (i + 0.5) / nl * axis +
                                     c.radius * (std::cos(phi) * e1 + std::sin(phi) * e2));
                     }
                   }
                   const auto ns =
                       static_cast<std::size_t>(std::ceil(4.0 * M_PI * c.radius * c.radius / (spacing * spacing)));
                   for (const Point3& p : fibonacci_sphere(Point3::Zero(), c.radius, std::max<std::size_t>(ns, 2))) {
                     pts.push_back((p.dot(n) > 0.0 ? c.b : c.a) + p);
                   }
                 },
             },
             prim);
  return pts;
}

}  // namespace

SplatSample sample_splats(const PrimitiveScene& scene, std::size_t n_object, std::size_t n_background,
                          std::uint64_t seed, const BackgroundShell& shell, std::size_t frame) {
  if (!(shell.inner_radius >= 0.0 && shell.outer_radius > shell.inner_radius)) {
    throw Error(ErrorCode::kInvalidArgument, "background shell radii are inconsistent");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::pair<const Body*, const Primitive*>> parts;
  std::vector<double> cumulative;
  double total = 0.0;
  for (const Body& body : scene.bodies) {
    if (body.role != BodyRole::kObject) continue;
    for (const Primitive& prim : body.parts) {
      parts.emplace_back(&body, &prim);
      total += surface_area(prim);
      cumulative.push_back(total);
    }
  }
  if (n_object > 0 && parts.empty()) throw Error(ErrorCode::kInvalidArgument, "scene has no object surfaces");

  std::vector<std::pair<GaussianSplat, bool>> all;
  all.reserve(n_object + n_background);
  for (std::size_t i = 0; i < n_object; ++i) {
    const double pick = uniform01(rng) * total;
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin()),
        parts.size() - 1);
    const Point3 local = random_surface_point(*parts[k].second, rng);
    all.emplace_back(make_splat(transform_point(parts[k].first->pose(frame), local), rng), true);
  }
  const double r3_in = std::pow(shell.inner_radius, 3.0);
  const double r3_out = std::pow(shell.outer_radius, 3.0);
  for (std::size_t i = 0; i < n_background; ++i) {
    Point3 p;
    do {
      const double r = std::cbrt(r3_in + uniform01(rng) * (r3_out - r3_in));
      p = shell.center + r * random_unit_vector(rng);
    } while (p.z() < shell.z_min);
    all.emplace_back(make_splat(p, rng), false);
  }
  for (std::size_t i = all.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(all[i - 1], all[std::min(j, i - 1)]);
  }
  SplatSample out;
  out.splats.reserve(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    out.splats.push_back(all[i].first);
    if (all[i].second) out.object_indices.push_back(i);
  }
  return out;
}

std::vector<Point3> surface_grid(const Body& body, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid spacing must be positive");
  std::vector<Point3> out;
  for (std::size_t i = 0; i < body.parts.size(); ++i) {
    for (const Point3& p : primitive_grid(body.parts[i], spacing)) {
      bool buried = false;
      for (std::size_t j = 0; j < body.parts.size() && !buried; ++j) {
        buried = j != i && signed_distance(body.parts[j], p) < -1e-9;
      }
      if (!buried) out.push_back(p);
    }
  }
  return out;
}

std::vector<Point3> ground_truth_contacts(const PrimitiveScene& scene, std::size_t object_body,
                                          std::size_t frame_begin, std::size_t frame_end, double tau, double spacing) {
  const Body& object = scene.bodies.at(object_body);
  const std::vector<Point3> surface = surface_grid(object, spacing);
  std::vector<std::uint8_t> touched(surface.size(), 0);
  for (std::size_t f = frame_begin; f < std::min(frame_end, scene.frame_count); ++f) {
    const PoseSE3 scene_to_object = inverse(object.pose(f));
    for (const Body& hand : scene.bodies) {
      if (hand.role != BodyRole::kHand) continue;
      const PoseSE3 hand_to_object = compose(scene_to_object, hand.pose(f));
      const PoseSE3 object_to_hand = inverse(hand_to_object);
      for (std::size_t i = 0; i < surface.size(); ++i) {
        if (touched[i]) continue;
        const Point3 q = transform_point(object_to_hand, surface[i]);
        for (const Primitive& prim : hand.parts) {
          if (signed_distance(prim, q) <= tau) {
            touched[i] = 1;
            break;
          }
        }
      }
    }
  }
  std::vector<Point3> out;
  for (std::size_t i = 0; i < surface.size(); ++i) {
    if (touched[i]) out.push_back(surface[i]);
  }
  return out;
}

}  // namespace demotrace::synth
