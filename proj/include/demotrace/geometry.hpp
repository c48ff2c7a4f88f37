#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "demotrace/error.hpp"

namespace demotrace {

using Point3 = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Image coordinates: u rightward, v downward, origin at the top-left pixel
// center.
struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

// Pinhole intrinsics. No distortion model; inputs are assumed rectified.
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws kInvalidArgument unless fx, fy > 0 and the principal point lies
  // inside the image.
  void validate() const;

  bool operator==(const Intrinsics&) const = default;
};

// Rigid transform mapping points from the frame it describes into its parent
// frame (object-to-camera, camera-to-scene).
class PoseSE3 {
 public:
  PoseSE3() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  PoseSE3(const Mat3& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {}

  static PoseSE3 identity() { return {}; }

  // Validates orthonormality and det = +1 within 1e-9 and a [0 0 0 1] last
  // row; throws kInvalidArgument otherwise.
  static PoseSE3 from_matrix(const Mat4& m);
  Mat4 matrix() const;

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Mat3& rotation() { return rotation_; }
  Vec3& translation() { return translation_; }

  bool is_valid(double tol = 1e-9) const;

  bool operator==(const PoseSE3&) const = default;

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

struct Projection {
  Pixel pixel;
  double depth = 0.0;
};

// Throws kNonPositiveDepth if p.z() <= 0.
Projection project(const Intrinsics& intr, const Point3& p);

// Throws kInvalidDepth if depth is not finite and positive.
Point3 backproject(const Intrinsics& intr, const Pixel& px, double depth);

// a ∘ b: applies b first, then a.
PoseSE3 compose(const PoseSE3& a, const PoseSE3& b);
PoseSE3 inverse(const PoseSE3& p);
Point3 transform_point(const PoseSE3& p, const Point3& x);

// Geodesic distance on SO(3), in [0, π].
double geodesic_angle(const Mat3& a, const Mat3& b);

// ‖t_a − t_b‖ + lambda · geodesic_angle(R_a, R_b); lambda in m/rad.
double camera_distance(const PoseSE3& a, const PoseSE3& b, double lambda);

inline constexpr double kDefaultCameraLambda = 0.1;

// Camera-to-scene pose of an OpenCV-style camera (x right, y down, z forward)
// at `eye` looking at `target`. `up` must not be parallel to the view
// direction.
PoseSE3 look_at(const Point3& eye, const Point3& target, const Vec3& up);

Mat3 rotation_about(const Vec3& axis, double angle);

}  // namespace demotrace
