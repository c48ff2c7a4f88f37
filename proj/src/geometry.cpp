#include "demotrace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace demotrace {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kInvalidDepth: return "InvalidDepth";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kEmptyTrack: return "EmptyTrack";
    case ErrorCode::kEmptyReprojection: return "EmptyReprojection";
    case ErrorCode::kNoViews: return "NoViews";
    case ErrorCode::kMissingPose: return "MissingPose";
    case ErrorCode::kWrongFrameTag: return "WrongFrameTag";
    case ErrorCode::kFrameMismatch: return "FrameMismatch";
    case ErrorCode::kManifestInvalid: return "ManifestInvalid";
    case ErrorCode::kMissingInput: return "MissingInput";
    case ErrorCode::kNoContact: return "NoContact";
    case ErrorCode::kMissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::kUnknownStage: return "UnknownStage";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw Error(ErrorCode::kInvalidArgument, "principal point outside the image");
  }
}

PoseSE3 PoseSE3::from_matrix(const Mat4& m) {
  if (!m.allFinite()) throw Error(ErrorCode::kInvalidArgument, "pose contains non-finite values");
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "pose last row must be [0 0 0 1]");
  }
  PoseSE3 pose(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
  if (!pose.is_valid()) throw Error(ErrorCode::kInvalidArgument, "pose rotation is not in SO(3)");
  return pose;
}

Mat4 PoseSE3::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

bool PoseSE3::is_valid(double tol) const {
  if (!rotation_.allFinite() || !translation_.allFinite()) return false;
  const double ortho = (rotation_.transpose() * rotation_ - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(rotation_.determinant() - 1.0) <= tol;
}

Projection project(const Intrinsics& intr, const Point3& p) {
  if (!(p.z() > 0.0)) throw Error(ErrorCode::kNonPositiveDepth, "point is not in front of the camera");
  return {{intr.fx * p.x() / p.z() + intr.cx, intr.fy * p.y() / p.z() + intr.cy}, p.z()};
}

Point3 backproject(const Intrinsics& intr, const Pixel& px, double depth) {
  if (!std::isfinite(depth) || !(depth > 0.0)) {
    throw Error(ErrorCode::kInvalidDepth, "depth must be finite and positive");
  }
  return {(px.u - intr.cx) * depth / intr.fx, (px.v - intr.cy) * depth / intr.fy, depth};
}

PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
  return {a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation()};
}

PoseSE3 inverse(const PoseSE3& p) {
  const Mat3 rt = p.rotation().transpose();
  return {rt, -(rt * p.translation())};
}

Point3 transform_point(const PoseSE3& p, const Point3& x) { return p.rotation() * x + p.translation(); }

double geodesic_angle(const Mat3& a, const Mat3& b) {
  // atan2 of the skew and symmetric parts equals the clamped arccos form but
  // keeps full precision near 0 and π.
  const Mat3 r = a.transpose() * b;
  const double cos_theta = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const Vec3 skew(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double sin_theta = 0.5 * skew.norm();
  return std::clamp(std::atan2(sin_theta, cos_theta), 0.0, M_PI);
}

double camera_distance(const PoseSE3& a, const PoseSE3& b, double lambda) {
  return (a.translation() - b.translation()).norm() + lambda * geodesic_angle(a.rotation(), b.rotation());
}

PoseSE3 look_at(const Point3& eye, const Point3& target, const Vec3& up) {
  const Vec3 z = (target - eye).normalized();
  const Vec3 x = z.cross(up).normalized();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return {r, eye};
}

Mat3 rotation_about(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace demotrace
