#include "demotrace/contact.hpp"

#include <algorithm>
#include <cmath>

#include "demotrace/parallel.hpp"

namespace demotrace {
namespace {

constexpr double kNanometersPerMeter = 1e9;

}  // namespace

ContactVoxelGrid::ContactVoxelGrid(double voxel_size, const Point3& origin)
    : voxel_size_(voxel_size), origin_(origin) {
  if (!(voxel_size > 0.0)) throw Error(ErrorCode::kInvalidArgument, "voxel size must be positive");
}

VoxelIndex ContactVoxelGrid::index_of(const Point3& p) const {
  const Vec3 q = (p - origin_) / voxel_size_;
  return {static_cast<std::int64_t>(std::floor(q.x())), static_cast<std::int64_t>(std::floor(q.y())),
          static_cast<std::int64_t>(std::floor(q.z()))};
}

void ContactVoxelGrid::add(const Point3& p) {
  Cell& cell = cells_[index_of(p)];
  ++cell.count;
  for (int k = 0; k < 3; ++k) cell.position_sum[k] += std::llround(p[k] * kNanometersPerMeter);
}

void ContactVoxelGrid::merge(const ContactVoxelGrid& other) {
  if (other.voxel_size_ != voxel_size_ || other.origin_ != origin_) {
    throw Error(ErrorCode::kInvalidArgument, "cannot merge grids with different layouts");
  }
  for (const auto& [idx, c] : other.cells_) {
    Cell& cell = cells_[idx];
    cell.count += c.count;
    for (int k = 0; k < 3; ++k) cell.position_sum[k] += c.position_sum[k];
  }
}

std::uint64_t ContactVoxelGrid::total_count() const {
  std::uint64_t total = 0;
  for (const auto& [idx, c] : cells_) total += c.count;
  return total;
}

std::uint64_t ContactVoxelGrid::count(const VoxelIndex& idx) const {
  const auto it = cells_.find(idx);
  return it == cells_.end() ? 0 : it->second.count;
}

Point3 ContactVoxelGrid::centroid(const VoxelIndex& idx) const {
  const Cell& c = cells_.at(idx);
  const double n = static_cast<double>(c.count) * kNanometersPerMeter;
  return {static_cast<double>(c.position_sum[0]) / n, static_cast<double>(c.position_sum[1]) / n,
          static_cast<double>(c.position_sum[2]) / n};
}

MaskImage contact_pixels(const DepthImage& sensor, const DepthImage& rendered, const MaskImage& hand, double tau_d) {
  if (!sensor.same_shape(rendered) || !sensor.same_shape(hand)) {
    throw Error(ErrorCode::kDimensionMismatch, "depth and hand mask dimensions differ");
  }
  if (!(tau_d > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau_d must be positive");
  MaskImage out(sensor.width(), sensor.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const float s = sensor.data()[i];
    const float r = rendered.data()[i];
    out.data()[i] = hand.data()[i] != 0 && is_valid_depth(s) && is_valid_depth(r) &&
                            std::abs(static_cast<double>(s) - static_cast<double>(r)) <= tau_d
                        ? 1
                        : 0;
  }
  return out;
}

std::optional<std::size_t> detect_contact_onset(const std::vector<std::size_t>& contact_counts,
                                                std::size_t min_pixels) {
  if (min_pixels < 1) throw Error(ErrorCode::kInvalidArgument, "min_pixels must be >= 1");
  for (std::size_t i = 0; i < contact_counts.size(); ++i) {
    if (contact_counts[i] >= min_pixels) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> detect_contact_onset(std::size_t frame_count,
                                                const std::function<ContactFrame(std::size_t)>& load, double tau_d,
                                                std::size_t min_pixels) {
  if (min_pixels < 1) throw Error(ErrorCode::kInvalidArgument, "min_pixels must be >= 1");
  for (std::size_t i = 0; i < frame_count; ++i) {
    const ContactFrame f = load(i);
    if (popcount(contact_pixels(f.sensor, f.rendered, f.hand, tau_d)) >= min_pixels) return i;
  }
  return std::nullopt;
}

ContactVoxelGrid frame_contacts(const ContactFrame& frame, const Intrinsics& intr, const PoseSE3& object_to_camera,
                                double tau_d, double voxel) {
  const MaskImage hits = contact_pixels(frame.sensor, frame.rendered, frame.hand, tau_d);
  if (hits.width() != intr.width || hits.height() != intr.height) {
    throw Error(ErrorCode::kDimensionMismatch, "contact frame does not match intrinsics");
  }
  const PoseSE3 camera_to_object = inverse(object_to_camera);
  ContactVoxelGrid grid(voxel);
  for (int v = 0; v < hits.height(); ++v) {
    for (int u = 0; u < hits.width(); ++u) {
      if (hits(u, v) == 0) continue;
      const Point3 p_cam =
          backproject(intr, {static_cast<double>(u), static_cast<double>(v)}, frame.rendered(u, v));
      grid.add(transform_point(camera_to_object, p_cam));
    }
  }
  return grid;
}

ContactVoxelGrid accumulate_contacts(std::size_t onset, std::size_t frame_count,
                                     const std::function<ContactFrame(std::size_t)>& load, const Intrinsics& intr,
                                     const std::map<std::size_t, PoseSE3>& object_to_camera,
                                     const ContactParams& params) {
  if (params.window < 1) throw Error(ErrorCode::kInvalidArgument, "accumulation window must be >= 1");
  const std::size_t end = std::min(frame_count, onset + params.window);
  const std::size_t n = end > onset ? end - onset : 0;
  for (std::size_t f = onset; f < end; ++f) {
    if (!object_to_camera.contains(f)) {
      throw Error(ErrorCode::kMissingPose, "no object pose for frame " + std::to_string(f));
    }
  }
  std::vector<ContactVoxelGrid> per_frame(n, ContactVoxelGrid(params.voxel));
  parallel_for(0, n, [&](std::size_t i) {
    const std::size_t f = onset + i;
    per_frame[i] = frame_contacts(load(f), intr, object_to_camera.at(f), params.tau_d, params.voxel);
  });
  ContactVoxelGrid grid(params.voxel);
  for (const ContactVoxelGrid& g : per_frame) grid.merge(g);
  return grid;
}

std::vector<ContactPoint> select_contacts(const ContactVoxelGrid& grid, std::size_t min_support,
                                          std::size_t max_points, const PoseSE3& object_to_scene) {
  if (min_support < 1 || max_points < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_support and max_points must be >= 1");
  }
  std::vector<std::pair<VoxelIndex, std::uint64_t>> kept;
  for (const auto& [idx, cell] : grid.cells()) {
    if (cell.count >= min_support) kept.emplace_back(idx, cell.count);
  }
  // cells() iterates in index order, so a stable sort keeps index ties ordered.
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (kept.size() > max_points) kept.resize(max_points);
  std::vector<ContactPoint> out;
  out.reserve(kept.size());
  for (const auto& [idx, count] : kept) {
    ContactPoint cp;
    cp.position_object = grid.centroid(idx);
    cp.position_scene = transform_point(object_to_scene, cp.position_object);
    cp.support = count;
    out.push_back(cp);
  }
  return out;
}

}  // namespace demotrace
