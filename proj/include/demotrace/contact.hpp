#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "demotrace/geometry.hpp"
#include "demotrace/imaging.hpp"

namespace demotrace {

using VoxelIndex = std::array<std::int64_t, 3>;

// Sparse count accumulator over object-frame voxels. Hit positions are summed
// in fixed point (1 nm) so merging is exact and order-independent.
class ContactVoxelGrid {
 public:
  struct Cell {
    std::uint64_t count = 0;
    std::array<std::int64_t, 3> position_sum{};  // nanometers

    bool operator==(const Cell&) const = default;
  };

  explicit ContactVoxelGrid(double voxel_size, const Point3& origin = Point3::Zero());

  double voxel_size() const { return voxel_size_; }
  const Point3& origin() const { return origin_; }

  VoxelIndex index_of(const Point3& p) const;
  void add(const Point3& p);
  void merge(const ContactVoxelGrid& other);

  std::uint64_t total_count() const;
  std::uint64_t count(const VoxelIndex& idx) const;
  Point3 centroid(const VoxelIndex& idx) const;
  const std::map<VoxelIndex, Cell>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }

  bool operator==(const ContactVoxelGrid&) const = default;

 private:
  double voxel_size_;
  Point3 origin_;
  std::map<VoxelIndex, Cell> cells_;
};

struct ContactPoint {
  Point3 position_object = Point3::Zero();
  Point3 position_scene = Point3::Zero();
  std::uint64_t support = 0;
};

struct ContactFrame {
  DepthImage sensor;
  DepthImage rendered;
  MaskImage hand;
};

struct ContactParams {
  double tau_d = 0.02;       // m
  std::size_t window = 10;   // frames accumulated from onset
  double voxel = 0.01;       // m
  std::size_t min_pixels = 10;
  std::optional<std::size_t> min_support;  // unset: ceil(window / 2)
  std::size_t max_points = 20;

  std::size_t effective_min_support() const { return min_support.value_or((window + 1) / 2); }
};

// hand ∧ both depths valid ∧ |sensor − rendered| <= tau_d.
MaskImage contact_pixels(const DepthImage& sensor, const DepthImage& rendered, const MaskImage& hand, double tau_d);

// First index whose count reaches min_pixels.
std::optional<std::size_t> detect_contact_onset(const std::vector<std::size_t>& contact_counts,
                                                std::size_t min_pixels);
std::optional<std::size_t> detect_contact_onset(std::size_t frame_count,
                                                const std::function<ContactFrame(std::size_t)>& load, double tau_d,
                                                std::size_t min_pixels);

// Lifts contact pixels of one frame with the rendered depth and maps them
// into the object frame.
ContactVoxelGrid frame_contacts(const ContactFrame& frame, const Intrinsics& intr, const PoseSE3& object_to_camera,
                                double tau_d, double voxel);

// Accumulates frames onset … onset + window − 1 (clipped to frame_count).
// Throws kMissingPose when a consumed frame has no object pose.
ContactVoxelGrid accumulate_contacts(std::size_t onset, std::size_t frame_count,
                                     const std::function<ContactFrame(std::size_t)>& load, const Intrinsics& intr,
                                     const std::map<std::size_t, PoseSE3>& object_to_camera,
                                     const ContactParams& params);

// Voxels with count >= min_support, by count descending then voxel index,
// truncated to max_points. position_scene applies `object_to_scene`.
std::vector<ContactPoint> select_contacts(const ContactVoxelGrid& grid, std::size_t min_support,
                                          std::size_t max_points,
                                          const PoseSE3& object_to_scene = PoseSE3::identity());

}  // namespace demotrace
