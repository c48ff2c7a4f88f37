#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "demotrace/imaging.hpp"

namespace demotrace {

// A bounding box proposed by one demonstration frame.
struct BBoxCandidate {
  std::size_t frame = 0;
  BBox bbox;
  long long area = 0;  // bbox.area()

  double width() const { return bbox.width(); }
  double height() const { return bbox.height(); }
};

struct SizeCluster {
  std::vector<BBoxCandidate> members;  // input order
  double centroid_width = 0.0;
  double centroid_height = 0.0;
};

struct MotionParams {
  double tau_f = 1.5;   // px
  int open_radius = 2;  // px
  int stride = 6;
  std::optional<double> eps;  // px; unset means 0.05 × image diagonal
};

double default_cluster_eps(int width, int height);

// open(flow_magnitude_mask(flow, tau_f) ∖ human, k) ∪ hand.
MaskImage frame_motion_mask(const FlowField& flow, const MaskImage& human_mask, const MaskImage& hand_mask,
                            double tau_f, int open_radius);

// Tight bbox of the largest connected component, or nothing for an empty
// mask.
std::optional<BBoxCandidate> candidate_bbox(const MaskImage& motion_mask, std::size_t frame);

struct MotionFrame {
  FlowField flow;
  MaskImage human;
  MaskImage hand;
};

// Visits frames 0, stride, 2·stride, … below frame_count; frames whose motion
// mask is empty contribute nothing. `load` may be called concurrently.
std::vector<BBoxCandidate> collect_candidates(std::size_t frame_count,
                                              const std::function<MotionFrame(std::size_t)>& load,
                                              const MotionParams& params);

// Connected components of the graph linking candidates whose (width, height)
// lie within eps. Ordered by member count descending, then smaller centroid
// width, then height.
std::vector<SizeCluster> cluster_by_size(const std::vector<BBoxCandidate>& candidates, double eps);

// Member of the largest cluster closest to that cluster's centroid; ties go
// to the lower frame index. Throws kNoCandidates on empty input.
BBoxCandidate select_prompt(const std::vector<BBoxCandidate>& candidates, double eps);

}  // namespace demotrace
