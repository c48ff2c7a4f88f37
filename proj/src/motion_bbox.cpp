#include "demotrace/motion_bbox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "demotrace/parallel.hpp"

namespace demotrace {

double default_cluster_eps(int width, int height) {
  return 0.05 * std::hypot(static_cast<double>(width), static_cast<double>(height));
}

MaskImage frame_motion_mask(const FlowField& flow, const MaskImage& human_mask, const MaskImage& hand_mask,
                            double tau_f, int open_radius) {
  if (!flow.same_shape(human_mask) || !flow.same_shape(hand_mask)) {
    throw Error(ErrorCode::kDimensionMismatch, "flow and mask dimensions differ");
  }
  const MaskImage moving = flow_magnitude_mask(flow, tau_f);
  return mask_union(morphological_open(mask_subtract(moving, human_mask), open_radius), hand_mask);
}

std::optional<BBoxCandidate> candidate_bbox(const MaskImage& motion_mask, std::size_t frame) {
  const ComponentSet comps = connected_components(motion_mask);
  if (comps.components.empty()) return std::nullopt;
  const BBox box = comps.components.front().bbox;
  return BBoxCandidate{frame, box, box.area()};
}

std::vector<BBoxCandidate> collect_candidates(std::size_t frame_count,
                                              const std::function<MotionFrame(std::size_t)>& load,
                                              const MotionParams& params) {
  if (params.stride < 1) throw Error(ErrorCode::kInvalidArgument, "stride must be >= 1");
  const std::size_t stride = static_cast<std::size_t>(params.stride);
  const std::size_t visits = frame_count == 0 ? 0 : (frame_count - 1) / stride + 1;
  std::vector<std::optional<BBoxCandidate>> slots(visits);
  parallel_for(0, visits, [&](std::size_t i) {
    const std::size_t frame = i * stride;
    const MotionFrame f = load(frame);
    slots[i] = candidate_bbox(frame_motion_mask(f.flow, f.human, f.hand, params.tau_f, params.open_radius), frame);
  });
  std::vector<BBoxCandidate> out;
  for (auto& s : slots) {
    if (s) out.push_back(*s);
  }
  return out;
}

std::vector<SizeCluster> cluster_by_size(const std::vector<BBoxCandidate>& candidates, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  const std::size_t n = candidates.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::hypot(candidates[i].width() - candidates[j].width(),
                                  candidates[i].height() - candidates[j].height());
      if (d <= eps) {
        const std::size_t a = find(i);
        const std::size_t b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  std::vector<SizeCluster> clusters;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(slot[root])].members.push_back(candidates[i]);
  }
  for (SizeCluster& c : clusters) {
    double w = 0.0;
    double h = 0.0;
    for (const BBoxCandidate& m : c.members) {
      w += m.width();
      h += m.height();
    }
    c.centroid_width = w / static_cast<double>(c.members.size());
    c.centroid_height = h / static_cast<double>(c.members.size());
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const SizeCluster& a, const SizeCluster& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    if (a.centroid_width != b.centroid_width) return a.centroid_width < b.centroid_width;
    return a.centroid_height < b.centroid_height;
  });
  return clusters;
}

BBoxCandidate select_prompt(const std::vector<BBoxCandidate>& candidates, double eps) {
  if (candidates.empty()) throw Error(ErrorCode::kNoCandidates, "no bounding-box candidates");
  const SizeCluster biggest = cluster_by_size(candidates, eps).front();
  // Distances scaled by the member count stay integral, so ties are exact.
  long long sum_w = 0, sum_h = 0;
  for (const BBoxCandidate& m : biggest.members) {
    sum_w += m.bbox.width();
    sum_h += m.bbox.height();
  }
  const auto n = static_cast<long long>(biggest.members.size());
  const BBoxCandidate* best = nullptr;
  long long best_dist = 0;
  for (const BBoxCandidate& m : biggest.members) {
    const long long dw = n * m.bbox.width() - sum_w;
    const long long dh = n * m.bbox.height() - sum_h;
    const long long d = dw * dw + dh * dh;
    if (best == nullptr || d < best_dist || (d == best_dist && m.frame < best->frame)) {
      best = &m;
      best_dist = d;
    }
  }
  return *best;
}

}  // namespace demotrace
