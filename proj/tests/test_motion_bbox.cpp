#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "demotrace/fixtures.hpp"
#include "demotrace/motion_bbox.hpp"
#include "demotrace/parallel.hpp"
#include "test_util.hpp"

using namespace demotrace;

namespace {

BBoxCandidate cand(std::size_t frame, int w, int h, int u0 = 0, int v0 = 0) {
  const BBox b{u0, v0, u0 + w - 1, v0 + h - 1};
  return {frame, b, b.area()};
}

// Clusters as sets of candidate positions, found by depth-first search over
// the explicit eps-link graph.
std::vector<std::set<std::size_t>> brute_clusters(const std::vector<BBoxCandidate>& c, double eps) {
  std::vector<int> label(c.size(), -1);
  std::vector<std::set<std::size_t>> out;
  for (std::size_t s = 0; s < c.size(); ++s) {
    if (label[s] >= 0) continue;
    std::set<std::size_t> members;
    std::vector<std::size_t> stack{s};
    label[s] = static_cast<int>(out.size());
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      members.insert(i);
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (label[j] >= 0) continue;
        if (std::hypot(c[i].width() - c[j].width(), c[i].height() - c[j].height()) <= eps) {
          label[j] = label[s];
          stack.push_back(j);
        }
      }
    }
    out.push_back(members);
  }
  return out;
}

std::set<std::size_t> frames_of(const SizeCluster& c) {
  std::set<std::size_t> f;
  for (const auto& m : c.members) f.insert(m.frame);
  return f;
}

bool subset(const MaskImage& a, const MaskImage& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.data()[i] && !b.data()[i]) return false;
  }
  return true;
}

}  // namespace

TEST(FrameMotionMask, ZeroFlowCases) {
  const FlowField flow(20, 10);
  const MaskImage empty(20, 10);
  EXPECT_EQ(popcount(frame_motion_mask(flow, empty, empty, 1.5, 2)), 0u);
  MaskImage hand(20, 10);
  hand(3, 4) = hand(4, 4) = 1;
  EXPECT_EQ(frame_motion_mask(flow, empty, hand, 1.5, 2), hand);
}

TEST(FrameMotionMask, OrderOfOperations) {
  // A thin moving strip survives neither the human removal nor the opening;
  // the hand is re-added afterwards regardless.
  FlowField flow(30, 30);
  MaskImage human(30, 30), hand(30, 30);
  for (int v = 5; v < 25; ++v) {
    for (int u = 5; u < 25; ++u) flow(u, v) = {3, 0};
  }
  for (int v = 0; v < 30; ++v) flow(27, v) = {3, 0};  // 1 px wide: removed by opening
  for (int v = 5; v < 25; ++v) {
    for (int u = 15; u < 25; ++u) human(u, v) = 1;
  }
  hand(20, 10) = 1;
  const MaskImage m = frame_motion_mask(flow, human, hand, 1.5, 2);
  EXPECT_EQ(m, mask_union(morphological_open(mask_subtract(flow_magnitude_mask(flow, 1.5), human), 2), hand));
  EXPECT_TRUE(m(20, 10));
  EXPECT_FALSE(m(27, 3));
  EXPECT_FALSE(m(18, 10));
  EXPECT_TRUE(m(10, 10));
  EXPECT_THROW(frame_motion_mask(flow, MaskImage(29, 30), hand, 1.5, 2), Error);
}

TEST(FrameMotionMask, OracleSceneWithHuman) {
  using namespace synth;
  const synth::TranslatingBox tb = make_translating_box(4);
  PrimitiveScene scene = tb.scene;
  Body person{"person", BodyRole::kHuman, {Capsule{{0, -0.3, 0}, {0, 0.3, 0}, 0.04}}, {}};
  Body hand{"hand", BodyRole::kHand, {Sphere{{0, 0, 0}, 0.015}}, {}};
  for (std::size_t f = 0; f < 4; ++f) {
    person.poses.push_back(PoseSE3(Mat3::Identity(), {-0.1 + 0.01 * f, 0.0, 0.85}));
    hand.poses.push_back(PoseSE3(Mat3::Identity(), {-0.1 + 0.01 * f, 0.05, 0.83}));
  }
  scene.bodies.push_back(person);
  scene.bodies.push_back(hand);
  const Render full = render(scene, tb.intrinsics, tb.camera, 1);
  const FlowField flow = analytic_flow(full, scene, tb.intrinsics, tb.camera, 1);
  const MaskImage human_m = visible_mask(full, scene, role_bit(BodyRole::kHuman));
  const MaskImage hand_m = visible_mask(full, scene, role_bit(BodyRole::kHand));
  const MaskImage box_m = visible_mask(full, scene, role_bit(BodyRole::kObject));
  const MaskImage m = frame_motion_mask(flow, human_m, hand_m, 1.5, 2);
  EXPECT_TRUE(subset(hand_m, m));
  EXPECT_TRUE(subset(morphological_open(box_m, 2), m));
  EXPECT_EQ(popcount(mask_intersect(m, mask_subtract(human_m, hand_m))), 0u);
}

TEST(CandidateBBox, LargestComponentWins) {
  MaskImage m(40, 20);
  EXPECT_FALSE(candidate_bbox(m, 0));
  for (int i = 0; i < 50; ++i) m(1 + i % 10, 1 + i / 10) = 1;   // 10×5 = 50
  for (int i = 0; i < 49; ++i) m(20 + i % 7, 10 + i / 7) = 1;  // 7×7 = 49
  const auto c = candidate_bbox(m, 12);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->frame, 12u);
  EXPECT_EQ(c->bbox, (BBox{1, 1, 10, 5}));
  EXPECT_EQ(c->area, 50);
}

TEST(CollectCandidates, StrideAndEmptyFrames) {
  std::vector<std::size_t> visited;
  auto load = [&](std::size_t f) {
    MotionFrame mf{FlowField(16, 16), MaskImage(16, 16), MaskImage(16, 16)};
    if (f % 12 == 0) mf.hand(f % 16, 3) = 1;
    return mf;
  };
  MotionParams p;
  p.stride = 6;
  const auto c = collect_candidates(60, load, p);
  EXPECT_LE(c.size(), 10u);
  EXPECT_EQ(c.size(), 5u);
  for (const auto& x : c) EXPECT_EQ(x.frame % 12, 0u);
  p.stride = 1;
  auto empty = [](std::size_t) { return MotionFrame{FlowField(8, 8), MaskImage(8, 8), MaskImage(8, 8)}; };
  EXPECT_TRUE(collect_candidates(30, empty, p).empty());
}

TEST(CollectCandidates, ThreadCountDoesNotMatter) {
  const synth::TranslatingBox tb = synth::make_translating_box(30);
  auto load = [&](std::size_t f) {
    const synth::Render full = synth::render(tb.scene, tb.intrinsics, tb.camera, f);
    return MotionFrame{synth::analytic_flow(full, tb.scene, tb.intrinsics, tb.camera, f), MaskImage(960, 720),
                       MaskImage(960, 720)};
  };
  MotionParams p;
  set_thread_count(1);
  const auto a = collect_candidates(29, load, p);
  set_thread_count(4);
  const auto b = collect_candidates(29, load, p);
  set_thread_count(0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].frame, b[i].frame);
    EXPECT_EQ(a[i].bbox, b[i].bbox);
    EXPECT_EQ(a[i].frame, 6 * i);
  }
}

TEST(ClusterBySize, Examples) {
  EXPECT_EQ(cluster_by_size({cand(0, 5, 5)}, 1.0).size(), 1u);
  std::vector<BBoxCandidate> c;
  for (std::size_t i = 0; i < 5; ++i) c.push_back(cand(i, 100, 100));
  c.push_back(cand(5, 10, 10));
  const auto clusters = cluster_by_size(c, 20);
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0].members.size(), 5u);
  EXPECT_EQ(clusters[0].centroid_width, 100);
  EXPECT_EQ(clusters[0].centroid_height, 100);
  EXPECT_EQ(clusters[1].members.size(), 1u);
}

TEST(ClusterBySize, ChainsLinkTransitively) {
  // Single linkage: 0-1 and 1-2 are within eps although 0-2 is not.
  const auto clusters = cluster_by_size({cand(0, 10, 10), cand(1, 18, 10), cand(2, 26, 10)}, 8.0);
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_DOUBLE_EQ(clusters[0].centroid_width, 18.0);
}

TEST(ClusterBySize, MatchesBruteForceOnRandomInputs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<BBoxCandidate> c;
    const int n = 1 + static_cast<int>(rng() % 25);
    for (int i = 0; i < n; ++i) {
      c.push_back(cand(static_cast<std::size_t>(i) * 6, 1 + static_cast<int>(rng() % 200),
                       1 + static_cast<int>(rng() % 200)));
    }
    const double eps = 5 + static_cast<double>(rng() % 60);
    const auto clusters = cluster_by_size(c, eps);
    const auto oracle = brute_clusters(c, eps);
    ASSERT_EQ(clusters.size(), oracle.size());
    std::set<std::set<std::size_t>> got, want;
    for (const auto& cl : clusters) got.insert(frames_of(cl));
    for (const auto& o : oracle) {
      std::set<std::size_t> f;
      for (std::size_t i : o) f.insert(c[i].frame);
      want.insert(f);
    }
    EXPECT_EQ(got, want);
    for (std::size_t i = 1; i < clusters.size(); ++i) {
      const auto& a = clusters[i - 1];
      const auto& b = clusters[i];
      EXPECT_TRUE(a.members.size() > b.members.size() ||
                  (a.members.size() == b.members.size() &&
                   std::pair(a.centroid_width, a.centroid_height) <= std::pair(b.centroid_width, b.centroid_height)));
    }
    for (const auto& cl : clusters) {
      double w = 0, h = 0;
      for (const auto& m : cl.members) {
        w += m.width();
        h += m.height();
      }
      EXPECT_NEAR(cl.centroid_width, w / cl.members.size(), 1e-9);
      EXPECT_NEAR(cl.centroid_height, h / cl.members.size(), 1e-9);
    }
  }
}

TEST(SelectPrompt, Examples) {
  EXPECT_THROW(select_prompt({}, 10), Error);
  EXPECT_EQ(select_prompt({cand(7, 3, 4)}, 10).frame, 7u);
  const auto p = select_prompt({cand(0, 98, 98), cand(6, 100, 100), cand(12, 104, 104)}, 10);
  EXPECT_EQ(p.frame, 6u);
}

TEST(SelectPrompt, TiesGoToLowestFrame) {
  const auto p = select_prompt({cand(18, 110, 100), cand(6, 90, 100), cand(12, 100, 90), cand(24, 100, 110)}, 30);
  EXPECT_EQ(p.frame, 6u);
}

TEST(SelectPrompt, AlwaysFromLargestCluster) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<BBoxCandidate> c;
    for (int i = 0; i < 5; ++i) c.push_back(cand(c.size(), 100 + rng() % 10, 60 + rng() % 10));
    for (int i = 0; i < 3; ++i) c.push_back(cand(c.size(), 20 + rng() % 10, 20 + rng() % 10));
    std::shuffle(c.begin(), c.end(), rng);
    const auto p = select_prompt(c, 20);
    EXPECT_GE(p.width(), 100);
    // Brute force over 5× scaled integer offsets from the big cluster's
    // centroid, so that exact ties are recognised.
    long long sw = 0, sh = 0;
    for (const auto& x : c) {
      if (x.width() >= 100) {
        sw += x.bbox.width();
        sh += x.bbox.height();
      }
    }
    long long best = -1;
    std::size_t best_frame = 0;
    for (const auto& x : c) {
      if (x.width() < 100) continue;
      const long long dw = 5 * x.bbox.width() - sw, dh = 5 * x.bbox.height() - sh;
      const long long d = dw * dw + dh * dh;
      if (best < 0 || d < best || (d == best && x.frame < best_frame)) {
        best = d;
        best_frame = x.frame;
      }
    }
    EXPECT_EQ(p.frame, best_frame);
  }
}

TEST(SelectPrompt, OutliersNeverChangeTheMajorityCluster) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);
    std::vector<BBoxCandidate> c;
    for (int i = 0; i < n; ++i) c.push_back(cand(c.size(), 200 + rng() % 20, 150 + rng() % 20));
    const double eps = 40;
    const auto base = cluster_by_size(c, eps);
    ASSERT_EQ(base.size(), 1u);
    const int outliers = (n + 1) / 2 - 1;
    for (int i = 0; i < outliers; ++i) c.push_back(cand(c.size(), 10 + rng() % 100, 10 + rng() % 80));
    const auto with = cluster_by_size(c, eps);
    EXPECT_EQ(frames_of(with.front()), frames_of(base.front()));
  }
}
