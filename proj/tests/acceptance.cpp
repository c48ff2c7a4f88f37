// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "demotrace/fixtures.hpp"
#include "demotrace/parallel.hpp"
#include "demotrace/pipeline.hpp"
#include "demotrace/trajectory.hpp"
#include "test_util.hpp"

using namespace demotrace;
using namespace demotrace::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s (%s)\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  const Intrinsics intr = synth::default_intrinsics();
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Point3 p(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, 0.05, 10));
    const Projection pr = project(intr, p);
    worst = std::max(worst, (backproject(intr, pr.pixel, pr.depth) - p).norm());

    const PoseSE3 a = random_pose(rng, 3.0);
    const Point3 x = random_vec(rng, 3.0);
    worst = std::max(worst, (transform_point(compose(inverse(a), a), x) - x).norm());
    worst = std::max(worst, pose_gap(compose(a, inverse(a)), PoseSE3::identity()));
  }
  const double t = seconds_since(t0);
  report(1, worst < 1e-9 && t < 5.0, fmt("max error %.3g, %.2f s", worst, t));
}

// ---------------------------------------------------------------------------

BBox analytic_box_bbox(const synth::TranslatingBox& tb, std::size_t frame) {
  const auto& body = tb.scene.bodies.at(0);
  const auto& box = std::get<synth::Box>(body.parts.at(0));
  double u0 = 1e18, u1 = -1e18, v0 = 1e18, v1 = -1e18;
  for (int c = 0; c < 8; ++c) {
    const Vec3 s((c & 1) ? 1 : -1, (c & 2) ? 1 : -1, (c & 4) ? 1 : -1);
    const Point3 corner = box.center + box.rotation * s.cwiseProduct(box.half_extents);
    const Point3 cam = transform_point(inverse(tb.camera), transform_point(body.pose(frame), corner));
    const Projection p = project(tb.intrinsics, cam);
    u0 = std::min(u0, p.pixel.u);
    u1 = std::max(u1, p.pixel.u);
    v0 = std::min(v0, p.pixel.v);
    v1 = std::max(v1, p.pixel.v);
  }
  return {static_cast<int>(std::ceil(u0)), static_cast<int>(std::ceil(v0)), static_cast<int>(std::floor(u1)),
          static_cast<int>(std::floor(v1))};
}

std::vector<std::set<std::size_t>> brute_clusters(const std::vector<BBoxCandidate>& c, double eps) {
  std::vector<int> label(c.size(), -1);
  std::vector<std::set<std::size_t>> out;
  for (std::size_t s = 0; s < c.size(); ++s) {
    if (label[s] >= 0) continue;
    label[s] = static_cast<int>(out.size());
    std::set<std::size_t> frames;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      frames.insert(c[i].frame);
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (label[j] < 0 && std::hypot(c[i].width() - c[j].width(), c[i].height() - c[j].height()) <= eps) {
          label[j] = label[s];
          stack.push_back(j);
        }
      }
    }
    out.push_back(frames);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return out;
}

void criterion2() {
  const auto t0 = Clock::now();
  const synth::TranslatingBox tb = synth::make_translating_box(60);
  const int w = tb.intrinsics.width, h = tb.intrinsics.height;
  auto load = [&](std::size_t f) {
    return MotionFrame{synth::analytic_flow(tb.scene, tb.intrinsics, tb.camera, f), MaskImage(w, h), MaskImage(w, h)};
  };
  MotionParams params;
  params.stride = 6;
  const auto cands = collect_candidates(59, load, params);
  const double eps = default_cluster_eps(w, h);
  const BBoxCandidate prompt = select_prompt(cands, eps);
  const double iou = bbox_iou(prompt.bbox, analytic_box_bbox(tb, prompt.frame));

  // Two outliers replace two real candidates, 200 ways.
  std::mt19937_64 rng(202);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<BBoxCandidate> mixed = cands;
    std::shuffle(mixed.begin(), mixed.end(), rng);
    mixed.resize(8);
    std::set<std::size_t> real;
    for (const auto& c : mixed) real.insert(c.frame);
    for (int k = 0; k < 2; ++k) {
      const int ow = 5 + static_cast<int>(rng() % 60), oh = 5 + static_cast<int>(rng() % 60);
      const int ou = static_cast<int>(rng() % (w - ow)), ov = static_cast<int>(rng() % (h - oh));
      mixed.push_back({1000u + k, BBox{ou, ov, ou + ow - 1, ov + oh - 1}, static_cast<long long>(ow) * oh});
    }
    const auto clusters = cluster_by_size(mixed, eps);
    std::set<std::size_t> got;
    for (const auto& m : clusters.front().members) got.insert(m.frame);
    const auto oracle = brute_clusters(mixed, eps);
    const std::size_t sel = select_prompt(mixed, eps).frame;
    if (got != oracle.front() || got != real || !real.contains(sel)) ++mismatches;
  }
  const double t = seconds_since(t0);
  report(2, cands.size() == 10 && iou >= 0.9 && mismatches == 0 && t < 10.0,
         fmt("%zu candidates, prompt frame %zu IoU %.4f, %d/200 outlier trials changed the cluster, %.2f s",
             cands.size(), prompt.frame, iou, mismatches, t));
}

// ---------------------------------------------------------------------------

void criterion3() {
  const synth::Fixture fx = synth::make_fixture(synth::FixtureKind::kDoor, 60);
  const auto human = synth::role_bit(synth::BodyRole::kHuman), hand = synth::role_bit(synth::BodyRole::kHand);
  auto load = [&](std::size_t f) {
    const synth::Render full = synth::render(fx.scene, fx.demo_intrinsics, fx.demo_camera, f);
    return MotionFrame{synth::analytic_flow(full, fx.scene, fx.demo_intrinsics, fx.demo_camera, f),
                       synth::visible_mask(full, fx.scene, human), synth::visible_mask(full, fx.scene, hand)};
  };
  MotionParams params;
  const auto cands = collect_candidates(fx.scene.frame_count - 1, load, params);
  bool increasing = cands.size() >= 2;
  std::string areas;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (i > 0 && cands[i].area <= cands[i - 1].area) increasing = false;
    areas += (i ? "," : "") + std::to_string(cands[i].area);
  }
  report(3, increasing && cands.size() == 10,
         fmt("%zu stride candidates, areas %s", cands.size(), areas.c_str()));
}

// ---------------------------------------------------------------------------

BBox analytic_sphere_bbox(const Intrinsics& intr, const PoseSE3& cam_to_scene, const Point3& center, double r) {
  const Point3 c = transform_point(inverse(cam_to_scene), center);
  const double d = c.norm();
  const Point3 rim_center = c * (1 - r * r / (d * d));
  const double rim_radius = r * std::sqrt(d * d - r * r) / d;
  const Vec3 n = c / d, e1 = n.unitOrthogonal(), e2 = n.cross(e1);
  double u0 = 1e18, u1 = -1e18, v0 = 1e18, v1 = -1e18;
  for (int i = 0; i < 20000; ++i) {
    const double a = 2 * M_PI * i / 20000;
    const Projection p = project(intr, rim_center + rim_radius * (std::cos(a) * e1 + std::sin(a) * e2));
    u0 = std::min(u0, p.pixel.u);
    u1 = std::max(u1, p.pixel.u);
    v0 = std::min(v0, p.pixel.v);
    v1 = std::max(v1, p.pixel.v);
  }
  return {static_cast<int>(std::ceil(u0)), static_cast<int>(std::ceil(v0)), static_cast<int>(std::floor(u1)),
          static_cast<int>(std::floor(v1))};
}

void criterion4() {
  const Intrinsics intr = synth::default_intrinsics();
  const Point3 center(0.02, -0.03, 0.15);
  const double r = 0.12;
  synth::PrimitiveScene scene;
  scene.bodies.push_back({"ball", synth::BodyRole::kObject, {synth::Sphere{center, r}}, {PoseSE3::identity()}});
  const PoseSE3 src = look_at({0.05, -0.9, 0.45}, center, Vec3::UnitZ());
  const PoseSE3 dst = look_at({0.12, -0.88, 0.42}, {0.03, -0.02, 0.14}, Vec3::UnitZ());
  const DepthImage depth = synth::raycast_depth(scene, intr, src, 0);
  const MaskImage mask = synth::silhouette_mask(scene, synth::kAllRoles, intr, src, 0);
  const BBox truth = analytic_sphere_bbox(intr, dst, center, r);
  bool contains = true;
  for (int margin : {2, 3, 5, 10}) contains = contains && transfer_bbox(mask, depth, intr, src, intr, dst, margin).contains(truth);

  std::mt19937_64 rng(404);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    CameraTrack track;
    track.intrinsics = intr;
    std::size_t idx = 0;
    const std::size_t n = 1 + rng() % 50;
    for (std::size_t i = 0; i < n; ++i) {
      idx += 1 + rng() % 4;
      track.entries.push_back({idx, random_pose(rng, 1.0)});
    }
    if (trial % 10 == 0 && n > 2) track.entries[1].camera_to_scene = track.entries[n - 1].camera_to_scene;  // exact tie
    const PoseSE3 demo = random_pose(rng, 1.0);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& e : track.entries) {
      const double d = camera_distance(demo, e.camera_to_scene, kDefaultCameraLambda);
      if (d < best_d) {
        best_d = d;
        best = e.index;
      }
    }
    if (closest_scene_camera(demo, track) != best) ++mismatches;
  }
  const BBox got = transfer_bbox(mask, depth, intr, src, intr, dst, 2);
  report(4, contains && mismatches == 0,
         fmt("margin-2 bbox [%d,%d]-[%d,%d] vs analytic [%d,%d]-[%d,%d], %d/1000 argmin mismatches", got.u_min,
             got.v_min, got.u_max, got.v_max, truth.u_min, truth.v_min, truth.u_max, truth.v_max, mismatches));
}

// ---------------------------------------------------------------------------

void criterion5() {
  const synth::Fixture fx = synth::make_fixture(synth::FixtureKind::kKettle, 60);
  const synth::PrimitiveScene rec = fx.scene_recording();
  const auto obj = synth::role_bit(synth::BodyRole::kObject);
  const synth::SplatSample sample = synth::sample_splats(rec, 500, 500, 42, fx.shell);
  std::vector<SegmentationView> all;
  for (const auto& e : fx.scene_track.entries) {
    all.push_back({synth::coverage_mask(rec, obj, fx.scene_track.intrinsics, e.camera_to_scene, 0),
                   fx.scene_track.intrinsics, e.camera_to_scene});
  }
  std::vector<SegmentationView> views;
  for (std::size_t k : fx.view_frames) views.push_back(all.at(k));
  const auto sel = segment(sample.splats, views, FrustumPolicy::kNeutral, 0.7);
  std::vector<std::size_t> common;
  std::set_intersection(sel.begin(), sel.end(), sample.object_indices.begin(), sample.object_indices.end(),
                        std::back_inserter(common));
  const double precision = sel.empty() ? 0.0 : double(common.size()) / sel.size();
  const double recall = double(common.size()) / sample.object_indices.size();

  std::mt19937_64 rng(505);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SegmentationView> subset;
    const std::size_t n = 1 + rng() % 10;
    for (std::size_t i = 0; i < n; ++i) {
      SegmentationView v = all[rng() % all.size()];
      // Random edits so that the masks are not all consistent.
      for (int k = 0; k < 2000; ++k) v.mask.data()[rng() % v.mask.size()] ^= 1;
      subset.push_back(std::move(v));
    }
    const double th = uniform(rng, 0.0, 1.0);
    const auto strict = segment(sample.splats, subset, FrustumPolicy::kStrict, th);
    const auto neutral = segment(sample.splats, subset, FrustumPolicy::kNeutral, th);
    if (!std::includes(neutral.begin(), neutral.end(), strict.begin(), strict.end())) ++violations;
  }
  report(5, precision == 1.0 && recall == 1.0 && violations == 0,
         fmt("%zu views, precision %.4f recall %.4f, %d/100 Strict-not-in-Neutral violations", views.size(), precision,
             recall, violations));
}

// ---------------------------------------------------------------------------

void criterion6() {
  const auto t0 = Clock::now();
  const synth::Fixture fx = synth::make_fixture(synth::FixtureKind::kKettle, 60);
  const Intrinsics& intr = fx.demo_intrinsics;
  const auto obj = synth::role_bit(synth::BodyRole::kObject);
  auto load = [&](std::size_t f) {
    const synth::Render full = synth::render(fx.scene, intr, fx.demo_camera, f);
    return ContactFrame{full.depth, synth::render(fx.scene, intr, fx.demo_camera, f, obj).depth,
                        synth::visible_mask(full, fx.scene, synth::role_bit(synth::BodyRole::kHand))};
  };
  const ContactParams params;  // tau_d 2 cm, N 10, voxel 1 cm
  const auto onset = detect_contact_onset(fx.scene.frame_count, load, params.tau_d, params.min_pixels);
  if (!onset) {
    report(6, false, "no contact onset detected");
    return;
  }
  std::map<std::size_t, PoseSE3> o2c;
  const synth::Body& body = fx.scene.bodies.at(fx.object_body);
  for (std::size_t f = 0; f < fx.scene.frame_count; ++f) o2c[f] = compose(inverse(fx.demo_camera), body.pose(f));
  const auto grid = accumulate_contacts(*onset, fx.scene.frame_count, load, intr, o2c, params);
  const auto contacts = select_contacts(grid, params.effective_min_support(), params.max_points, body.pose(0));
  const auto truth = synth::ground_truth_contacts(fx.scene, fx.object_body, 0, fx.scene.frame_count);
  const double t = seconds_since(t0);
  if (contacts.empty() || truth.empty()) {
    report(6, false, fmt("%zu contacts, %zu truth points", contacts.size(), truth.size()));
    return;
  }
  std::vector<Point3> pts;
  double worst = 0.0;
  for (const auto& c : contacts) {
    pts.push_back(c.position_object);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : truth) best = std::min(best, (c.position_object - q).norm());
    worst = std::max(worst, best);
  }
  const double chamfer = chamfer_distance(pts, truth);
  report(6, worst <= 0.015 && chamfer < 0.01 && t < 30.0,
         fmt("onset %zu (touch %zu), %zu points, max distance %.4f m, Chamfer %.4f m, %.2f s at %dx%d", *onset,
             fx.touch_frame, contacts.size(), worst, chamfer, t, intr.width, intr.height));
}

// ---------------------------------------------------------------------------

void criterion7() {
  std::mt19937_64 rng(707);
  double rel_t = 0.0;
  bool rot_exact = true, first_exact = true;
  for (int trial = 0; trial < 200; ++trial) {
    PoseTrack t{FrameTag::kScene, {}};
    for (std::size_t i = 0; i < 12; ++i) t.entries.push_back({i, random_pose(rng, 2.0)});
    const Point3 start = random_vec(rng, 3.0);
    const PoseTrack a = align_start(t, start);
    first_exact = first_exact && (a.entries[0].pose.translation() - start).norm() == 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
      for (std::size_t j = 0; j < 12; ++j) {
        const PoseSE3 before = compose(inverse(t.entries[i].pose), t.entries[j].pose);
        const PoseSE3 after = compose(inverse(a.entries[i].pose), a.entries[j].pose);
        rot_exact = rot_exact && after.rotation() == before.rotation();
        rel_t = std::max(rel_t, (after.translation() - before.translation()).norm());
      }
    }
  }

  // Scripted kettle move: camera-space track into the scene, start aligned.
  const synth::Fixture fx = synth::make_fixture(synth::FixtureKind::kKettle, 60);
  const synth::Body& body = fx.scene.bodies.at(fx.object_body);
  PoseTrack cam_track{FrameTag::kCamera, {}};
  for (std::size_t f = 0; f < fx.scene.frame_count; ++f) {
    cam_track.entries.push_back({f, compose(inverse(fx.demo_camera), body.pose(f))});
  }
  const PoseTrack scene_track = align_start(to_scene_track(cam_track, fx.demo_camera), body.pose(0).translation());
  ContactPoint c;
  c.position_object = {0.01, -0.067, 0.05};
  const MarkerSet m = make_markers(scene_track, {c});
  const double start_err = (m.start - body.pose(0).translation()).norm();
  const double end_err = (m.end - body.pose(fx.scene.frame_count - 1).translation()).norm();
  const double contact_err = (m.contacts[0] - transform_point(body.pose(0), c.position_object)).norm();

  const std::string ply = markers_to_ply(m);
  const std::string body_text = ply.substr(ply.find("end_header\n") + 11);
  std::vector<std::string> lines;
  std::istringstream in(body_text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  auto ends_with = [](const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  const bool colors = lines.size() == 3 && ends_with(lines[0], " 0 255 0") && ends_with(lines[1], " 0 0 255") &&
                      ends_with(lines[2], " 255 0 0") &&
                      ply.find("property uchar red\nproperty uchar green\nproperty uchar blue\n") != std::string::npos;
  report(7,
         rel_t <= 1e-12 && rot_exact && first_exact && start_err <= 1e-9 && end_err <= 1e-9 && contact_err <= 1e-9 &&
             colors,
         fmt("relative translation drift %.3g, rotations %s, first position %s, marker start/end error %.3g/%.3g m, "
             "PLY colors %s",
             rel_t, rot_exact ? "exact" : "changed", first_exact ? "exact" : "off", start_err, end_err,
             colors ? "ok" : "wrong"));
}

// ---------------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DEMOTRACE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion8() {
  TempDir dir("accept8");
  synth::write_fixture(synth::make_fixture(synth::FixtureKind::kKettle, 60), dir.path() / "fx");
  const Manifest m = load_manifest(dir.path() / "fx" / "manifest.json");
  set_thread_count(1);
  const bool ok1 = all_ok(run_pipeline(m, dir.path() / "a"));
  const bool ok2 = all_ok(run_pipeline(m, dir.path() / "b"));
  set_thread_count(8);
  const bool ok3 = all_ok(run_pipeline(m, dir.path() / "c"));
  set_thread_count(0);
  const auto a = tree(dir.path() / "a");
  const bool same = a == tree(dir.path() / "b") && a == tree(dir.path() / "c");
  report(8, ok1 && ok2 && ok3 && same && a.size() == 7,
         fmt("%zu artifacts, rerun and 1 vs 8 threads %s", a.size(), same ? "bit-identical" : "differ"));
}

void criterion9() {
  const auto t0 = Clock::now();
  TempDir dir("accept9");
  const std::string fx = (dir.path() / "fx").string(), out = (dir.path() / "out").string();
  const int s = run_cli("synth --scene kettle --frames 60 --out " + fx);
  const int r = run_cli("run --manifest " + fx + "/manifest.json --out " + out);
  const int q = run_cli("metrics --manifest " + fx + "/manifest.json --out " + out);
  const double t = seconds_since(t0);
  if (s != 0 || q != 0 || !fs::exists(dir.path() / "out" / "metrics.json")) {
    report(9, false, fmt("exit codes synth %d run %d metrics %d", s, r, q));
    return;
  }
  const Json report_json = read_json(dir.path() / "out" / "report.json");
  const Json metrics = read_json(dir.path() / "out" / "metrics.json");
  const double p = metrics.at("segmentation").at("precision").get<double>();
  const double rc = metrics.at("segmentation").at("recall").get<double>();
  const Json& ch = metrics.at("contact").at("chamfer");
  const double chamfer = ch.is_number() ? ch.get<double>() : std::numeric_limits<double>::infinity();
  const bool ok = r == 0 && report_json.at("ok").get<bool>() && p >= 0.95 && rc >= 0.95 && chamfer < 0.01 && t < 180;
  report(9, ok,
         fmt("all stages %s, precision %.4f recall %.4f, Chamfer %.4f m, bbox IoU %.3f, %.1f s", r == 0 ? "ok" : "NOT ok",
             p, rc, chamfer, metrics.at("bbox").at("iou").get<double>(), t));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                    criterion6, criterion7, criterion8, criterion9};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
