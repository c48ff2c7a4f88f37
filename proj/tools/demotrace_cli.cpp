#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/spdlog.h>

#include "demotrace/fixtures.hpp"
#include "demotrace/parallel.hpp"
#include "demotrace/pipeline.hpp"

namespace {

using namespace demotrace;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct Options {
  int threads = 0;
  std::uint64_t seed = 42;
  std::string manifest;
  std::string out;

  // synth
  std::string scene = "kettle";
  std::size_t frames = 60;
  double depth_sigma = 0.0;

  // parameter overrides
  std::optional<int> stride, open_radius, margin;
  std::optional<double> tau_f, lambda, threshold, tau_d, voxel;
  std::optional<std::size_t> window, max_points;
  std::string eps, policy, onset, min_support;
  std::vector<double> scene_start;
  std::string demo_pose, scene_track, splats, views;
};

std::optional<std::size_t> auto_or_count(const std::string& s, const char* name) {
  if (s == "auto") return std::nullopt;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos == s.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError(name, "expected 'auto' or a non-negative integer");
}

void apply_overrides(const Options& o, Manifest& m) {
  PipelineParams& p = m.params;
  if (o.stride) p.motion.stride = *o.stride;
  if (o.open_radius) p.motion.open_radius = *o.open_radius;
  if (o.tau_f) p.motion.tau_f = *o.tau_f;
  if (!o.eps.empty()) {
    if (o.eps == "auto") {
      p.motion.eps.reset();
    } else {
      try {
        p.motion.eps = std::stod(o.eps);
      } catch (const std::exception&) {
        throw CLI::ValidationError("--eps", "expected 'auto' or a number");
      }
    }
  }
  if (o.lambda) p.lambda = *o.lambda;
  if (o.margin) p.margin = *o.margin;
  if (!o.policy.empty()) p.policy = parse_policy(o.policy);
  if (o.threshold) p.ratio_threshold = *o.threshold;
  if (o.tau_d) p.contact.tau_d = *o.tau_d;
  if (o.voxel) p.contact.voxel = *o.voxel;
  if (o.window) p.contact.window = *o.window;
  if (o.max_points) p.contact.max_points = *o.max_points;
  if (!o.onset.empty()) p.onset = auto_or_count(o.onset, "--onset");
  if (!o.min_support.empty()) p.contact.min_support = auto_or_count(o.min_support, "--min-support");
  if (o.scene_start.size() == 3) p.scene_start = Point3(o.scene_start[0], o.scene_start[1], o.scene_start[2]);
  if (!o.demo_pose.empty()) m.demo_camera_pose = fs::absolute(o.demo_pose);
  if (!o.scene_track.empty()) m.scene_track = fs::absolute(o.scene_track);
  if (!o.splats.empty()) m.splats = fs::absolute(o.splats);
  if (!o.views.empty()) m.views = fs::absolute(o.views);
  m.validate();
}

void add_io(CLI::App* cmd, Options& o) {
  cmd->add_option("--manifest", o.manifest, "Pipeline manifest (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Artifact directory")->required();
}

int print_reports(const std::vector<StageReport>& reports) {
  for (const StageReport& r : reports) {
    std::cout << r.stage << ": " << stage_status_name(r.status);
    if (r.error) std::cout << " (" << r.message << ")";
    std::cout << '\n';
  }
  return all_ok(reports) ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::cfg::load_env_levels();
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");

  CLI::App app{"Contact points and object trajectories from RGB-D demonstrations"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", o.seed, "Seed for generated fixtures");

  CLI::App* synth = app.add_subcommand("synth", "Write an analytic fixture tree");
  synth->add_option("--scene", o.scene, "kettle | door | occlusion")
      ->check(CLI::IsMember({"kettle", "door", "occlusion"}));
  synth->add_option("--frames", o.frames, "Demonstration length")->check(CLI::Range(2, 100000));
  synth->add_option("--depth-sigma", o.depth_sigma, "Gaussian depth noise (m)")->check(CLI::NonNegativeNumber);
  synth->add_option("--out", o.out, "Output directory")->required();

  CLI::App* bbox = app.add_subcommand("bbox", "Select the bounding-box prompt frame");
  add_io(bbox, o);
  bbox->add_option("--stride", o.stride);
  bbox->add_option("--tau-f", o.tau_f);
  bbox->add_option("--open-radius", o.open_radius);
  bbox->add_option("--eps", o.eps, "'auto' or pixels");

  CLI::App* transfer = app.add_subcommand("transfer", "Transfer the prompt mask to the closest scene camera");
  add_io(transfer, o);
  transfer->add_option("--lambda", o.lambda);
  transfer->add_option("--margin", o.margin);
  transfer->add_option("--demo-pose", o.demo_pose)->check(CLI::ExistingFile);
  transfer->add_option("--scene-track", o.scene_track)->check(CLI::ExistingFile);

  CLI::App* seg = app.add_subcommand("segment", "Segment object splats by multi-view voting");
  add_io(seg, o);
  seg->add_option("--policy", o.policy)->check(CLI::IsMember({"strict", "neutral"}));
  seg->add_option("--threshold", o.threshold);
  seg->add_option("--splats", o.splats)->check(CLI::ExistingFile);
  seg->add_option("--views", o.views)->check(CLI::ExistingFile);

  CLI::App* traj = app.add_subcommand("trajectory", "Transfer the object track into the scene and align its start");
  add_io(traj, o);
  traj->add_option("--scene-start", o.scene_start, "x y z")->expected(3);

  CLI::App* contact = app.add_subcommand("contact", "Estimate contact points");
  add_io(contact, o);
  contact->add_option("--onset", o.onset, "'auto' or a frame index");
  contact->add_option("--n", o.window, "Frames accumulated from the onset");
  contact->add_option("--tau-d", o.tau_d);
  contact->add_option("--voxel", o.voxel);
  contact->add_option("--min-support", o.min_support, "'auto' or a count");
  contact->add_option("--max-points", o.max_points);

  CLI::App* exp = app.add_subcommand("export", "Write trajectory and contact markers as PLY");
  add_io(exp, o);

  CLI::App* run = app.add_subcommand("run", "Run every stage");
  add_io(run, o);

  CLI::App* metrics = app.add_subcommand("metrics", "Compare artifacts with the fixture ground truth");
  add_io(metrics, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  set_thread_count(o.threads);
  try {
    if (synth->parsed()) {
      synth::FixtureOptions fo;
      fo.seed = o.seed;
      fo.depth_sigma = o.depth_sigma;
      const synth::Fixture fx = synth::make_fixture(synth::parse_fixture_kind(o.scene), o.frames);
      synth::write_fixture(fx, o.out, fo);
      std::cout << "wrote " << (fs::path(o.out) / "manifest.json").string() << '\n';
      return kExitOk;
    }

    Manifest m = load_manifest(o.manifest);
    apply_overrides(o, m);
    if (run->parsed()) return print_reports(run_pipeline(m, o.out));
    if (metrics->parsed()) {
      std::cout << report_metrics(m, o.out).dump(2) << '\n';
      return kExitOk;
    }
    for (CLI::App* stage : {bbox, transfer, seg, traj, contact, exp}) {
      if (stage->parsed()) return print_reports({run_stage(m, stage->get_name(), o.out)});
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
