#include "demotrace/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "demotrace/image_io.hpp"
#include "demotrace/mask_transfer.hpp"
#include "demotrace/trajectory.hpp"

namespace demotrace {
namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kManifestInvalid, what); }

template <typename T>
T get_or(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("parameter ") + key + ": " + e.what());
  }
}

std::string path_string(const fs::path& p) { return p.generic_string(); }

fs::path required_path(const Json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_string() || obj.at(key).get<std::string>().empty()) {
    invalid(std::string("missing path '") + key + "'");
  }
  return fs::path(obj.at(key).get<std::string>());
}

Json params_to_json(const PipelineParams& p) {
  Json j;
  j["tau_f"] = p.motion.tau_f;
  j["open_radius"] = p.motion.open_radius;
  j["eps"] = p.motion.eps ? Json(*p.motion.eps) : Json("auto");
  j["stride"] = p.motion.stride;
  j["lambda"] = p.lambda;
  j["margin"] = p.margin;
  j["policy"] = policy_name(p.policy);
  j["ratio_threshold"] = p.ratio_threshold;
  j["z_near"] = p.z_near;
  j["tau_d"] = p.contact.tau_d;
  j["window"] = p.contact.window;
  j["voxel"] = p.contact.voxel;
  j["min_pixels"] = p.contact.min_pixels;
  j["min_support"] = p.contact.min_support ? Json(*p.contact.min_support) : Json("auto");
  j["max_points"] = p.contact.max_points;
  j["onset"] = p.onset ? Json(*p.onset) : Json("auto");
  j["scene_start"] = p.scene_start ? point_to_json(*p.scene_start) : Json("splat_centroid");
  return j;
}

PipelineParams params_from_json(const Json& j) {
  PipelineParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) invalid("params must be an object");
  p.motion.tau_f = get_or(j, "tau_f", p.motion.tau_f);
  p.motion.open_radius = get_or(j, "open_radius", p.motion.open_radius);
  if (j.contains("eps") && !(j["eps"].is_string() && j["eps"] == "auto")) p.motion.eps = get_or(j, "eps", 0.0);
  p.motion.stride = get_or(j, "stride", p.motion.stride);
  p.lambda = get_or(j, "lambda", p.lambda);
  p.margin = get_or(j, "margin", p.margin);
  if (j.contains("policy")) {
    try {
      p.policy = parse_policy(get_or<std::string>(j, "policy", ""));
    } catch (const Error& e) {
      invalid(e.what());
    }
  }
  p.ratio_threshold = get_or(j, "ratio_threshold", p.ratio_threshold);
  p.z_near = get_or(j, "z_near", p.z_near);
  p.contact.tau_d = get_or(j, "tau_d", p.contact.tau_d);
  p.contact.window = get_or(j, "window", p.contact.window);
  p.contact.voxel = get_or(j, "voxel", p.contact.voxel);
  p.contact.min_pixels = get_or(j, "min_pixels", p.contact.min_pixels);
  if (j.contains("min_support") && !(j["min_support"].is_string() && j["min_support"] == "auto")) {
    p.contact.min_support = get_or<std::size_t>(j, "min_support", 0);
  }
  p.contact.max_points = get_or(j, "max_points", p.contact.max_points);
  if (j.contains("onset") && !(j["onset"].is_string() && j["onset"] == "auto")) {
    p.onset = get_or<std::size_t>(j, "onset", 0);
  }
  if (j.contains("scene_start") && !(j["scene_start"].is_string() && j["scene_start"] == "splat_centroid")) {
    try {
      p.scene_start = point_from_json(j["scene_start"]);
    } catch (const Error& e) {
      invalid(e.what());
    }
  }
  return p;
}

// Per-stage context shared by the stage bodies.
struct StageContext {
  const Manifest& m;
  fs::path out;

  fs::path artifact(std::string_view name) const { return out / std::string(name); }
};

PoseSE3 demo_pose(const Manifest& m) { return pose_from_json(read_json(m.resolve(m.demo_camera_pose))); }

const DemoFrame& demo_frame(const Manifest& m, std::size_t f) {
  if (f >= m.frames.size()) throw Error(ErrorCode::kInvalidArgument, "frame " + std::to_string(f) + " out of range");
  return m.frames[f];
}

Json stage_bbox(const StageContext& ctx) {
  const Manifest& m = ctx.m;
  const MotionParams& p = m.params.motion;
  const double eps = p.eps.value_or(default_cluster_eps(m.demo_intrinsics.width, m.demo_intrinsics.height));
  auto load = [&](std::size_t f) {
    const DemoFrame& df = demo_frame(m, f);
    if (df.flow.empty()) {
      throw Error(ErrorCode::kMissingInput, "frame " + std::to_string(f) + " has no flow file");
    }
    return MotionFrame{read_flow(m.resolve(df.flow)), read_mask(m.resolve(df.human)), read_mask(m.resolve(df.hand))};
  };
  // The last frame has no successor, so no flow.
  const std::size_t flow_frames = m.frames.size() - 1;
  const std::vector<BBoxCandidate> candidates = collect_candidates(flow_frames, load, p);
  const BBoxCandidate prompt = select_prompt(candidates, eps);
  const std::vector<SizeCluster> clusters = cluster_by_size(candidates, eps);
  write_json(ctx.artifact(artifact::kPrompt), {{"frame", prompt.frame}, {"bbox", bbox_to_json(prompt.bbox)}});
  return {{"candidates", candidates.size()},
          {"clusters", clusters.size()},
          {"largest_cluster", clusters.front().members.size()},
          {"eps", eps},
          {"frame", prompt.frame}};
}

Json stage_transfer(const StageContext& ctx) {
  const Manifest& m = ctx.m;
  const Json prompt = read_json(ctx.artifact(artifact::kPrompt));
  std::size_t frame = 0;
  try {
    frame = prompt.at("frame").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("prompt: ") + e.what());
  }
  const DemoFrame& df = demo_frame(m, frame);
  const MaskImage mask = read_mask(m.resolve(df.object));
  const DepthImage depth = read_depth(m.resolve(df.depth));
  const PoseSE3 pose = demo_pose(m);
  const CameraTrack track = camera_track_from_json(read_json(m.resolve(m.scene_track)));
  const std::size_t index = closest_scene_camera(pose, track, m.params.lambda);
  const auto it = std::find_if(track.entries.begin(), track.entries.end(),
                               [&](const CameraTrackEntry& e) { return e.index == index; });
  const BBox box = transfer_bbox(mask, depth, m.demo_intrinsics, pose, track.intrinsics, it->camera_to_scene,
                                 m.params.margin);
  write_json(ctx.artifact(artifact::kTransfer), {{"scene_frame", index}, {"bbox", bbox_to_json(box)}});
  return {{"demo_frame", frame},
          {"scene_frame", index},
          {"camera_distance", camera_distance(pose, it->camera_to_scene, m.params.lambda)}};
}

std::vector<SegmentationView> load_views(const fs::path& path) {
  const Json j = read_json(path);
  std::vector<SegmentationView> views;
  try {
    for (const Json& v : j.at("views")) {
      fs::path mask = v.at("mask").get<std::string>();
      if (mask.is_relative()) mask = path.parent_path() / mask;
      views.push_back({read_mask(mask), intrinsics_from_json(v.at("intrinsics")), pose_from_json(v.at("pose"))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  return views;
}

std::vector<std::size_t> read_segment_indices(const fs::path& path) {
  const Json j = read_json(path);
  try {
    return j.at("indices").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

Json stage_segment(const StageContext& ctx) {
  const Manifest& m = ctx.m;
  const std::vector<GaussianSplat> splats = read_splats(m.resolve(m.splats));
  const std::vector<SegmentationView> views = load_views(m.resolve(m.views));
  const std::vector<std::size_t> indices =
      segment(splats, views, m.params.policy, m.params.ratio_threshold, m.params.z_near);
  write_json(ctx.artifact(artifact::kSegment), {{"indices", indices},
                                                {"policy", policy_name(m.params.policy)},
                                                {"ratio_threshold", m.params.ratio_threshold}});
  return {{"splats", splats.size()}, {"views", views.size()}, {"selected", indices.size()}};
}

Json stage_trajectory(const StageContext& ctx) {
  const Manifest& m = ctx.m;
  const PoseTrack camera_track = pose_track_from_json(read_json(m.resolve(m.object_track)));
  const PoseTrack scene_track = to_scene_track(camera_track, demo_pose(m));
  Point3 start;
  std::string source;
  if (m.params.scene_start) {
    start = *m.params.scene_start;
    source = "manifest";
  } else {
    const std::vector<std::size_t> indices = read_segment_indices(ctx.artifact(artifact::kSegment));
    if (indices.empty()) throw Error(ErrorCode::kInvalidArgument, "segmentation selected no splats");
    start = splat_centroid(read_splats(m.resolve(m.splats)), indices);
    source = "splat_centroid";
  }
  const PoseTrack aligned = align_start(scene_track, start);
  write_json(ctx.artifact(artifact::kSceneTrack), pose_track_to_json(aligned));
  return {{"entries", aligned.entries.size()},
          {"start_source", source},
          {"start", point_to_json(start)},
          {"shift", (start - scene_track.entries.front().pose.translation()).norm()}};
}

Json stage_contact(const StageContext& ctx) {
  const Manifest& m = ctx.m;
  const ContactParams& p = m.params.contact;
  const PoseTrack track = pose_track_from_json(read_json(m.resolve(m.object_track)));
  if (track.frame != FrameTag::kCamera) throw Error(ErrorCode::kWrongFrameTag, "object track must be camera-tagged");
  std::map<std::size_t, PoseSE3> object_to_camera;
  for (const PoseTrackEntry& e : track.entries) object_to_camera.emplace(e.index, e.pose);

  auto load = [&](std::size_t f) {
    const DemoFrame& df = demo_frame(m, f);
    return ContactFrame{read_depth(m.resolve(df.depth)), read_depth(m.resolve(df.rendered)),
                        read_mask(m.resolve(df.hand))};
  };
  std::optional<std::size_t> onset = m.params.onset;
  if (!onset) onset = detect_contact_onset(m.frames.size(), load, p.tau_d, p.min_pixels);
  if (!onset) throw Error(ErrorCode::kNoContact, "no frame reaches the contact pixel threshold");

  const PoseTrack scene_track = pose_track_from_json(read_json(ctx.artifact(artifact::kSceneTrack)));
  if (scene_track.entries.empty()) throw Error(ErrorCode::kEmptyTrack, "scene track is empty");
  const ContactVoxelGrid grid =
      accumulate_contacts(*onset, m.frames.size(), load, m.demo_intrinsics, object_to_camera, p);
  const std::vector<ContactPoint> contacts =
      select_contacts(grid, p.effective_min_support(), p.max_points, scene_track.entries.front().pose);
  write_json(ctx.artifact(artifact::kContacts), contacts_to_json(contacts));
  return {{"onset", *onset},
          {"frames", std::min(p.window, m.frames.size() - *onset)},
          {"voxels", grid.cells().size()},
          {"hits", grid.total_count()},
          {"selected", contacts.size()}};
}

Json stage_export(const StageContext& ctx) {
  const PoseTrack scene_track = pose_track_from_json(read_json(ctx.artifact(artifact::kSceneTrack)));
  const std::vector<ContactPoint> contacts = contacts_from_json(read_json(ctx.artifact(artifact::kContacts)));
  const MarkerSet markers = make_markers(scene_track, contacts);
  write_bytes_atomic(ctx.artifact(artifact::kMarkers), markers_to_ply(markers));
  return {{"vertices", markers.contacts.size() + 2}};
}

using StageFn = Json (*)(const StageContext&);

StageFn stage_function(std::string_view name) {
  if (name == "bbox") return stage_bbox;
  if (name == "transfer") return stage_transfer;
  if (name == "segment") return stage_segment;
  if (name == "trajectory") return stage_trajectory;
  if (name == "contact") return stage_contact;
  if (name == "export") return stage_export;
  throw Error(ErrorCode::kUnknownStage, "unknown stage '" + std::string(name) + "'");
}

std::optional<BBox> optional_bbox(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return bbox_from_json(j);
}

double nearest_distance(const Point3& p, const std::vector<Point3>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point3& q : set) best = std::min(best, (p - q).squaredNorm());
  return std::sqrt(best);
}

double directional_mean(const std::vector<Point3>& from, const std::vector<Point3>& to) {
  double sum = 0.0;
  for (const Point3& p : from) sum += nearest_distance(p, to);
  return sum / static_cast<double>(from.size());
}

}  // namespace

void PipelineParams::validate() const {
  if (!(motion.tau_f >= 0.0)) invalid("tau_f must be non-negative");
  if (motion.open_radius < 0) invalid("open_radius must be non-negative");
  if (motion.eps && !(*motion.eps > 0.0)) invalid("eps must be positive");
  if (motion.stride < 1) invalid("stride must be at least 1");
  if (!(lambda >= 0.0)) invalid("lambda must be non-negative");
  if (margin < 0) invalid("margin must be non-negative");
  if (!(ratio_threshold > 0.0 && ratio_threshold <= 1.0)) invalid("ratio_threshold must lie in (0, 1]");
  if (!(z_near > 0.0)) invalid("z_near must be positive");
  if (!(contact.tau_d > 0.0)) invalid("tau_d must be positive");
  if (contact.window < 1) invalid("window must be at least 1");
  if (!(contact.voxel > 0.0)) invalid("voxel must be positive");
  if (contact.min_pixels < 1) invalid("min_pixels must be at least 1");
  if (contact.min_support && *contact.min_support < 1) invalid("min_support must be at least 1");
  if (contact.max_points < 1) invalid("max_points must be at least 1");
  if (scene_start && !scene_start->allFinite()) invalid("scene_start must be finite");
}

void Manifest::validate() const {
  try {
    demo_intrinsics.validate();
  } catch (const Error& e) {
    invalid(std::string("demo intrinsics: ") + e.what());
  }
  if (frames.empty()) invalid("no demonstration frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const DemoFrame& f = frames[i];
    if (f.index != i) invalid("frame indices must run 0 … n−1 in order");
    if (f.depth.empty() || f.rendered.empty() || f.human.empty() || f.hand.empty() || f.object.empty()) {
      invalid("frame " + std::to_string(i) + " lacks a required file");
    }
  }
  if (demo_camera_pose.empty() || object_track.empty() || scene_track.empty() || views.empty() || splats.empty()) {
    invalid("missing input path");
  }
  params.validate();
}

Json manifest_to_json(const Manifest& m) {
  Json frames = Json::array();
  for (const DemoFrame& f : m.frames) {
    Json jf = {{"index", f.index},
               {"depth", path_string(f.depth)},
               {"rendered", path_string(f.rendered)},
               {"human", path_string(f.human)},
               {"hand", path_string(f.hand)},
               {"object", path_string(f.object)}};
    if (!f.flow.empty()) jf["flow"] = path_string(f.flow);
    frames.push_back(std::move(jf));
  }
  Json j = {{"demo",
             {{"intrinsics", intrinsics_to_json(m.demo_intrinsics)},
              {"camera_pose", path_string(m.demo_camera_pose)},
              {"object_track", path_string(m.object_track)},
              {"frames", frames}}},
            {"scene",
             {{"track", path_string(m.scene_track)}, {"views", path_string(m.views)}, {"splats", path_string(m.splats)}}},
            {"params", params_to_json(m.params)}};
  if (!m.ground_truth.empty()) j["ground_truth"] = path_string(m.ground_truth);
  return j;
}

Manifest manifest_from_json(const Json& j, const fs::path& base_dir) {
  Manifest m;
  m.base_dir = base_dir;
  if (!j.is_object() || !j.contains("demo") || !j.contains("scene")) invalid("manifest needs 'demo' and 'scene'");
  const Json& demo = j["demo"];
  const Json& scene = j["scene"];
  if (!demo.contains("intrinsics")) invalid("demo intrinsics missing");
  try {
    m.demo_intrinsics = intrinsics_from_json(demo["intrinsics"]);
  } catch (const Error& e) {
    invalid(e.what());
  }
  m.demo_camera_pose = required_path(demo, "camera_pose");
  m.object_track = required_path(demo, "object_track");
  if (!demo.contains("frames") || !demo["frames"].is_array()) invalid("demo frames missing");
  for (const Json& jf : demo["frames"]) {
    DemoFrame f;
    f.index = get_or<std::size_t>(jf, "index", m.frames.size());
    f.depth = required_path(jf, "depth");
    f.rendered = required_path(jf, "rendered");
    f.human = required_path(jf, "human");
    f.hand = required_path(jf, "hand");
    f.object = required_path(jf, "object");
    if (jf.contains("flow")) f.flow = required_path(jf, "flow");
    m.frames.push_back(std::move(f));
  }
  m.scene_track = required_path(scene, "track");
  m.views = required_path(scene, "views");
  m.splats = required_path(scene, "splats");
  if (j.contains("ground_truth")) m.ground_truth = required_path(j, "ground_truth");
  m.params = params_from_json(j.contains("params") ? j["params"] : Json());
  m.validate();
  return m;
}

Manifest load_manifest(const fs::path& path) {
  Json j;
  try {
    j = read_json(path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormat) invalid(e.what());
    throw;
  }
  return manifest_from_json(j, path.parent_path());
}

std::string_view stage_status_name(StageStatus s) {
  switch (s) {
    case StageStatus::kOk: return "ok";
    case StageStatus::kFailed: return "failed";
    case StageStatus::kSkipped: return "skipped";
  }
  return "?";
}

Json report_to_json(const StageReport& r) {
  Json j = {{"stage", r.stage}, {"status", stage_status_name(r.status)}, {"diagnostics", r.diagnostics}};
  if (r.error) {
    j["error"] = error_code_name(*r.error);
    j["message"] = r.message;
  }
  return j;
}

StageReport run_stage(const Manifest& manifest, std::string_view stage, const fs::path& out_dir) {
  const StageFn fn = stage_function(stage);
  StageReport report;
  report.stage = std::string(stage);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fs::create_directories(out_dir);
    report.diagnostics = fn(StageContext{manifest, out_dir});
  } catch (const Error& e) {
    report.status = StageStatus::kFailed;
    report.error = e.code();
    report.message = e.what();
  } catch (const std::exception& e) {
    report.status = StageStatus::kFailed;
    report.error = ErrorCode::kIo;
    report.message = e.what();
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (report.status == StageStatus::kOk) {
    spdlog::info("stage {}: ok ({:.2f} s) {}", report.stage, report.wall_seconds, report.diagnostics.dump());
  } else {
    spdlog::error("stage {}: failed ({:.2f} s) {}", report.stage, report.wall_seconds, report.message);
  }
  return report;
}

std::vector<StageReport> run_pipeline(const Manifest& manifest, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<StageReport> reports;
  bool failed = false;
  for (std::string_view stage : kStageNames) {
    if (failed) {
      StageReport skipped;
      skipped.stage = std::string(stage);
      skipped.status = StageStatus::kSkipped;
      reports.push_back(std::move(skipped));
      continue;
    }
    reports.push_back(run_stage(manifest, stage, out_dir));
    failed = reports.back().status != StageStatus::kOk;
  }
  Json stages = Json::array();
  for (const StageReport& r : reports) stages.push_back(report_to_json(r));
  write_json(out_dir / std::string(artifact::kReport), {{"ok", !failed}, {"stages", stages}});
  return reports;
}

bool all_ok(const std::vector<StageReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const StageReport& r) { return r.status == StageStatus::kOk; });
}

double chamfer_distance(const std::vector<Point3>& a, const std::vector<Point3>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "chamfer distance of an empty set");
  return 0.5 * (directional_mean(a, b) + directional_mean(b, a));
}

Json report_metrics(const Manifest& manifest, const fs::path& out_dir) {
  if (manifest.ground_truth.empty()) throw Error(ErrorCode::kMissingGroundTruth, "manifest names no ground truth");
  const fs::path truth_path = manifest.resolve(manifest.ground_truth);
  if (!fs::exists(truth_path)) throw Error(ErrorCode::kMissingGroundTruth, truth_path.string() + " does not exist");
  const Json truth = read_json(truth_path);
  auto has = [&](std::string_view name) { return fs::exists(out_dir / std::string(name)); };
  Json metrics = Json::object();

  try {
    if (has(artifact::kPrompt)) {
      const Json prompt = read_json(out_dir / std::string(artifact::kPrompt));
      const std::size_t frame = prompt.at("frame").get<std::size_t>();
      const auto gt = optional_bbox(truth.at("object_bboxes").at(frame));
      metrics["bbox"] = {{"frame", frame}, {"iou", gt ? bbox_iou(bbox_from_json(prompt.at("bbox")), *gt) : 0.0}};
    }
    if (has(artifact::kTransfer)) {
      const Json transfer = read_json(out_dir / std::string(artifact::kTransfer));
      const std::size_t frame = transfer.at("scene_frame").get<std::size_t>();
      const BBox box = bbox_from_json(transfer.at("bbox"));
      const auto gt = optional_bbox(truth.at("scene_bboxes").at(frame));
      metrics["transfer"] = {{"scene_frame", frame},
                             {"iou", gt ? bbox_iou(box, *gt) : 0.0},
                             {"contains_truth", gt ? box.contains(*gt) : false}};
    }
    if (has(artifact::kSegment)) {
      const std::vector<std::size_t> est = read_segment_indices(out_dir / std::string(artifact::kSegment));
      auto gt = truth.at("object_splats").get<std::vector<std::size_t>>();
      std::sort(gt.begin(), gt.end());
      std::vector<std::size_t> sorted = est;
      std::sort(sorted.begin(), sorted.end());
      std::vector<std::size_t> common;
      std::set_intersection(sorted.begin(), sorted.end(), gt.begin(), gt.end(), std::back_inserter(common));
      const double tp = static_cast<double>(common.size());
      metrics["segmentation"] = {
          {"selected", est.size()},
          {"truth", gt.size()},
          {"precision", est.empty() ? (gt.empty() ? 1.0 : 0.0) : tp / static_cast<double>(est.size())},
          {"recall", gt.empty() ? 1.0 : tp / static_cast<double>(gt.size())}};
    }
    if (has(artifact::kSceneTrack)) {
      const PoseTrack est = pose_track_from_json(read_json(out_dir / std::string(artifact::kSceneTrack)));
      const PoseTrack gt = pose_track_from_json(truth.at("object_scene_track"));
      const std::vector<PoseError> errors = pose_errors(est, gt);
      double t_sum = 0.0, t_max = 0.0, r_sum = 0.0, r_max = 0.0;
      for (const PoseError& e : errors) {
        t_sum += e.translation;
        r_sum += e.rotation;
        t_max = std::max(t_max, e.translation);
        r_max = std::max(r_max, e.rotation);
      }
      const double n = static_cast<double>(errors.size());
      metrics["trajectory"] = {{"frames", errors.size()},
                               {"mean_translation", t_sum / n},
                               {"max_translation", t_max},
                               {"mean_rotation", r_sum / n},
                               {"max_rotation", r_max},
                               {"first_translation", errors.front().translation}};
    }
    if (has(artifact::kContacts)) {
      const std::vector<ContactPoint> est = contacts_from_json(read_json(out_dir / std::string(artifact::kContacts)));
      std::vector<Point3> gt;
      for (const Json& p : truth.at("contacts")) gt.push_back(point_from_json(p));
      std::vector<Point3> pts;
      for (const ContactPoint& c : est) pts.push_back(c.position_object);
      Json contact = {{"points", pts.size()}, {"truth_points", gt.size()}};
      if (!pts.empty() && !gt.empty()) {
        double worst = 0.0;
        for (const Point3& p : pts) worst = std::max(worst, nearest_distance(p, gt));
        contact["chamfer"] = chamfer_distance(pts, gt);
        contact["max_distance"] = worst;
      } else {
        contact["chamfer"] = nullptr;
        contact["max_distance"] = nullptr;
      }
      metrics["contact"] = std::move(contact);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("ground truth: ") + e.what());
  }
  write_json(out_dir / std::string(artifact::kMetrics), metrics);
  return metrics;
}

}  // namespace demotrace
