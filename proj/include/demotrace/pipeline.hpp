#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "demotrace/contact.hpp"
#include "demotrace/json_io.hpp"
#include "demotrace/motion_bbox.hpp"
#include "demotrace/splat_seg.hpp"

namespace demotrace {

namespace fs = std::filesystem;

// Files of one demonstration frame. Paths are relative to the manifest
// directory unless absolute. Flow is only needed on stride frames.
struct DemoFrame {
  std::size_t index = 0;
  fs::path depth;     // sensor depth
  fs::path rendered;  // object-only depth from the tracked pose
  fs::path flow;      // empty if absent
  fs::path human;
  fs::path hand;
  fs::path object;    // object segmentation mask
};

struct PipelineParams {
  MotionParams motion;
  double lambda = kDefaultCameraLambda;
  int margin = 5;
  FrustumPolicy policy = FrustumPolicy::kNeutral;
  double ratio_threshold = kDefaultRatioThreshold;
  double z_near = kDefaultNearPlane;
  ContactParams contact;
  std::optional<std::size_t> onset;       // unset: detected
  std::optional<Point3> scene_start;      // unset: centroid of segmented splats

  // Throws kManifestInvalid on out-of-range values.
  void validate() const;
};

struct Manifest {
  fs::path base_dir;
  Intrinsics demo_intrinsics;
  fs::path demo_camera_pose;  // camera-to-scene pose JSON
  fs::path object_track;      // camera-tagged pose track JSON
  std::vector<DemoFrame> frames;  // indices 0 … n−1 in order
  fs::path scene_track;
  fs::path views;
  fs::path splats;
  fs::path ground_truth;      // empty if absent
  PipelineParams params;

  fs::path resolve(const fs::path& p) const { return p.is_absolute() ? p : base_dir / p; }
  void validate() const;
};

Json manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const Json& j, const fs::path& base_dir);
Manifest load_manifest(const fs::path& path);

inline constexpr std::string_view kStageNames[] = {"bbox", "transfer", "segment", "trajectory", "contact", "export"};

// Artifact file names inside the output directory.
namespace artifact {
inline constexpr std::string_view kPrompt = "prompt.json";
inline constexpr std::string_view kTransfer = "transfer.json";
inline constexpr std::string_view kSegment = "segment.json";
inline constexpr std::string_view kSceneTrack = "scene_track.json";
inline constexpr std::string_view kContacts = "contacts.json";
inline constexpr std::string_view kMarkers = "markers.ply";
inline constexpr std::string_view kReport = "report.json";
inline constexpr std::string_view kMetrics = "metrics.json";
}  // namespace artifact

enum class StageStatus { kOk, kFailed, kSkipped };
std::string_view stage_status_name(StageStatus s);

struct StageReport {
  std::string stage;
  StageStatus status = StageStatus::kOk;
  Json diagnostics = Json::object();
  std::optional<ErrorCode> error;
  std::string message;
  double wall_seconds = 0.0;  // never serialized into artifacts
};

// Everything except the wall time.
Json report_to_json(const StageReport& r);

// Runs one stage, reading upstream artifacts from out_dir. Stage errors are
// caught and recorded; an unknown name throws kUnknownStage.
StageReport run_stage(const Manifest& manifest, std::string_view stage, const fs::path& out_dir);

// All stages in order; after a failure the remaining stages are reported as
// skipped. Writes report.json.
std::vector<StageReport> run_pipeline(const Manifest& manifest, const fs::path& out_dir);

bool all_ok(const std::vector<StageReport>& reports);

// Symmetric mean nearest-neighbour distance: the average of the two
// directional means. Throws kInvalidArgument if either set is empty.
double chamfer_distance(const std::vector<Point3>& a, const std::vector<Point3>& b);

// Compares the artifacts in out_dir with the manifest's ground truth and
// writes metrics.json. Throws kMissingGroundTruth.
Json report_metrics(const Manifest& manifest, const fs::path& out_dir);

}  // namespace demotrace
