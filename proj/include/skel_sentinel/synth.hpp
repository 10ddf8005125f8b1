#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skel_sentinel/eval.hpp"
#include "skel_sentinel/pose_io.hpp"
#include "skel_sentinel/typicality.hpp"

namespace sentinel {

inline constexpr int kSynthJoints = 17; // COCO keypoint layout

enum class Motion { Stationary, Walk, Run, Jitter };

std::string to_string(Motion motion);

/// Inclusive frame interval during which an agent follows one motion.
struct Segment {
  int start = 0;
  int end = 0;
  Motion motion = Motion::Walk;
  bool anomalous = false;
  double turn = 0.0; // heading change applied when the segment starts, radians
};

struct AgentPlan {
  int person_id = 0;
  double x = 0.0;          // initial hip-center position, pixels
  double y = 0.0;
  double heading = 0.0;    // radians, 0 = +x
  double body_height = 120.0;
  std::vector<Segment> segments; // ordered, non-overlapping
};

struct SceneConfig {
  std::string video_id = "scene";
  int video_length = 240;
  double canvas_width = 1920.0;
  double canvas_height = 1080.0;
  double noise = 1.0; // per-joint detector noise, pixels
  std::uint64_t seed = 0;
  std::vector<AgentPlan> agents;
};

struct Scene {
  TrackSet tracks;          // a single video entry
  std::vector<int> labels;  // one per frame
};

/// Throws ErrorKind::Contract on invalid configs (no agents, segments out
/// of range or overlapping).
void validate(const SceneConfig& config);

/// Renders every agent as a 17-joint skeleton following its segments.
/// Frames inside an anomalous segment are labeled 1.
Scene generate_scene(const SceneConfig& config);

enum class AnomalyKind { None, Pattern, Outlier };
std::string to_string(AnomalyKind kind);

struct BenchmarkConfig {
  int videos = 30;
  int video_length = 240;
  int agents = 8;
  double noise = 1.0;
  std::uint64_t seed = 7;
};

struct BenchmarkVideo {
  SceneConfig scene;
  AnomalyKind kind = AnomalyKind::None;
};

/// Test videos cycling through three kinds: pattern anomalies (a pair of
/// agents fighting or running), outlier anomalies (one walker turns and
/// walks against an otherwise one-directional crowd) and anomaly-free scenes.
std::vector<BenchmarkVideo> benchmark_videos(const BenchmarkConfig& config);

/// Single-person labeled action clips standing in for an action-recognition
/// corpus, plus the matching typicality lists.
struct SourceCorpus {
  TrackSet tracks;
  TrackLabels labels;
  TypicalitySpec spec;
};

struct CorpusConfig {
  int clips_per_class = 30;
  int clip_length = 40;
  double noise = 1.0;
  std::uint64_t seed = 11;
};

SourceCorpus source_corpus(const CorpusConfig& config);

/// Class label used for each motion in the source corpus.
std::string action_label(Motion motion);

} // namespace sentinel
