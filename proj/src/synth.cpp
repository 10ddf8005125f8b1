#include "skel_sentinel/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "skel_sentinel/error.hpp"

namespace sentinel {

namespace {

struct Vec2 {
  double x;
  double y;
};

struct MotionParams {
  double speed;      // body heights per frame
  double cycle;      // frames per gait or punch cycle
  double leg_swing;  // radians
  double arm_swing;  // radians
  double body_noise; // body heights, per joint per frame
};

MotionParams params_for(Motion m)
{
  switch (m) {
  case Motion::Stationary: return {0.0, 60.0, 0.03, 0.02, 0.002};
  case Motion::Walk: return {0.011, 32.0, 0.35, 0.25, 0.002};
  case Motion::Run: return {0.05, 14.0, 0.75, 0.6, 0.004};
  case Motion::Jitter: return {0.0, 6.0, 0.25, 1.2, 0.03};
  }
  return {};
}

// Offset of a limb end from its root; angle measured from straight down,
// positive toward the facing direction.
Vec2 limb(Vec2 root, double angle, double length, double facing)
{
  return {root.x + facing * length * std::sin(angle), root.y + length * std::cos(angle)};
}

// 17 COCO joints relative to the hip center, in body heights.
std::array<Vec2, kSynthJoints> body_pose(Motion motion, double phase, double facing)
{
  const auto p = params_for(motion);
  std::array<Vec2, kSynthJoints> j{};
  const double s = std::sin(phase);
  const double c = std::cos(phase);
  const double bob = motion == Motion::Stationary ? 0.0 : -0.012 * std::abs(s) * (p.leg_swing / 0.35);
  const double lean = motion == Motion::Run ? 0.18 : 0.0;

  const Vec2 hip_l{-0.07, bob};
  const Vec2 hip_r{0.07, bob};
  const Vec2 sh_l{-0.11 + facing * 0.30 * std::sin(lean), -0.30 + bob};
  const Vec2 sh_r{0.11 + facing * 0.30 * std::sin(lean), -0.30 + bob};
  const Vec2 neck{facing * 0.30 * std::sin(lean), -0.30 + bob};

  j[0] = {neck.x + facing * 0.02, neck.y - 0.12};
  j[1] = {j[0].x - 0.02, j[0].y - 0.02};
  j[2] = {j[0].x + 0.02, j[0].y - 0.02};
  j[3] = {j[0].x - 0.045, j[0].y - 0.01};
  j[4] = {j[0].x + 0.045, j[0].y - 0.01};
  j[5] = sh_l;
  j[6] = sh_r;

  if (motion == Motion::Jitter) {
    // Alternating punches: the upper arm swings up toward the front.
    const double up_l = (std::numbers::pi / 2.0) * (0.5 + 0.5 * s);
    const double up_r = (std::numbers::pi / 2.0) * (0.5 - 0.5 * s);
    j[7] = limb(sh_l, std::numbers::pi - up_l - 0.3, 0.14, facing);
    j[8] = limb(sh_r, std::numbers::pi - up_r - 0.3, 0.14, facing);
    j[9] = limb(j[7], std::numbers::pi - up_l, 0.13 + 0.05 * s, facing);
    j[10] = limb(j[8], std::numbers::pi - up_r, 0.13 - 0.05 * s, facing);
  } else {
    const double arm_l = -p.arm_swing * s;
    const double arm_r = p.arm_swing * s;
    j[7] = limb(sh_l, arm_l, 0.14, facing);
    j[8] = limb(sh_r, arm_r, 0.14, facing);
    j[9] = limb(j[7], arm_l + 0.3 + lean, 0.13, facing);
    j[10] = limb(j[8], arm_r + 0.3 + lean, 0.13, facing);
  }

  j[11] = hip_l;
  j[12] = hip_r;
  const double thigh_l = p.leg_swing * s;
  const double thigh_r = -p.leg_swing * s;
  j[13] = limb(hip_l, thigh_l, 0.24, facing);
  j[14] = limb(hip_r, thigh_r, 0.24, facing);
  j[15] = limb(j[13], thigh_l - 0.8 * p.leg_swing * std::max(0.0, -c), 0.24, facing);
  j[16] = limb(j[14], thigh_r - 0.8 * p.leg_swing * std::max(0.0, c), 0.24, facing);
  return j;
}

const Segment* segment_at(const AgentPlan& agent, int frame)
{
  for (const auto& s : agent.segments) {
    if (frame >= s.start && frame <= s.end) {
      return &s;
    }
  }
  return nullptr;
}

} // namespace

std::string to_string(Motion motion)
{
  switch (motion) {
  case Motion::Stationary: return "stationary";
  case Motion::Walk: return "linear-walk";
  case Motion::Run: return "fast-run";
  case Motion::Jitter: return "erratic-jitter";
  }
  return "unknown";
}

std::string action_label(Motion motion)
{
  switch (motion) {
  case Motion::Stationary: return "standing";
  case Motion::Walk: return "walking";
  case Motion::Run: return "running";
  case Motion::Jitter: return "fighting";
  }
  return "unknown";
}

std::string to_string(AnomalyKind kind)
{
  switch (kind) {
  case AnomalyKind::None: return "none";
  case AnomalyKind::Pattern: return "pattern";
  case AnomalyKind::Outlier: return "outlier";
  }
  return "unknown";
}

void validate(const SceneConfig& config)
{
  if (config.agents.empty()) {
    throw Error(ErrorKind::Contract, "scene needs at least one agent");
  }
  if (config.video_length < 1) {
    throw Error(ErrorKind::Contract, "video length must be positive");
  }
  if (!(config.noise >= 0.0) || !(config.canvas_width > 0.0) || !(config.canvas_height > 0.0)) {
    throw Error(ErrorKind::Contract, "noise must be non-negative and the canvas non-empty");
  }
  for (const auto& a : config.agents) {
    int previous_end = -1;
    for (const auto& s : a.segments) {
      if (s.start < 0 || s.end >= config.video_length || s.start > s.end) {
        throw Error(ErrorKind::Contract, "agent " + std::to_string(a.person_id) + ": segment outside the video");
      }
      if (s.start <= previous_end) {
        throw Error(ErrorKind::Contract, "agent " + std::to_string(a.person_id) + ": overlapping segments");
      }
      previous_end = s.end;
    }
  }
}

Scene generate_scene(const SceneConfig& config)
{
  validate(config);
  Scene scene;
  scene.labels.assign(static_cast<std::size_t>(config.video_length), 0);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> conf(0.85, 1.0);

  auto& tracks = scene.tracks[config.video_id];
  for (const auto& agent : config.agents) {
    for (const auto& s : agent.segments) {
      if (s.anomalous) {
        std::fill(scene.labels.begin() + s.start, scene.labels.begin() + s.end + 1, 1);
      }
    }
    if (agent.segments.empty()) {
      continue;
    }

    Track track{config.video_id, agent.person_id, {}};
    const double H = agent.body_height;
    const double margin = H;
    Vec2 pos{agent.x, agent.y};
    const Vec2 anchor = pos;
    double heading = agent.heading;
    double phase = 0.0;
    for (int f = agent.segments.front().start; f <= agent.segments.back().end; ++f) {
      const Segment* seg = segment_at(agent, f);
      if (seg == nullptr) {
        continue;
      }
      if (f == seg->start) {
        heading += seg->turn;
      }
      const auto p = params_for(seg->motion);
      phase += 2.0 * std::numbers::pi / p.cycle;
      pos.x += p.speed * H * std::cos(heading);
      pos.y += p.speed * H * std::sin(heading);
      if (seg->motion == Motion::Jitter) {
        pos.x += 0.015 * H * gauss(rng) + 0.1 * (anchor.x - pos.x);
        pos.y += 0.015 * H * gauss(rng) + 0.1 * (anchor.y - pos.y);
      }
      if (pos.x < margin || pos.x > config.canvas_width - margin) {
        heading = std::numbers::pi - heading;
        pos.x = std::clamp(pos.x, margin, config.canvas_width - margin);
      }
      if (pos.y < margin || pos.y > config.canvas_height - margin) {
        heading = -heading;
        pos.y = std::clamp(pos.y, margin, config.canvas_height - margin);
      }
      const double facing = std::cos(heading) >= 0.0 ? 1.0 : -1.0;
      const auto body = body_pose(seg->motion, phase, facing);

      PoseFrame frame;
      frame.frame_index = f;
      frame.person_id = agent.person_id;
      frame.keypoints.reserve(kSynthJoints);
      for (const auto& j : body) {
        const double jitter = p.body_noise * H;
        double x = pos.x + H * j.x + jitter * gauss(rng) + config.noise * gauss(rng);
        double y = pos.y + H * j.y + jitter * gauss(rng) + config.noise * gauss(rng);
        x = std::clamp(x, 1.0, config.canvas_width - 1.0);
        y = std::clamp(y, 1.0, config.canvas_height - 1.0);
        frame.keypoints.push_back({x, y, conf(rng)});
      }
      track.frames.push_back(std::move(frame));
    }
    tracks.push_back(std::move(track));
  }
  std::sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) { return a.person_id < b.person_id; });
  return scene;
}

namespace {

// direction: +1 rightward, -1 leftward, 0 either.
AgentPlan walker(std::mt19937_64& rng, int person_id, const SceneConfig& scene, int start, int end, int direction)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AgentPlan a;
  a.person_id = person_id;
  a.body_height = 100.0 + 40.0 * u(rng);
  const double coin = u(rng);
  const bool rightward = direction == 0 ? coin < 0.5 : direction > 0;
  a.heading = (rightward ? 0.0 : std::numbers::pi) + 0.5 * (u(rng) - 0.5);
  a.x = scene.canvas_width * (0.3 + 0.4 * u(rng));
  a.y = scene.canvas_height * (0.25 + 0.5 * u(rng));
  a.segments.push_back({start, end, Motion::Walk, false});
  return a;
}

} // namespace

std::vector<BenchmarkVideo> benchmark_videos(const BenchmarkConfig& config)
{
  if (config.videos < 1 || config.agents < 3 || config.video_length < 120) {
    throw Error(ErrorKind::Contract, "benchmark needs >= 1 video, >= 3 agents and >= 120 frames");
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<BenchmarkVideo> out;
  const int L = config.video_length;

  for (int v = 0; v < config.videos; ++v) {
    BenchmarkVideo video;
    auto& scene = video.scene;
    char id[32];
    std::snprintf(id, sizeof(id), "test_%03d", v);
    scene.video_id = id;
    scene.video_length = L;
    scene.noise = config.noise;
    scene.seed = rng();
    video.kind = v % 3 == 0 ? AnomalyKind::Pattern : (v % 3 == 1 ? AnomalyKind::Outlier : AnomalyKind::None);

    // Interval proportions are those of a 240-frame video.
    const double scale = L / 240.0;
    const int length = static_cast<int>((70 + 40 * u(rng)) * scale);
    const int lead = static_cast<int>(30 * scale);
    const int start = lead + static_cast<int>((L - length - static_cast<int>(40 * scale)) * u(rng));
    const int end = start + length - 1;

    int next_id = 0;
    switch (video.kind) {
    case AnomalyKind::Pattern: {
      for (int i = 0; i < config.agents - 2; ++i) {
        scene.agents.push_back(walker(rng, next_id++, scene, 0, L - 1, 0));
      }
      const Motion m = (v / 3) % 2 == 0 ? Motion::Jitter : Motion::Run;
      const double x = scene.canvas_width * (m == Motion::Run ? 0.15 + 0.1 * u(rng) : 0.4 + 0.2 * u(rng));
      const double y = scene.canvas_height * (0.3 + 0.4 * u(rng));
      for (int i = 0; i < 2; ++i) {
        AgentPlan a;
        a.person_id = next_id++;
        a.body_height = 110.0 + 20.0 * u(rng);
        a.heading = m == Motion::Jitter ? (i == 0 ? 0.0 : std::numbers::pi) : 0.1 * (u(rng) - 0.5);
        a.x = x + (m == Motion::Jitter ? 55.0 * i : 0.0);
        a.y = y + (m == Motion::Run ? 90.0 * i : 0.0);
        a.segments.push_back({start, end, m, true});
        scene.agents.push_back(a);
      }
      break;
    }
    case AnomalyKind::Outlier: {
      const int direction = u(rng) < 0.5 ? 1 : -1;
      for (int i = 0; i < config.agents; ++i) {
        scene.agents.push_back(walker(rng, next_id++, scene, 0, L - 1, direction));
      }
      auto& odd = scene.agents[static_cast<std::size_t>(rng() % scene.agents.size())];
      odd.segments = {{0, start - 1, Motion::Walk, false, 0.0},
                      {start, end, Motion::Walk, true, std::numbers::pi},
                      {end + 1, L - 1, Motion::Walk, false, std::numbers::pi}};
      break;
    }
    case AnomalyKind::None: {
      for (int i = 0; i < config.agents - 2; ++i) {
        scene.agents.push_back(walker(rng, next_id++, scene, 0, L - 1, 0));
      }
      const double x = scene.canvas_width * (0.3 + 0.4 * u(rng));
      const double y = scene.canvas_height * (0.3 + 0.4 * u(rng));
      for (int i = 0; i < 2; ++i) {
        AgentPlan a;
        a.person_id = next_id++;
        a.body_height = 100.0 + 40.0 * u(rng);
        a.heading = i == 0 ? 0.0 : std::numbers::pi;
        a.x = x + 70.0 * i;
        a.y = y;
        a.segments.push_back({0, L - 1, Motion::Stationary, false});
        scene.agents.push_back(a);
      }
      break;
    }
    }
    out.push_back(std::move(video));
  }
  return out;
}

SourceCorpus source_corpus(const CorpusConfig& config)
{
  if (config.clips_per_class < 1 || config.clip_length < 2) {
    throw Error(ErrorKind::Contract, "corpus needs at least one clip per class of length >= 2");
  }
  SourceCorpus corpus;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::array motions{Motion::Stationary, Motion::Walk, Motion::Run, Motion::Jitter};
  for (const Motion m : motions) {
    for (int c = 0; c < config.clips_per_class; ++c) {
      SceneConfig scene;
      char id[48];
      std::snprintf(id, sizeof(id), "src_%s_%03d", action_label(m).c_str(), c);
      scene.video_id = id;
      scene.video_length = config.clip_length;
      scene.noise = config.noise;
      scene.seed = rng();
      AgentPlan a;
      a.person_id = 0;
      a.body_height = 100.0 + 40.0 * u(rng);
      a.heading = 2.0 * std::numbers::pi * u(rng);
      a.x = scene.canvas_width * (0.35 + 0.3 * u(rng));
      a.y = scene.canvas_height * (0.35 + 0.3 * u(rng));
      a.segments.push_back({0, config.clip_length - 1, m, false});
      scene.agents.push_back(a);
      auto generated = generate_scene(scene);
      for (auto& [video, list] : generated.tracks) {
        corpus.tracks[video] = std::move(list);
      }
      corpus.labels[{scene.video_id, 0}] = action_label(m);
    }
  }
  corpus.spec.normal_actions = {action_label(Motion::Walk), action_label(Motion::Stationary)};
  corpus.spec.abnormal_actions = {action_label(Motion::Jitter), action_label(Motion::Run)};
  corpus.spec.prompt = "List typical normal and abnormal human actions for public surveillance scenes.";
  return corpus;
}

} // namespace sentinel
