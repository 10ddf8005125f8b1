#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sentinel {

/// Every tunable of the pipeline. Serialized as `key = value` lines; the
/// resolved config is written next to each run's outputs.
struct RunConfig {
  // Poses and windows.
  int joints = 17;
  int window_length = 16;
  int stride = 1;

  // Features.
  std::string features = "kinematic"; // kinematic | file
  int feature_dim = 64;

  // Typicality selection and flow.
  double beta_normal = 0.9;
  double beta_abnormal = 0.1;
  int flow_layers = 4;
  int flow_hidden = 128;
  double learning_rate = 0.0005;
  int batch_size = 1024;
  int epochs = 50;
  bool fit_normalization = true;

  // Context and scoring.
  int k = 16;
  double alpha = 4.0;
  double epsilon = 1e-8;
  int smoothing = 0;

  // Synthetic data.
  int synth_videos = 30;
  int synth_video_length = 240;
  int synth_agents = 8;
  double synth_noise = 1.0;
  int corpus_clips = 30;
  int corpus_clip_length = 40;

  std::uint64_t seed = 7;
  int threads = 0;

  bool operator==(const RunConfig&) const = default;

  // Stage seeds derived from the master seed.
  std::uint64_t feature_seed() const { return seed; }
  std::uint64_t flow_seed() const { return seed + 1; }
  std::uint64_t train_seed() const { return seed + 2; }
  std::uint64_t benchmark_seed() const { return seed + 3; }
  std::uint64_t corpus_seed() const { return seed + 4; }
};

std::vector<std::string> config_keys();

/// Sets one key from its text form. Throws ErrorKind::Usage for unknown
/// keys and ErrorKind::Parse for bad values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& config, const std::string& key);

/// Checks ranges (positive sizes, ratios in (0, 1], even feature_dim ...).
void validate(const RunConfig& config);

RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
std::string format_config(const RunConfig& config);
void save_config(const std::string& path, const RunConfig& config);

} // namespace sentinel
