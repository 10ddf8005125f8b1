#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sentinel {

struct LabeledVideo {
  std::string video_id;
  std::vector<int> labels; // 0 normal, 1 anomalous
  std::vector<double> scores;
};

/// Area under the ROC curve by the rank-sum statistic; tied
/// positive/negative pairs count one half. Throws
/// ErrorKind::UndefinedMetric unless both classes are present.
double roc_auc(std::span<const int> labels, std::span<const double> scores);

/// AUC over the concatenation of every video's frames.
double micro_auc(const std::vector<LabeledVideo>& videos);

using FrameLabels = std::map<std::string, std::vector<int>>;

/// `video_id \t frame_index \t label`; frames of each video must run 0..n-1.
FrameLabels load_frame_labels(const std::string& path);
void write_frame_labels(const std::string& path, const FrameLabels& labels);

struct EvalReport {
  double micro_auc = 0.0;
  std::size_t videos = 0;
  std::size_t frames = 0;
  /// Per-video AUC; empty when a video has a single class.
  std::vector<std::pair<std::string, std::optional<double>>> per_video;
  /// Extra named micro-AUC values (subsets, ablations).
  std::vector<std::pair<std::string, double>> extra;
};

/// Pairs scores with labels by video id. Lengths must match.
std::vector<LabeledVideo> join_scores(const FrameLabels& labels, const std::map<std::string, std::vector<double>>& scores);

EvalReport evaluate(const std::vector<LabeledVideo>& videos);

/// Key-value report lines: micro_auc, videos, frames, extra keys, then
/// `video_auc.<id>` lines. Values use six decimals.
std::string format_report(const EvalReport& report);
void write_report(const std::string& path, const EvalReport& report);

} // namespace sentinel
