#include "skel_sentinel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "skel_sentinel/error.hpp"
#include "text_util.hpp"

namespace sentinel {

double roc_auc(std::span<const int> labels, std::span<const double> scores)
{
  if (labels.size() != scores.size()) {
    throw Error(ErrorKind::Contract, "labels and scores differ in length");
  }
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of positive ranks with ties given their midrank; ranks are kept
  // doubled so every quantity is an exact integer.
  double doubled_rank_sum = 0.0;
  double positives = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      ++j;
    }
    const double doubled_midrank = static_cast<double>(i + 1 + j); // 2 * ((i+1) + j) / 2
    for (std::size_t q = i; q < j; ++q) {
      const int l = labels[order[q]];
      if (l != 0 && l != 1) {
        throw Error(ErrorKind::Contract, "labels must be 0 or 1");
      }
      if (l == 1) {
        doubled_rank_sum += doubled_midrank;
        positives += 1.0;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(labels.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw Error(ErrorKind::UndefinedMetric, "AUC needs both positive and negative frames");
  }
  const double doubled_u = doubled_rank_sum - positives * (positives + 1.0);
  return doubled_u / (2.0 * positives * negatives);
}

double micro_auc(const std::vector<LabeledVideo>& videos)
{
  std::vector<int> labels;
  std::vector<double> scores;
  for (const auto& v : videos) {
    if (v.labels.size() != v.scores.size()) {
      throw Error(ErrorKind::Contract, "video " + v.video_id + ": labels and scores differ in length");
    }
    labels.insert(labels.end(), v.labels.begin(), v.labels.end());
    scores.insert(scores.end(), v.scores.begin(), v.scores.end());
  }
  return roc_auc(labels, scores);
}

FrameLabels load_frame_labels(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open label file " + path);
  }
  FrameLabels out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const auto fields = detail::split(line, '\t');
    const auto frame = fields.size() == 3 ? detail::parse_int(fields[1]) : std::nullopt;
    const auto label = fields.size() == 3 ? detail::parse_int(fields[2]) : std::nullopt;
    if (!frame || !label) {
      throw Error(ErrorKind::Parse, path + " line " + std::to_string(line_no) + ": expected video_id, frame, label");
    }
    if (*label != 0 && *label != 1) {
      throw Error(ErrorKind::Schema, path + " line " + std::to_string(line_no) + ": label must be 0 or 1");
    }
    auto& frames = out[std::string(fields[0])];
    if (*frame != static_cast<long long>(frames.size())) {
      throw Error(ErrorKind::Schema, path + " line " + std::to_string(line_no) + ": frames must be listed in order from 0");
    }
    frames.push_back(static_cast<int>(*label));
  }
  return out;
}

void write_frame_labels(const std::string& path, const FrameLabels& labels)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  for (const auto& [video, frames] : labels) {
    for (std::size_t f = 0; f < frames.size(); ++f) {
      out << video << '\t' << f << '\t' << frames[f] << '\n';
    }
  }
}

std::vector<LabeledVideo> join_scores(const FrameLabels& labels, const std::map<std::string, std::vector<double>>& scores)
{
  std::vector<LabeledVideo> out;
  for (const auto& [video, frames] : labels) {
    const auto it = scores.find(video);
    if (it == scores.end()) {
      throw Error(ErrorKind::Schema, "no scores for labeled video " + video);
    }
    if (it->second.size() != frames.size()) {
      throw Error(ErrorKind::Schema, "video " + video + ": " + std::to_string(frames.size()) + " labels but " +
                                         std::to_string(it->second.size()) + " scores");
    }
    out.push_back({video, frames, it->second});
  }
  return out;
}

EvalReport evaluate(const std::vector<LabeledVideo>& videos)
{
  EvalReport report;
  report.micro_auc = micro_auc(videos);
  report.videos = videos.size();
  for (const auto& v : videos) {
    report.frames += v.labels.size();
    const auto positives = std::count(v.labels.begin(), v.labels.end(), 1);
    std::optional<double> auc;
    if (positives > 0 && positives < static_cast<std::ptrdiff_t>(v.labels.size())) {
      auc = roc_auc(v.labels, v.scores);
    }
    report.per_video.emplace_back(v.video_id, auc);
  }
  return report;
}

std::string format_report(const EvalReport& report)
{
  std::ostringstream out;
  out << "micro_auc = " << detail::format_fixed(report.micro_auc, 6) << '\n';
  out << "videos = " << report.videos << '\n';
  out << "frames = " << report.frames << '\n';
  for (const auto& [key, value] : report.extra) {
    out << key << " = " << detail::format_fixed(value, 6) << '\n';
  }
  for (const auto& [video, auc] : report.per_video) {
    out << "video_auc." << video << " = " << (auc ? detail::format_fixed(*auc, 6) : std::string("n/a")) << '\n';
  }
  return out.str();
}

void write_report(const std::string& path, const EvalReport& report)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  out << format_report(report);
}

} // namespace sentinel
