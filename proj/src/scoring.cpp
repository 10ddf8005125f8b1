#include "skel_sentinel/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "skel_sentinel/error.hpp"
#include "text_util.hpp"

namespace sentinel {

std::vector<double> standardize(std::span<const double> values, double epsilon)
{
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) {
    return out;
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (const double v : values) {
    mean += v;
  }
  mean /= n;
  double var = 0.0;
  for (const double v : values) {
    var += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(var / n);
  if (!(sd >= epsilon)) {
    return out;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - mean) / sd;
  }
  return out;
}

std::vector<double> holistic_scores(std::span<const double> typicality, std::span<const double> uniqueness,
                                    double epsilon)
{
  if (typicality.size() != uniqueness.size()) {
    throw Error(ErrorKind::Contract, "typicality and uniqueness lists differ in length");
  }
  if (typicality.empty()) {
    throw Error(ErrorKind::Contract, "no snippets to score");
  }
  auto out = standardize(typicality, epsilon);
  const auto u = standardize(uniqueness, epsilon);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += u[i];
  }
  return out;
}

FrameScores frame_level_scores(std::span<const SnippetScore> snippets, int video_length, int window_length)
{
  if (video_length < 1) {
    throw Error(ErrorKind::Contract, "video length must be at least 1");
  }
  if (window_length < 1) {
    throw Error(ErrorKind::Contract, "window length must be at least 1");
  }
  FrameScores out;
  if (snippets.empty()) {
    out.frames.assign(static_cast<std::size_t>(video_length), 0.0);
    return out;
  }

  constexpr double unset = -std::numeric_limits<double>::infinity();
  out.frames.assign(static_cast<std::size_t>(video_length), unset);
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& s : snippets) {
    if (!std::isfinite(s.holistic)) {
      throw Error(ErrorKind::NumericOverflow, "non-finite score for " + s.ref);
    }
    floor = std::min(floor, s.holistic);
    const int first = std::max(s.start_time, 0);
    const int last = s.start_time + window_length - 1;
    if (s.start_time < 0 || last >= video_length) {
      out.warnings.push_back("snippet " + s.ref + " covers frames " + std::to_string(s.start_time) + ".." +
                             std::to_string(last) + ", clipped to video length " + std::to_string(video_length));
    }
    for (int f = first; f <= std::min(last, video_length - 1); ++f) {
      auto& slot = out.frames[static_cast<std::size_t>(f)];
      slot = std::max(slot, s.holistic);
    }
  }
  for (auto& v : out.frames) {
    if (v == unset) {
      v = floor;
    }
  }
  return out;
}

std::vector<double> smooth_scores(std::span<const double> frames, int window)
{
  std::vector<double> out(frames.begin(), frames.end());
  if (window <= 1 || frames.empty()) {
    return out;
  }
  const int n = static_cast<int>(frames.size());
  const int before = (window - 1) / 2;
  const int after = window - 1 - before;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - before);
    const int hi = std::min(n - 1, i + after);
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) {
      sum += frames[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = sum / (hi - lo + 1);
  }
  return out;
}

void write_frame_scores(std::ostream& out, const std::vector<ScoreSeries>& series)
{
  for (const auto& s : series) {
    for (std::size_t f = 0; f < s.frames.size(); ++f) {
      out << s.video_id << '\t' << f << '\t' << detail::format_fixed(s.frames[f], 6) << '\n';
    }
  }
}

void write_frame_scores(const std::string& path, const std::vector<ScoreSeries>& series)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  write_frame_scores(out, series);
}

void write_snippet_scores(const std::string& path, const std::vector<ScoreSeries>& series)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  for (const auto& s : series) {
    for (const auto& r : s.snippets) {
      out << s.video_id << '\t' << r.person_id << '\t' << r.start_time << '\t'
          << detail::format_fixed(r.typicality, 6) << '\t' << detail::format_fixed(r.uniqueness, 6) << '\t'
          << detail::format_fixed(r.holistic, 6) << '\n';
    }
  }
}

std::map<std::string, std::vector<double>> load_frame_scores(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open score file " + path);
  }
  std::map<std::string, std::vector<double>> out;
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
    const auto score = fields.size() == 3 ? detail::parse_double(fields[2]) : std::nullopt;
    if (!frame || !score || *frame < 0 || !std::isfinite(*score)) {
      throw Error(ErrorKind::Parse, path + " line " + std::to_string(line_no) + ": expected video_id, frame, score");
    }
    auto& frames = out[std::string(fields[0])];
    if (*frame != static_cast<long long>(frames.size())) {
      throw Error(ErrorKind::Schema, path + " line " + std::to_string(line_no) + ": frames must be listed in order from 0");
    }
    frames.push_back(*score);
  }
  return out;
}

} // namespace sentinel
