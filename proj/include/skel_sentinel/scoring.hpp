#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sentinel {

struct SnippetScore {
  std::string ref;
  int person_id = 0;
  int start_time = 0;
  double typicality = 0.0;
  double uniqueness = 0.0;
  double holistic = 0.0;
};

struct ScoreSeries {
  std::string video_id;
  std::vector<SnippetScore> snippets;
  std::vector<double> frames;
};

inline constexpr double kStdFloor = 1e-8;

/// (x - mean) / std with population statistics over `values`; all zeros
/// when std < epsilon.
std::vector<double> standardize(std::span<const double> values, double epsilon = kStdFloor);

/// Sum of the standardized typicality and uniqueness families.
std::vector<double> holistic_scores(std::span<const double> typicality, std::span<const double> uniqueness,
                                    double epsilon = kStdFloor);

struct FrameScores {
  std::vector<double> frames;
  std::vector<std::string> warnings; // one per clipped snippet window
};

/// Spreads each snippet's holistic score over [start, start + T - 1], takes
/// the maximum over every covering snippet (and so over persons), and gives
/// uncovered frames the smallest snippet score of the video (0 when there
/// are no snippets).
FrameScores frame_level_scores(std::span<const SnippetScore> snippets, int video_length, int window_length);

/// Centered moving average; window <= 1 returns the input unchanged.
std::vector<double> smooth_scores(std::span<const double> frames, int window);

/// `video_id \t frame_index \t score` with six decimals.
void write_frame_scores(std::ostream& out, const std::vector<ScoreSeries>& series);
void write_frame_scores(const std::string& path, const std::vector<ScoreSeries>& series);
/// `video_id \t person_id \t t \t S^t \t S^u \t S`.
void write_snippet_scores(const std::string& path, const std::vector<ScoreSeries>& series);

std::map<std::string, std::vector<double>> load_frame_scores(const std::string& path);

} // namespace sentinel
