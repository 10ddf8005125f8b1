#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sentinel {

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  bool operator==(const Keypoint&) const = default;
};

struct PoseFrame {
  int frame_index = 0;
  int person_id = 0;
  std::vector<Keypoint> keypoints;

  bool operator==(const PoseFrame&) const = default;
};

/// One person's pose sequence inside one video. Frame indices are strictly
/// increasing but may contain gaps.
struct Track {
  std::string video_id;
  int person_id = 0;
  std::vector<PoseFrame> frames;

  bool operator==(const Track&) const = default;
};

/// Tracks keyed by video id; each list is sorted by person id.
using TrackSet = std::map<std::string, std::vector<Track>>;

/// Canonical snippet identifier `video:pppppp:tttttttt`. The zero padding
/// makes lexicographic order agree with (video, person, start) order.
std::string make_snippet_ref(const std::string& video_id, int person_id, int start_time);

struct SnippetKey {
  std::string video_id;
  int person_id = 0;
  int start_time = 0;
};

/// Inverse of make_snippet_ref. Throws ErrorKind::Parse on malformed refs.
SnippetKey parse_snippet_ref(const std::string& ref);

/// A T-frame window of one person's poses. Coordinates are stored frame
/// major: coords[((t * J) + j) * 2 + c] with c = 0 for x and 1 for y.
struct Snippet {
  std::string video_id;
  int person_id = 0;
  int start_time = 0;
  int window_length = 0;
  int joints = 0;
  std::vector<double> coords;
  std::vector<double> confidence;   // [t * J + j]
  std::vector<std::uint8_t> present; // [t * J + j]; 0 for zero-filled joints

  double x(int t, int j) const { return coords[(static_cast<std::size_t>(t) * joints + j) * 2]; }
  double y(int t, int j) const { return coords[(static_cast<std::size_t>(t) * joints + j) * 2 + 1]; }
  std::string ref() const { return make_snippet_ref(video_id, person_id, start_time); }
};

/// A snippet after centroid removal and RMS scaling. `data` keeps the
/// source metadata so the result can be fed back into normalize_snippet.
struct NormalizedSnippet {
  Snippet data;
  std::string source_ref;
};

struct WindowingOptions {
  int window_length = 16;
  int stride = 1;
};

/// Reads the tab-separated track format. Every line is one pose:
/// `video_id \t person_id \t frame_index \t x1,y1,c1;x2,y2,c2;...`.
TrackSet load_tracks(const std::string& path, int joints);
TrackSet read_tracks(std::istream& in, int joints);

void write_tracks(const std::string& path, const TrackSet& tracks);
void write_tracks(std::ostream& out, const TrackSet& tracks);

/// Cuts a track into fixed-length windows. Gaps between recorded frames are
/// zero-filled first; windows that are entirely zero, or more than half
/// zero frames, are dropped.
std::vector<Snippet> window_snippets(const Track& track, int window_length, int stride);

/// Translates the snippet so the centroid of its present joints is the
/// origin and divides by the RMS joint radius. Absent joints stay at 0.
NormalizedSnippet normalize_snippet(const Snippet& snippet);

/// Centroid and RMS radius over the present joints, as used by
/// normalize_snippet.
struct SnippetMoments {
  double cx = 0.0;
  double cy = 0.0;
  double rms = 0.0;
};
SnippetMoments snippet_moments(const Snippet& snippet);

} // namespace sentinel
