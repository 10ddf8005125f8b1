#include "skel_sentinel/pose_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "skel_sentinel/error.hpp"
#include "text_util.hpp"

namespace sentinel {

namespace {

Error line_error(ErrorKind kind, std::size_t line_no, const std::string& what)
{
  return Error(kind, "line " + std::to_string(line_no) + ": " + what);
}

PoseFrame parse_pose_line(std::string_view line, std::size_t line_no, int joints,
                          std::string& video_id)
{
  const auto fields = detail::split(line, '\t');
  if (fields.size() != 4) {
    throw line_error(ErrorKind::Parse, line_no,
                     "expected 4 tab-separated fields, got " + std::to_string(fields.size()));
  }
  if (fields[0].empty()) {
    throw line_error(ErrorKind::Parse, line_no, "empty video id");
  }
  video_id.assign(fields[0]);

  const auto person = detail::parse_int(fields[1]);
  const auto frame = detail::parse_int(fields[2]);
  if (!person || *person < 0 || *person > INT32_MAX) {
    throw line_error(ErrorKind::Parse, line_no, "bad person id");
  }
  if (!frame || *frame < 0 || *frame > INT32_MAX) {
    throw line_error(ErrorKind::Parse, line_no, "bad frame index");
  }

  PoseFrame pose;
  pose.person_id = static_cast<int>(*person);
  pose.frame_index = static_cast<int>(*frame);

  const auto triples = detail::split(fields[3], ';');
  if (static_cast<int>(triples.size()) != joints) {
    throw line_error(ErrorKind::Schema, line_no,
                     "expected " + std::to_string(joints) + " joints, got " +
                         std::to_string(triples.size()));
  }
  pose.keypoints.reserve(triples.size());
  for (const auto triple : triples) {
    const auto parts = detail::split(triple, ',');
    if (parts.size() != 3) {
      throw line_error(ErrorKind::Parse, line_no, "joint must be x,y,c");
    }
    const auto x = detail::parse_double(parts[0]);
    const auto y = detail::parse_double(parts[1]);
    const auto c = detail::parse_double(parts[2]);
    if (!x || !y || !c) {
      throw line_error(ErrorKind::Parse, line_no, "bad number in joint");
    }
    if (!std::isfinite(*x) || !std::isfinite(*y)) {
      throw line_error(ErrorKind::Schema, line_no, "non-finite coordinate");
    }
    if (!(*c >= 0.0 && *c <= 1.0)) {
      throw line_error(ErrorKind::Schema, line_no, "confidence outside [0,1]");
    }
    pose.keypoints.push_back({*x, *y, *c});
  }
  return pose;
}

bool is_zero_joint(const Keypoint& k) { return k.x == 0.0 && k.y == 0.0; }

} // namespace

std::string make_snippet_ref(const std::string& video_id, int person_id, int start_time)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), ":%06d:%08d", person_id, start_time);
  return video_id + buf;
}

SnippetKey parse_snippet_ref(const std::string& ref)
{
  const auto second = ref.rfind(':');
  const auto first = second == std::string::npos || second == 0 ? std::string::npos
                                                                 : ref.rfind(':', second - 1);
  if (first == std::string::npos || first == 0) {
    throw Error(ErrorKind::Parse, "malformed snippet ref '" + ref + "'");
  }
  const auto person = detail::parse_int(std::string_view(ref).substr(first + 1, second - first - 1));
  const auto start = detail::parse_int(std::string_view(ref).substr(second + 1));
  if (!person || !start) {
    throw Error(ErrorKind::Parse, "malformed snippet ref '" + ref + "'");
  }
  return {ref.substr(0, first), static_cast<int>(*person), static_cast<int>(*start)};
}

TrackSet read_tracks(std::istream& in, int joints)
{
  if (joints < 1) {
    throw Error(ErrorKind::Schema, "joint count must be positive");
  }
  std::map<std::pair<std::string, int>, std::vector<PoseFrame>> grouped;
  std::string line;
  std::string video_id;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    auto pose = parse_pose_line(line, line_no, joints, video_id);
    grouped[{video_id, pose.person_id}].push_back(std::move(pose));
  }

  TrackSet tracks;
  for (auto& [key, frames] : grouped) {
    std::stable_sort(frames.begin(), frames.end(),
                     [](const PoseFrame& a, const PoseFrame& b) { return a.frame_index < b.frame_index; });
    for (std::size_t i = 1; i < frames.size(); ++i) {
      if (frames[i].frame_index == frames[i - 1].frame_index) {
        throw Error(ErrorKind::Duplicate, "duplicate record video=" + key.first + " person=" +
                                              std::to_string(key.second) + " frame=" +
                                              std::to_string(frames[i].frame_index));
      }
    }
    tracks[key.first].push_back(Track{key.first, key.second, std::move(frames)});
  }
  return tracks;
}

TrackSet load_tracks(const std::string& path, int joints)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open track file " + path);
  }
  return read_tracks(in, joints);
}

void write_tracks(std::ostream& out, const TrackSet& tracks)
{
  std::string line;
  for (const auto& [video_id, list] : tracks) {
    for (const auto& track : list) {
      for (const auto& frame : track.frames) {
        line.clear();
        line += video_id;
        line += '\t';
        line += std::to_string(track.person_id);
        line += '\t';
        line += std::to_string(frame.frame_index);
        line += '\t';
        for (std::size_t j = 0; j < frame.keypoints.size(); ++j) {
          if (j > 0) {
            line += ';';
          }
          const auto& k = frame.keypoints[j];
          line += detail::format_double(k.x);
          line += ',';
          line += detail::format_double(k.y);
          line += ',';
          line += detail::format_double(k.confidence);
        }
        line += '\n';
        out << line;
      }
    }
  }
}

void write_tracks(const std::string& path, const TrackSet& tracks)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write track file " + path);
  }
  write_tracks(out, tracks);
}

std::vector<Snippet> window_snippets(const Track& track, int window_length, int stride)
{
  if (window_length < 2) {
    throw Error(ErrorKind::Contract, "window length must be at least 2");
  }
  if (stride < 1) {
    throw Error(ErrorKind::Contract, "stride must be at least 1");
  }
  std::vector<Snippet> out;
  if (track.frames.empty()) {
    return out;
  }
  const int joints = static_cast<int>(track.frames.front().keypoints.size());
  const int first = track.frames.front().frame_index;
  const int length = track.frames.back().frame_index - first + 1;
  if (length < window_length) {
    return out;
  }

  // Dense, zero-filled copy of the track.
  std::vector<const PoseFrame*> dense(static_cast<std::size_t>(length), nullptr);
  for (const auto& f : track.frames) {
    dense[static_cast<std::size_t>(f.frame_index - first)] = &f;
  }
  std::vector<std::uint8_t> zero_frame(dense.size(), 1);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != nullptr) {
      zero_frame[i] = std::all_of(dense[i]->keypoints.begin(), dense[i]->keypoints.end(), is_zero_joint);
    }
  }

  for (int offset = 0; offset + window_length <= length; offset += stride) {
    int zeros = 0;
    for (int t = 0; t < window_length; ++t) {
      zeros += zero_frame[static_cast<std::size_t>(offset + t)];
    }
    if (zeros == window_length || 2 * zeros > window_length) {
      continue;
    }

    Snippet s;
    s.video_id = track.video_id;
    s.person_id = track.person_id;
    s.start_time = first + offset;
    s.window_length = window_length;
    s.joints = joints;
    const auto cells = static_cast<std::size_t>(window_length) * joints;
    s.coords.assign(cells * 2, 0.0);
    s.confidence.assign(cells, 0.0);
    s.present.assign(cells, 0);
    for (int t = 0; t < window_length; ++t) {
      const PoseFrame* f = dense[static_cast<std::size_t>(offset + t)];
      if (f == nullptr) {
        continue;
      }
      for (int j = 0; j < joints; ++j) {
        const auto& k = f->keypoints[static_cast<std::size_t>(j)];
        const auto cell = static_cast<std::size_t>(t) * joints + j;
        s.coords[cell * 2] = k.x;
        s.coords[cell * 2 + 1] = k.y;
        s.confidence[cell] = k.confidence;
        s.present[cell] = is_zero_joint(k) ? 0 : 1;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

SnippetMoments snippet_moments(const Snippet& snippet)
{
  SnippetMoments m;
  std::size_t count = 0;
  for (std::size_t cell = 0; cell < snippet.present.size(); ++cell) {
    if (snippet.present[cell] != 0) {
      m.cx += snippet.coords[cell * 2];
      m.cy += snippet.coords[cell * 2 + 1];
      ++count;
    }
  }
  if (count == 0) {
    return m;
  }
  m.cx /= static_cast<double>(count);
  m.cy /= static_cast<double>(count);
  double sq = 0.0;
  for (std::size_t cell = 0; cell < snippet.present.size(); ++cell) {
    if (snippet.present[cell] != 0) {
      const double dx = snippet.coords[cell * 2] - m.cx;
      const double dy = snippet.coords[cell * 2 + 1] - m.cy;
      sq += dx * dx + dy * dy;
    }
  }
  m.rms = std::sqrt(sq / static_cast<double>(count));
  return m;
}

NormalizedSnippet normalize_snippet(const Snippet& snippet)
{
  const auto m = snippet_moments(snippet);
  if (!(m.rms >= 1e-12)) {
    throw Error(ErrorKind::DegenerateSnippet, "snippet " + snippet.ref() + " has no spatial extent");
  }
  NormalizedSnippet out{snippet, snippet.ref()};
  auto& coords = out.data.coords;
  for (std::size_t cell = 0; cell < snippet.present.size(); ++cell) {
    if (snippet.present[cell] != 0) {
      coords[cell * 2] = (coords[cell * 2] - m.cx) / m.rms;
      coords[cell * 2 + 1] = (coords[cell * 2 + 1] - m.cy) / m.rms;
    } else {
      coords[cell * 2] = 0.0;
      coords[cell * 2 + 1] = 0.0;
    }
  }
  return out;
}

} // namespace sentinel
