#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "skel_sentinel/pose_io.hpp"

namespace testing {

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("skel_sentinel_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// A person wandering about: every joint gets its own offset plus a shared drift.
inline sentinel::Track random_track(const std::string& video, int person, int first, int length, int joints,
                                    std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  sentinel::Track t;
  t.video_id = video;
  t.person_id = person;
  std::vector<std::pair<double, double>> offsets(static_cast<std::size_t>(joints));
  for (auto& o : offsets) {
    o = {u(rng), 3.0 * u(rng)};
  }
  const double x0 = 500 + 10 * u(rng);
  const double y0 = 400 + 10 * u(rng);
  for (int f = 0; f < length; ++f) {
    sentinel::PoseFrame pf;
    pf.frame_index = first + f;
    pf.person_id = person;
    for (int j = 0; j < joints; ++j) {
      const auto [ox, oy] = offsets[static_cast<std::size_t>(j)];
      pf.keypoints.push_back({x0 + 2.0 * f + ox + 0.5 * u(rng), y0 + oy + 0.5 * u(rng), 0.9});
    }
    t.frames.push_back(std::move(pf));
  }
  return t;
}

} // namespace testing
