#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "skel_sentinel/error.hpp"
#include "skel_sentinel/scoring.hpp"

using namespace sentinel;

namespace {

SnippetScore snip(int person, int t, double s)
{
  SnippetScore x;
  x.person_id = person;
  x.start_time = t;
  x.holistic = s;
  return x;
}

std::vector<double> random_values(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(3.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) {
    x = g(rng);
  }
  return v;
}

} // namespace

TEST_CASE("standardized families have zero mean and unit std")
{
  const auto z = standardize(random_values(50, 1));
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / 50;
  double var = 0;
  for (double v : z) {
    var += (v - mean) * (v - mean) / 50;
  }
  CHECK(std::fabs(mean) <= 1e-9);
  CHECK(std::fabs(std::sqrt(var) - 1.0) <= 1e-9);
  CHECK(standardize(std::vector<double>(4, 2.5)) == std::vector<double>(4, 0.0));
}

TEST_CASE("constant uniqueness leaves the standardized typicality")
{
  const auto st = random_values(20, 2);
  const auto s = holistic_scores(st, std::vector<double>(20, 7.0));
  const auto z = standardize(st);
  CHECK(s == z);
}

TEST_CASE("fusion is invariant to positive affine maps of a family")
{
  const auto st = random_values(30, 3);
  const auto su = random_values(30, 4);
  auto st2 = st;
  for (auto& v : st2) {
    v = 2.5 * v - 11.0;
  }
  const auto a = holistic_scores(st, su);
  const auto b = holistic_scores(st2, su);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::fabs(a[i] - b[i]) <= 1e-9);
  }
  CHECK_THROWS_AS(holistic_scores(st, random_values(29, 5)), Error);
}

TEST_CASE("frame scores: max across persons, minimum on empty frames, coverage")
{
  const std::vector<SnippetScore> two{snip(0, 0, 0.2), snip(1, 0, 0.9)};
  const auto f = frame_level_scores(two, 16, 16).frames;
  CHECK(f[3] == 0.9);

  const std::vector<SnippetScore> three{snip(0, 0, -1.3), snip(1, 2, 0.4), snip(2, 4, 2.1)};
  const auto g = frame_level_scores(three, 40, 16).frames;
  REQUIRE(g.size() == 40);
  CHECK(g[30] == -1.3);
  CHECK(g[39] == -1.3);
  CHECK(g[10] == 2.1);

  const std::vector<SnippetScore> one{snip(0, 5, 1.7)};
  const auto h = frame_level_scores(one, 30, 16).frames;
  for (int i = 5; i <= 20; ++i) {
    CHECK(h[static_cast<std::size_t>(i)] == 1.7);
  }

  CHECK(frame_level_scores({}, 5, 16).frames == std::vector<double>(5, 0.0));
}

TEST_CASE("windows past the end are clipped with a warning")
{
  const std::vector<SnippetScore> s{snip(0, 0, 0.5), snip(0, 10, 0.8)};
  const auto r = frame_level_scores(s, 20, 16);
  CHECK(r.frames.size() == 20);
  CHECK(r.warnings.size() == 1);
  CHECK(r.frames[19] == 0.8);
}

TEST_CASE("raising a snippet score never lowers a frame")
{
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<SnippetScore> s;
  for (int i = 0; i < 20; ++i) {
    s.push_back(snip(i % 3, static_cast<int>(rng() % 50), u(rng)));
  }
  const auto before = frame_level_scores(s, 80, 16).frames;
  s[7].holistic += 1.0;
  const auto after = frame_level_scores(s, 80, 16).frames;
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(after[i] >= before[i]);
  }
}

TEST_CASE("smoothing")
{
  const std::vector<double> x{0, 0, 3, 0, 0};
  CHECK(smooth_scores(x, 1) == x);
  const auto y = smooth_scores(x, 3);
  CHECK(std::fabs(y[1] - 1.0) <= 1e-12);
  CHECK(std::fabs(y[2] - 1.0) <= 1e-12);
  CHECK(y[0] == 0.0);
}

TEST_CASE("frame score file round trip")
{
  ScoreSeries s;
  s.video_id = "clip";
  s.frames = {0.25, -1.5, 3.0};
  const auto dir = testing::scratch("scores");
  write_frame_scores((dir / "s.tsv").string(), {s});
  const auto back = load_frame_scores((dir / "s.tsv").string());
  CHECK(back.at("clip") == s.frames);
  std::ostringstream out;
  write_frame_scores(out, {s});
  CHECK(out.str() == "clip\t0\t0.250000\nclip\t1\t-1.500000\nclip\t2\t3.000000\n");
}
