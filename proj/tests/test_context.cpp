#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "skel_sentinel/context.hpp"
#include "skel_sentinel/error.hpp"
#include "skel_sentinel/pose_io.hpp"

using namespace sentinel;

namespace {

SceneEntry entry(int person, int t, std::vector<double> f)
{
  return {make_snippet_ref("v", person, t), person, t, std::move(f)};
}

// Random scene; a coarse value grid makes distance ties common.
SceneIndex random_scene(std::uint64_t seed, std::size_t max_snippets)
{
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> persons(1, 6);
  std::uniform_int_distribution<int> grid(-3, 3);
  const int people = persons(rng);
  const std::size_t per = std::max<std::size_t>(1, max_snippets / static_cast<std::size_t>(people));
  std::vector<SceneEntry> entries;
  for (int p = 0; p < people; ++p) {
    for (std::size_t t = 0; t < per; ++t) {
      entries.push_back(entry(p, static_cast<int>(t) * 2, {double(grid(rng)), double(grid(rng)), double(grid(rng))}));
    }
  }
  std::shuffle(entries.begin(), entries.end(), rng);
  return SceneIndex("v", std::move(entries));
}

void expect_same(const Neighborhood& got, const oracle::ScanResult& want)
{
  REQUIRE(got.members.size() == want.refs.size());
  for (std::size_t i = 0; i < want.refs.size(); ++i) {
    CHECK(got.members[i].ref == want.refs[i]);
    CHECK(got.members[i].distance == want.distances[i]);
  }
  CHECK(got.threshold == (want.distances.empty() ? 0.0 : want.distances.back()));
}

} // namespace

TEST_CASE("only other persons are cross-person candidates")
{
  SceneIndex same("v", {entry(1, 0, {0.0}), entry(1, 1, {1.0}), entry(1, 2, {2.0})});
  CHECK(cross_person_neighbors(same, make_snippet_ref("v", 1, 0), 16).members.empty());

  SceneIndex three("v", {entry(0, 0, {0.0}), entry(1, 0, {1.0}), entry(2, 0, {2.0}), entry(3, 0, {3.0})});
  const auto n = cross_person_neighbors(three, make_snippet_ref("v", 0, 0), 2);
  REQUIRE(n.members.size() == 2);
  CHECK(n.members[0].distance == 1.0);
  CHECK(n.members[1].distance == 2.0);
  CHECK(n.threshold == 2.0);
}

TEST_CASE("temporal mask of the self-inspection graph")
{
  SceneIndex idx("v", {entry(0, 100, {0.0}), entry(0, 150, {1.0}), entry(0, 200, {2.0}), entry(0, 164, {3.0}),
                       entry(0, 165, {4.0}), entry(1, 300, {0.5})});
  const auto n = self_inspection_neighbors(idx, make_snippet_ref("v", 0, 100), 16, 4.0, 16);
  std::vector<std::string> refs;
  for (const auto& m : n.members) {
    refs.push_back(m.ref);
  }
  // 150 and 164 are within 64 frames; 165 and 200 are not.
  CHECK(refs == std::vector<std::string>{make_snippet_ref("v", 0, 200), make_snippet_ref("v", 0, 165)});

  SceneIndex shortish("v", {entry(0, 0, {0.0}), entry(0, 30, {1.0}), entry(0, 60, {2.0})});
  CHECK(self_inspection_neighbors(shortish, make_snippet_ref("v", 0, 30), 16, 4.0, 16).members.empty());
}

TEST_CASE("neighborhoods equal an exhaustive scan")
{
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto idx = random_scene(seed, 80);
    for (std::size_t q = 0; q < idx.size(); q += 3) {
      const auto& ref = idx.entry(q).ref;
      expect_same(cross_person_neighbors(idx, ref, 5),
                  oracle::scan(idx, q, 5, [](const auto& a, const auto& b) { return a.person_id != b.person_id; }));
      expect_same(self_inspection_neighbors(idx, ref, 4, 2.0, 3), oracle::scan(idx, q, 4, [](const auto& a, const auto& b) {
                    return a.person_id == b.person_id && std::abs(a.timestamp - b.timestamp) > 6;
                  }));
    }
  }
}

TEST_CASE("uniqueness score branches")
{
  SceneIndex flat("v", {entry(0, 0, {1.0, 1.0}), entry(1, 0, {1.0, 1.0}), entry(0, 100, {1.0, 1.0})});
  for (const auto& u : scene_uniqueness(flat, {16, 4.0, 16})) {
    CHECK(u.score == 0.0);
    CHECK_FALSE(u.isolated);
  }

  Neighborhood empty;
  empty.query = "q";
  Neighborhood self;
  self.query = "q";
  self.kind = NeighborKind::SelfInspection;
  self.members = {{0, "a", 1.6}, {1, "b", 1.6}};
  self.threshold = 1.6;
  CHECK(std::fabs(uniqueness_score(empty, self, 2).score - 3.2) <= 1e-12);
  // Fewer than k members: k times the mean.
  CHECK(std::fabs(uniqueness_score(empty, self, 4).score - 6.4) <= 1e-12);

  const auto lonely = uniqueness_score(empty, empty, 16);
  CHECK(lonely.score == 0.0);
  CHECK(lonely.isolated);

  Neighborhood other = self;
  other.query = "r";
  CHECK_THROWS_AS(uniqueness_score(empty, other, 2), Error);
}

TEST_CASE("uniqueness scales with the features")
{
  const auto idx = random_scene(77, 60);
  std::vector<SceneEntry> scaled = idx.entries();
  for (auto& e : scaled) {
    for (auto& v : e.feature) {
      v *= 2.0;
    }
  }
  const auto a = scene_uniqueness(idx, {5, 1.0, 2});
  const auto b = scene_uniqueness(SceneIndex("v", scaled), {5, 1.0, 2});
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::fabs(b[i].score - 2.0 * a[i].score) <= 1e-12 * std::max(1.0, a[i].score));
  }
}

TEST_CASE("one outlier among nine conforming agents has the top score")
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<SceneEntry> entries;
  for (int p = 0; p < 10; ++p) {
    for (int t = 0; t < 120; t += 4) {
      const double base = p == 9 ? 3.0 : 0.0;
      entries.push_back(entry(p, t, {base + noise(rng), noise(rng), noise(rng), noise(rng)}));
    }
  }
  const SceneIndex idx("v", entries);
  const auto scores = scene_uniqueness(idx, {16, 4.0, 16});
  std::size_t best = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].score > scores[best].score) {
      best = i;
    }
  }
  CHECK(idx.entry(best).person_id == 9);
}

TEST_CASE("scene index validation")
{
  CHECK_THROWS_AS(SceneIndex("v", {entry(0, 0, {1.0}), entry(0, 0, {2.0})}), Error);
  CHECK_THROWS_AS(SceneIndex("v", {entry(0, 0, {1.0}), entry(1, 0, {1.0, 2.0})}), Error);
  SceneIndex idx("v", {entry(0, 0, {1.0})});
  CHECK_THROWS_AS(cross_person_neighbors(idx, "nope", 3), Error);
}
