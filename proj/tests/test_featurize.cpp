#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "helpers.hpp"
#include "skel_sentinel/error.hpp"
#include "skel_sentinel/featurize.hpp"

using namespace sentinel;

namespace {

NormalizedSnippet sample_snippet(std::uint64_t seed, int joints = 17)
{
  const auto t = testing::random_track("v", 0, 0, 16, joints, seed);
  return normalize_snippet(window_snippets(t, 16, 1).at(0));
}

FeatureStore small_store(int count, int dim)
{
  FeatureStore store(dim);
  for (int i = 0; i < count; ++i) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      v[static_cast<std::size_t>(d)] = 0.25 * i - 0.5 * d + 1.0 / 3.0;
    }
    store.add(make_snippet_ref("v", i, 0), v);
  }
  return store;
}

} // namespace

TEST_CASE("cosine similarity basics")
{
  const std::vector<double> v{0.3, -1.2, 2.0};
  const std::vector<double> v5{1.5, -6.0, 10.0};
  CHECK(std::fabs(cosine_similarity(v, v) - 1.0) <= 1e-15);
  CHECK(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  CHECK(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{-1, 0}) == -1.0);
  const std::vector<double> w{0.7, 0.1, -0.4};
  CHECK(std::fabs(cosine_similarity(v, w) - cosine_similarity(v5, w)) <= 1e-9);
  CHECK_THROWS_AS(cosine_similarity(std::vector<double>{0, 0}, std::vector<double>{1, 0}), Error);
}

TEST_CASE("kinematic features: shape, determinism, invariance")
{
  const auto s = sample_snippet(1);
  const auto f = kinematic_features(s, 64, 9);
  CHECK(f.values.size() == 64);
  CHECK(f.snippet_ref == s.source_ref);
  CHECK(kinematic_features(s, 64, 9).values == f.values);

  // A translated and scaled copy normalizes to the same snippet.
  const auto raw = window_snippets(testing::random_track("v", 0, 0, 16, 17, 1), 16, 1).at(0);
  Snippet moved = raw;
  for (std::size_t i = 0; i < moved.coords.size(); ++i) {
    moved.coords[i] = moved.coords[i] * 3.0 + (i % 2 ? 40.0 : -15.0);
  }
  const auto g = kinematic_features(normalize_snippet(moved), 64, 9);
  for (std::size_t d = 0; d < 64; ++d) {
    CHECK(std::fabs(g.values[d] - f.values[d]) <= 1e-9);
  }
  CHECK_THROWS_AS(kinematic_features(s, 3, 9), Error);
}

TEST_CASE("static pose has zero velocity block")
{
  auto t = testing::random_track("v", 0, 0, 16, 5, 2);
  for (auto& f : t.frames) {
    f.keypoints = t.frames[0].keypoints;
  }
  const auto s = normalize_snippet(window_snippets(t, 16, 1).at(0));
  KinematicFeaturizer fz(5, 16, 8, 1);
  const auto desc = fz.descriptor(s);
  REQUIRE(desc.size() == fz.descriptor_size());
  const std::size_t coords = 2 * 5 * 16;
  const std::size_t velocities = 2 * 5 * 15;
  for (std::size_t i = coords; i < coords + velocities; ++i) {
    CHECK(desc[i] == 0.0);
  }
}

TEST_CASE("projection rows are orthonormal")
{
  KinematicFeaturizer fz(5, 16, 8, 3);
  const auto& p = fz.projection();
  const std::size_t n = fz.descriptor_size();
  for (std::size_t a = 0; a < 8; ++a) {
    for (std::size_t b = 0; b < 8; ++b) {
      double dot = 0;
      for (std::size_t i = 0; i < n; ++i) {
        dot += p[a * n + i] * p[b * n + i];
      }
      CHECK(std::fabs(dot - (a == b ? 1.0 : 0.0)) <= 1e-12);
    }
  }
}

TEST_CASE("embedding file: counts, truncation, round trip")
{
  const auto dir = testing::scratch("embeddings");
  const auto store = small_store(3, 8);
  const auto bytes = encode_embeddings(store);
  CHECK(bytes.size() == 4 + 2 + 4 + 4 + 96);
  const auto loaded = decode_embeddings(bytes, store.refs());
  CHECK(loaded.size() == 3);
  CHECK_THROWS_AS(decode_embeddings(bytes.substr(0, bytes.size() - 4), store.refs()), Error);

  const std::string path = (dir / "f.skem").string();
  write_embeddings(path, store);
  const auto back = load_embeddings(path);
  REQUIRE(back.size() == store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    CHECK(back.ref(i) == store.ref(i));
    const auto a = back.row(i);
    const auto b = store.row(i);
    CHECK(std::memcmp(a.data(), b.data(), a.size_bytes()) == 0);
  }
  CHECK(back.at(store.ref(1)).data() != nullptr);
  CHECK_THROWS_AS(back.at("missing"), Error);
}

TEST_CASE("store rejects duplicates and bad rows")
{
  FeatureStore s(2);
  s.add("a", std::vector<double>{1, 2});
  CHECK_THROWS_AS(s.add("a", std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(s.add("b", std::vector<double>{1, 2, 3}), Error);
  CHECK_THROWS_AS(s.add("c", std::vector<double>{1, NAN}), Error);
}

TEST_CASE("text embeddings must be unit norm")
{
  FeatureStore s(2);
  s.add("walking", std::vector<double>{0.6, 0.8});
  CHECK(text_embeddings(s).size() == 1);
  s.add("running", std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(text_embeddings(s), Error);
}
