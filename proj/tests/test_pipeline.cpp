#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "skel_sentinel/error.hpp"
#include "skel_sentinel/parallel.hpp"
#include "skel_sentinel/pipeline.hpp"

using namespace sentinel;

namespace {

RunConfig small_config()
{
  RunConfig c;
  c.synth_videos = 3;
  c.synth_video_length = 120;
  c.corpus_clips = 6;
  c.epochs = 3;
  c.flow_hidden = 16;
  c.feature_dim = 16;
  c.batch_size = 100;
  return c;
}

struct Outputs {
  std::string model;
  std::string scores;
};

Outputs run_with_threads(unsigned threads)
{
  set_thread_limit(threads);
  const auto config = small_config();
  const auto data = make_synthetic(config);
  const auto source = featurize_tracks(data.corpus.tracks, config);
  const auto texts = class_prototypes(source, snippet_classes(source, data.corpus.labels));
  const auto trained = train_typicality(source, texts, data.corpus.labels, data.corpus.spec, config);
  std::map<std::string, int> lengths;
  for (const auto& [video, labels] : data.test_labels) {
    lengths[video] = static_cast<int>(labels.size());
  }
  const auto series = score_videos(trained.model, featurize_tracks(data.test_tracks, config), lengths, config);
  std::ostringstream scores;
  write_frame_scores(scores, series);
  set_thread_limit(0);
  return {encode_flow(trained.model), scores.str()};
}

} // namespace

TEST_CASE("outputs do not depend on the worker count")
{
  const auto one = run_with_threads(1);
  const auto four = run_with_threads(4);
  CHECK(one.model == four.model);
  CHECK(one.scores == four.scores);
}

TEST_CASE("parallel_for visits every index once")
{
  set_thread_limit(3);
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  set_thread_limit(0);
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST_CASE("class prototypes are unit-norm class means")
{
  FeatureStore f(2);
  f.add("a", std::vector<double>{2, 0});
  f.add("b", std::vector<double>{0, 2});
  f.add("c", std::vector<double>{3, 0});
  const ClassMap classes{{"a", "x"}, {"b", "x"}, {"c", "y"}};
  const auto p = class_prototypes(f, classes);
  REQUIRE(p.size() == 2);
  const auto x = p.at("x");
  CHECK(std::fabs(x[0] - std::sqrt(0.5)) <= 1e-7);
  CHECK(std::fabs(x[1] - std::sqrt(0.5)) <= 1e-7);
  CHECK(p.at("y")[0] == 1.0f);
}

TEST_CASE("benchmark stage errors name the stage and the path")
{
  const auto dir = testing::scratch("bench_missing");
  BenchmarkInputs in;
  in.model_path = (dir / "nowhere.skfl").string();
  in.labels_path = (dir / "labels.tsv").string();
  in.tracks_path = (dir / "tracks.tsv").string();
  try {
    run_benchmark(in, RunConfig{}, (dir / "out").string());
    FAIL("expected error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("load model") != std::string::npos);
    CHECK(msg.find("nowhere.skfl") != std::string::npos);
  }
}
