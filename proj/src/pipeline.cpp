#include "skel_sentinel/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "skel_sentinel/context.hpp"
#include "skel_sentinel/error.hpp"
#include "skel_sentinel/parallel.hpp"
#include "text_util.hpp"

namespace sentinel {

FeatureStore featurize_tracks(const TrackSet& tracks, const RunConfig& config, std::size_t* dropped)
{
  const KinematicFeaturizer featurizer(config.joints, config.window_length, config.feature_dim, config.feature_seed());
  std::vector<const Track*> flat;
  for (const auto& [video, list] : tracks) {
    for (const auto& t : list) {
      flat.push_back(&t);
    }
  }

  struct TrackFeatures {
    std::vector<FeatureVector> rows;
    std::size_t dropped = 0;
  };
  std::vector<TrackFeatures> results(flat.size());
  parallel_for(flat.size(), [&](std::size_t i) {
    for (const auto& snippet : window_snippets(*flat[i], config.window_length, config.stride)) {
      try {
        results[i].rows.push_back(featurizer(normalize_snippet(snippet)));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateSnippet) {
          throw;
        }
        ++results[i].dropped;
      }
    }
  });

  FeatureStore store(config.feature_dim);
  std::size_t total_dropped = 0;
  for (const auto& r : results) {
    for (const auto& fv : r.rows) {
      store.add(fv.snippet_ref, std::span<const double>(fv.values));
    }
    total_dropped += r.dropped;
  }
  if (dropped != nullptr) {
    *dropped = total_dropped;
  }
  return store;
}

FeatureStore class_prototypes(const FeatureStore& features, const ClassMap& classes)
{
  std::map<std::string, std::vector<double>> sums;
  const auto D = static_cast<std::size_t>(features.dimension());
  // Sorted refs keep the float summation order reproducible.
  std::vector<std::pair<std::string, std::string>> sorted(classes.begin(), classes.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [ref, label] : sorted) {
    auto& sum = sums[label];
    sum.resize(D, 0.0);
    const auto row = features.at(ref);
    for (std::size_t d = 0; d < D; ++d) {
      sum[d] += row[d];
    }
  }
  FeatureStore out(features.dimension());
  for (auto& [label, sum] : sums) {
    double norm = 0.0;
    for (const double v : sum) {
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      throw Error(ErrorKind::DegenerateVector, "class '" + label + "' has a zero mean feature");
    }
    for (auto& v : sum) {
      v /= norm;
    }
    out.add(label, std::span<const double>(sum));
  }
  return out;
}

TrainOutcome train_typicality(const FeatureStore& features, const FeatureStore& texts, const TrackLabels& labels,
                              const TypicalitySpec& spec, const RunConfig& config)
{
  if (features.dimension() != config.feature_dim) {
    throw Error(ErrorKind::Dimension, "features have dimension " + std::to_string(features.dimension()) +
                                          ", config expects " + std::to_string(config.feature_dim));
  }
  const auto classes = snippet_classes(features, labels);
  auto selection = select_typical(features, text_embeddings(texts), classes, spec, config.beta_normal,
                                  config.beta_abnormal);
  if (selection.normal.empty()) {
    throw Error(ErrorKind::EmptyBatch, "no snippets selected from the normal classes");
  }

  auto to_matrix = [&](const std::vector<SelectedSnippet>& picked) {
    Matrix m;
    m.cols = static_cast<std::size_t>(features.dimension());
    for (const auto& s : picked) {
      const auto row = features.at(s.ref);
      const std::vector<double> values(row.begin(), row.end());
      m.push_row(values);
    }
    return m;
  };
  const Matrix normal = to_matrix(selection.normal);
  const Matrix abnormal = to_matrix(selection.abnormal);

  FlowModel model = init_flow(config.feature_dim, config.flow_layers, config.flow_hidden, config.flow_seed());
  if (config.fit_normalization) {
    fit_normalization(model, normal);
  }
  TrainConfig tc;
  tc.learning_rate = config.learning_rate;
  tc.batch_size = static_cast<std::size_t>(config.batch_size);
  tc.epochs = config.epochs;
  tc.seed = config.train_seed();
  auto trained = train_flow(std::move(model), normal, abnormal, tc);
  return {std::move(trained.model), std::move(trained.loss_history), std::move(selection)};
}

namespace {

void finish_series(ScoreSeries& s, int video_length, const RunConfig& config, ScoreOptions options)
{
  std::vector<double> st;
  std::vector<double> su;
  for (const auto& r : s.snippets) {
    st.push_back(r.typicality);
    su.push_back(r.uniqueness);
  }
  if (!s.snippets.empty()) {
    std::vector<double> fused;
    if (options.use_typicality && options.use_uniqueness) {
      fused = holistic_scores(st, su, config.epsilon);
    } else if (options.use_typicality) {
      fused = standardize(st, config.epsilon);
    } else if (options.use_uniqueness) {
      fused = standardize(su, config.epsilon);
    } else {
      throw Error(ErrorKind::Contract, "at least one score family must be enabled");
    }
    for (std::size_t i = 0; i < fused.size(); ++i) {
      s.snippets[i].holistic = fused[i];
    }
  }
  s.frames = frame_level_scores(s.snippets, video_length, config.window_length).frames;
  if (config.smoothing > 1) {
    s.frames = smooth_scores(s.frames, config.smoothing);
  }
}

int covered_length(const ScoreSeries& s, int window_length)
{
  int length = 1;
  for (const auto& r : s.snippets) {
    length = std::max(length, r.start_time + window_length);
  }
  return length;
}

} // namespace

std::vector<ScoreSeries> score_videos(const FlowModel& model, const FeatureStore& features,
                                      const std::map<std::string, int>& video_lengths, const RunConfig& config,
                                      ScoreOptions options)
{
  if (features.dimension() != model.dimension()) {
    throw Error(ErrorKind::Dimension, "feature dimension " + std::to_string(features.dimension()) +
                                          " does not match model dimension " + std::to_string(model.dimension()));
  }
  std::map<std::string, std::vector<std::size_t>> rows_by_video;
  for (std::size_t r = 0; r < features.size(); ++r) {
    rows_by_video[parse_snippet_ref(features.ref(r)).video_id].push_back(r);
  }
  for (const auto& [video, length] : video_lengths) {
    rows_by_video[video];
  }

  std::vector<ScoreSeries> out;
  for (auto& [video, rows] : rows_by_video) {
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) { return features.ref(a) < features.ref(b); });
    ScoreSeries series;
    series.video_id = video;
    std::vector<SceneEntry> entries;
    for (const auto r : rows) {
      const auto key = parse_snippet_ref(features.ref(r));
      entries.push_back({features.ref(r), key.person_id, key.start_time, features.row_as_double(r)});
    }
    series.snippets.resize(entries.size());
    parallel_for(entries.size(), [&](std::size_t i) {
      auto& s = series.snippets[i];
      s.ref = entries[i].ref;
      s.person_id = entries[i].person_id;
      s.start_time = entries[i].timestamp;
      s.typicality = typicality_score(model, entries[i].feature);
    });
    const SceneIndex index(video, std::move(entries));
    const auto uniq = scene_uniqueness(index, {config.k, config.alpha, config.window_length});
    for (std::size_t i = 0; i < uniq.size(); ++i) {
      series.snippets[i].uniqueness = uniq[i].score;
    }
    const auto it = video_lengths.find(video);
    const int length = it != video_lengths.end() ? it->second : covered_length(series, config.window_length);
    finish_series(series, length, config, options);
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<ScoreSeries> rescore(const std::vector<ScoreSeries>& series, const RunConfig& config, ScoreOptions options)
{
  std::vector<ScoreSeries> out = series;
  for (auto& s : out) {
    finish_series(s, static_cast<int>(s.frames.size()), config, options);
  }
  return out;
}

std::map<std::string, std::string> load_video_kinds(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path);
  }
  std::map<std::string, std::string> kinds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 2) {
      throw Error(ErrorKind::Parse, path + ": expected video_id, kind");
    }
    kinds[std::string(fields[0])] = std::string(fields[1]);
  }
  return kinds;
}

void write_video_kinds(const std::string& path, const std::map<std::string, std::string>& kinds)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  for (const auto& [video, kind] : kinds) {
    out << video << '\t' << kind << '\n';
  }
}

SyntheticData make_synthetic(const RunConfig& config)
{
  validate(config);
  if (config.joints != kSynthJoints) {
    throw Error(ErrorKind::Contract, "synthetic data uses " + std::to_string(kSynthJoints) + " joints");
  }
  SyntheticData out;
  CorpusConfig cc;
  cc.clips_per_class = config.corpus_clips;
  cc.clip_length = config.corpus_clip_length;
  cc.noise = config.synth_noise;
  cc.seed = config.corpus_seed();
  out.corpus = source_corpus(cc);

  BenchmarkConfig bc;
  bc.videos = config.synth_videos;
  bc.video_length = config.synth_video_length;
  bc.agents = config.synth_agents;
  bc.noise = config.synth_noise;
  bc.seed = config.benchmark_seed();
  const auto videos = benchmark_videos(bc);
  std::vector<Scene> scenes(videos.size());
  parallel_for(videos.size(), [&](std::size_t i) { scenes[i] = generate_scene(videos[i].scene); });
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const auto& id = videos[i].scene.video_id;
    for (auto& [video, tracks] : scenes[i].tracks) {
      out.test_tracks[video] = std::move(tracks);
    }
    out.test_labels[id] = std::move(scenes[i].labels);
    out.test_kinds[id] = to_string(videos[i].kind);
  }
  return out;
}

namespace {

std::map<std::string, std::vector<double>> frames_of(const std::vector<ScoreSeries>& series)
{
  std::map<std::string, std::vector<double>> out;
  for (const auto& s : series) {
    out[s.video_id] = s.frames;
  }
  return out;
}

template <typename F>
auto stage(const char* name, F&& f)
{
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

} // namespace

void add_subset_metrics(EvalReport& report, const std::vector<ScoreSeries>& series, const FrameLabels& labels,
                        const std::map<std::string, std::string>& kinds, const RunConfig& config)
{
  std::set<std::string> kind_names;
  for (const auto& [video, kind] : kinds) {
    kind_names.insert(kind);
  }
  const auto typ_only = rescore(series, config, {true, false});
  const auto uniq_only = rescore(series, config, {false, true});
  for (const auto& kind : kind_names) {
    FrameLabels subset;
    for (const auto& [video, frames] : labels) {
      if (const auto it = kinds.find(video); it != kinds.end() && it->second == kind) {
        subset[video] = frames;
      }
    }
    const auto all = join_scores(subset, frames_of(series));
    try {
      const double full = micro_auc(all);
      report.extra.emplace_back("micro_auc." + kind, full);
      report.extra.emplace_back("micro_auc." + kind + ".typicality_only", micro_auc(join_scores(subset, frames_of(typ_only))));
      report.extra.emplace_back("micro_auc." + kind + ".uniqueness_only", micro_auc(join_scores(subset, frames_of(uniq_only))));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UndefinedMetric) {
        throw;
      }
    }
  }
}

BenchmarkReport run_benchmark(const BenchmarkInputs& inputs, const RunConfig& config, const std::string& out_dir)
{
  const auto started = std::chrono::steady_clock::now();
  validate(config);
  const FlowModel model = stage("load model", [&] { return load_flow(inputs.model_path); });
  const FrameLabels labels = stage("load labels", [&] { return load_frame_labels(inputs.labels_path); });
  const FeatureStore features = stage("features", [&] {
    if (config.features == "file") {
      return load_embeddings(inputs.features_path);
    }
    return featurize_tracks(load_tracks(inputs.tracks_path, config.joints), config);
  });

  std::map<std::string, int> lengths;
  for (const auto& [video, frames] : labels) {
    lengths[video] = static_cast<int>(frames.size());
  }
  BenchmarkReport out;
  out.series = stage("score", [&] { return score_videos(model, features, lengths, config); });
  out.eval = stage("eval", [&] { return evaluate(join_scores(labels, frames_of(out.series))); });
  if (!inputs.kinds_path.empty()) {
    const auto kinds = stage("load kinds", [&] { return load_video_kinds(inputs.kinds_path); });
    stage("subset eval", [&] {
      add_subset_metrics(out.eval, out.series, labels, kinds, config);
      return 0;
    });
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  stage("write outputs", [&] {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_frame_scores((dir / "scores.tsv").string(), out.series);
    write_snippet_scores((dir / "snippets.tsv").string(), out.series);
    write_report((dir / "report.txt").string(), out.eval);
    save_config((dir / "config.txt").string(), config);
    std::ofstream runtime(dir / "runtime.txt", std::ios::binary);
    runtime << "wall_seconds = " << detail::format_fixed(out.wall_seconds, 3) << '\n';
    return 0;
  });
  return out;
}

} // namespace sentinel
