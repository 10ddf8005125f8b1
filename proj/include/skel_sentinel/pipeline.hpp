#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skel_sentinel/config.hpp"
#include "skel_sentinel/eval.hpp"
#include "skel_sentinel/featurize.hpp"
#include "skel_sentinel/flow.hpp"
#include "skel_sentinel/pose_io.hpp"
#include "skel_sentinel/scoring.hpp"
#include "skel_sentinel/synth.hpp"
#include "skel_sentinel/typicality.hpp"

namespace sentinel {

/// Windows, normalizes and embeds every track with the kinematic
/// featurizer. Degenerate snippets are skipped and counted in `dropped`.
FeatureStore featurize_tracks(const TrackSet& tracks, const RunConfig& config, std::size_t* dropped = nullptr);

/// Unit-norm mean feature of each class, in label order. Stands in for a
/// text encoder aligned with the skeleton feature space.
FeatureStore class_prototypes(const FeatureStore& features, const ClassMap& classes);

struct TrainOutcome {
  FlowModel model;
  std::vector<double> loss_history;
  SelectionResult selection;
};

/// Top-beta selection followed by flow training on the selected snippets.
TrainOutcome train_typicality(const FeatureStore& features, const FeatureStore& texts, const TrackLabels& labels,
                              const TypicalitySpec& spec, const RunConfig& config);

struct ScoreOptions {
  bool use_typicality = true;
  bool use_uniqueness = true;
};

/// Scores every video present in `features`. Frame arrays take their length
/// from `video_lengths` when listed there, else from the last covered frame.
/// Videos listed in `video_lengths` without snippets get all-zero frames.
std::vector<ScoreSeries> score_videos(const FlowModel& model, const FeatureStore& features,
                                      const std::map<std::string, int>& video_lengths, const RunConfig& config,
                                      ScoreOptions options = {});

/// Recombines already-computed per-snippet scores under a different
/// ablation without re-running the flow or the neighbor search.
std::vector<ScoreSeries> rescore(const std::vector<ScoreSeries>& series, const RunConfig& config, ScoreOptions options);

/// `video_id \t kind` lines written by the synthetic generator.
std::map<std::string, std::string> load_video_kinds(const std::string& path);

struct BenchmarkInputs {
  std::string tracks_path;
  std::string features_path; // used when config.features == "file"
  std::string model_path;
  std::string labels_path;
  std::string kinds_path;    // optional; enables per-kind and ablation AUCs
};

struct BenchmarkReport {
  EvalReport eval;
  double wall_seconds = 0.0;
  std::vector<ScoreSeries> series;
};

/// Source corpus plus test benchmark as configured by the synth_* and
/// corpus_* keys and the derived seeds.
struct SyntheticData {
  SourceCorpus corpus;
  TrackSet test_tracks;
  FrameLabels test_labels;
  std::map<std::string, std::string> test_kinds;
};
SyntheticData make_synthetic(const RunConfig& config);
void write_video_kinds(const std::string& path, const std::map<std::string, std::string>& kinds);

/// Loads everything, scores, evaluates and writes scores.tsv, snippets.tsv,
/// report.txt, runtime.txt and config.txt into `out_dir`. Errors are
/// re-thrown with the failing stage in the message.
BenchmarkReport run_benchmark(const BenchmarkInputs& inputs, const RunConfig& config, const std::string& out_dir);

/// Adds micro_auc.<kind>, micro_auc.<kind>.typicality_only and
/// micro_auc.<kind>.uniqueness_only entries to `report`.
void add_subset_metrics(EvalReport& report, const std::vector<ScoreSeries>& series, const FrameLabels& labels,
                        const std::map<std::string, std::string>& kinds, const RunConfig& config);

} // namespace sentinel
