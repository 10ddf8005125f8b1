#include "skel_sentinel/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skel_sentinel/diagnostics.hpp"
#include "skel_sentinel/error.hpp"
#include "skel_sentinel/parallel.hpp"
#include "skel_sentinel/pipeline.hpp"
#include "text_util.hpp"

namespace sentinel {

namespace fs = std::filesystem;

namespace {

// Flags shared by every subcommand.
struct Common {
  std::string config_path;
  std::uint64_t seed = RunConfig{}.seed;
  int threads = 0;
  std::string out = "out";
  std::vector<std::string> sets;
  std::vector<std::string> grids;
};

struct Paths {
  std::string tracks;
  std::string features;
  std::string texts;
  std::string labels;
  std::string spec;
  std::string model;
  std::string scores;
  std::string kinds;
  std::string ablate = "none";
};

void add_common(CLI::App* cmd, Common& c)
{
  cmd->add_option("--config", c.config_path, "key = value config file applied over the defaults");
  cmd->add_option("--seed", c.seed, "master seed; stage seeds derive from it")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker cap, 0 = SKEL_SENTINEL_THREADS or all cores")
      ->capture_default_str();
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--set", c.sets, "override one config key, key=value (repeatable)");
  cmd->add_option("--grid", c.grids, "run once per value, key=v1,v2 (repeatable; runs go to OUT/key=v/...)");
}

std::pair<std::string, std::string> split_assignment(const std::string& text, const char* flag)
{
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::Usage, std::string(flag) + " expects key=value, got '" + text + "'");
  }
  const std::string_view view(text);
  return {std::string(detail::trim(view.substr(0, eq))), std::string(detail::trim(view.substr(eq + 1)))};
}

RunConfig resolve_config(const Common& c, bool seed_given, bool threads_given)
{
  RunConfig config;
  if (!c.config_path.empty()) {
    config = load_config(c.config_path);
  }
  for (const auto& s : c.sets) {
    const auto [key, value] = split_assignment(s, "--set");
    set_config_value(config, key, value);
  }
  if (seed_given) {
    config.seed = c.seed;
  }
  if (threads_given) {
    config.threads = c.threads;
  }
  return config;
}

struct GridPoint {
  std::vector<std::pair<std::string, std::string>> assignments;
};

std::vector<GridPoint> expand_grid(const std::vector<std::string>& grids)
{
  std::vector<GridPoint> points(1);
  for (const auto& g : grids) {
    const auto [key, list] = split_assignment(g, "--grid");
    if (const auto keys = config_keys(); std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw Error(ErrorKind::Usage, "--grid: unknown config key '" + key + "'");
    }
    std::vector<std::string> values;
    for (const auto v : detail::split(list, ',')) {
      values.emplace_back(detail::trim(v));
    }
    if (values.empty() || (values.size() == 1 && values[0].empty())) {
      throw Error(ErrorKind::Usage, "--grid " + key + " has no values");
    }
    std::vector<GridPoint> next;
    for (const auto& p : points) {
      for (const auto& v : values) {
        GridPoint q = p;
        q.assignments.emplace_back(key, v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

using Stage = std::function<void(const RunConfig&, const fs::path&, std::ostream&)>;

void run_stage(const Common& c, const RunConfig& base, const Stage& stage, std::ostream& out)
{
  for (const auto& point : expand_grid(c.grids)) {
    RunConfig config = base;
    fs::path dir = c.out;
    for (const auto& [key, value] : point.assignments) {
      set_config_value(config, key, value);
      dir /= key + "=" + value;
    }
    validate(config);
    set_thread_limit(static_cast<unsigned>(config.threads));
    fs::create_directories(dir);
    save_config((dir / "config.txt").string(), config);
    stage(config, dir, out);
  }
}

std::string file_in(const fs::path& dir, const char* name) { return (dir / name).string(); }

// Stages.

void do_synth(const RunConfig& config, const fs::path& dir, std::ostream& out)
{
  const auto data = make_synthetic(config);
  write_tracks(file_in(dir, "train_tracks.tsv"), data.corpus.tracks);
  write_track_labels(file_in(dir, "train_labels.tsv"), data.corpus.labels);
  save_typicality_spec(file_in(dir, "typicality.txt"), data.corpus.spec);
  write_tracks(file_in(dir, "test_tracks.tsv"), data.test_tracks);
  write_frame_labels(file_in(dir, "test_labels.tsv"), data.test_labels);
  write_video_kinds(file_in(dir, "test_kinds.tsv"), data.test_kinds);
  out << "synth: " << data.corpus.labels.size() << " source clips, " << data.test_labels.size()
      << " test videos -> " << dir.string() << '\n';
}

void do_featurize(const Paths& p, const RunConfig& config, const fs::path& dir, std::ostream& out)
{
  std::size_t dropped = 0;
  const auto features = featurize_tracks(load_tracks(p.tracks, config.joints), config, &dropped);
  write_embeddings(file_in(dir, "features.skem"), features);
  out << "featurize: " << features.size() << " snippets (" << dropped << " degenerate dropped)";
  if (!p.labels.empty()) {
    const auto classes = snippet_classes(features, load_track_labels(p.labels));
    const auto texts = class_prototypes(features, classes);
    write_embeddings(file_in(dir, "texts.skem"), texts);
    out << ", " << texts.size() << " class embeddings";
  }
  out << '\n';
}

struct TrainingInputs {
  FeatureStore features;
  FeatureStore texts;
  TrackLabels labels;
  TypicalitySpec spec;
};

TrainingInputs load_training_inputs(const Paths& p)
{
  return {load_embeddings(p.features), load_embeddings(p.texts), load_track_labels(p.labels),
          load_typicality_spec(p.spec)};
}

void do_select(const Paths& p, const RunConfig& config, const fs::path& dir, std::ostream& out)
{
  const auto in = load_training_inputs(p);
  const auto selection = select_typical(in.features, text_embeddings(in.texts), snippet_classes(in.features, in.labels),
                                        in.spec, config.beta_normal, config.beta_abnormal);
  write_selection(file_in(dir, "selection.tsv"), selection);
  out << "select: " << selection.normal.size() << " normal, " << selection.abnormal.size() << " abnormal\n";
}

void do_train(const Paths& p, const RunConfig& config, const fs::path& dir, std::ostream& out)
{
  const auto in = load_training_inputs(p);
  const auto result = train_typicality(in.features, in.texts, in.labels, in.spec, config);
  save_flow(file_in(dir, "model.skfl"), result.model);
  write_selection(file_in(dir, "selection.tsv"), result.selection);
  std::ofstream loss(file_in(dir, "loss.tsv"), std::ios::binary);
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    loss << e << '\t' << detail::format_fixed(result.loss_history[e], 6) << '\n';
  }
  out << "train: " << result.selection.normal.size() << " normal, " << result.selection.abnormal.size()
      << " abnormal snippets, " << result.loss_history.size() << " epochs";
  if (!result.loss_history.empty()) {
    out << ", final loss " << detail::format_fixed(result.loss_history.back(), 4);
  }
  out << '\n';
}

void do_score(const Paths& p, const RunConfig& config, const fs::path& dir, std::ostream& out)
{
  if (p.features.empty() && p.tracks.empty()) {
    throw Error(ErrorKind::Usage, "score requires --features or --tracks");
  }
  const FlowModel model = load_flow(p.model);
  const FeatureStore features =
      !p.features.empty() ? load_embeddings(p.features) : featurize_tracks(load_tracks(p.tracks, config.joints), config);
  std::map<std::string, int> lengths;
  if (!p.labels.empty()) {
    for (const auto& [video, frames] : load_frame_labels(p.labels)) {
      lengths[video] = static_cast<int>(frames.size());
    }
  }
  ScoreOptions options;
  if (p.ablate == "typicality") {
    options.use_typicality = false;
  } else if (p.ablate == "uniqueness") {
    options.use_uniqueness = false;
  }
  const auto series = score_videos(model, features, lengths, config, options);
  write_frame_scores(file_in(dir, "scores.tsv"), series);
  write_snippet_scores(file_in(dir, "snippets.tsv"), series);
  std::size_t snippets = 0;
  for (const auto& s : series) {
    snippets += s.snippets.size();
  }
  out << "score: " << series.size() << " videos, " << snippets << " snippets\n";
}

void do_eval(const Paths& p, const RunConfig&, const fs::path& dir, std::ostream& out)
{
  const auto started = std::chrono::steady_clock::now();
  const auto labels = load_frame_labels(p.labels);
  const auto scores = load_frame_scores(p.scores);
  EvalReport report = evaluate(join_scores(labels, scores));
  if (!p.kinds.empty()) {
    std::map<std::string, FrameLabels> by_kind;
    for (const auto& [video, kind] : load_video_kinds(p.kinds)) {
      if (const auto it = labels.find(video); it != labels.end()) {
        by_kind[kind][video] = it->second;
      }
    }
    for (const auto& [kind, subset] : by_kind) {
      try {
        report.extra.emplace_back("micro_auc." + kind, micro_auc(join_scores(subset, scores)));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::UndefinedMetric) {
          throw;
        }
      }
    }
  }
  write_report(file_in(dir, "report.txt"), report);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ofstream(file_in(dir, "runtime.txt"), std::ios::binary) << "wall_seconds = " << detail::format_fixed(seconds, 3)
                                                                << '\n';
  out << "micro_auc = " << detail::format_fixed(report.micro_auc, 6) << '\n';
}

bool do_check(std::uint64_t seed, std::ostream& out)
{
  bool ok = true;
  for (const auto& t : run_self_tests(seed)) {
    out << (t.passed ? "pass " : "FAIL ") << t.name << " error=" << t.value << " tolerance=" << t.tolerance << '\n';
    ok = ok && t.passed;
  }
  return ok;
}

std::string one_line(std::string text)
{
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Zero-shot skeleton video anomaly scoring: typicality flow + context uniqueness", "skel-sentinel"};
  app.require_subcommand(1);
  app.get_formatter()->column_width(36);

  Common common;
  Paths paths;
  std::map<std::string, CLI::App*> cmds;
  const auto add = [&](const char* name, const char* description) {
    CLI::App* cmd = app.add_subcommand(name, description);
    add_common(cmd, common);
    cmds[name] = cmd;
    return cmd;
  };

  add("synth", "generate the synthetic source corpus and test benchmark");
  auto* featurize = add("featurize", "tracks -> snippet embedding file (features.skem)");
  featurize->add_option("--tracks", paths.tracks, "track file (video, person, frame, keypoints)")->required();
  featurize->add_option("--labels", paths.labels, "track class labels; also writes texts.skem prototypes");
  for (const char* name : {"select", "train"}) {
    auto* cmd = add(name, std::string(name) == "select" ? "top-beta typical snippet selection"
                                                        : "select snippets and train the typicality flow");
    cmd->add_option("--features", paths.features, "snippet embeddings (.skem)")->required();
    cmd->add_option("--texts", paths.texts, "class label embeddings (.skem)")->required();
    cmd->add_option("--labels", paths.labels, "track class labels")->required();
    cmd->add_option("--spec", paths.spec, "normal / abnormal action lists")->required();
  }
  auto* score = add("score", "typicality + uniqueness scoring of test videos");
  score->add_option("--model", paths.model, "trained flow checkpoint (.skfl)")->required();
  score->add_option("--features", paths.features, "test snippet embeddings; else --tracks is featurized");
  score->add_option("--tracks", paths.tracks, "test track file");
  score->add_option("--labels", paths.labels, "frame labels, used for video lengths");
  score->add_option("--ablate", paths.ablate, "drop one score family")
      ->check(CLI::IsMember({"none", "typicality", "uniqueness"}))
      ->capture_default_str();
  auto* eval = add("eval", "frame-level micro AUC");
  eval->add_option("--scores", paths.scores, "frame scores (scores.tsv)")->required();
  eval->add_option("--labels", paths.labels, "frame labels")->required();
  eval->add_option("--kinds", paths.kinds, "video kinds; adds per-kind micro AUC");
  add("check", "numerical self-tests: invertibility, log-det, gradient");
  // Show a default for every flag in --help.
  for (auto& [cmd_name, cmd] : cmds) {
    for (CLI::Option* opt : cmd->get_options()) {
      if (opt->get_expected_min() > 0 && !opt->get_required() && opt->get_default_str().empty()) {
        opt->default_str("unset");
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) {
      target = sub;
    }
    out << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  const bool seed_given = chosen->count("--seed") > 0;
  const bool threads_given = chosen->count("--threads") > 0;

  try {
    const RunConfig base = resolve_config(common, seed_given, threads_given);
    if (name == "check") {
      set_thread_limit(static_cast<unsigned>(base.threads));
      return do_check(base.seed, out) ? 0 : 1;
    }
    // Usage errors must surface before any output is written.
    expand_grid(common.grids);
    if (name == "score") {
      if (paths.features.empty() && paths.tracks.empty()) {
        throw Error(ErrorKind::Usage, "score requires --features or --tracks");
      }
    }
    Stage stage;
    if (name == "synth") {
      stage = do_synth;
    } else if (name == "featurize") {
      stage = [&](const RunConfig& c, const fs::path& d, std::ostream& o) { do_featurize(paths, c, d, o); };
    } else if (name == "select") {
      stage = [&](const RunConfig& c, const fs::path& d, std::ostream& o) { do_select(paths, c, d, o); };
    } else if (name == "train") {
      stage = [&](const RunConfig& c, const fs::path& d, std::ostream& o) { do_train(paths, c, d, o); };
    } else if (name == "score") {
      stage = [&](const RunConfig& c, const fs::path& d, std::ostream& o) { do_score(paths, c, d, o); };
    } else {
      stage = [&](const RunConfig& c, const fs::path& d, std::ostream& o) { do_eval(paths, c, d, o); };
    }
    run_stage(common, base, stage, out);
    return 0;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << '\n';
    return e.kind() == ErrorKind::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: io: " << one_line(e.what()) << '\n';
    return 1;
  }
}

} // namespace sentinel
