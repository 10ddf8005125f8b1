#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "skel_sentinel/cli.hpp"
#include "skel_sentinel/config.hpp"

using namespace sentinel;

namespace {

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args)
{
  args.insert(args.begin(), "skel-sentinel");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out, err;
  Run r;
  r.status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST_CASE("check passes")
{
  const auto r = run({"check"});
  CHECK(r.status == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("usage errors exit 2 with one line")
{
  const auto r = run({"score", "--features", "x.skem"});
  CHECK(r.status == 2);
  CHECK(r.err.rfind("error: usage: ", 0) == 0);
  CHECK(r.err.find('\n') == r.err.size() - 1);
  CHECK(run({"frobnicate"}).status == 2);
  CHECK(run({"check", "--bogus"}).status == 2);
  CHECK(run({"synth", "--set", "nope=1"}).status == 2);
  CHECK(run({"synth", "--grid", "k"}).status == 2);
}

TEST_CASE("stage failures exit 1")
{
  const auto dir = testing::scratch("cli_fail");
  const auto r = run({"eval", "--scores", (dir / "none.tsv").string(), "--labels", (dir / "none.tsv").string(),
                      "--out", (dir / "o").string()});
  CHECK(r.status == 1);
  CHECK(r.err.rfind("error: io: ", 0) == 0);
}

TEST_CASE("help lists every flag with a default")
{
  for (const char* cmd : {"synth", "featurize", "select", "train", "score", "eval", "check"}) {
    const auto r = run({cmd, "--help"});
    CHECK(r.status == 0);
    for (const char* flag : {"--config", "--seed", "--threads", "--out", "--set", "--grid"}) {
      CHECK(r.out.find(flag) != std::string::npos);
    }
    std::istringstream lines(r.out);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find("  --") == 0) {
        INFO(cmd << ": " << line);
        CHECK((line.find('[') != std::string::npos || line.find("REQUIRED") != std::string::npos));
      }
    }
  }
}

TEST_CASE("small pipeline through the command line, twice")
{
  const auto dir = testing::scratch("cli_pipeline");
  const auto d = [&](const char* s) { return (dir / s).string(); };
  std::ofstream(d("small.cfg")) << "synth_videos = 3\nsynth_video_length = 120\ncorpus_clips = 6\nepochs = 2\n"
                                   "flow_hidden = 16\nfeature_dim = 16\n";
  for (const char* run_dir : {"a", "b"}) {
    const auto root = dir / run_dir;
    const auto p = [&](const char* s) { return (root / s).string(); };
    const std::vector<std::string> common{"--config", d("small.cfg"), "--seed", "5"};
    auto with = [&](std::vector<std::string> args) {
      args.insert(args.end(), common.begin(), common.end());
      const auto r = run(args);
      INFO(r.err);
      REQUIRE(r.status == 0);
    };
    with({"synth", "--out", p("data")});
    with({"featurize", "--tracks", p("data/train_tracks.tsv"), "--labels", p("data/train_labels.tsv"), "--out",
          p("src")});
    with({"select", "--features", p("src/features.skem"), "--texts", p("src/texts.skem"), "--labels",
          p("data/train_labels.tsv"), "--spec", p("data/typicality.txt"), "--out", p("sel")});
    with({"train", "--features", p("src/features.skem"), "--texts", p("src/texts.skem"), "--labels",
          p("data/train_labels.tsv"), "--spec", p("data/typicality.txt"), "--out", p("train")});
    with({"score", "--model", p("train/model.skfl"), "--tracks", p("data/test_tracks.tsv"), "--labels",
          p("data/test_labels.tsv"), "--out", p("score")});
    with({"eval", "--scores", p("score/scores.tsv"), "--labels", p("data/test_labels.tsv"), "--kinds",
          p("data/test_kinds.tsv"), "--out", p("eval")});
    CHECK(std::filesystem::exists(root / "eval" / "config.txt"));
    CHECK(load_config((root / "train" / "config.txt").string()).epochs == 2);
  }
  for (const char* f : {"data/test_tracks.tsv", "src/features.skem", "sel/selection.tsv", "train/model.skfl",
                        "score/scores.tsv", "score/snippets.tsv", "eval/report.txt"}) {
    INFO(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
}

TEST_CASE("grid expands into one run per value")
{
  const auto dir = testing::scratch("cli_grid");
  const auto r = run({"synth", "--set", "synth_videos=1", "--set", "corpus_clips=1", "--grid", "synth_agents=3,4",
                      "--out", dir.string()});
  REQUIRE(r.status == 0);
  CHECK(load_config((dir / "synth_agents=3" / "config.txt").string()).synth_agents == 3);
  CHECK(load_config((dir / "synth_agents=4" / "config.txt").string()).synth_agents == 4);
}
