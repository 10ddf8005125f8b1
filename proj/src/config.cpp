#include "skel_sentinel/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <variant>

#include "skel_sentinel/error.hpp"
#include "text_util.hpp"

namespace sentinel {

namespace {

using Field = std::variant<int RunConfig::*, double RunConfig::*, bool RunConfig::*, std::uint64_t RunConfig::*,
                           std::string RunConfig::*>;

struct Entry {
  const char* key;
  Field field;
};

const std::vector<Entry>& entries()
{
  static const std::vector<Entry> table = {
      {"joints", &RunConfig::joints},
      {"window_length", &RunConfig::window_length},
      {"stride", &RunConfig::stride},
      {"features", &RunConfig::features},
      {"feature_dim", &RunConfig::feature_dim},
      {"beta_normal", &RunConfig::beta_normal},
      {"beta_abnormal", &RunConfig::beta_abnormal},
      {"flow_layers", &RunConfig::flow_layers},
      {"flow_hidden", &RunConfig::flow_hidden},
      {"learning_rate", &RunConfig::learning_rate},
      {"batch_size", &RunConfig::batch_size},
      {"epochs", &RunConfig::epochs},
      {"fit_normalization", &RunConfig::fit_normalization},
      {"k", &RunConfig::k},
      {"alpha", &RunConfig::alpha},
      {"epsilon", &RunConfig::epsilon},
      {"smoothing", &RunConfig::smoothing},
      {"synth_videos", &RunConfig::synth_videos},
      {"synth_video_length", &RunConfig::synth_video_length},
      {"synth_agents", &RunConfig::synth_agents},
      {"synth_noise", &RunConfig::synth_noise},
      {"corpus_clips", &RunConfig::corpus_clips},
      {"corpus_clip_length", &RunConfig::corpus_clip_length},
      {"seed", &RunConfig::seed},
      {"threads", &RunConfig::threads},
  };
  return table;
}

const Entry& lookup(const std::string& key)
{
  for (const auto& e : entries()) {
    if (key == e.key) {
      return e;
    }
  }
  throw Error(ErrorKind::Usage, "unknown config key '" + key + "'");
}

} // namespace

std::vector<std::string> config_keys()
{
  std::vector<std::string> keys;
  for (const auto& e : entries()) {
    keys.emplace_back(e.key);
  }
  return keys;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value)
{
  const auto& entry = lookup(key);
  const auto bad = [&] { return Error(ErrorKind::Parse, "bad value '" + value + "' for config key " + key); };
  std::visit(
      [&](auto member) {
        using T = std::remove_cvref_t<decltype(config.*member)>;
        if constexpr (std::is_same_v<T, int>) {
          const auto v = detail::parse_int(value);
          if (!v || *v < INT32_MIN || *v > INT32_MAX) {
            throw bad();
          }
          config.*member = static_cast<int>(*v);
        } else if constexpr (std::is_same_v<T, double>) {
          const auto v = detail::parse_double(value);
          if (!v || !std::isfinite(*v)) {
            throw bad();
          }
          config.*member = *v;
        } else if constexpr (std::is_same_v<T, bool>) {
          if (value == "true" || value == "1") {
            config.*member = true;
          } else if (value == "false" || value == "0") {
            config.*member = false;
          } else {
            throw bad();
          }
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          std::uint64_t v = 0;
          const auto* end = value.data() + value.size();
          const auto [ptr, ec] = std::from_chars(value.data(), end, v);
          if (value.empty() || ec != std::errc{} || ptr != end) {
            throw bad();
          }
          config.*member = v;
        } else {
          config.*member = value;
        }
      },
      entry.field);
}

std::string get_config_value(const RunConfig& config, const std::string& key)
{
  const auto& entry = lookup(key);
  return std::visit(
      [&](auto member) -> std::string {
        using T = std::remove_cvref_t<decltype(config.*member)>;
        if constexpr (std::is_same_v<T, double>) {
          return detail::format_double(config.*member);
        } else if constexpr (std::is_same_v<T, bool>) {
          return config.*member ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return config.*member;
        } else {
          return std::to_string(config.*member);
        }
      },
      entry.field);
}

void validate(const RunConfig& c)
{
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Usage, "invalid config: " + what); };
  if (c.joints < 2) fail("joints must be >= 2");
  if (c.window_length < 2) fail("window_length must be >= 2");
  if (c.stride < 1) fail("stride must be >= 1");
  if (c.features != "kinematic" && c.features != "file") fail("features must be 'kinematic' or 'file'");
  if (c.feature_dim < 4 || c.feature_dim % 2 != 0) fail("feature_dim must be even and >= 4");
  if (!(c.beta_normal > 0.0 && c.beta_normal <= 1.0)) fail("beta_normal must lie in (0, 1]");
  if (!(c.beta_abnormal > 0.0 && c.beta_abnormal <= 1.0)) fail("beta_abnormal must lie in (0, 1]");
  if (c.flow_layers < 1 || c.flow_hidden < 1) fail("flow_layers and flow_hidden must be >= 1");
  if (!(c.learning_rate >= 0.0)) fail("learning_rate must be >= 0");
  if (c.batch_size < 1) fail("batch_size must be >= 1");
  if (c.epochs < 0) fail("epochs must be >= 0");
  if (c.k < 1) fail("k must be >= 1");
  if (!(c.alpha >= 0.0)) fail("alpha must be >= 0");
  if (!(c.epsilon > 0.0)) fail("epsilon must be > 0");
  if (c.smoothing < 0) fail("smoothing must be >= 0");
  if (c.synth_videos < 1 || c.synth_agents < 3 || c.synth_video_length < 120) fail("synthetic benchmark too small");
  if (c.corpus_clips < 1 || c.corpus_clip_length < c.window_length) fail("corpus clips shorter than a window");
  if (c.threads < 0) fail("threads must be >= 0");
}

RunConfig parse_config(const std::string& text, RunConfig base)
{
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Parse, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    set_config_value(base, std::string(detail::trim(line.substr(0, eq))), std::string(detail::trim(line.substr(eq + 1))));
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open config " + path);
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

std::string format_config(const RunConfig& config)
{
  std::string out;
  for (const auto& e : entries()) {
    out += e.key;
    out += " = ";
    out += get_config_value(config, e.key);
    out += '\n';
  }
  return out;
}

void save_config(const std::string& path, const RunConfig& config)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  out << format_config(config);
}

} // namespace sentinel
