#include "skel_sentinel/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "skel_sentinel/error.hpp"
#include "text_util.hpp"

namespace sentinel {

void validate(const TypicalitySpec& spec)
{
  if (spec.normal_actions.empty() || spec.abnormal_actions.empty()) {
    throw Error(ErrorKind::Schema, "typicality spec needs non-empty [normal] and [abnormal] lists");
  }
  auto check_unique = [](const std::vector<std::string>& list, const char* section) {
    std::set<std::string> seen;
    for (const auto& label : list) {
      if (!seen.insert(label).second) {
        throw Error(ErrorKind::Schema, std::string("label '") + label + "' repeated in [" + section + "]");
      }
    }
  };
  check_unique(spec.normal_actions, "normal");
  check_unique(spec.abnormal_actions, "abnormal");
  const std::set<std::string> normal(spec.normal_actions.begin(), spec.normal_actions.end());
  for (const auto& label : spec.abnormal_actions) {
    if (normal.count(label) != 0) {
      throw Error(ErrorKind::Conflict, "label '" + label + "' is listed as both normal and abnormal");
    }
  }
}

TypicalitySpec parse_typicality_spec(std::istream& in)
{
  TypicalitySpec spec;
  enum class Section { None, Normal, Abnormal } section = Section::None;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    if (line == "[normal]") {
      section = Section::Normal;
    } else if (line == "[abnormal]") {
      section = Section::Abnormal;
    } else if (line.rfind("prompt", 0) == 0 && detail::trim(line.substr(6)).rfind('=', 0) == 0) {
      const auto eq = raw.find('=');
      auto value = std::string_view(raw).substr(eq + 1);
      if (!value.empty() && value.front() == ' ') {
        value.remove_prefix(1);
      }
      if (!value.empty() && value.back() == '\r') {
        value.remove_suffix(1);
      }
      spec.prompt.assign(value);
    } else if (section == Section::Normal) {
      spec.normal_actions.emplace_back(line);
    } else if (section == Section::Abnormal) {
      spec.abnormal_actions.emplace_back(line);
    } else {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": label outside a section");
    }
  }
  validate(spec);
  return spec;
}

TypicalitySpec load_typicality_spec(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open typicality spec " + path);
  }
  return parse_typicality_spec(in);
}

void save_typicality_spec(std::ostream& out, const TypicalitySpec& spec)
{
  out << "prompt = " << spec.prompt << "\n[normal]\n";
  for (const auto& label : spec.normal_actions) {
    out << label << '\n';
  }
  out << "[abnormal]\n";
  for (const auto& label : spec.abnormal_actions) {
    out << label << '\n';
  }
}

void save_typicality_spec(const std::string& path, const TypicalitySpec& spec)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  save_typicality_spec(out, spec);
}

TrackLabels load_track_labels(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open class label file " + path);
  }
  TrackLabels labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const auto fields = detail::split(line, '\t');
    const auto person = fields.size() == 3 ? detail::parse_int(fields[1]) : std::nullopt;
    if (!person || fields[2].empty()) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected video_id, person_id, label");
    }
    if (!labels.emplace(std::pair{std::string(fields[0]), static_cast<int>(*person)}, std::string(fields[2])).second) {
      throw Error(ErrorKind::Duplicate, "line " + std::to_string(line_no) + ": track labeled twice");
    }
  }
  return labels;
}

void write_track_labels(const std::string& path, const TrackLabels& labels)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  for (const auto& [key, label] : labels) {
    out << key.first << '\t' << key.second << '\t' << label << '\n';
  }
}

ClassMap snippet_classes(const FeatureStore& store, const TrackLabels& labels)
{
  ClassMap classes;
  for (const auto& ref : store.refs()) {
    const auto key = parse_snippet_ref(ref);
    if (const auto it = labels.find({key.video_id, key.person_id}); it != labels.end()) {
      classes.emplace(ref, it->second);
    }
  }
  return classes;
}

std::size_t top_beta_count(double beta, std::size_t candidates)
{
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw Error(ErrorKind::Contract, "selection ratio must lie in (0, 1]");
  }
  // The slack keeps products such as 0.9 * 10 = 9.000000000000002 at 9.
  const double exact = beta * static_cast<double>(candidates);
  const auto count = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
  return std::min(count, candidates);
}

namespace {

std::vector<SelectedSnippet> select_list(const FeatureStore& features,
                                         const std::unordered_map<std::string, const TextEmbedding*>& texts,
                                         const std::map<std::string, std::vector<std::string>>& by_class,
                                         const std::vector<std::string>& labels, double beta)
{
  std::vector<SelectedSnippet> out;
  for (const auto& label : labels) {
    const auto members = by_class.find(label);
    if (members == by_class.end() || members->second.empty()) {
      continue;
    }
    const auto text = texts.find(label);
    if (text == texts.end()) {
      throw Error(ErrorKind::MissingEmbedding, "no text embedding for class '" + label + "'");
    }
    std::vector<SelectedSnippet> ranked;
    ranked.reserve(members->second.size());
    for (const auto& ref : members->second) {
      ranked.push_back({ref, label, cosine_similarity(features.at(ref), text->second->values)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const SelectedSnippet& a, const SelectedSnippet& b) {
      if (a.similarity != b.similarity) {
        return a.similarity > b.similarity;
      }
      return a.ref < b.ref;
    });
    ranked.resize(top_beta_count(beta, ranked.size()));
    out.insert(out.end(), ranked.begin(), ranked.end());
  }
  return out;
}

} // namespace

SelectionResult select_typical(const FeatureStore& features, const std::vector<TextEmbedding>& texts,
                               const ClassMap& classes, const TypicalitySpec& spec, double beta_normal,
                               double beta_abnormal)
{
  validate(spec);
  if (!(beta_normal > 0.0 && beta_normal <= 1.0) || !(beta_abnormal > 0.0 && beta_abnormal <= 1.0)) {
    throw Error(ErrorKind::Contract, "selection ratios must lie in (0, 1]");
  }
  std::unordered_map<std::string, const TextEmbedding*> text_index;
  for (const auto& t : texts) {
    if (static_cast<int>(t.values.size()) != features.dimension()) {
      throw Error(ErrorKind::Dimension, "text embedding '" + t.label + "' has wrong dimension");
    }
    text_index.emplace(t.label, &t);
  }

  std::map<std::string, std::vector<std::string>> by_class;
  for (const auto& [ref, label] : classes) {
    by_class[label].push_back(ref);
  }

  SelectionResult result;
  result.normal = select_list(features, text_index, by_class, spec.normal_actions, beta_normal);
  result.abnormal = select_list(features, text_index, by_class, spec.abnormal_actions, beta_abnormal);
  return result;
}

void write_selection(const std::string& path, const SelectionResult& selection)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  for (const auto& s : selection.normal) {
    out << "normal\t" << s.ref << '\t' << s.label << '\t' << detail::format_fixed(s.similarity, 6) << '\n';
  }
  for (const auto& s : selection.abnormal) {
    out << "abnormal\t" << s.ref << '\t' << s.label << '\t' << detail::format_fixed(s.similarity, 6) << '\n';
  }
}

} // namespace sentinel
