#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "skel_sentinel/featurize.hpp"

namespace sentinel {

/// Ranked normal / abnormal action-class lists produced offline by a
/// language model, plus the prompt that produced them.
struct TypicalitySpec {
  std::vector<std::string> normal_actions;
  std::vector<std::string> abnormal_actions;
  std::string prompt;

  bool operator==(const TypicalitySpec&) const = default;
};

/// Text format:
///   # comment
///   prompt = free text kept verbatim
///   [normal]
///   walking the dog
///   [abnormal]
///   rock climbing
TypicalitySpec parse_typicality_spec(std::istream& in);
TypicalitySpec load_typicality_spec(const std::string& path);
void save_typicality_spec(std::ostream& out, const TypicalitySpec& spec);
void save_typicality_spec(const std::string& path, const TypicalitySpec& spec);
void validate(const TypicalitySpec& spec);

/// snippet ref -> action-class label.
using ClassMap = std::unordered_map<std::string, std::string>;

/// (video_id, person_id) -> label; file lines are `video_id \t person_id \t label`.
using TrackLabels = std::map<std::pair<std::string, int>, std::string>;
TrackLabels load_track_labels(const std::string& path);
void write_track_labels(const std::string& path, const TrackLabels& labels);

/// Labels every snippet in `store` with the class of the track it came from.
/// Snippets from unlabeled tracks are left out.
ClassMap snippet_classes(const FeatureStore& store, const TrackLabels& labels);

struct SelectedSnippet {
  std::string ref;
  std::string label;
  double similarity = 0.0;
};

struct SelectionResult {
  std::vector<SelectedSnippet> normal;
  std::vector<SelectedSnippet> abnormal;
};

/// Number of snippets kept from a class with `candidates` members:
/// ceil(beta * candidates), so a positive beta never empties a class.
std::size_t top_beta_count(double beta, std::size_t candidates);

/// Per class, ranks candidates by cosine similarity to the class label
/// embedding (descending, ties by ascending ref) and keeps the top beta
/// fraction. Output lists follow the spec's class order, then rank.
SelectionResult select_typical(const FeatureStore& features, const std::vector<TextEmbedding>& texts,
                               const ClassMap& classes, const TypicalitySpec& spec, double beta_normal,
                               double beta_abnormal);

void write_selection(const std::string& path, const SelectionResult& selection);

} // namespace sentinel
