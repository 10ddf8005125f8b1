#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sentinel {

struct SceneEntry {
  std::string ref;
  int person_id = 0;
  int timestamp = 0;
  std::vector<double> feature;
};

/// All snippets of one video. (person_id, timestamp) pairs are unique and
/// every feature has the same dimension.
class SceneIndex {
public:
  SceneIndex(std::string video_id, std::vector<SceneEntry> entries);

  const std::string& video_id() const noexcept { return video_id_; }
  std::size_t size() const noexcept { return entries_.size(); }
  int dimension() const noexcept { return dimension_; }
  const SceneEntry& entry(std::size_t i) const { return entries_.at(i); }
  const std::vector<SceneEntry>& entries() const noexcept { return entries_; }

  /// Position of entry i in ascending-ref order; used for tie-breaks.
  std::size_t ref_rank(std::size_t i) const { return rank_.at(i); }
  std::optional<std::size_t> find(const std::string& ref) const;

  double distance(std::size_t a, std::size_t b) const;

private:
  std::string video_id_;
  std::vector<SceneEntry> entries_;
  std::vector<std::size_t> rank_;
  int dimension_ = 0;
};

enum class NeighborKind { CrossPerson, SelfInspection };

struct Neighbor {
  std::size_t index = 0;
  std::string ref;
  double distance = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// Members are ordered by (distance, ref). `threshold` is the largest member
/// distance, i.e. the k-th smallest eligible distance when k members exist;
/// it is 0 for an empty neighborhood.
struct Neighborhood {
  std::string query;
  NeighborKind kind = NeighborKind::CrossPerson;
  std::vector<Neighbor> members;
  double threshold = 0.0;
};

/// The k nearest snippets (Euclidean feature distance) belonging to other
/// persons. Ties at the k-th distance are resolved by ascending ref.
Neighborhood cross_person_neighbors(const SceneIndex& index, const std::string& query, int k);

/// The k nearest snippets of the same person whose start times differ from
/// the query's by more than alpha * window_length.
Neighborhood self_inspection_neighbors(const SceneIndex& index, const std::string& query, int k, double alpha,
                                       int window_length);

struct Uniqueness {
  double score = 0.0;
  bool isolated = false; // both neighborhoods were empty
};

/// max over non-empty branches of k * mean member distance; with exactly k
/// members this is the plain sum of distances.
Uniqueness uniqueness_score(const Neighborhood& cross, const Neighborhood& self, int k);

struct ContextParams {
  int k = 16;
  double alpha = 4.0;
  int window_length = 16;
};

/// Uniqueness for every entry of the scene, in entry order.
std::vector<Uniqueness> scene_uniqueness(const SceneIndex& index, const ContextParams& params);

} // namespace sentinel
