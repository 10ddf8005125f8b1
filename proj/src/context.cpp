#include "skel_sentinel/context.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "skel_sentinel/error.hpp"
#include "skel_sentinel/parallel.hpp"

namespace sentinel {

SceneIndex::SceneIndex(std::string video_id, std::vector<SceneEntry> entries)
    : video_id_(std::move(video_id)), entries_(std::move(entries))
{
  if (!entries_.empty()) {
    dimension_ = static_cast<int>(entries_.front().feature.size());
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& e : entries_) {
    if (static_cast<int>(e.feature.size()) != dimension_) {
      throw Error(ErrorKind::Dimension, "scene " + video_id_ + ": inconsistent feature dimension");
    }
    if (!seen.emplace(e.person_id, e.timestamp).second) {
      throw Error(ErrorKind::Duplicate, "scene " + video_id_ + ": two snippets for person " +
                                            std::to_string(e.person_id) + " at t=" + std::to_string(e.timestamp));
    }
  }
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) { return entries_[a].ref < entries_[b].ref; });
  rank_.resize(entries_.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (pos > 0 && entries_[order[pos]].ref == entries_[order[pos - 1]].ref) {
      throw Error(ErrorKind::Duplicate, "scene " + video_id_ + ": duplicate ref " + entries_[order[pos]].ref);
    }
    rank_[order[pos]] = pos;
  }
}

std::optional<std::size_t> SceneIndex::find(const std::string& ref) const
{
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].ref == ref) {
      return i;
    }
  }
  return std::nullopt;
}

double SceneIndex::distance(std::size_t a, std::size_t b) const
{
  const auto& fa = entries_[a].feature;
  const auto& fb = entries_[b].feature;
  double sq = 0.0;
  for (std::size_t d = 0; d < fa.size(); ++d) {
    const double diff = fa[d] - fb[d];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

namespace {

template <typename Eligible>
Neighborhood k_nearest(const SceneIndex& index, std::size_t query, int k, NeighborKind kind, Eligible eligible)
{
  if (k < 1) {
    throw Error(ErrorKind::Contract, "k must be at least 1");
  }
  struct Candidate {
    double distance;
    std::size_t rank;
    std::size_t index;
  };
  std::vector<Candidate> candidates;
  for (std::size_t j = 0; j < index.size(); ++j) {
    if (j != query && eligible(j)) {
      candidates.push_back({index.distance(query, j), index.ref_rank(j), j});
    }
  }
  const auto keep = std::min(candidates.size(), static_cast<std::size_t>(k));
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                    [](const Candidate& a, const Candidate& b) {
                      return a.distance != b.distance ? a.distance < b.distance : a.rank < b.rank;
                    });

  Neighborhood out;
  out.query = index.entry(query).ref;
  out.kind = kind;
  out.members.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    out.members.push_back({candidates[i].index, index.entry(candidates[i].index).ref, candidates[i].distance});
  }
  if (!out.members.empty()) {
    out.threshold = out.members.back().distance;
  }
  return out;
}

std::size_t require(const SceneIndex& index, const std::string& query)
{
  const auto q = index.find(query);
  if (!q) {
    throw Error(ErrorKind::UnknownSnippet, "snippet '" + query + "' is not in scene " + index.video_id());
  }
  return *q;
}

Neighborhood cross_person_at(const SceneIndex& index, std::size_t q, int k)
{
  const int person = index.entry(q).person_id;
  return k_nearest(index, q, k, NeighborKind::CrossPerson,
                   [&](std::size_t j) { return index.entry(j).person_id != person; });
}

Neighborhood self_inspection_at(const SceneIndex& index, std::size_t q, int k, double alpha, int window_length)
{
  if (!(alpha >= 0.0)) {
    throw Error(ErrorKind::Contract, "alpha must be non-negative");
  }
  const auto& e = index.entry(q);
  const double mask = alpha * window_length;
  return k_nearest(index, q, k, NeighborKind::SelfInspection, [&](std::size_t j) {
    const auto& c = index.entry(j);
    return c.person_id == e.person_id && std::abs(static_cast<double>(e.timestamp) - c.timestamp) > mask;
  });
}

double branch_value(const Neighborhood& n, int k)
{
  double sum = 0.0;
  for (const auto& m : n.members) {
    sum += m.distance;
  }
  if (static_cast<int>(n.members.size()) == k) {
    return sum;
  }
  return static_cast<double>(k) * sum / static_cast<double>(n.members.size());
}

} // namespace

Neighborhood cross_person_neighbors(const SceneIndex& index, const std::string& query, int k)
{
  return cross_person_at(index, require(index, query), k);
}

Neighborhood self_inspection_neighbors(const SceneIndex& index, const std::string& query, int k, double alpha,
                                       int window_length)
{
  return self_inspection_at(index, require(index, query), k, alpha, window_length);
}

Uniqueness uniqueness_score(const Neighborhood& cross, const Neighborhood& self, int k)
{
  if (cross.query != self.query) {
    throw Error(ErrorKind::Contract, "neighborhoods belong to different queries");
  }
  if (k < 1) {
    throw Error(ErrorKind::Contract, "k must be at least 1");
  }
  if (cross.members.empty() && self.members.empty()) {
    return {0.0, true};
  }
  double score = -1.0;
  for (const auto* n : {&cross, &self}) {
    if (!n->members.empty()) {
      score = std::max(score, branch_value(*n, k));
    }
  }
  return {score, false};
}

std::vector<Uniqueness> scene_uniqueness(const SceneIndex& index, const ContextParams& params)
{
  std::vector<Uniqueness> out(index.size());
  parallel_for(index.size(), [&](std::size_t i) {
    const auto cross = cross_person_at(index, i, params.k);
    const auto self = self_inspection_at(index, i, params.k, params.alpha, params.window_length);
    out[i] = uniqueness_score(cross, self, params.k);
  });
  return out;
}

} // namespace sentinel
