#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "skel_sentinel/pose_io.hpp"

namespace sentinel {

struct FeatureVector {
  std::string snippet_ref;
  std::vector<double> values;
};

/// Embedding of an action-class label. Values have unit Euclidean norm.
struct TextEmbedding {
  std::string label;
  std::vector<double> values;
};

/// Row-aligned embedding table with a ref -> row index. Rows are kept in
/// single precision so that in-memory stores and SKEM files agree bit for bit.
class FeatureStore {
public:
  explicit FeatureStore(int dimension);

  /// Appends a row. Throws on duplicate refs, wrong length or non-finite values.
  void add(const std::string& ref, std::span<const float> values);
  void add(const std::string& ref, std::span<const double> values);

  int dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return refs_.size(); }
  const std::string& ref(std::size_t row) const { return refs_.at(row); }
  const std::vector<std::string>& refs() const noexcept { return refs_; }

  std::span<const float> row(std::size_t row) const;
  std::optional<std::size_t> find(const std::string& ref) const;
  /// Throws ErrorKind::UnknownSnippet when absent.
  std::span<const float> at(const std::string& ref) const;
  std::vector<double> row_as_double(std::size_t row) const;

private:
  int dimension_;
  std::vector<std::string> refs_;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// SKEM layout: "SKEM", u16 version (1), u32 count, u32 dimension, then
/// count * dimension little-endian float32 values, row major. Row names go
/// to the sidecar `<path>.idx`, one per line.
inline constexpr std::uint16_t kEmbeddingVersion = 1;

void write_embeddings(const std::string& path, const FeatureStore& store);
FeatureStore load_embeddings(const std::string& path);
/// Decodes an in-memory SKEM payload plus its index lines.
FeatureStore decode_embeddings(const std::string& bytes, const std::vector<std::string>& names);
std::string encode_embeddings(const FeatureStore& store);

/// Interprets every row of `store` as a label embedding; each row must
/// have unit norm within 1e-6.
std::vector<TextEmbedding> text_embeddings(const FeatureStore& store);

/// Throws ErrorKind::DegenerateVector when either norm is below 1e-12.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(std::span<const float> a, std::span<const double> b);

/// Hand-built motion descriptor used when no external skeleton encoder is
/// available: flattened coordinates, frame-to-frame joint velocities and
/// per-frame joint-pair distances, projected onto D seeded orthonormal
/// directions.
class KinematicFeaturizer {
public:
  KinematicFeaturizer(int joints, int window_length, int dimension, std::uint64_t seed);

  int dimension() const noexcept { return dimension_; }
  std::size_t descriptor_size() const noexcept { return descriptor_size_; }

  /// The concatenated descriptor before projection.
  std::vector<double> descriptor(const NormalizedSnippet& snippet) const;
  FeatureVector operator()(const NormalizedSnippet& snippet) const;

  /// Row-major dimension x descriptor_size projection with orthonormal rows.
  const std::vector<double>& projection() const noexcept { return projection_; }

private:
  int joints_;
  int window_length_;
  int dimension_;
  std::size_t descriptor_size_;
  std::vector<double> projection_;
};

FeatureVector kinematic_features(const NormalizedSnippet& snippet, int dimension, std::uint64_t seed);

} // namespace sentinel
