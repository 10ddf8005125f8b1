#include "skel_sentinel/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "binary_io.hpp"
#include "skel_sentinel/error.hpp"

namespace sentinel {

FeatureStore::FeatureStore(int dimension) : dimension_(dimension)
{
  if (dimension < 1) {
    throw Error(ErrorKind::Dimension, "feature dimension must be positive");
  }
}

void FeatureStore::add(const std::string& ref, std::span<const float> values)
{
  if (static_cast<int>(values.size()) != dimension_) {
    throw Error(ErrorKind::Dimension, "row '" + ref + "' has " + std::to_string(values.size()) +
                                          " values, store dimension is " + std::to_string(dimension_));
  }
  for (const float v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::Schema, "row '" + ref + "' has a non-finite value");
    }
  }
  if (!index_.emplace(ref, refs_.size()).second) {
    throw Error(ErrorKind::Duplicate, "duplicate row '" + ref + "'");
  }
  refs_.push_back(ref);
  values_.insert(values_.end(), values.begin(), values.end());
}

void FeatureStore::add(const std::string& ref, std::span<const double> values)
{
  std::vector<float> narrowed(values.begin(), values.end());
  add(ref, std::span<const float>(narrowed));
}

std::span<const float> FeatureStore::row(std::size_t row) const
{
  if (row >= refs_.size()) {
    throw Error(ErrorKind::UnknownSnippet, "row " + std::to_string(row) + " out of range");
  }
  return {values_.data() + row * static_cast<std::size_t>(dimension_), static_cast<std::size_t>(dimension_)};
}

std::optional<std::size_t> FeatureStore::find(const std::string& ref) const
{
  if (const auto it = index_.find(ref); it != index_.end()) {
    return it->second;
  }
  return std::nullopt;
}

std::span<const float> FeatureStore::at(const std::string& ref) const
{
  const auto row_index = find(ref);
  if (!row_index) {
    throw Error(ErrorKind::UnknownSnippet, "no embedding for '" + ref + "'");
  }
  return row(*row_index);
}

std::vector<double> FeatureStore::row_as_double(std::size_t row_index) const
{
  const auto r = row(row_index);
  return {r.begin(), r.end()};
}

std::string encode_embeddings(const FeatureStore& store)
{
  std::ostringstream out(std::ios::binary);
  out.write("SKEM", 4);
  detail::write_le<std::uint16_t>(out, kEmbeddingVersion);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.size()));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.dimension()));
  for (std::size_t r = 0; r < store.size(); ++r) {
    for (const float v : store.row(r)) {
      detail::write_le<float>(out, v);
    }
  }
  return std::move(out).str();
}

FeatureStore decode_embeddings(const std::string& bytes, const std::vector<std::string>& names)
{
  constexpr std::size_t header = 4 + 2 + 4 + 4;
  if (bytes.size() < header || bytes.compare(0, 4, "SKEM") != 0) {
    throw Error(ErrorKind::Schema, "not an SKEM embedding file");
  }
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  const auto version = detail::read_le<std::uint16_t>(raw + 4);
  if (version != kEmbeddingVersion) {
    throw Error(ErrorKind::Schema, "unsupported SKEM version " + std::to_string(version));
  }
  const auto count = detail::read_le<std::uint32_t>(raw + 6);
  const auto dimension = detail::read_le<std::uint32_t>(raw + 10);
  if (dimension == 0 || dimension > (1U << 20)) {
    throw Error(ErrorKind::Schema, "bad SKEM dimension " + std::to_string(dimension));
  }
  const auto expected = static_cast<std::uint64_t>(count) * dimension * 4;
  if (bytes.size() - header != expected) {
    throw Error(ErrorKind::Schema, "SKEM payload is " + std::to_string(bytes.size() - header) +
                                       " bytes, header implies " + std::to_string(expected));
  }
  if (names.size() != count) {
    throw Error(ErrorKind::Schema, "index lists " + std::to_string(names.size()) + " rows, payload has " +
                                       std::to_string(count));
  }

  FeatureStore store(static_cast<int>(dimension));
  std::vector<float> row(dimension);
  const unsigned char* p = raw + header;
  for (std::uint32_t r = 0; r < count; ++r) {
    for (std::uint32_t d = 0; d < dimension; ++d, p += 4) {
      row[d] = detail::read_le<float>(p);
    }
    store.add(names[r], std::span<const float>(row));
  }
  return store;
}

void write_embeddings(const std::string& path, const FeatureStore& store)
{
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw Error(ErrorKind::Io, "cannot write " + path);
    }
    const auto bytes = encode_embeddings(store);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  std::ofstream idx(path + ".idx", std::ios::binary);
  if (!idx) {
    throw Error(ErrorKind::Io, "cannot write " + path + ".idx");
  }
  for (const auto& name : store.refs()) {
    idx << name << '\n';
  }
}

FeatureStore load_embeddings(const std::string& path)
{
  const auto bytes = detail::read_file_bytes(path);
  std::ifstream idx(path + ".idx");
  if (!idx) {
    throw Error(ErrorKind::Io, "cannot open index " + path + ".idx");
  }
  std::vector<std::string> names;
  std::string line;
  while (std::getline(idx, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    names.push_back(line);
  }
  return decode_embeddings(bytes, names);
}

std::vector<TextEmbedding> text_embeddings(const FeatureStore& store)
{
  std::vector<TextEmbedding> out;
  out.reserve(store.size());
  for (std::size_t r = 0; r < store.size(); ++r) {
    auto values = store.row_as_double(r);
    double sq = 0.0;
    for (const double v : values) {
      sq += v * v;
    }
    if (std::abs(std::sqrt(sq) - 1.0) > 1e-6) {
      throw Error(ErrorKind::Schema, "label embedding '" + store.ref(r) + "' is not unit norm");
    }
    out.push_back({store.ref(r), std::move(values)});
  }
  return out;
}

namespace {

template <typename A>
double cosine_impl(std::span<const A> a, std::span<const double> b)
{
  if (a.size() != b.size()) {
    throw Error(ErrorKind::Dimension, "cosine_similarity: dimension mismatch");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    dot += x * b[i];
    na += x * x;
    nb += b[i] * b[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (na < 1e-12 || nb < 1e-12) {
    throw Error(ErrorKind::DegenerateVector, "cosine_similarity: zero-norm input");
  }
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

} // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }
double cosine_similarity(std::span<const float> a, std::span<const double> b) { return cosine_impl(a, b); }

KinematicFeaturizer::KinematicFeaturizer(int joints, int window_length, int dimension, std::uint64_t seed)
    : joints_(joints), window_length_(window_length), dimension_(dimension)
{
  if (dimension < 4) {
    throw Error(ErrorKind::Dimension, "kinematic feature dimension must be at least 4");
  }
  if (joints < 2 || window_length < 2) {
    throw Error(ErrorKind::Dimension, "kinematic features need at least 2 joints and 2 frames");
  }
  const auto J = static_cast<std::size_t>(joints);
  const auto T = static_cast<std::size_t>(window_length);
  descriptor_size_ = 2 * J * T + 2 * J * (T - 1) + T * J * (J - 1) / 2;
  if (static_cast<std::size_t>(dimension) > descriptor_size_) {
    throw Error(ErrorKind::Dimension, "feature dimension exceeds descriptor size");
  }

  // Gaussian rows, then modified Gram-Schmidt.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t F = descriptor_size_;
  projection_.resize(static_cast<std::size_t>(dimension) * F);
  for (auto& v : projection_) {
    v = normal(rng);
  }
  for (int r = 0; r < dimension; ++r) {
    double* row = projection_.data() + static_cast<std::size_t>(r) * F;
    for (int q = 0; q < r; ++q) {
      const double* prev = projection_.data() + static_cast<std::size_t>(q) * F;
      double dot = 0.0;
      for (std::size_t i = 0; i < F; ++i) {
        dot += row[i] * prev[i];
      }
      for (std::size_t i = 0; i < F; ++i) {
        row[i] -= dot * prev[i];
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < F; ++i) {
      norm += row[i] * row[i];
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < F; ++i) {
      row[i] /= norm;
    }
  }
}

std::vector<double> KinematicFeaturizer::descriptor(const NormalizedSnippet& snippet) const
{
  const Snippet& s = snippet.data;
  if (s.joints != joints_ || s.window_length != window_length_) {
    throw Error(ErrorKind::Dimension, "snippet shape does not match featurizer");
  }
  const int J = joints_;
  const int T = window_length_;
  std::vector<double> out;
  out.reserve(descriptor_size_);

  out.insert(out.end(), s.coords.begin(), s.coords.end());

  auto present = [&](int t, int j) { return s.present[static_cast<std::size_t>(t) * J + j] != 0; };
  for (int t = 1; t < T; ++t) {
    for (int j = 0; j < J; ++j) {
      if (present(t, j) && present(t - 1, j)) {
        out.push_back(s.x(t, j) - s.x(t - 1, j));
        out.push_back(s.y(t, j) - s.y(t - 1, j));
      } else {
        out.push_back(0.0);
        out.push_back(0.0);
      }
    }
  }

  for (int t = 0; t < T; ++t) {
    for (int a = 0; a < J; ++a) {
      for (int b = a + 1; b < J; ++b) {
        if (present(t, a) && present(t, b)) {
          out.push_back(std::hypot(s.x(t, a) - s.x(t, b), s.y(t, a) - s.y(t, b)));
        } else {
          out.push_back(0.0);
        }
      }
    }
  }
  return out;
}

FeatureVector KinematicFeaturizer::operator()(const NormalizedSnippet& snippet) const
{
  const auto desc = descriptor(snippet);
  FeatureVector fv;
  fv.snippet_ref = snippet.source_ref;
  fv.values.assign(static_cast<std::size_t>(dimension_), 0.0);
  const std::size_t F = descriptor_size_;
  for (int r = 0; r < dimension_; ++r) {
    const double* row = projection_.data() + static_cast<std::size_t>(r) * F;
    double acc = 0.0;
    for (std::size_t i = 0; i < F; ++i) {
      acc += row[i] * desc[i];
    }
    fv.values[static_cast<std::size_t>(r)] = acc;
  }
  return fv;
}

FeatureVector kinematic_features(const NormalizedSnippet& snippet, int dimension, std::uint64_t seed)
{
  return KinematicFeaturizer(snippet.data.joints, snippet.data.window_length, dimension, seed)(snippet);
}

} // namespace sentinel
