#pragma once

// Reference implementations the library is checked against. They share no
// code with the library and favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "skel_sentinel/context.hpp"
#include "skel_sentinel/flow.hpp"

namespace oracle {

// Determinant by cofactor expansion; D <= 6 keeps this cheap.
inline double det(const std::vector<double>& a, std::size_t n)
{
  if (n == 1) {
    return a[0];
  }
  double total = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> minor;
    for (std::size_t r = 1; r < n; ++r) {
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) {
          minor.push_back(a[r * n + k]);
        }
      }
    }
    total += (c % 2 == 0 ? 1.0 : -1.0) * a[c] * det(minor, n - 1);
  }
  return total;
}

inline std::vector<double> forward_z(const sentinel::FlowModel& m, std::vector<double> x)
{
  return sentinel::flow_forward(m, x).z;
}

// ln|det| of the central-difference Jacobian.
inline double jacobian_log_det(const sentinel::FlowModel& m, const std::vector<double>& x, double h = 1e-5)
{
  const std::size_t n = x.size();
  std::vector<double> j(n * n);
  for (std::size_t c = 0; c < n; ++c) {
    auto up = x;
    auto down = x;
    up[c] += h;
    down[c] -= h;
    const auto zu = forward_z(m, up);
    const auto zd = forward_z(m, down);
    for (std::size_t r = 0; r < n; ++r) {
      j[r * n + c] = (zu[r] - zd[r]) / (2 * h);
    }
  }
  return std::log(std::fabs(det(j, n)));
}

inline std::vector<double> loss_gradient(const sentinel::FlowModel& m, const sentinel::Matrix& normal,
                                         const sentinel::Matrix& abnormal, double h)
{
  std::vector<double> g(m.parameters().size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto up = m;
    auto down = m;
    up.parameters()[i] += h;
    down.parameters()[i] -= h;
    g[i] = (sentinel::nll_loss_and_grad(up, normal, abnormal).loss -
            sentinel::nll_loss_and_grad(down, normal, abnormal).loss) /
           (2 * h);
  }
  return g;
}

// Midpoint rule for exp(log_prob) over [c - r, c + r]^2.
inline double integrate_density_2d(const sentinel::FlowModel& m, double radius, int cells)
{
  const auto& mu = m.center(sentinel::Center::Normal);
  const double h = 2 * radius / cells;
  double total = 0.0;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const std::vector<double> x{mu[0] - radius + (i + 0.5) * h, mu[1] - radius + (j + 0.5) * h};
      total += std::exp(sentinel::log_prob(m, x, sentinel::Center::Normal)) * h * h;
    }
  }
  return total;
}

// Exhaustive neighbor scan: every eligible candidate is sorted by
// (distance, ref) and the first k are kept.
struct ScanResult {
  std::vector<std::string> refs;
  std::vector<double> distances;
};

inline ScanResult scan(const sentinel::SceneIndex& idx, std::size_t q, int k,
                       const std::function<bool(const sentinel::SceneEntry&, const sentinel::SceneEntry&)>& eligible)
{
  std::vector<std::pair<double, std::string>> all;
  const auto& query = idx.entry(q);
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& c = idx.entry(j);
    if (j == q || !eligible(query, c)) {
      continue;
    }
    double s = 0.0;
    for (std::size_t d = 0; d < c.feature.size(); ++d) {
      const double diff = query.feature[d] - c.feature[d];
      s += diff * diff;
    }
    all.emplace_back(std::sqrt(s), c.ref);
  }
  std::sort(all.begin(), all.end());
  ScanResult out;
  for (std::size_t i = 0; i < all.size() && i < static_cast<std::size_t>(k); ++i) {
    out.distances.push_back(all[i].first);
    out.refs.push_back(all[i].second);
  }
  return out;
}

// Fraction of positive/negative pairs ordered correctly, ties worth 1/2.
inline double pair_count_auc(const std::vector<int>& labels, const std::vector<double>& scores)
{
  std::int64_t twice = 0;
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) {
      continue;
    }
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != 0) {
        continue;
      }
      ++pairs;
      twice += scores[i] > scores[j] ? 2 : (scores[i] == scores[j] ? 1 : 0);
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pairs));
}

// Top-beta per class by full sort of (similarity desc, ref asc).
inline std::vector<std::string> top_beta(std::vector<std::pair<double, std::string>> rows, double beta)
{
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  // Exact ceiling of beta * n for beta given with at most 6 decimals.
  const auto micro = static_cast<std::int64_t>(std::llround(beta * 1e6));
  const auto n = static_cast<std::int64_t>(rows.size());
  const std::int64_t count = std::min<std::int64_t>(n, (micro * n + 999999) / 1000000);
  std::vector<std::string> out;
  for (std::int64_t i = 0; i < count; ++i) {
    out.push_back(rows[static_cast<std::size_t>(i)].second);
  }
  return out;
}

} // namespace oracle
