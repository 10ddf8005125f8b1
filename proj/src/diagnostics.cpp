#include "skel_sentinel/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "skel_sentinel/error.hpp"

namespace sentinel {

namespace {

// In-place LU with partial pivoting; returns ln|det|, -inf when singular.
double lu_log_abs_det(std::vector<double> a, std::size_t n)
{
  double total = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r * n + c]) > std::fabs(a[pivot * n + c])) {
        pivot = r;
      }
    }
    const double p = a[pivot * n + c];
    if (p == 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    if (pivot != c) {
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a[pivot * n + k], a[c * n + k]);
      }
    }
    total += std::log(std::fabs(p));
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / p;
      for (std::size_t k = c; k < n; ++k) {
        a[r * n + k] -= f * a[c * n + k];
      }
    }
  }
  return total;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, double scale, std::mt19937_64& rng)
{
  std::normal_distribution<double> g(0.0, scale);
  Matrix m;
  m.rows = rows;
  m.cols = cols;
  m.data.resize(rows * cols);
  for (auto& v : m.data) {
    v = g(rng);
  }
  return m;
}

} // namespace

double numeric_log_abs_det(const FlowModel& model, std::span<const double> x, double step)
{
  const auto n = static_cast<std::size_t>(model.dimension());
  if (x.size() != n) {
    throw Error(ErrorKind::Dimension, "input has " + std::to_string(x.size()) + " values, flow expects " +
                                          std::to_string(n));
  }
  std::vector<double> jac(n * n);
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t c = 0; c < n; ++c) {
    probe[c] = x[c] + step;
    const auto up = flow_forward(model, probe).z;
    probe[c] = x[c] - step;
    const auto down = flow_forward(model, probe).z;
    probe[c] = x[c];
    for (std::size_t r = 0; r < n; ++r) {
      jac[r * n + c] = (up[r] - down[r]) / (2.0 * step);
    }
  }
  return lu_log_abs_det(std::move(jac), n);
}

std::vector<double> numeric_loss_gradient(const FlowModel& model, const Matrix& normal, const Matrix& abnormal,
                                          double step)
{
  FlowModel probe = model;
  auto& p = probe.parameters();
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + step;
    const double up = nll_loss_and_grad(probe, normal, abnormal).loss;
    p[i] = keep - step;
    const double down = nll_loss_and_grad(probe, normal, abnormal).loss;
    p[i] = keep;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double relative_error(double analytic, double numeric, double floor)
{
  const double scale = std::max({std::fabs(analytic), std::fabs(numeric), floor});
  return std::fabs(analytic - numeric) / scale;
}

std::vector<SelfTest> run_self_tests(std::uint64_t seed)
{
  std::vector<SelfTest> out;
  std::mt19937_64 rng(seed);

  {
    FlowModel model = init_flow(64, 4, 128, seed);
    jitter_parameters(model, 0.05, seed + 1);
    const Matrix x = random_matrix(1000, 64, 1.0, rng);
    SelfTest t{"invertibility", false, 0.0, 1e-5};
    for (std::size_t i = 0; i < x.rows; ++i) {
      const auto row = x.row(i);
      const auto back = flow_inverse(model, flow_forward(model, row).z);
      for (std::size_t d = 0; d < row.size(); ++d) {
        t.value = std::max(t.value, std::fabs(back[d] - row[d]));
      }
    }
    t.passed = t.value <= t.tolerance;
    out.push_back(t);
  }

  {
    SelfTest t{"log_det", false, 0.0, 1e-4};
    for (const int d : {2, 4, 6}) {
      FlowModel model = init_flow(d, 4, 16, seed + static_cast<std::uint64_t>(d));
      jitter_parameters(model, 0.3, seed + 10 + static_cast<std::uint64_t>(d));
      const Matrix x = random_matrix(100, static_cast<std::size_t>(d), 1.0, rng);
      for (std::size_t i = 0; i < x.rows; ++i) {
        const double analytic = flow_forward(model, x.row(i)).logdet;
        t.value = std::max(t.value, std::fabs(analytic - numeric_log_abs_det(model, x.row(i))));
      }
    }
    t.passed = t.value <= t.tolerance;
    out.push_back(t);
  }

  {
    SelfTest t{"gradient", false, 0.0, 1e-4};
    FlowModel model = init_flow(4, 2, 8, seed + 20);
    jitter_parameters(model, 0.3, seed + 21);
    const Matrix normal = random_matrix(16, 4, 1.0, rng);
    Matrix abnormal = random_matrix(8, 4, 1.0, rng);
    for (auto& v : abnormal.data) {
      v += 3.0;
    }
    const auto analytic = nll_loss_and_grad(model, normal, abnormal).gradient;
    const auto numeric = numeric_loss_gradient(model, normal, abnormal);
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      t.value = std::max(t.value, relative_error(analytic[i], numeric[i]));
    }
    t.passed = t.value <= t.tolerance;
    out.push_back(t);
  }
  return out;
}

} // namespace sentinel
