#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "skel_sentinel/diagnostics.hpp"
#include "skel_sentinel/error.hpp"
#include "skel_sentinel/flow.hpp"

using namespace sentinel;

namespace {

Matrix gaussian(std::size_t rows, std::size_t cols, double mean, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(mean, 1.0);
  Matrix m(rows, cols);
  for (auto& v : m.data) {
    v = g(rng);
  }
  return m;
}

FlowModel random_model(int d, int k, int w, std::uint64_t seed, double scale = 0.3)
{
  FlowModel m = init_flow(d, k, w, seed);
  jitter_parameters(m, scale, seed + 100);
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::fabs(a[i] - b[i]));
  }
  return m;
}

} // namespace

TEST_CASE("fresh model is the identity")
{
  const FlowModel m = init_flow(6, 4, 16, 3);
  const std::vector<double> x{0.5, -2, 3, 7, 0, 1e3};
  const auto out = flow_forward(m, x);
  CHECK(out.z == x);
  CHECK(out.logdet == 0.0);
  CHECK(flow_inverse(m, x) == x);
  CHECK(init_flow(6, 4, 16, 3) == m);
  CHECK_THROWS_AS(init_flow(3, 4, 16, 3), Error);
}

TEST_CASE("per-dimension scale by e gives logdet = D")
{
  FlowModel m(2, 1, 4);
  m.parameters()[m.off_an_log_scale()] = 1.0;
  m.parameters()[m.off_an_log_scale() + 1] = 1.0;
  const std::vector<double> x{0.3, -0.7};
  const auto out = flow_forward(m, x);
  CHECK(std::fabs(out.logdet - 2.0) <= 1e-12);
  CHECK(std::fabs(out.z[0] - 0.3 * std::numbers::e) <= 1e-12);

  // log p(x) = base density at s x plus sum of ln s.
  const double s = std::numbers::e;
  const double base = -std::log(2 * std::numbers::pi) - 0.5 * ((s * 0.3) * (s * 0.3) + (s * 0.7) * (s * 0.7));
  CHECK(std::fabs(log_prob(m, x, Center::Normal) - (base + 2.0)) <= 1e-12);
}

TEST_CASE("logdet matches the numeric Jacobian")
{
  for (const int d : {2, 4, 6}) {
    const auto m = random_model(d, 4, 16, static_cast<std::uint64_t>(d));
    const auto x = gaussian(20, static_cast<std::size_t>(d), 0.0, 11);
    for (std::size_t i = 0; i < x.rows; ++i) {
      const std::vector<double> row(x.row(i).begin(), x.row(i).end());
      CHECK(std::fabs(flow_forward(m, row).logdet - oracle::jacobian_log_det(m, row)) <= 1e-4);
    }
  }
}

TEST_CASE("round trips in both directions")
{
  const auto m = random_model(8, 4, 32, 4, 0.1);
  const auto x = gaussian(1000, 8, 0.0, 12);
  double worst = 0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    worst = std::max(worst, max_abs_diff(flow_inverse(m, flow_forward(m, x.row(i)).z), x.row(i)));
    worst = std::max(worst, max_abs_diff(flow_forward(m, flow_inverse(m, x.row(i))).z, x.row(i)));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("log density of the identity flow")
{
  const FlowModel m(2, 1, 4);
  const std::vector<double> mu{0.0, 0.0};
  CHECK(std::fabs(log_prob(m, mu, Center::Normal) - (-std::log(2 * std::numbers::pi))) <= 1e-12);
  CHECK(std::fabs(log_prob(m, mu, Center::Normal) - (-1.837877)) <= 1e-6);
  double last = log_prob(m, mu, Center::Normal);
  for (double r = 0.5; r < 5; r += 0.5) {
    const std::vector<double> x{r, -r / 2};
    const double lp = log_prob(m, x, Center::Normal);
    CHECK(lp < last);
    last = lp;
    CHECK(typicality_score(m, x) == -lp);
    CHECK(typicality_score(m, mu) < typicality_score(m, x));
  }
  const std::vector<double> mu_a{10.0, 10.0};
  CHECK(log_prob(m, mu_a, Center::Abnormal) == log_prob(m, mu, Center::Normal));
}

TEST_CASE("density integrates to one")
{
  const auto m = random_model(2, 4, 16, 8, 0.1);
  CHECK(std::fabs(oracle::integrate_density_2d(m, 8.0, 400) - 1.0) <= 0.02);
}

TEST_CASE("loss at the two centers")
{
  const FlowModel m(2, 2, 4);
  Matrix n(1, 2);
  Matrix a(1, 2);
  a.data = {10.0, 10.0};
  const auto lg = nll_loss_and_grad(m, n, a);
  CHECK(std::fabs(lg.loss - 2 * std::log(2 * std::numbers::pi)) <= 1e-12);
  CHECK(std::fabs(lg.loss - 3.675754) <= 1e-6);
  CHECK_THROWS_AS(nll_loss_and_grad(m, Matrix(0, 2), a), Error);
}

TEST_CASE("loss uses means")
{
  const auto m = random_model(4, 2, 8, 6);
  const auto n = gaussian(5, 4, 0.0, 1);
  const auto a = gaussian(3, 4, 5.0, 2);
  Matrix n2 = n;
  Matrix a2 = a;
  for (std::size_t i = 0; i < n.rows; ++i) {
    n2.push_row(n.row(i));
  }
  for (std::size_t i = 0; i < a.rows; ++i) {
    a2.push_row(a.row(i));
  }
  CHECK(std::fabs(nll_loss_and_grad(m, n, a).loss - nll_loss_and_grad(m, n2, a2).loss) <= 1e-10);
}

TEST_CASE("analytic gradient matches finite differences")
{
  const auto m = random_model(4, 2, 8, 21);
  const auto n = gaussian(12, 4, 0.0, 3);
  const auto a = gaussian(6, 4, 3.0, 4);
  const auto analytic = nll_loss_and_grad(m, n, a).gradient;
  const auto numeric = oracle::loss_gradient(m, n, a, 1e-4);
  REQUIRE(analytic.size() == numeric.size());
  double worst = 0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    worst = std::max(worst, relative_error(analytic[i], numeric[i]));
  }
  CHECK(worst <= 1e-4);

  // Full-shot mode: no abnormal term.
  const auto g0 = nll_loss_and_grad(m, n, Matrix(0, 4)).gradient;
  const auto n0 = oracle::loss_gradient(m, n, Matrix(0, 4), 1e-4);
  for (std::size_t i = 0; i < g0.size(); ++i) {
    CHECK(relative_error(g0[i], n0[i]) <= 1e-4);
  }
}

TEST_CASE("training: progress, determinism, zero learning rate")
{
  const auto n = gaussian(256, 4, 0.0, 5);
  const auto a = gaussian(32, 4, 6.0, 6);
  const auto m = init_flow(4, 2, 16, 7);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 64;
  cfg.learning_rate = 0.005;
  cfg.seed = 9;
  const auto r1 = train_flow(m, n, a, cfg);
  const auto r2 = train_flow(m, n, a, cfg);
  REQUIRE(r1.loss_history.size() == 50);
  CHECK(r1.loss_history.back() < r1.loss_history.front());
  CHECK(r1.loss_history == r2.loss_history);
  CHECK(r1.model == r2.model);

  double st_n = 0, st_a = 0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    st_n += typicality_score(r1.model, n.row(i));
    st_a += typicality_score(r1.model, a.row(i));
  }
  CHECK(st_a > st_n);

  cfg.learning_rate = 0.0;
  const auto frozen = train_flow(m, n, a, cfg);
  CHECK(frozen.model.parameters() == m.parameters());
}

TEST_CASE("normalization layer whitens the data")
{
  auto m = init_flow(4, 2, 8, 1);
  const auto x = gaussian(500, 4, 3.0, 8);
  Matrix scaled = x;
  for (auto& v : scaled.data) {
    v *= 5.0;
  }
  fit_normalization(m, scaled);
  std::vector<double> mean(4, 0.0), sq(4, 0.0);
  for (std::size_t i = 0; i < scaled.rows; ++i) {
    const auto z = flow_forward(m, scaled.row(i)).z;
    for (std::size_t d = 0; d < 4; ++d) {
      mean[d] += z[d] / 500;
      sq[d] += z[d] * z[d] / 500;
    }
  }
  for (std::size_t d = 0; d < 4; ++d) {
    CHECK(std::fabs(mean[d]) <= 1e-9);
    CHECK(std::fabs(sq[d] - 1.0) <= 1e-9);
  }
}

TEST_CASE("checkpoint round trip")
{
  const auto m = random_model(6, 3, 8, 31);
  const auto back = decode_flow(encode_flow(m));
  CHECK(back.dimension() == 6);
  CHECK(back.layers() == 3);
  CHECK(back.hidden() == 8);
  for (std::size_t i = 0; i < m.parameters().size(); ++i) {
    CHECK(back.parameters()[i] == static_cast<double>(static_cast<float>(m.parameters()[i])));
  }
  CHECK(encode_flow(back) == encode_flow(m));
  const auto bytes = encode_flow(m);
  CHECK_THROWS_AS(decode_flow(bytes.substr(0, bytes.size() - 1)), Error);
  CHECK_THROWS_AS(decode_flow("XXXX" + bytes.substr(4)), Error);

  const auto dir = testing::scratch("flow");
  try {
    load_flow((dir / "missing.skfl").string());
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("missing.skfl") != std::string::npos);
  }
}

TEST_CASE("self tests pass")
{
  for (const auto& t : run_self_tests(3)) {
    INFO(t.name);
    CHECK(t.passed);
  }
}
