#include "skel_sentinel/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "binary_io.hpp"
#include "skel_sentinel/error.hpp"
#include "skel_sentinel/parallel.hpp"

namespace sentinel {

namespace {

// Views into one coupling MLP block.
struct NetView {
  const double* w1;
  const double* b1;
  const double* w2;
  const double* b2;
};

struct NetGrad {
  double* w1;
  double* b1;
  double* w2;
  double* b2;
};

template <typename P>
auto net_parts(P* base, int h, int W)
{
  const auto hw = static_cast<std::size_t>(h) * W;
  if constexpr (std::is_const_v<P>) {
    return NetView{base, base + hw, base + hw + W, base + 2 * hw + W};
  } else {
    return NetGrad{base, base + hw, base + hw + W, base + 2 * hw + W};
  }
}

void mlp_forward(const NetView& net, int h, int W, const double* in, double* hidden, double* out)
{
  for (int k = 0; k < W; ++k) {
    const double* w = net.w1 + static_cast<std::size_t>(k) * h;
    double a = net.b1[k];
    for (int j = 0; j < h; ++j) {
      a += w[j] * in[j];
    }
    hidden[k] = std::tanh(a);
  }
  for (int i = 0; i < h; ++i) {
    const double* w = net.w2 + static_cast<std::size_t>(i) * W;
    double a = net.b2[i];
    for (int k = 0; k < W; ++k) {
      a += w[k] * hidden[k];
    }
    out[i] = a;
  }
}

// Accumulates parameter gradients into `grad` and input gradients into g_in.
void mlp_backward(const NetView& net, const NetGrad& grad, int h, int W, const double* in, const double* hidden,
                  const double* g_out, double* g_in, double* g_pre)
{
  std::fill(g_pre, g_pre + W, 0.0);
  for (int i = 0; i < h; ++i) {
    const double g = g_out[i];
    if (g == 0.0) {
      continue;
    }
    grad.b2[i] += g;
    double* gw = grad.w2 + static_cast<std::size_t>(i) * W;
    const double* w = net.w2 + static_cast<std::size_t>(i) * W;
    for (int k = 0; k < W; ++k) {
      gw[k] += g * hidden[k];
      g_pre[k] += w[k] * g;
    }
  }
  for (int k = 0; k < W; ++k) {
    const double gp = g_pre[k] * (1.0 - hidden[k] * hidden[k]);
    if (gp == 0.0) {
      continue;
    }
    grad.b1[k] += gp;
    double* gw = grad.w1 + static_cast<std::size_t>(k) * h;
    const double* w = net.w1 + static_cast<std::size_t>(k) * h;
    for (int j = 0; j < h; ++j) {
      gw[j] += gp * in[j];
      g_in[j] += w[j] * gp;
    }
  }
}

struct LayerCache {
  std::vector<double> input;
  std::vector<double> normed;
  std::vector<double> s_hidden;
  std::vector<double> t_hidden;
  std::vector<double> s_raw;
  std::vector<double> log_scale;
  std::vector<double> shift;
};

struct Workspace {
  std::vector<LayerCache> layers;
  std::vector<double> z;
  std::vector<double> g;
  std::vector<double> g_normed;
  std::vector<double> g_cond;
  std::vector<double> g_sraw;
  std::vector<double> g_pre;

  explicit Workspace(const FlowModel& m)
  {
    const auto D = static_cast<std::size_t>(m.dimension());
    const auto h = static_cast<std::size_t>(m.half());
    const auto W = static_cast<std::size_t>(m.hidden());
    layers.resize(static_cast<std::size_t>(m.layers()));
    for (auto& c : layers) {
      c.input.resize(D);
      c.normed.resize(D);
      c.s_hidden.resize(W);
      c.t_hidden.resize(W);
      c.s_raw.resize(h);
      c.log_scale.resize(h);
      c.shift.resize(h);
    }
    z.resize(D);
    g.resize(D);
    g_normed.resize(D);
    g_cond.resize(h);
    g_sraw.resize(h);
    g_pre.resize(W);
  }
};

// Halves used by layer l: (conditioning offset, transformed offset).
std::pair<int, int> halves(int layer, int h) { return layer % 2 == 0 ? std::pair{0, h} : std::pair{h, 0}; }

double bounded_log_scale(double raw)
{
  constexpr double bound = FlowModel::kLogScaleBound;
  return bound * std::tanh(raw / bound);
}

// Fills the workspace caches; returns the accumulated log-determinant.
double forward_cached(const FlowModel& m, std::span<const double> x, Workspace& ws)
{
  const int D = m.dimension();
  const int h = m.half();
  const int W = m.hidden();
  const double* params = m.parameters().data();
  std::vector<double> current(x.begin(), x.end());
  double logdet = 0.0;

  for (int l = 0; l < m.layers(); ++l) {
    const double* p = params + static_cast<std::size_t>(l) * m.layer_size();
    auto& c = ws.layers[static_cast<std::size_t>(l)];
    c.input = current;
    const double* an_ls = p + m.off_an_log_scale();
    const double* an_b = p + m.off_an_bias();
    for (int d = 0; d < D; ++d) {
      c.normed[d] = c.input[d] * std::exp(an_ls[d]) + an_b[d];
      logdet += an_ls[d];
    }
    const auto [ca, cb] = halves(l, h);
    mlp_forward(net_parts(p + m.off_s_net(), h, W), h, W, c.normed.data() + ca, c.s_hidden.data(), c.s_raw.data());
    mlp_forward(net_parts(p + m.off_t_net(), h, W), h, W, c.normed.data() + ca, c.t_hidden.data(), c.shift.data());
    current = c.normed;
    for (int i = 0; i < h; ++i) {
      c.log_scale[i] = bounded_log_scale(c.s_raw[i]);
      current[cb + i] = c.normed[cb + i] * std::exp(c.log_scale[i]) + c.shift[i];
      logdet += c.log_scale[i];
    }
  }
  ws.z = std::move(current);
  for (const double v : ws.z) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NumericOverflow, "flow output is not finite");
    }
  }
  if (!std::isfinite(logdet)) {
    throw Error(ErrorKind::NumericOverflow, "flow log-determinant is not finite");
  }
  return logdet;
}

// Negative log-likelihood of one sample. With `grad` set, adds
// weight * d(nll)/d(params) into it.
double sample_nll(const FlowModel& m, std::span<const double> x, const std::vector<double>& mu, double weight,
                  double* grad, Workspace& ws)
{
  const int D = m.dimension();
  const int h = m.half();
  const int W = m.hidden();
  const double logdet = forward_cached(m, x, ws);
  double sq = 0.0;
  for (int d = 0; d < D; ++d) {
    const double diff = ws.z[d] - mu[d];
    sq += diff * diff;
  }
  const double nll = -m.base_constant() + 0.5 * sq - logdet;
  if (grad == nullptr) {
    return nll;
  }

  // d(nll)/d(logdet) = -1, so every log-scale also receives -weight.
  const double g_logdet = -weight;
  for (int d = 0; d < D; ++d) {
    ws.g[d] = weight * (ws.z[d] - mu[d]);
  }
  const double* params = m.parameters().data();
  for (int l = m.layers() - 1; l >= 0; --l) {
    const double* p = params + static_cast<std::size_t>(l) * m.layer_size();
    double* gp = grad + static_cast<std::size_t>(l) * m.layer_size();
    const auto& c = ws.layers[static_cast<std::size_t>(l)];
    const auto [ca, cb] = halves(l, h);

    // Coupling.
    for (int i = 0; i < h; ++i) {
      ws.g_normed[ca + i] = ws.g[ca + i];
      const double scale = std::exp(c.log_scale[i]);
      ws.g_normed[cb + i] = ws.g[cb + i] * scale;
      const double g_ls = ws.g[cb + i] * c.normed[cb + i] * scale + g_logdet;
      const double th = std::tanh(c.s_raw[i] / FlowModel::kLogScaleBound);
      ws.g_sraw[i] = g_ls * (1.0 - th * th);
    }
    std::fill(ws.g_cond.begin(), ws.g_cond.end(), 0.0);
    const double* cond = c.normed.data() + ca;
    mlp_backward(net_parts(p + m.off_s_net(), h, W), net_parts(gp + m.off_s_net(), h, W), h, W, cond,
                 c.s_hidden.data(), ws.g_sraw.data(), ws.g_cond.data(), ws.g_pre.data());
    mlp_backward(net_parts(p + m.off_t_net(), h, W), net_parts(gp + m.off_t_net(), h, W), h, W, cond,
                 c.t_hidden.data(), ws.g.data() + cb, ws.g_cond.data(), ws.g_pre.data());
    for (int i = 0; i < h; ++i) {
      ws.g_normed[ca + i] += ws.g_cond[i];
    }

    // Per-dimension affine.
    const double* an_ls = p + m.off_an_log_scale();
    double* g_an_ls = gp + m.off_an_log_scale();
    double* g_an_b = gp + m.off_an_bias();
    for (int d = 0; d < D; ++d) {
      const double scale = std::exp(an_ls[d]);
      g_an_b[d] += ws.g_normed[d];
      g_an_ls[d] += ws.g_normed[d] * c.input[d] * scale + g_logdet;
      ws.g[d] = ws.g_normed[d] * scale;
    }
  }
  return nll;
}

void check_input(const FlowModel& m, std::span<const double> x)
{
  if (static_cast<int>(x.size()) != m.dimension()) {
    throw Error(ErrorKind::Dimension, "expected a " + std::to_string(m.dimension()) + "-vector, got " +
                                          std::to_string(x.size()));
  }
  for (const double v : x) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NumericOverflow, "non-finite flow input");
    }
  }
}

} // namespace

FlowModel::FlowModel(int dimension, int layers, int hidden)
    : dimension_(dimension), layers_(layers), hidden_(hidden)
{
  if (dimension < 2 || dimension % 2 != 0) {
    throw Error(ErrorKind::Dimension, "flow dimension must be even and at least 2, got " + std::to_string(dimension));
  }
  if (layers < 1 || hidden < 1) {
    throw Error(ErrorKind::Dimension, "flow needs at least one layer and one hidden unit");
  }
  layer_size_ = 2 * static_cast<std::size_t>(dimension) + 2 * net_size();
  params_.assign(layer_size_ * static_cast<std::size_t>(layers), 0.0);
  mu_normal_.assign(static_cast<std::size_t>(dimension), 0.0);
  mu_abnormal_.assign(static_cast<std::size_t>(dimension), kAbnormalCenter);
}

std::size_t FlowModel::net_size() const noexcept
{
  const auto h = static_cast<std::size_t>(half());
  const auto W = static_cast<std::size_t>(hidden_);
  return 2 * h * W + W + h;
}

double FlowModel::base_constant() const noexcept
{
  return -0.5 * dimension_ * std::log(2.0 * std::numbers::pi);
}

void FlowModel::set_centers(std::vector<double> normal, std::vector<double> abnormal)
{
  const auto D = static_cast<std::size_t>(dimension_);
  if (normal.size() != D || abnormal.size() != D) {
    throw Error(ErrorKind::Dimension, "center dimension mismatch");
  }
  double sq = 0.0;
  for (std::size_t d = 0; d < D; ++d) {
    if (!std::isfinite(normal[d]) || !std::isfinite(abnormal[d])) {
      throw Error(ErrorKind::NumericOverflow, "non-finite center");
    }
    sq += (normal[d] - abnormal[d]) * (normal[d] - abnormal[d]);
  }
  if (!(sq > 0.0)) {
    throw Error(ErrorKind::Contract, "normal and abnormal centers coincide");
  }
  mu_normal_ = std::move(normal);
  mu_abnormal_ = std::move(abnormal);
}

FlowModel init_flow(int dimension, int layers, int hidden, std::uint64_t seed)
{
  FlowModel m(dimension, layers, hidden);
  std::mt19937_64 rng(seed);
  const int h = m.half();
  const double bound = 1.0 / std::sqrt(static_cast<double>(h));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  for (int l = 0; l < layers; ++l) {
    double* p = m.parameters().data() + static_cast<std::size_t>(l) * m.layer_size();
    for (const auto off : {m.off_s_net(), m.off_t_net()}) {
      auto net = net_parts(p + off, h, hidden);
      for (std::size_t i = 0; i < static_cast<std::size_t>(h) * hidden; ++i) {
        net.w1[i] = uniform(rng);
      }
    }
  }
  return m;
}

void fit_normalization(FlowModel& model, const Matrix& data)
{
  if (data.rows == 0) {
    throw Error(ErrorKind::EmptyBatch, "cannot fit normalization to an empty set");
  }
  if (static_cast<int>(data.cols) != model.dimension()) {
    throw Error(ErrorKind::Dimension, "normalization data has wrong dimension");
  }
  const auto D = data.cols;
  double* an_ls = model.parameters().data() + model.off_an_log_scale();
  double* an_b = model.parameters().data() + model.off_an_bias();
  for (std::size_t d = 0; d < D; ++d) {
    double mean = 0.0;
    for (std::size_t r = 0; r < data.rows; ++r) {
      mean += data.row(r)[d];
    }
    mean /= static_cast<double>(data.rows);
    double var = 0.0;
    for (std::size_t r = 0; r < data.rows; ++r) {
      const double diff = data.row(r)[d] - mean;
      var += diff * diff;
    }
    const double sd = std::max(std::sqrt(var / static_cast<double>(data.rows)), 1e-6);
    an_ls[d] = -std::log(sd);
    an_b[d] = -mean / sd;
  }
}

void jitter_parameters(FlowModel& model, double scale, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (auto& p : model.parameters()) {
    p += normal(rng);
  }
}

FlowOutput flow_forward(const FlowModel& model, std::span<const double> x)
{
  check_input(model, x);
  Workspace ws(model);
  const double logdet = forward_cached(model, x, ws);
  return {std::move(ws.z), logdet};
}

std::vector<double> flow_inverse(const FlowModel& model, std::span<const double> z)
{
  check_input(model, z);
  const int D = model.dimension();
  const int h = model.half();
  const int W = model.hidden();
  std::vector<double> current(z.begin(), z.end());
  std::vector<double> hidden(static_cast<std::size_t>(W));
  std::vector<double> s_raw(static_cast<std::size_t>(h));
  std::vector<double> shift(static_cast<std::size_t>(h));
  for (int l = model.layers() - 1; l >= 0; --l) {
    const double* p = model.parameters().data() + static_cast<std::size_t>(l) * model.layer_size();
    const auto [ca, cb] = halves(l, h);
    mlp_forward(net_parts(p + model.off_s_net(), h, W), h, W, current.data() + ca, hidden.data(), s_raw.data());
    mlp_forward(net_parts(p + model.off_t_net(), h, W), h, W, current.data() + ca, hidden.data(), shift.data());
    for (int i = 0; i < h; ++i) {
      current[cb + i] = (current[cb + i] - shift[i]) * std::exp(-bounded_log_scale(s_raw[i]));
    }
    const double* an_ls = p + model.off_an_log_scale();
    const double* an_b = p + model.off_an_bias();
    for (int d = 0; d < D; ++d) {
      current[d] = (current[d] - an_b[d]) * std::exp(-an_ls[d]);
    }
  }
  for (const double v : current) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NumericOverflow, "flow inverse is not finite");
    }
  }
  return current;
}

double log_prob(const FlowModel& model, std::span<const double> x, Center center)
{
  check_input(model, x);
  Workspace ws(model);
  return -sample_nll(model, x, model.center(center), 0.0, nullptr, ws);
}

double typicality_score(const FlowModel& model, std::span<const double> x)
{
  return -log_prob(model, x, Center::Normal);
}

namespace {

// Fixed chunking keeps the reduction order independent of the worker count.
constexpr std::size_t kChunk = 32;

struct ChunkJob {
  const Matrix* data;
  const std::vector<double>* mu;
  std::size_t begin;
  std::size_t end;
  double weight;
};

} // namespace

LossAndGrad nll_loss_and_grad(const FlowModel& model, const Matrix& normal, const Matrix& abnormal)
{
  if (normal.rows == 0) {
    throw Error(ErrorKind::EmptyBatch, "normal batch is empty");
  }
  const auto D = static_cast<std::size_t>(model.dimension());
  if (normal.cols != D || (abnormal.rows > 0 && abnormal.cols != D)) {
    throw Error(ErrorKind::Dimension, "batch dimension does not match the flow");
  }
  for (const auto* m : {&normal, &abnormal}) {
    for (const double v : m->data) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::NumericOverflow, "non-finite value in training batch");
      }
    }
  }

  std::vector<ChunkJob> jobs;
  auto add_jobs = [&](const Matrix& data, Center c) {
    const double weight = 1.0 / static_cast<double>(data.rows);
    for (std::size_t b = 0; b < data.rows; b += kChunk) {
      jobs.push_back({&data, &model.center(c), b, std::min(b + kChunk, data.rows), weight});
    }
  };
  add_jobs(normal, Center::Normal);
  if (abnormal.rows > 0) {
    add_jobs(abnormal, Center::Abnormal);
  }

  const std::size_t P = model.parameters().size();
  std::vector<std::vector<double>> chunk_grads(jobs.size());
  std::vector<double> chunk_loss(jobs.size(), 0.0);
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto& job = jobs[j];
    Workspace ws(model);
    auto& g = chunk_grads[j];
    g.assign(P, 0.0);
    double loss = 0.0;
    for (std::size_t r = job.begin; r < job.end; ++r) {
      loss += sample_nll(model, job.data->row(r), *job.mu, job.weight, g.data(), ws);
    }
    chunk_loss[j] = loss * job.weight;
  });

  LossAndGrad out;
  out.gradient.assign(P, 0.0);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    out.loss += chunk_loss[j];
    for (std::size_t i = 0; i < P; ++i) {
      out.gradient[i] += chunk_grads[j][i];
    }
  }
  return out;
}

TrainResult train_flow(FlowModel model, const Matrix& normal, const Matrix& abnormal, const TrainConfig& config)
{
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
    throw Error(ErrorKind::Contract, "learning rate must be finite and non-negative");
  }
  if (config.batch_size < 1) {
    throw Error(ErrorKind::Contract, "batch size must be at least 1");
  }
  if (normal.rows == 0) {
    throw Error(ErrorKind::EmptyBatch, "no normal training data");
  }
  const auto D = static_cast<std::size_t>(model.dimension());
  if (normal.cols != D || (abnormal.rows > 0 && abnormal.cols != D)) {
    throw Error(ErrorKind::Dimension, "training data dimension does not match the flow");
  }

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order_n(normal.rows);
  std::vector<std::size_t> order_a(abnormal.rows);
  std::iota(order_n.begin(), order_n.end(), 0);
  std::iota(order_a.begin(), order_a.end(), 0);

  const std::size_t steps = (normal.rows + config.batch_size - 1) / config.batch_size;
  const std::size_t abnormal_per_step = (abnormal.rows + steps - 1) / steps;

  auto& params = model.parameters();
  std::vector<double> m1(params.size(), 0.0);
  std::vector<double> m2(params.size(), 0.0);
  std::uint64_t t = 0;
  TrainResult result{model, {}};

  Matrix batch_n;
  Matrix batch_a;
  auto gather = [D](const Matrix& src, const std::vector<std::size_t>& order, std::size_t b, std::size_t e,
                    Matrix& dst) {
    dst.rows = e - b;
    dst.cols = D;
    dst.data.resize(dst.rows * D);
    for (std::size_t i = b; i < e; ++i) {
      const auto row = src.row(order[i]);
      std::copy(row.begin(), row.end(), dst.data.begin() + static_cast<std::ptrdiff_t>((i - b) * D));
    }
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order_n.begin(), order_n.end(), rng);
    std::shuffle(order_a.begin(), order_a.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      gather(normal, order_n, s * config.batch_size, std::min((s + 1) * config.batch_size, normal.rows), batch_n);
      const std::size_t ab = std::min(s * abnormal_per_step, abnormal.rows);
      gather(abnormal, order_a, ab, std::min(ab + abnormal_per_step, abnormal.rows), batch_a);

      LossAndGrad lg;
      try {
        lg = nll_loss_and_grad(model, batch_n, batch_a);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NumericOverflow) {
          throw Error(ErrorKind::TrainingDiverged, "training diverged at epoch " + std::to_string(epoch + 1));
        }
        throw;
      }
      if (!std::isfinite(lg.loss)) {
        throw Error(ErrorKind::TrainingDiverged, "training diverged at epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += lg.loss;

      ++t;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = lg.gradient[i];
        m1[i] = config.beta1 * m1[i] + (1.0 - config.beta1) * g;
        m2[i] = config.beta2 * m2[i] + (1.0 - config.beta2) * g * g;
        params[i] -= config.learning_rate * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + config.epsilon);
      }
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(steps));
  }
  result.model = std::move(model);
  return result;
}

std::string encode_flow(const FlowModel& model)
{
  std::ostringstream out(std::ios::binary);
  out.write("SKFL", 4);
  detail::write_le<std::uint16_t>(out, kCheckpointVersion);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.dimension()));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.layers()));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.hidden()));
  for (const double p : model.parameters()) {
    detail::write_le<float>(out, static_cast<float>(p));
  }
  for (const auto c : {Center::Normal, Center::Abnormal}) {
    for (const double v : model.center(c)) {
      detail::write_le<float>(out, static_cast<float>(v));
    }
  }
  return std::move(out).str();
}

FlowModel decode_flow(const std::string& bytes)
{
  constexpr std::size_t header = 4 + 2 + 3 * 4;
  if (bytes.size() < header || bytes.compare(0, 4, "SKFL") != 0) {
    throw Error(ErrorKind::Schema, "not an SKFL checkpoint");
  }
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  const auto version = detail::read_le<std::uint16_t>(raw + 4);
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::Schema, "unsupported SKFL version " + std::to_string(version));
  }
  const auto D = detail::read_le<std::uint32_t>(raw + 6);
  const auto K = detail::read_le<std::uint32_t>(raw + 10);
  const auto W = detail::read_le<std::uint32_t>(raw + 14);
  if (D > 65536 || K > 1024 || W > 65536) {
    throw Error(ErrorKind::Schema, "implausible SKFL shape");
  }
  FlowModel model(static_cast<int>(D), static_cast<int>(K), static_cast<int>(W));
  const std::size_t count = model.parameters().size() + 2 * static_cast<std::size_t>(D);
  if (bytes.size() - header != count * 4) {
    throw Error(ErrorKind::Schema, "SKFL payload size does not match its shape header");
  }
  const unsigned char* p = raw + header;
  auto next = [&p] {
    const double v = detail::read_le<float>(p);
    p += 4;
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::Schema, "non-finite value in checkpoint");
    }
    return v;
  };
  for (auto& v : model.parameters()) {
    v = next();
  }
  std::vector<double> mu_n(D);
  std::vector<double> mu_a(D);
  for (auto& v : mu_n) {
    v = next();
  }
  for (auto& v : mu_a) {
    v = next();
  }
  model.set_centers(std::move(mu_n), std::move(mu_a));
  return model;
}

void save_flow(const std::string& path, const FlowModel& model)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write checkpoint " + path);
  }
  const auto bytes = encode_flow(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

FlowModel load_flow(const std::string& path)
{
  try {
    return decode_flow(detail::read_file_bytes(path));
  } catch (const Error& e) {
    throw Error(e.kind(), "model " + path + ": " + e.what());
  }
}

} // namespace sentinel
