#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skel_sentinel/matrix.hpp"

namespace sentinel {

enum class Center { Normal, Abnormal };

/// Stack of K invertible layers over R^D followed by a unit-variance
/// Gaussian base with two centers (normal at the origin, abnormal at
/// (10, ..., 10)).
///
/// Each layer is
///   u   = x * exp(an_log_scale) + an_bias                (per dimension)
///   y_a = u_a
///   y_b = u_b * exp(L(u_a)) + t(u_a),  L = s_max * tanh(s(u_a) / s_max)
/// where (a, b) is (first half, second half) on even layers and swapped on
/// odd ones, and s, t are tanh MLPs of width W.
///
/// Parameters live in one flat vector. Per layer, in order:
///   an_log_scale[D], an_bias[D],
///   s.w1[W][D/2], s.b1[W], s.w2[D/2][W], s.b2[D/2],
///   t.w1[W][D/2], t.b1[W], t.w2[D/2][W], t.b2[D/2]
class FlowModel {
public:
  static constexpr double kLogScaleBound = 5.0;
  static constexpr double kAbnormalCenter = 10.0;

  /// All parameters zero: the identity map.
  FlowModel(int dimension, int layers, int hidden);

  int dimension() const noexcept { return dimension_; }
  int layers() const noexcept { return layers_; }
  int hidden() const noexcept { return hidden_; }
  int half() const noexcept { return dimension_ / 2; }

  std::size_t layer_size() const noexcept { return layer_size_; }
  std::vector<double>& parameters() noexcept { return params_; }
  const std::vector<double>& parameters() const noexcept { return params_; }

  const std::vector<double>& center(Center c) const noexcept { return c == Center::Normal ? mu_normal_ : mu_abnormal_; }
  /// -(D/2) ln(2 pi)
  double base_constant() const noexcept;
  /// Throws ErrorKind::Dimension on size mismatch and ErrorKind::Contract
  /// when the centers coincide.
  void set_centers(std::vector<double> normal, std::vector<double> abnormal);

  // Offsets of each block within a layer.
  std::size_t off_an_log_scale() const noexcept { return 0; }
  std::size_t off_an_bias() const noexcept { return static_cast<std::size_t>(dimension_); }
  std::size_t off_s_net() const noexcept { return 2 * static_cast<std::size_t>(dimension_); }
  std::size_t off_t_net() const noexcept { return off_s_net() + net_size(); }
  std::size_t net_size() const noexcept;

  bool operator==(const FlowModel&) const = default;

private:
  int dimension_;
  int layers_;
  int hidden_;
  std::size_t layer_size_;
  std::vector<double> params_;
  std::vector<double> mu_normal_;
  std::vector<double> mu_abnormal_;
};

/// Seeded model whose first MLP layers are random and whose output layers
/// and per-dimension affines are zero, so the map starts as the identity.
FlowModel init_flow(int dimension, int layers, int hidden, std::uint64_t seed);

/// Sets the first layer's per-dimension affine so that `data` comes out
/// with zero mean and unit variance in every dimension.
void fit_normalization(FlowModel& model, const Matrix& data);

/// Adds N(0, scale^2) noise to every parameter.
void jitter_parameters(FlowModel& model, double scale, std::uint64_t seed);

struct FlowOutput {
  std::vector<double> z;
  double logdet = 0.0;
};

FlowOutput flow_forward(const FlowModel& model, std::span<const double> x);
std::vector<double> flow_inverse(const FlowModel& model, std::span<const double> z);

/// Con - |f(x) - mu|^2 / 2 + log|det df/dx|
double log_prob(const FlowModel& model, std::span<const double> x, Center center);

/// -log p under the normal center; large values are atypical.
double typicality_score(const FlowModel& model, std::span<const double> x);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> gradient; // same layout as FlowModel::parameters()
};

/// Mean negative log-likelihood of `normal` under the normal center plus
/// that of `abnormal` under the abnormal center. `abnormal` may be empty.
LossAndGrad nll_loss_and_grad(const FlowModel& model, const Matrix& normal, const Matrix& abnormal);

struct TrainConfig {
  double learning_rate = 0.0005;
  std::size_t batch_size = 1024;
  int epochs = 50;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainResult {
  FlowModel model;
  std::vector<double> loss_history; // mean batch loss per epoch
};

/// Adam on nll_loss_and_grad. Each epoch walks the shuffled normal set in
/// batches of batch_size and spreads the shuffled abnormal set evenly over
/// the same number of steps.
TrainResult train_flow(FlowModel model, const Matrix& normal, const Matrix& abnormal, const TrainConfig& config);

/// SKFL checkpoint: "SKFL", u16 version, u32 D, u32 K, u32 W, then every
/// parameter in FlowModel order, then mu_normal[D] and mu_abnormal[D], all
/// as little-endian float32.
inline constexpr std::uint16_t kCheckpointVersion = 1;
std::string encode_flow(const FlowModel& model);
FlowModel decode_flow(const std::string& bytes);
void save_flow(const std::string& path, const FlowModel& model);
FlowModel load_flow(const std::string& path);

} // namespace sentinel
