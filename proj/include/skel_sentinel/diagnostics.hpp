#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skel_sentinel/flow.hpp"

namespace sentinel {

/// ln|det J| of the flow at x, with J built column by column from central
/// differences of flow_forward and the determinant taken by LU with partial
/// pivoting.
double numeric_log_abs_det(const FlowModel& model, std::span<const double> x, double step = 1e-5);

/// Central-difference gradient of nll_loss_and_grad's loss with respect to
/// every parameter.
std::vector<double> numeric_loss_gradient(const FlowModel& model, const Matrix& normal, const Matrix& abnormal,
                                          double step = 1e-5);

/// |a - n| / max(|a|, |n|, floor); the floor keeps near-zero entries from
/// turning rounding noise into huge ratios.
double relative_error(double analytic, double numeric, double floor = 1e-6);

struct SelfTest {
  std::string name;
  bool passed = false;
  double value = 0.0;     // worst observed error
  double tolerance = 0.0;
};

/// Invertibility (D=64, K=4), log-det against a numeric Jacobian
/// (D in {2, 4, 6}) and loss gradient against finite differences
/// (D=4, W=8, K=2), all on seeded random models.
std::vector<SelfTest> run_self_tests(std::uint64_t seed);

} // namespace sentinel
