#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hypolab/domain.hpp"

namespace hypo {

struct EigRange {
  double lo = 0.0;
  double hi = 0.0;
  EigRange() = default;
  EigRange(double l, double h) : lo(l), hi(h) {
    if (!(l <= h)) throw ConfigError("eigenvalue range requires lo <= hi");
  }
  double max_abs() const { return std::max(std::abs(lo), std::abs(hi)); }
};

/// Exact O(N) reduction of the mean-field force (1/N) sum_j grad_x W(x, x_j)
/// for kernels whose gradient separates into per-particle statistics.
/// accumulate() adds the statistics of one particle; force() evaluates the
/// mean force at x given the averaged statistics.
struct MeanForceReduction {
  int n_stats = 0;
  std::function<void(double x, double* stats)> accumulate;
  std::function<double(double x, const double* mean_stats)> force;
};

/// Symmetric interaction kernel W(x,y) with analytic derivatives.
/// Evaluators must be pure; all fields are immutable after construction.
struct KernelModel {
  std::string name;
  std::function<double(const Vec&, const Vec&)> eval;
  std::function<Vec(const Vec&, const Vec&)> grad_x;
  std::function<Mat(const Vec&, const Vec&)> hess_xx;
  std::function<Mat(const Vec&, const Vec&)> hess_xy;
  std::optional<EigRange> wxx_bounds;   // eigenvalues of grad^2_xx W
  std::optional<EigRange> wxy_bounds;   // eigenvalues of grad^2_xy W
  std::optional<double> sup_abs;        // sup |W| when known in closed form
  std::optional<MeanForceReduction> mean_force;  // d = 1 builtins only
  bool is_zero = false;
};

/// Confinement potential U(x) with analytic derivatives.
struct PotentialModel {
  std::string name;
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
  std::optional<EigRange> hess_bounds;
  bool is_zero = false;
};

// Builtin catalog. All builtins are d = 1; the matrix machinery accepts
// arbitrary-d models built by hand.
KernelModel make_zero_kernel();
/// W(x,y) = alpha * cos(omega * (x - y))
KernelModel make_difference_kernel(double alpha, double omega = 1.0);
/// W(x,y) = beta * g(x) * g(y), g in {cos, sin}
KernelModel make_separable_kernel(double beta, const std::string& g = "cos");
PotentialModel make_zero_potential();
/// U(x) = kappa * (1 - cos x), torus potential
PotentialModel make_cosine_potential(double kappa);
/// U(x) = kappa * x^2 / 2, line domains only
PotentialModel make_quadratic_potential(double kappa);

/// sup |W| over a grid when no closed form is declared.
double kernel_sup_abs(const KernelModel& kernel, const PositionDomain& domain, int n = 128);

struct ValidationReport {
  double kernel_grad_err = 0.0;    // max relative defect of grad_x vs FD
  double kernel_hess_xx_err = 0.0;
  double kernel_hess_xy_err = 0.0;
  double kernel_swap_err = 0.0;    // FD d^2/dy^2 of eval(x,.) vs hess_xx(y,x)
  double kernel_symmetry = 0.0;    // max |W(x,y) - W(y,x)|
  double kernel_hess_asym = 0.0;   // max |hess_xx - hess_xx^T|
  double potential_grad_err = 0.0;
  double potential_hess_err = 0.0;
  bool passed = false;
};

/// Central finite-difference validation of every analytic derivative at
/// deterministic sample points. Step 1e-4, pass threshold 1e-6 relative.
ValidationReport validate_model(const KernelModel& kernel, const PotentialModel& potential,
                                const PositionDomain& domain, int samples);

inline constexpr double kFdStep = 1e-4;
inline constexpr double kFdTolerance = 1e-6;

}  // namespace hypo
