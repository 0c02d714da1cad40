#pragma once

#include "hypolab/model.hpp"
#include "hypolab/phase_grid.hpp"

namespace hypo {

/// Self-consistent Gibbs equilibrium f_inf(x,v) = rho_inf(x) N(v) / Z with
/// rho_inf proportional to exp(-U - W conv rho_inf).
struct Equilibrium {
  std::vector<double> rho_inf;  // x-marginal on the grid
  DensityField f_inf;
  double Z = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// (W conv rho)(x_i) = sum_j W(x_i, x_j) rho_j hx, direct quadrature.
std::vector<double> kernel_convolve(const KernelModel& kernel, const PhaseGrid& grid,
                                    const std::vector<double>& rho);

/// Damped Picard iteration rho <- theta T(rho) + (1-theta) rho with
/// T(rho) = normalized exp(-U - W conv rho). Stops when the sup-norm
/// self-consistency residual |T(rho) - rho| drops below tol.
Equilibrium fixed_point(const KernelModel& kernel, const PotentialModel& potential,
                        const PhaseGrid& grid, double tol = 1e-12, int max_iter = 10000,
                        double theta = 0.5);

/// E(f) = int f log f + int |v|^2/2 f + 1/2 int int W f f' + int U f.
double free_energy(const DensityField& f, const KernelModel& kernel,
                   const PotentialModel& potential);

/// First variation xi = log f + 1 + |v|^2/2 + W conv rho + U (f floored at 1e-300).
Eigen::ArrayXXd variation(const DensityField& f, const KernelModel& kernel,
                          const PotentialModel& potential);

/// DE_a(f) = int |d_v xi|^2 f (velocity direction).
double fisher_a(const DensityField& f, const KernelModel& kernel,
                const PotentialModel& potential);
/// DE_z(f) = int |z1 d_x xi + z2 d_v xi|^2 f.
double fisher_z(const DensityField& f, const KernelModel& kernel,
                const PotentialModel& potential, const DirectionPair& dir);

struct GapReport {
  double direct_gap = 0.0;  // E(f) - E(f_inf)
  double kl_term = 0.0;     // KL(f || f_inf)
  double quad_term = 0.0;   // 1/2 int int W (f - f_inf)(f - f_inf)
  double defect = 0.0;      // direct_gap - kl_term - quad_term
};

/// Verifies E(f) - E(f_inf) = KL(f||f_inf) + 1/2 <W (f-f_inf), (f-f_inf)>.
GapReport energy_gap_identity(const DensityField& f, const Equilibrium& eq,
                              const KernelModel& kernel, const PotentialModel& potential);

double kl_divergence(const DensityField& f, const DensityField& g);

struct CkpReport {
  double gap = 0.0;
  double l1 = 0.0;
  double lower_bound = 0.0;
  bool holds = false;
  bool applicable = false;  // false when C_W >= 1
};

/// Csiszar-Kullback-Pinsker chain: E(f) - E(f_inf) >= (1-C_W)/2 * ||f-f_inf||_1^2.
CkpReport ckp_check(const DensityField& f, const Equilibrium& eq, const KernelModel& kernel,
                    const PotentialModel& potential, double c_w);

inline constexpr double kDensityFloor = 1e-300;

}  // namespace hypo
