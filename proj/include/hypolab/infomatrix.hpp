#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypolab/model.hpp"

namespace hypo {

/// Mean-field information matrix R(z,x,y) and its blocks. V(x,y) = U(x) + W(x,y).
/// R = 1/2 [[A(x,y), B(x,y)], [B(x,y), A(y,x)]] is 4d x 4d and symmetric.
struct InfoMatrix {
  Mat A_xy, A_yx, B;  // 2d x 2d
  Mat R;              // 4d x 4d
  Vec x, y;
  DirectionPair dir;
};

/// Split of A into the W-Hessian part A1 and the U-Hessian part A2:
/// A1(x,y) + A2(x,y) = A(x,y) and R = 1/2 [[A1,B],[B,A1']] + 1/2 diag(A2, A2').
struct ReformBlocks {
  Mat A1_xy, A1_yx, A2_xy, A2_yx, B;
  Mat reconstruct() const;
};

struct GridSpec {
  int points_per_axis = 16;
};

struct SpectralCertificate {
  double lambda = 0.0;
  Vec x, y;        // argmin over the grid
  Vec witness;     // generalized eigenvector at the argmin
  GridSpec grid;
  DirectionPair dir;
  bool feasible = false;  // lambda > kFeasibilityTol
};

inline constexpr double kFeasibilityTol = 1e-10;

/// Declared eigenvalue ranges for the analytic checkers.
/// wxx_range: eigenvalues of grad^2_xx V (case 1) or grad^2_xx W (example-2 chain);
/// wxy_range: eigenvalues of grad^2_xy W; u_range: eigenvalues of grad^2 U.
struct EigenBoundSpec {
  std::optional<EigRange> wxx_range;
  std::optional<EigRange> wxy_range;
  std::optional<EigRange> u_range;
};

struct CheckResult {
  std::string name;
  bool feasible = false;
  bool applicable = true;
  std::vector<std::pair<std::string, double>> values;
  std::string note;
  double value(const std::string& key) const;
};

InfoMatrix assemble_R(const KernelModel& kernel, const PotentialModel& potential,
                      const DirectionPair& dir, const Vec& x, const Vec& y);
ReformBlocks assemble_reform(const KernelModel& kernel, const PotentialModel& potential,
                             const DirectionPair& dir, const Vec& x, const Vec& y);

/// Assemble R directly from Hessian values (hv_x = grad^2_xx V(x,y),
/// hv_y = grad^2_yy V(y,x), hw_xy = grad^2_xy W(x,y)).
Mat assemble_R_from_hessians(const DirectionPair& dir, const Mat& hv_x, const Mat& hv_y,
                             const Mat& hw_xy);

/// Largest lambda with R >= lambda * diag(M, M), M = aa^T + zz^T, computed by
/// symmetric whitening (Cholesky of the metric). Also returns the witness
/// eigenvector in the original coordinates.
std::pair<double, Vec> generalized_lambda_min(const Mat& R, const DirectionPair& dir);

double lambda_at(const KernelModel& kernel, const PotentialModel& potential,
                 const DirectionPair& dir, const Vec& x, const Vec& y);

/// min over an (x,y) product grid of lambda_at; deterministic argmin
/// (lexicographic pair index breaks ties), parallelizable.
SpectralCertificate certify_lambda(const KernelModel& kernel, const PotentialModel& potential,
                                   const DirectionPair& dir, const PositionDomain& domain,
                                   const GridSpec& grid, int threads = 1);

struct ZGridSpec {
  double z1_lo = 0.1, z1_hi = 3.0;
  int n1 = 10;
  double z2_lo = 0.1, z2_hi = 3.0;
  int n2 = 10;
  std::vector<DirectionPair> points() const;
};

/// Max over a (z1,z2) grid of the certified lambda. Ties break toward the
/// smallest z1, then smallest z2.
std::pair<DirectionPair, SpectralCertificate> search_directions(
    const KernelModel& kernel, const PotentialModel& potential, const ZGridSpec& z_grid,
    const PositionDomain& domain, const GridSpec& xy_grid, int threads = 1);

// --- closed-form feasibility tests (scalar reductions, applied per eigenvalue) ---

/// Case (1): Gershgorin bound on A plus a Schur bound on the B coupling.
/// bounds.wxx_range holds eigenvalues of grad^2_xx V here.
CheckResult check_case1_gershgorin(const DirectionPair& dir, const EigenBoundSpec& bounds);

/// Case (2): Schur-complement condition for grad^2_xy W = 0 (caller asserts),
/// z1 = 1 in the simple form; the general z1-form is evaluated as well.
CheckResult check_case2_schur(double z2, double lambda_lo, double lambda_hi, double delta,
                              double z1 = 1.0);

/// Admissible open interval for eigenvalues of grad^2_xx W given the spectral
/// floor lambda_U of A2.
std::pair<double, double> check_example2_interval(const DirectionPair& dir, double lambda_U);

/// Spectral floor of A2 over grad^2 U eigenvalues t in [lambda_lo, lambda_hi]
/// (2x2 scalar reduction, sampled plus endpoints).
double compute_lambda_U(const DirectionPair& dir, double lambda_lo, double lambda_hi,
                        int samples = 65);

/// Full Schur chain for the example-2 route: D_i > 0, the first coupling
/// inequality, and the exact (untruncated) second inequality.
CheckResult check_example2_schur_chain(const DirectionPair& dir, double lambda_U, double wxx_eig,
                                       double wxy_eig);

/// U = 0, W(x,y) = W(x-y): upper bound on any achievable lambda
/// (nonpositive unless z1 z2 = 1 + z2^2 and the eigenvalue vanishes).
CheckResult check_remark3(const DirectionPair& dir, double wdiff_eig);

}  // namespace hypo
