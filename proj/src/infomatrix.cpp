#include "hypolab/infomatrix.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <mutex>

namespace hypo {

namespace {

Mat a_block(const DirectionPair& dir, const Mat& hess_v) {
  const int d = static_cast<int>(hess_v.rows());
  const double c = 1.0 + dir.z1 * dir.z2 + dir.z2 * dir.z2;
  Mat id = Mat::Identity(d, d);
  Mat off = 0.5 * (c * id - dir.z1 * dir.z1 * hess_v);
  Mat a(2 * d, 2 * d);
  a.topLeftCorner(d, d) = dir.z1 * dir.z2 * id;
  a.topRightCorner(d, d) = off;
  a.bottomLeftCorner(d, d) = off;
  a.bottomRightCorner(d, d) = (1.0 + dir.z2 * dir.z2) * id - dir.z1 * dir.z2 * hess_v;
  return a;
}

Mat b_block(const DirectionPair& dir, const Mat& hess_w_xy) {
  const int d = static_cast<int>(hess_w_xy.rows());
  Mat b = Mat::Zero(2 * d, 2 * d);
  b.topRightCorner(d, d) = -0.5 * dir.z1 * dir.z1 * hess_w_xy;
  b.bottomLeftCorner(d, d) = -0.5 * dir.z1 * dir.z1 * hess_w_xy;
  b.bottomRightCorner(d, d) = -dir.z1 * dir.z2 * hess_w_xy;
  return b;
}

Mat pack_R(const Mat& a_xy, const Mat& a_yx, const Mat& b) {
  const auto n = a_xy.rows();
  Mat r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = a_xy;
  r.topRightCorner(n, n) = b;
  r.bottomLeftCorner(n, n) = b;
  r.bottomRightCorner(n, n) = a_yx;
  return 0.5 * r;
}

void check_finite(const Mat& m, const Vec& x, const Vec& y, const char* what) {
  if (!m.allFinite()) {
    throw EvaluationError(std::string(what) + " non-finite at (x,y) = (" +
                          std::to_string(x[0]) + ", " + std::to_string(y[0]) + ")");
  }
}

}  // namespace

Mat ReformBlocks::reconstruct() const {
  return pack_R(A1_xy + A2_xy, A1_yx + A2_yx, B);
}

double CheckResult::value(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  throw Error("CheckResult has no value named " + key);
}

Mat assemble_R_from_hessians(const DirectionPair& dir, const Mat& hv_x, const Mat& hv_y,
                             const Mat& hw_xy) {
  return pack_R(a_block(dir, hv_x), a_block(dir, hv_y), b_block(dir, hw_xy));
}

InfoMatrix assemble_R(const KernelModel& kernel, const PotentialModel& potential,
                      const DirectionPair& dir, const Vec& x, const Vec& y) {
  Mat hv_x = potential.hess(x) + kernel.hess_xx(x, y);
  Mat hv_y = potential.hess(y) + kernel.hess_xx(y, x);
  Mat hw = kernel.hess_xy(x, y);
  check_finite(hv_x, x, y, "grad^2_xx V");
  check_finite(hv_y, x, y, "grad^2_yy V");
  check_finite(hw, x, y, "grad^2_xy W");

  InfoMatrix info;
  info.A_xy = a_block(dir, hv_x);
  info.A_yx = a_block(dir, hv_y);
  info.B = b_block(dir, hw);
  info.R = pack_R(info.A_xy, info.A_yx, info.B);
  info.x = x;
  info.y = y;
  info.dir = dir;
  return info;
}

ReformBlocks assemble_reform(const KernelModel& kernel, const PotentialModel& potential,
                             const DirectionPair& dir, const Vec& x, const Vec& y) {
  const int d = static_cast<int>(x.size());
  Mat wxx_x = kernel.hess_xx(x, y);
  Mat wxx_y = kernel.hess_xx(y, x);
  Mat zero = Mat::Zero(d, d);

  auto a1 = [&](const Mat& wxx) {
    Mat m = Mat::Zero(2 * d, 2 * d);
    m.topRightCorner(d, d) = -0.5 * dir.z1 * dir.z1 * wxx;
    m.bottomLeftCorner(d, d) = -0.5 * dir.z1 * dir.z1 * wxx;
    m.bottomRightCorner(d, d) = -dir.z1 * dir.z2 * wxx;
    return m;
  };

  ReformBlocks rb;
  rb.A1_xy = a1(wxx_x);
  rb.A1_yx = a1(wxx_y);
  rb.A2_xy = a_block(dir, potential.hess(x));
  rb.A2_yx = a_block(dir, potential.hess(y));
  rb.B = b_block(dir, kernel.hess_xy(x, y));
  return rb;
}

std::pair<double, Vec> generalized_lambda_min(const Mat& R, const DirectionPair& dir) {
  if (dir.z1 == 0.0)
    throw SingularMetricError("metric aa^T+zz^T is singular for z1 = 0");
  const int d = static_cast<int>(R.rows()) / 4;
  Mat m = dir.metric_block(d);
  Mat metric = Mat::Zero(4 * d, 4 * d);
  metric.topLeftCorner(2 * d, 2 * d) = m;
  metric.bottomRightCorner(2 * d, 2 * d) = m;

  Eigen::LLT<Mat> llt(metric);
  if (llt.info() != Eigen::Success)
    throw SingularMetricError("metric block is not positive definite");
  Mat l = llt.matrixL();
  Mat half = l.triangularView<Eigen::Lower>().solve(R);
  Mat whitened = l.triangularView<Eigen::Lower>().solve(half.transpose()).transpose();

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (whitened + whitened.transpose()));
  if (es.info() != Eigen::Success) throw Error("eigensolver failed on whitened matrix");
  double lambda = es.eigenvalues()(0);
  Vec u = es.eigenvectors().col(0);
  Vec witness = l.transpose().triangularView<Eigen::Upper>().solve(u);
  witness /= witness.norm();
  return {lambda, witness};
}

double lambda_at(const KernelModel& kernel, const PotentialModel& potential,
                 const DirectionPair& dir, const Vec& x, const Vec& y) {
  return generalized_lambda_min(assemble_R(kernel, potential, dir, x, y).R, dir).first;
}

namespace {

// Product grid over the position box, one index per axis. Torus grids use the
// node convention x_k = k h; line grids are cell-centered.
std::vector<double> axis_nodes(const PositionDomain& domain, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  double h = domain.width() / n;
  for (int k = 0; k < n; ++k)
    out[static_cast<std::size_t>(k)] = domain.is_torus() ? k * h : domain.lo() + (k + 0.5) * h;
  return out;
}

Vec point_from_flat(const std::vector<double>& nodes, int d, std::int64_t flat) {
  Vec x(d);
  auto n = static_cast<std::int64_t>(nodes.size());
  for (int k = d - 1; k >= 0; --k) {
    x[k] = nodes[static_cast<std::size_t>(flat % n)];
    flat /= n;
  }
  return x;
}

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= base;
  return r;
}

}  // namespace

SpectralCertificate certify_lambda(const KernelModel& kernel, const PotentialModel& potential,
                                   const DirectionPair& dir, const PositionDomain& domain,
                                   const GridSpec& grid, int threads) {
  if (grid.points_per_axis < 1) throw ConfigError("certification grid is empty");
  const int d = domain.dimension;
  auto nodes = axis_nodes(domain, grid.points_per_axis);
  const std::int64_t per_point = ipow(grid.points_per_axis, d);
  const std::int64_t total = per_point * per_point;

  struct Best {
    double lambda = std::numeric_limits<double>::infinity();
    std::int64_t idx = -1;
  };
  int t = resolve_threads(threads);
  std::vector<Best> locals(static_cast<std::size_t>(std::max(1, t)));
  std::string failure;
  std::mutex fail_mutex;

  parallel_chunks(total, t, [&](std::int64_t b, std::int64_t e, int chunk) {
    Best best;
    try {
      for (std::int64_t i = b; i < e; ++i) {
        Vec x = point_from_flat(nodes, d, i / per_point);
        Vec y = point_from_flat(nodes, d, i % per_point);
        double lam = lambda_at(kernel, potential, dir, x, y);
        if (lam < best.lambda) {
          best.lambda = lam;
          best.idx = i;
        }
      }
    } catch (const std::exception& ex) {
      std::lock_guard<std::mutex> lock(fail_mutex);
      if (failure.empty()) failure = ex.what();
    }
    locals[static_cast<std::size_t>(chunk)] = best;
  });
  if (!failure.empty()) throw EvaluationError(failure);

  Best best;
  for (const auto& loc : locals) {
    if (loc.idx < 0) continue;
    if (loc.lambda < best.lambda || (loc.lambda == best.lambda && loc.idx < best.idx)) best = loc;
  }

  SpectralCertificate cert;
  cert.grid = grid;
  cert.dir = dir;
  cert.x = point_from_flat(nodes, d, best.idx / per_point);
  cert.y = point_from_flat(nodes, d, best.idx % per_point);
  auto [lam, witness] = generalized_lambda_min(
      assemble_R(kernel, potential, dir, cert.x, cert.y).R, dir);
  cert.lambda = lam;
  cert.witness = witness;
  cert.feasible = cert.lambda > kFeasibilityTol;
  return cert;
}

std::vector<DirectionPair> ZGridSpec::points() const {
  if (n1 < 1 || n2 < 1) throw ConfigError("direction grid is empty");
  std::vector<DirectionPair> out;
  out.reserve(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2));
  for (double z1 : linspace(z1_lo, z1_hi, n1)) {
    if (z1 == 0.0) throw ConfigError("direction grid must exclude z1 = 0");
    for (double z2 : linspace(z2_lo, z2_hi, n2)) out.push_back({z1, z2});
  }
  return out;
}

std::pair<DirectionPair, SpectralCertificate> search_directions(
    const KernelModel& kernel, const PotentialModel& potential, const ZGridSpec& z_grid,
    const PositionDomain& domain, const GridSpec& xy_grid, int threads) {
  auto dirs = z_grid.points();
  bool have = false;
  DirectionPair best_dir;
  SpectralCertificate best;
  // scan order is (z1 asc, z2 asc); strictly-greater updates give the
  // smallest-(z1,z2) winner among exact ties
  for (const auto& dir : dirs) {
    SpectralCertificate cert = certify_lambda(kernel, potential, dir, domain, xy_grid, threads);
    if (!have || cert.lambda > best.lambda) {
      have = true;
      best = cert;
      best_dir = dir;
    }
  }
  return {best_dir, best};
}

// ---------------------------------------------------------------------------
// closed-form checkers
// ---------------------------------------------------------------------------

CheckResult check_case1_gershgorin(const DirectionPair& dir, const EigenBoundSpec& bounds) {
  CheckResult res;
  res.name = "case1_gershgorin";
  if (!bounds.wxx_range || !bounds.wxy_range) {
    res.applicable = false;
    res.note = "skipped: bounds not declared";
    return res;
  }
  const double z1 = dir.z1, z2 = dir.z2;
  const double z1sq = z1 * z1;
  const double c = 1.0 + z1 * z2 + z2 * z2;
  const double wxy_abs = bounds.wxy_range->max_abs();

  double coef = std::sqrt((z1sq * z2 * z2 + 0.5 * z1sq * z1sq +
                           std::sqrt(z1sq * z1sq * std::pow(z2, 4) +
                                     z1sq * z1sq * z1sq * z2 * z2)) /
                          2.0);
  double c1 = coef * wxy_abs;

  double c2 = std::numeric_limits<double>::infinity();
  for (double lt : {bounds.wxx_range->lo, bounds.wxx_range->hi}) {
    double off = std::abs(0.5 * (c - z1sq * lt));
    c2 = std::min(c2, z1 * z2 - off);
    c2 = std::min(c2, (1.0 + z2 * z2) - z1 * z2 * lt - off);
  }

  res.feasible = (c1 < c2) && (c2 > 0.0);
  res.values = {{"C1", c1}, {"C2", c2},
                {"witness_lo", c1}, {"witness_hi", c2}};
  if (res.feasible)
    res.note = "any lambda_Wxx in (C1, C2] certifies A - lambda I >= 0 with the B coupling";
  return res;
}

CheckResult check_case2_schur(double z2, double lambda_lo, double lambda_hi, double delta,
                              double z1) {
  CheckResult res;
  res.name = "case2_schur";
  const double golden = 0.5 * (1.0 + std::sqrt(5.0));

  double lhs1 = 2.0 * lambda_lo - lambda_hi * lambda_hi;
  double rhs1 = 1.0 - delta;
  double lhs2 = 2.0 * (z2 - z2 * z2) * lambda_lo + 2.0 * z2 + 2.0 * z2 * z2 * z2 -
                std::pow(z2, 4) - 3.0 * z2 * z2;
  bool z2_ok = (z2 > 0.0) && (z2 < golden);
  bool simple = z2_ok && (lhs1 > rhs1) && (lhs2 > delta);

  // general form for arbitrary z1
  double z1sq = z1 * z1;
  double general_lhs = -z1sq * z1sq * lambda_hi * lambda_hi +
                       2.0 * (1.0 + z1 * z2 - z2 * z2) * z1sq * lambda_lo + 2.0 * z1 * z2 +
                       2.0 * z1 * z2 * z2 * z2 - 1.0 - (z1sq + 2.0) * z2 * z2 - std::pow(z2, 4);
  bool general = (z1 * z2 > 0.0) && (1.0 + z1 * z2 - z2 * z2 > 0.0) && (general_lhs > 0.0);

  res.feasible = simple;
  res.values = {{"first_lhs", lhs1},
                {"first_rhs", rhs1},
                {"second_lhs", lhs2},
                {"second_rhs", delta},
                {"z2_upper", golden},
                {"general_lhs", general_lhs},
                {"general_feasible", general ? 1.0 : 0.0}};
  res.note = general ? "general z1-form feasible" : "general z1-form infeasible";
  return res;
}

std::pair<double, double> check_example2_interval(const DirectionPair& dir, double lambda_U) {
  const double z1 = dir.z1, z2 = dir.z2;
  double root = std::sqrt(z1 * z1 + z2 * z2);
  double z1cb = z1 * z1 * z1;
  return {-2.0 * lambda_U * (z2 + root) / z1cb, 2.0 * lambda_U * (root - z2) / z1cb};
}

double compute_lambda_U(const DirectionPair& dir, double lambda_lo, double lambda_hi,
                        int samples) {
  if (dir.z1 == 0.0) throw SingularMetricError("compute_lambda_U requires z1 != 0");
  const double z1 = dir.z1, z2 = dir.z2;
  const double c = 1.0 + z1 * z2 + z2 * z2;
  auto min_eig = [&](double t) {
    double a = z1 * z2;
    double bdiag = 1.0 + z2 * z2 - z1 * z2 * t;
    double off = 0.5 * (c - z1 * z1 * t);
    double tr = 0.5 * (a + bdiag);
    double gap = std::sqrt(0.25 * (a - bdiag) * (a - bdiag) + off * off);
    return tr - gap;
  };
  double best = std::numeric_limits<double>::infinity();
  for (double t : linspace(lambda_lo, lambda_hi, std::max(2, samples)))
    best = std::min(best, min_eig(t));
  return best;
}

CheckResult check_example2_schur_chain(const DirectionPair& dir, double lambda_U, double wxx_eig,
                                       double wxy_eig) {
  CheckResult res;
  res.name = "example2_schur_chain";
  const double z1 = dir.z1, z2 = dir.z2;
  const double lt = wxx_eig;     // eigenvalue of grad^2_xx W
  const double lw2 = wxy_eig * wxy_eig;
  const double z1p2 = z1 * z1, z1p3 = z1p2 * z1, z1p4 = z1p2 * z1p2, z1p5 = z1p4 * z1,
               z1p6 = z1p4 * z1p2;

  double alpha = lambda_U - z1 * z2 * lt;
  double d_i = lambda_U * alpha - 0.25 * z1p4 * lt * lt;
  double cond1 = 4.0 * lambda_U * d_i - z1p4 * lambda_U * lw2;
  double bracket = 4.0 * d_i * alpha -
                   (z1p4 * lw2 * alpha + 2.0 * z1p5 * z2 * lw2 * lt +
                    4.0 * lambda_U * z1p2 * z2 * z2 * lw2);
  double cross = 4.0 * d_i * z1p2 * lt + 4.0 * z1p3 * z2 * lw2 * lambda_U + z1p6 * lw2 * lt;
  double cond2 = 4.0 * cond1 * bracket - cross * cross;

  res.feasible = (d_i > 0.0) && (cond1 > 0.0) && (cond2 > 0.0);
  res.values = {{"D", d_i}, {"alpha", alpha}, {"cond1_lhs", cond1}, {"cond2_lhs", cond2}};
  return res;
}

CheckResult check_remark3(const DirectionPair& dir, double wdiff_eig) {
  CheckResult res;
  res.name = "remark3";
  const double z1 = dir.z1, z2 = dir.z2;
  double base = 0.5 * (z1 * z2 - 1.0 - z2 * z2);
  double bound1 = base;
  double bound2 = -base - 2.0 * z1 * z2 * wdiff_eig;
  double best = std::min(bound1, bound2);
  res.feasible = best > kFeasibilityTol;
  res.values = {{"bound1", bound1}, {"bound2", bound2}, {"lambda_upper", best}};
  res.note = "upper bound on any achievable lambda for U = 0, W(x,y) = W(x-y)";
  return res;
}

}  // namespace hypo
