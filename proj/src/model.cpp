#include "hypolab/model.hpp"

#include <cmath>

namespace hypo {

namespace {

Vec scalar_vec(double v) {
  Vec x(1);
  x[0] = v;
  return x;
}

Mat scalar_mat(double v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return m;
}

void require_finite(double v, const Vec& x, const char* what) {
  if (!std::isfinite(v)) {
    throw EvaluationError(std::string(what) + " returned non-finite value at x = " +
                          std::to_string(x.size() ? x[0] : 0.0));
  }
}

}  // namespace

KernelModel make_zero_kernel() {
  KernelModel k;
  k.name = "zero";
  k.eval = [](const Vec&, const Vec&) { return 0.0; };
  k.grad_x = [](const Vec& x, const Vec&) { return Vec(Vec::Zero(x.size())); };
  k.hess_xx = [](const Vec& x, const Vec&) { return Mat(Mat::Zero(x.size(), x.size())); };
  k.hess_xy = [](const Vec& x, const Vec&) { return Mat(Mat::Zero(x.size(), x.size())); };
  k.wxx_bounds = EigRange(0.0, 0.0);
  k.wxy_bounds = EigRange(0.0, 0.0);
  k.sup_abs = 0.0;
  k.is_zero = true;
  MeanForceReduction mf;
  mf.n_stats = 0;
  mf.accumulate = [](double, double*) {};
  mf.force = [](double, const double*) { return 0.0; };
  k.mean_force = mf;
  return k;
}

KernelModel make_difference_kernel(double alpha, double omega) {
  KernelModel k;
  k.name = "difference";
  k.eval = [=](const Vec& x, const Vec& y) { return alpha * std::cos(omega * (x[0] - y[0])); };
  k.grad_x = [=](const Vec& x, const Vec& y) {
    return scalar_vec(-alpha * omega * std::sin(omega * (x[0] - y[0])));
  };
  k.hess_xx = [=](const Vec& x, const Vec& y) {
    return scalar_mat(-alpha * omega * omega * std::cos(omega * (x[0] - y[0])));
  };
  k.hess_xy = [=](const Vec& x, const Vec& y) {
    return scalar_mat(alpha * omega * omega * std::cos(omega * (x[0] - y[0])));
  };
  double r = std::abs(alpha) * omega * omega;
  k.wxx_bounds = EigRange(-r, r);
  k.wxy_bounds = EigRange(-r, r);
  k.sup_abs = std::abs(alpha);
  // mean force: -alpha w sin(w(x-y)) averaged over y needs only <cos wy>, <sin wy>
  MeanForceReduction mf;
  mf.n_stats = 2;
  mf.accumulate = [=](double xj, double* s) {
    s[0] += std::cos(omega * xj);
    s[1] += std::sin(omega * xj);
  };
  mf.force = [=](double x, const double* s) {
    return -alpha * omega * (std::sin(omega * x) * s[0] - std::cos(omega * x) * s[1]);
  };
  k.mean_force = mf;
  return k;
}

KernelModel make_separable_kernel(double beta, const std::string& g) {
  const bool use_cos = (g == "cos");
  if (!use_cos && g != "sin") throw ConfigError("separable kernel g must be cos or sin");
  auto gf = [=](double t) { return use_cos ? std::cos(t) : std::sin(t); };
  auto gd = [=](double t) { return use_cos ? -std::sin(t) : std::cos(t); };
  auto gdd = [=](double t) { return use_cos ? -std::cos(t) : -std::sin(t); };
  KernelModel k;
  k.name = "separable_" + g;
  k.eval = [=](const Vec& x, const Vec& y) { return beta * gf(x[0]) * gf(y[0]); };
  k.grad_x = [=](const Vec& x, const Vec& y) { return scalar_vec(beta * gd(x[0]) * gf(y[0])); };
  k.hess_xx = [=](const Vec& x, const Vec& y) { return scalar_mat(beta * gdd(x[0]) * gf(y[0])); };
  k.hess_xy = [=](const Vec& x, const Vec& y) { return scalar_mat(beta * gd(x[0]) * gd(y[0])); };
  k.wxx_bounds = EigRange(-std::abs(beta), std::abs(beta));
  k.wxy_bounds = EigRange(-std::abs(beta), std::abs(beta));
  k.sup_abs = std::abs(beta);
  MeanForceReduction mf;
  mf.n_stats = 1;
  mf.accumulate = [=](double xj, double* s) { s[0] += gf(xj); };
  mf.force = [=](double x, const double* s) { return beta * gd(x) * s[0]; };
  k.mean_force = mf;
  return k;
}

PotentialModel make_zero_potential() {
  PotentialModel p;
  p.name = "zero";
  p.eval = [](const Vec&) { return 0.0; };
  p.grad = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  p.hess = [](const Vec& x) { return Mat(Mat::Zero(x.size(), x.size())); };
  p.hess_bounds = EigRange(0.0, 0.0);
  p.is_zero = true;
  return p;
}

PotentialModel make_cosine_potential(double kappa) {
  PotentialModel p;
  p.name = "cosine";
  p.eval = [=](const Vec& x) { return kappa * (1.0 - std::cos(x[0])); };
  p.grad = [=](const Vec& x) { return scalar_vec(kappa * std::sin(x[0])); };
  p.hess = [=](const Vec& x) { return scalar_mat(kappa * std::cos(x[0])); };
  p.hess_bounds = EigRange(std::min(-kappa, kappa), std::max(-kappa, kappa));
  return p;
}

PotentialModel make_quadratic_potential(double kappa) {
  PotentialModel p;
  p.name = "quadratic";
  p.eval = [=](const Vec& x) { return 0.5 * kappa * x[0] * x[0]; };
  p.grad = [=](const Vec& x) { return scalar_vec(kappa * x[0]); };
  p.hess = [=](const Vec&) { return scalar_mat(kappa); };
  p.hess_bounds = EigRange(kappa, kappa);
  return p;
}

double kernel_sup_abs(const KernelModel& kernel, const PositionDomain& domain, int n) {
  if (kernel.sup_abs) return *kernel.sup_abs;
  double sup = 0.0;
  const int d = domain.dimension;
  Vec x(d), y(d);
  // 1-d scan is enough for the builtin shapes; higher d falls back to the diagonal axes
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double xi = domain.lo() + (i + 0.5) * domain.width() / n;
      double yj = domain.lo() + (j + 0.5) * domain.width() / n;
      x.setConstant(xi);
      y.setConstant(yj);
      sup = std::max(sup, std::abs(kernel.eval(x, y)));
    }
  }
  return sup;
}

namespace {

// Deterministic low-discrepancy points in the sampling box (additive
// golden-ratio lattice), one pair (x, y) per sample.
std::vector<std::pair<Vec, Vec>> sample_points(const PositionDomain& domain, int samples) {
  const int d = domain.dimension;
  std::vector<std::pair<Vec, Vec>> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  const double phi = 0.6180339887498949;
  double t = 0.17;
  for (int s = 0; s < samples; ++s) {
    Vec x(d), y(d);
    for (int k = 0; k < d; ++k) {
      t += phi;
      t -= std::floor(t);
      x[k] = domain.lo() + t * domain.width();
      t += phi;
      t -= std::floor(t);
      y[k] = domain.lo() + t * domain.width();
    }
    pts.emplace_back(std::move(x), std::move(y));
  }
  return pts;
}

double rel_defect(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

ValidationReport validate_model(const KernelModel& kernel, const PotentialModel& potential,
                                const PositionDomain& domain, int samples) {
  if (samples < 1) throw ConfigError("validate_model requires samples >= 1");
  const int d = domain.dimension;
  const double h = kFdStep;
  ValidationReport rep;

  auto w = [&](const Vec& x, const Vec& y) {
    double v = kernel.eval(x, y);
    require_finite(v, x, "kernel eval");
    return v;
  };
  auto u = [&](const Vec& x) {
    double v = potential.eval(x);
    require_finite(v, x, "potential eval");
    return v;
  };

  for (const auto& [x, y] : sample_points(domain, samples)) {
    rep.kernel_symmetry = std::max(rep.kernel_symmetry, std::abs(w(x, y) - w(y, x)));

    Vec g = kernel.grad_x(x, y);
    Mat hxx = kernel.hess_xx(x, y);
    Mat hxy = kernel.hess_xy(x, y);
    Vec gp = potential.grad(x);
    Mat hp = potential.hess(x);
    if (!g.allFinite() || !hxx.allFinite() || !hxy.allFinite() || !gp.allFinite() ||
        !hp.allFinite()) {
      throw EvaluationError("non-finite derivative at sample x = " + std::to_string(x[0]));
    }
    rep.kernel_hess_asym = std::max(rep.kernel_hess_asym, (hxx - hxx.transpose()).cwiseAbs().maxCoeff());

    for (int i = 0; i < d; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      double fd_g = (w(xp, y) - w(xm, y)) / (2.0 * h);
      rep.kernel_grad_err = std::max(rep.kernel_grad_err, rel_defect(fd_g, g[i]));
      double fd_gu = (u(xp) - u(xm)) / (2.0 * h);
      rep.potential_grad_err = std::max(rep.potential_grad_err, rel_defect(fd_gu, gp[i]));

      double fd_hd = (w(xp, y) - 2.0 * w(x, y) + w(xm, y)) / (h * h);
      rep.kernel_hess_xx_err = std::max(rep.kernel_hess_xx_err, rel_defect(fd_hd, hxx(i, i)));
      double fd_hu = (u(xp) - 2.0 * u(x) + u(xm)) / (h * h);
      rep.potential_hess_err = std::max(rep.potential_hess_err, rel_defect(fd_hu, hp(i, i)));

      // symmetry of the kernel forces d^2/dy_i^2 W(x, .)|_y = hess_xx(y, x)(i,i)
      Vec yp = y, ym = y;
      yp[i] += h;
      ym[i] -= h;
      double fd_yy = (w(x, yp) - 2.0 * w(x, y) + w(x, ym)) / (h * h);
      rep.kernel_swap_err =
          std::max(rep.kernel_swap_err, rel_defect(fd_yy, kernel.hess_xx(y, x)(i, i)));

      for (int j = 0; j < d; ++j) {
        Vec ypp = y, ymm = y;
        ypp[j] += h;
        ymm[j] -= h;
        double fd_xy = (w(xp, ypp) - w(xp, ymm) - w(xm, ypp) + w(xm, ymm)) / (4.0 * h * h);
        rep.kernel_hess_xy_err = std::max(rep.kernel_hess_xy_err, rel_defect(fd_xy, hxy(i, j)));
        if (j != i) {
          Vec xpp = x, xpm = x, xmp = x, xmm2 = x;
          xpp[i] += h;
          xpp[j] += h;
          xpm[i] += h;
          xpm[j] -= h;
          xmp[i] -= h;
          xmp[j] += h;
          xmm2[i] -= h;
          xmm2[j] -= h;
          double fd_ho = (w(xpp, y) - w(xpm, y) - w(xmp, y) + w(xmm2, y)) / (4.0 * h * h);
          rep.kernel_hess_xx_err = std::max(rep.kernel_hess_xx_err, rel_defect(fd_ho, hxx(i, j)));
          double fd_hou =
              (u(xpp) - u(xpm) - u(xmp) + u(xmm2)) / (4.0 * h * h);
          rep.potential_hess_err = std::max(rep.potential_hess_err, rel_defect(fd_hou, hp(i, j)));
        }
      }
    }
  }

  double worst = std::max({rep.kernel_grad_err, rep.kernel_hess_xx_err, rep.kernel_hess_xy_err,
                           rep.kernel_swap_err, rep.kernel_symmetry, rep.kernel_hess_asym,
                           rep.potential_grad_err, rep.potential_hess_err});
  rep.passed = worst <= kFdTolerance;
  return rep;
}

}  // namespace hypo
