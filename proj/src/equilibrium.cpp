#include "hypolab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypo {

namespace {

Vec point1(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

std::vector<double> potential_on_grid(const PotentialModel& potential, const PhaseGrid& grid) {
  std::vector<double> u(static_cast<std::size_t>(grid.nx));
  for (int i = 0; i < grid.nx; ++i) {
    u[static_cast<std::size_t>(i)] = potential.eval(point1(grid.xs[static_cast<std::size_t>(i)]));
    if (!std::isfinite(u[static_cast<std::size_t>(i)]))
      throw EvaluationError("potential non-finite at x = " +
                            std::to_string(grid.xs[static_cast<std::size_t>(i)]));
  }
  return u;
}

// normalized exp(-c) on the x grid
std::vector<double> gibbs_from_energy(const std::vector<double>& c, double hx) {
  double m = *std::min_element(c.begin(), c.end());
  std::vector<double> g(c.size());
  double z = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    g[i] = std::exp(-(c[i] - m));
    z += g[i];
  }
  z *= hx;
  for (auto& v : g) v /= z;
  return g;
}

}  // namespace

std::vector<double> kernel_convolve(const KernelModel& kernel, const PhaseGrid& grid,
                                    const std::vector<double>& rho) {
  std::vector<double> out(static_cast<std::size_t>(grid.nx), 0.0);
  if (kernel.is_zero) return out;
  for (int i = 0; i < grid.nx; ++i) {
    double s = 0.0;
    for (int j = 0; j < grid.nx; ++j)
      s += kernel.eval(point1(grid.xs[static_cast<std::size_t>(i)]),
                       point1(grid.xs[static_cast<std::size_t>(j)])) *
           rho[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s * grid.hx;
  }
  return out;
}

Equilibrium fixed_point(const KernelModel& kernel, const PotentialModel& potential,
                        const PhaseGrid& grid, double tol, int max_iter, double theta) {
  if (tol <= 0.0) throw ConfigError("fixed_point requires tol > 0");
  if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("damping theta must be in (0, 1]");
  auto u = potential_on_grid(potential, grid);

  auto apply_T = [&](const std::vector<double>& rho) {
    auto conv = kernel_convolve(kernel, grid, rho);
    std::vector<double> c(static_cast<std::size_t>(grid.nx));
    for (int i = 0; i < grid.nx; ++i)
      c[static_cast<std::size_t>(i)] =
          u[static_cast<std::size_t>(i)] + conv[static_cast<std::size_t>(i)];
    return gibbs_from_energy(c, grid.hx);
  };

  std::vector<double> rho(static_cast<std::size_t>(grid.nx), 1.0 / grid.domain.width());
  auto t_rho = apply_T(rho);
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  for (int k = 1; k <= max_iter; ++k) {
    for (std::size_t i = 0; i < rho.size(); ++i)
      rho[i] = theta * t_rho[i] + (1.0 - theta) * rho[i];
    t_rho = apply_T(rho);
    residual = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
      residual = std::max(residual, std::abs(t_rho[i] - rho[i]));
    iterations = k;
    if (residual <= tol) break;
  }
  if (residual > tol)
    throw ConvergenceError("fixed point did not reach tol after " + std::to_string(max_iter) +
                               " iterations (residual " + std::to_string(residual) + ")",
                           residual);

  Equilibrium eq;
  eq.rho_inf = rho;
  eq.iterations = iterations;
  eq.residual = residual;

  // assemble f_inf = rho_inf(x) * normalized Gaussian(v)
  eq.f_inf = DensityField::zero(grid);
  std::vector<double> gv(static_cast<std::size_t>(grid.nv));
  double zv = 0.0;
  for (int j = 0; j < grid.nv; ++j) {
    gv[static_cast<std::size_t>(j)] =
        std::exp(-0.5 * grid.vs[static_cast<std::size_t>(j)] * grid.vs[static_cast<std::size_t>(j)]);
    zv += gv[static_cast<std::size_t>(j)] * grid.wv[static_cast<std::size_t>(j)];
  }
  for (auto& v : gv) v /= zv;
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.nv; ++j)
      eq.f_inf.values(i, j) = rho[static_cast<std::size_t>(i)] * gv[static_cast<std::size_t>(j)];
  eq.f_inf.normalize();

  // normalization constant of the unnormalized Gibbs form
  auto conv = kernel_convolve(kernel, grid, rho);
  double z = 0.0;
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.nv; ++j)
      z += std::exp(-0.5 * grid.vs[static_cast<std::size_t>(j)] * grid.vs[static_cast<std::size_t>(j)] -
                    conv[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(i)]) *
           grid.wv[static_cast<std::size_t>(j)] * grid.hx;
  eq.Z = z;
  return eq;
}

double free_energy(const DensityField& f, const KernelModel& kernel,
                   const PotentialModel& potential) {
  const PhaseGrid& g = f.grid;
  if (f.values.minCoeff() < 0.0)
    throw EvaluationError("free_energy: density has negative entries");
  double entropy = 0.0, kinetic = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nv; ++j) {
      double v = f.values(i, j);
      double w = g.wv[static_cast<std::size_t>(j)] * g.hx;
      if (v > 0.0) entropy += v * std::log(v) * w;
      kinetic += 0.5 * g.vs[static_cast<std::size_t>(j)] * g.vs[static_cast<std::size_t>(j)] * v * w;
    }
  auto rho = f.x_marginal();
  auto u = potential_on_grid(potential, g);
  double confinement = 0.0;
  for (int i = 0; i < g.nx; ++i)
    confinement += u[static_cast<std::size_t>(i)] * rho[static_cast<std::size_t>(i)] * g.hx;
  double interaction = 0.0;
  if (!kernel.is_zero) {
    auto conv = kernel_convolve(kernel, g, rho);
    for (int i = 0; i < g.nx; ++i)
      interaction += conv[static_cast<std::size_t>(i)] * rho[static_cast<std::size_t>(i)] * g.hx;
    interaction *= 0.5;
  }
  return entropy + kinetic + interaction + confinement;
}

Eigen::ArrayXXd variation(const DensityField& f, const KernelModel& kernel,
                          const PotentialModel& potential) {
  const PhaseGrid& g = f.grid;
  auto rho = f.x_marginal();
  auto conv = kernel_convolve(kernel, g, rho);
  auto u = potential_on_grid(potential, g);
  Eigen::ArrayXXd xi(g.nx, g.nv);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nv; ++j) {
      double fv = std::max(f.values(i, j), kDensityFloor);
      xi(i, j) = std::log(fv) + 1.0 +
                 0.5 * g.vs[static_cast<std::size_t>(j)] * g.vs[static_cast<std::size_t>(j)] +
                 conv[static_cast<std::size_t>(i)] + u[static_cast<std::size_t>(i)];
    }
  return xi;
}

namespace {

// centered in the interior, one-sided at the v boundary
inline double dv_stencil(const Eigen::ArrayXXd& xi, int i, int j, int nv, double hv) {
  if (j == 0) return (xi(i, 1) - xi(i, 0)) / hv;
  if (j == nv - 1) return (xi(i, nv - 1) - xi(i, nv - 2)) / hv;
  return (xi(i, j + 1) - xi(i, j - 1)) / (2.0 * hv);
}

// centered with periodic wrap in x
inline double dx_stencil(const Eigen::ArrayXXd& xi, int i, int j, int nx, double hx) {
  int ip = (i + 1) % nx;
  int im = (i + nx - 1) % nx;
  return (xi(ip, j) - xi(im, j)) / (2.0 * hx);
}

}  // namespace

double fisher_a(const DensityField& f, const KernelModel& kernel,
                const PotentialModel& potential) {
  const PhaseGrid& g = f.grid;
  Eigen::ArrayXXd xi = variation(f, kernel, potential);
  double s = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nv; ++j) {
      double dv = dv_stencil(xi, i, j, g.nv, g.hv);
      s += dv * dv * f.values(i, j) * g.wv[static_cast<std::size_t>(j)] * g.hx;
    }
  return s;
}

double fisher_z(const DensityField& f, const KernelModel& kernel,
                const PotentialModel& potential, const DirectionPair& dir) {
  if (dir.z1 == 0.0 && dir.z2 == 0.0) return 0.0;
  const PhaseGrid& g = f.grid;
  Eigen::ArrayXXd xi = variation(f, kernel, potential);
  double s = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nv; ++j) {
      double dz = dir.z1 * dx_stencil(xi, i, j, g.nx, g.hx) +
                  dir.z2 * dv_stencil(xi, i, j, g.nv, g.hv);
      s += dz * dz * f.values(i, j) * g.wv[static_cast<std::size_t>(j)] * g.hx;
    }
  return s;
}

double kl_divergence(const DensityField& f, const DensityField& g) {
  if (!f.grid.compatible(g.grid)) throw ConfigError("kl_divergence needs matching grids");
  double s = 0.0;
  for (int i = 0; i < f.grid.nx; ++i)
    for (int j = 0; j < f.grid.nv; ++j) {
      double a = f.values(i, j);
      if (a <= 0.0) continue;
      double b = std::max(g.values(i, j), kDensityFloor);
      s += a * std::log(a / b) * f.grid.wv[static_cast<std::size_t>(j)] * f.grid.hx;
    }
  return s;
}

GapReport energy_gap_identity(const DensityField& f, const Equilibrium& eq,
                              const KernelModel& kernel, const PotentialModel& potential) {
  GapReport rep;
  rep.direct_gap = free_energy(f, kernel, potential) - free_energy(eq.f_inf, kernel, potential);
  rep.kl_term = kl_divergence(f, eq.f_inf);
  rep.quad_term = 0.0;
  if (!kernel.is_zero) {
    const PhaseGrid& g = f.grid;
    auto rho_f = f.x_marginal();
    std::vector<double> diff(static_cast<std::size_t>(g.nx));
    for (int i = 0; i < g.nx; ++i)
      diff[static_cast<std::size_t>(i)] =
          rho_f[static_cast<std::size_t>(i)] - eq.rho_inf[static_cast<std::size_t>(i)];
    auto conv = kernel_convolve(kernel, g, diff);
    for (int i = 0; i < g.nx; ++i)
      rep.quad_term += conv[static_cast<std::size_t>(i)] * diff[static_cast<std::size_t>(i)] * g.hx;
    rep.quad_term *= 0.5;
  }
  rep.defect = rep.direct_gap - rep.kl_term - rep.quad_term;
  return rep;
}

CkpReport ckp_check(const DensityField& f, const Equilibrium& eq, const KernelModel& kernel,
                    const PotentialModel& potential, double c_w) {
  CkpReport rep;
  rep.gap = free_energy(f, kernel, potential) - free_energy(eq.f_inf, kernel, potential);
  rep.l1 = l1_distance(f, eq.f_inf);
  rep.applicable = c_w < 1.0;
  rep.lower_bound = rep.applicable ? 0.5 * (1.0 - c_w) * rep.l1 * rep.l1 : 0.0;
  rep.holds = rep.applicable && (rep.gap >= rep.lower_bound - 1e-9);
  return rep;
}

}  // namespace hypo
