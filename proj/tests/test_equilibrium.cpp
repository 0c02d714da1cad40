#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "hypolab/equilibrium.hpp"
#include "oracles.hpp"

using namespace hypo;

namespace {

PhaseGrid torus_grid(int nx = 48, int nv = 48) {
  return PhaseGrid::make(PositionDomain::torus(), nx, nv, 6.0);
}

DensityField perturbed(const Equilibrium& eq, double eps, int mode, double vtilt = 0.0) {
  DensityField f = eq.f_inf;
  const PhaseGrid& g = f.grid;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nv; ++j) {
      double phase = mode * (g.xs[static_cast<std::size_t>(i)] - g.domain.lo()) * kTwoPi /
                     g.domain.width();
      f.values(i, j) *= 1.0 + eps * std::cos(phase) + vtilt * std::tanh(g.vs[static_cast<std::size_t>(j)]);
    }
  f.normalize();
  return f;
}

}  // namespace

TEST_CASE("fixed point: free model relaxes to the uniform marginal in one iteration") {
  auto eq = fixed_point(make_zero_kernel(), make_zero_potential(), torus_grid(), 1e-12, 100, 1.0);
  CHECK(eq.iterations == 1);
  CHECK(eq.residual <= 1e-15);
  for (double r : eq.rho_inf) CHECK(r == doctest::Approx(1.0 / kTwoPi).epsilon(1e-12));
  // v profile is the shared Gaussian: f e^{v^2/2} constant in v
  const auto& g = eq.f_inf.grid;
  double ref = eq.f_inf.values(0, 0) * std::exp(0.5 * g.vs[0] * g.vs[0]);
  for (int j = 1; j < g.nv; ++j)
    CHECK(eq.f_inf.values(0, j) * std::exp(0.5 * g.vs[static_cast<std::size_t>(j)] *
                                           g.vs[static_cast<std::size_t>(j)]) ==
          doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("fixed point: W = 0 gives the plain Gibbs marginal immediately") {
  auto potential = make_cosine_potential(0.9);
  auto eq = fixed_point(make_zero_kernel(), potential, torus_grid(), 1e-12, 100, 1.0);
  CHECK(eq.iterations == 1);
  CHECK(eq.residual <= 1e-14);
  const auto& g = eq.f_inf.grid;
  Vec x(1);
  double z = 0.0;
  std::vector<double> expect(static_cast<std::size_t>(g.nx));
  for (int i = 0; i < g.nx; ++i) {
    x[0] = g.xs[static_cast<std::size_t>(i)];
    expect[static_cast<std::size_t>(i)] = std::exp(-potential.eval(x));
    z += expect[static_cast<std::size_t>(i)] * g.hx;
  }
  for (int i = 0; i < g.nx; ++i)
    CHECK(eq.rho_inf[static_cast<std::size_t>(i)] ==
          doctest::Approx(expect[static_cast<std::size_t>(i)] / z).epsilon(1e-12));
}

TEST_CASE("fixed point: interacting kernel matches the undamped Picard oracle") {
  auto kernel = make_difference_kernel(0.2, 1.0);
  auto potential = make_cosine_potential(0.5);
  auto grid = torus_grid();
  auto eq = fixed_point(kernel, potential, grid, 1e-12, 10000, 0.5);
  CHECK(eq.residual <= 1e-10);
  auto ref = oracle::picard_rho(kernel, potential, grid, 1e-13, 500);
  for (int i = 0; i < grid.nx; ++i)
    CHECK(std::abs(eq.rho_inf[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)]) <=
          1e-9);
}

TEST_CASE("fixed point: residual decreases monotonically for C_W <= 0.5") {
  auto kernel = make_difference_kernel(0.5, 1.0);
  auto potential = make_cosine_potential(0.5);
  auto grid = torus_grid(32, 32);
  // re-run with increasing iteration caps to observe the residual sequence
  double prev = std::numeric_limits<double>::infinity();
  for (int iters = 2; iters <= 14; iters += 3) {
    Equilibrium eq;
    try {
      eq = fixed_point(kernel, potential, grid, 1e-15, iters, 0.5);
    } catch (const ConvergenceError& err) {
      CHECK(err.last_residual <= prev * (1.0 + 1e-12));
      prev = err.last_residual;
      continue;
    }
    break;
  }
}

TEST_CASE("fixed point: iteration cap raises ConvergenceError carrying the residual") {
  auto kernel = make_difference_kernel(0.2, 1.0);
  auto potential = make_cosine_potential(0.5);
  try {
    fixed_point(kernel, potential, torus_grid(32, 32), 1e-14, 3, 0.5);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& err) {
    CHECK(err.last_residual > 1e-14);
    CHECK(err.last_residual < 1.0);
  }
}

TEST_CASE("free energy of the free uniform-Gaussian state is -(3/2) log 2 pi") {
  auto grid = torus_grid(64, 64);
  DensityField f = DensityField::zero(grid);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.nv; ++j)
      f.values(i, j) = std::exp(-0.5 * grid.vs[static_cast<std::size_t>(j)] *
                                grid.vs[static_cast<std::size_t>(j)]);
  f.normalize();
  double e = free_energy(f, make_zero_kernel(), make_zero_potential());
  CHECK(e == doctest::Approx(-1.5 * std::log(kTwoPi)).epsilon(1e-4 / 3.0));
}

TEST_CASE("free energy: doubling W doubles the interaction term only") {
  auto grid = torus_grid(32, 32);
  auto eq = fixed_point(make_zero_kernel(), make_cosine_potential(0.4), grid, 1e-12, 50, 1.0);
  DensityField f = perturbed(eq, 0.3, 1);
  auto k1 = make_difference_kernel(0.2, 1.0);
  auto k2 = make_difference_kernel(0.4, 1.0);
  auto zero = make_zero_kernel();
  auto u = make_cosine_potential(0.4);
  double e0 = free_energy(f, zero, u);
  double e1 = free_energy(f, k1, u);
  double e2 = free_energy(f, k2, u);
  CHECK(e2 - e0 == doctest::Approx(2.0 * (e1 - e0)).epsilon(1e-12));
}

TEST_CASE("free energy rejects negative densities") {
  auto grid = torus_grid(16, 16);
  DensityField f = DensityField::zero(grid);
  f.values.setConstant(1.0);
  f.normalize();
  f.values(3, 3) = -0.1;
  CHECK_THROWS_AS(free_energy(f, make_zero_kernel(), make_zero_potential()), EvaluationError);
}

TEST_CASE("variation is constant at equilibrium and non-constant off it") {
  auto kernel = make_difference_kernel(0.2, 1.0);
  auto potential = make_cosine_potential(0.5);
  auto eq = fixed_point(kernel, potential, torus_grid(), 1e-12, 10000, 0.5);
  auto xi = variation(eq.f_inf, kernel, potential);
  CHECK(xi.maxCoeff() - xi.minCoeff() <= 1e-6);

  DensityField f = perturbed(eq, 0.1, 1);
  auto xi2 = variation(f, kernel, potential);
  CHECK(xi2.maxCoeff() - xi2.minCoeff() > 0.01);
}

TEST_CASE("variation: W = 0 reduces to log f + 1 + v^2/2 + U") {
  auto grid = torus_grid(16, 16);
  auto potential = make_cosine_potential(0.3);
  DensityField f = DensityField::zero(grid);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.nv; ++j)
      f.values(i, j) = std::exp(-0.4 * grid.vs[static_cast<std::size_t>(j)] *
                                    grid.vs[static_cast<std::size_t>(j)] -
                                0.2 * std::cos(grid.xs[static_cast<std::size_t>(i)]));
  f.normalize();
  auto xi = variation(f, make_zero_kernel(), potential);
  Vec x(1);
  for (int i = 0; i < grid.nx; i += 5)
    for (int j = 0; j < grid.nv; j += 7) {
      x[0] = grid.xs[static_cast<std::size_t>(i)];
      double expect = std::log(f.values(i, j)) + 1.0 +
                      0.5 * grid.vs[static_cast<std::size_t>(j)] *
                          grid.vs[static_cast<std::size_t>(j)] +
                      potential.eval(x);
      CHECK(xi(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("fisher functionals vanish at equilibrium") {
  auto kernel = make_difference_kernel(0.2, 1.0);
  auto potential = make_cosine_potential(0.5);
  auto eq = fixed_point(kernel, potential, torus_grid(), 1e-12, 10000, 0.5);
  CHECK(fisher_a(eq.f_inf, kernel, potential) <= 1e-8);
  CHECK(fisher_z(eq.f_inf, kernel, potential, DirectionPair{1.0, 0.3}) <= 1e-8);
}

TEST_CASE("fisher_z vanishes identically for the zero direction") {
  auto grid = torus_grid(24, 24);
  auto eq = fixed_point(make_zero_kernel(), make_cosine_potential(0.4), grid, 1e-12, 50, 1.0);
  DensityField f = perturbed(eq, 0.3, 2);
  CHECK(fisher_z(f, make_zero_kernel(), make_cosine_potential(0.4), DirectionPair{0.0, 0.0}) ==
        0.0);
}

TEST_CASE("fisher_a of a mean-shifted Maxwellian is the squared mean") {
  auto grid = torus_grid(32, 96);
  DensityField f = DensityField::zero(grid);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.nv; ++j) {
      double dv = grid.vs[static_cast<std::size_t>(j)] - 0.5;
      f.values(i, j) = std::exp(-0.5 * dv * dv);
    }
  f.normalize();
  // grad_v xi = v0 = 0.5 exactly, so DE_a = 0.25
  CHECK(fisher_a(f, make_zero_kernel(), make_zero_potential()) ==
        doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("fisher functionals are nonnegative and separate equilibrium") {
  auto kernel = make_difference_kernel(0.2, 1.0);
  auto potential = make_cosine_potential(0.5);
  auto eq = fixed_point(kernel, potential, torus_grid(), 1e-12, 10000, 0.5);
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> amp(0.05, 0.4);
  for (int trial = 0; trial < 10; ++trial) {
    DensityField f = perturbed(eq, amp(rng), 1 + trial % 3, 0.02 * amp(rng));
    double da = fisher_a(f, kernel, potential);
    double dz = fisher_z(f, kernel, potential, DirectionPair{1.0, 0.3});
    CHECK(da >= 0.0);
    CHECK(dz >= 0.0);
    if (l1_distance(f, eq.f_inf) > 1e-3) CHECK(da + dz > 1e-8);
  }
}

TEST_CASE("energy gap identity: trivial and W = 0 cases") {
  auto kernel = make_zero_kernel();
  auto potential = make_cosine_potential(0.5);
  auto eq = fixed_point(kernel, potential, torus_grid(), 1e-12, 100, 1.0);
  auto rep0 = energy_gap_identity(eq.f_inf, eq, kernel, potential);
  CHECK(std::abs(rep0.direct_gap) <= 1e-12);
  CHECK(std::abs(rep0.kl_term) <= 1e-12);
  CHECK(std::abs(rep0.quad_term) <= 1e-12);

  DensityField f = perturbed(eq, 0.25, 1);
  auto rep = energy_gap_identity(f, eq, kernel, potential);
  CHECK(rep.quad_term == 0.0);
  CHECK(rep.direct_gap == doctest::Approx(rep.kl_term).epsilon(1e-10));
}

TEST_CASE("energy gap identity: interacting kernel closes to 1e-8 relative") {
  auto kernel = make_difference_kernel(0.2, 1.0);
  auto potential = make_cosine_potential(0.5);
  auto eq = fixed_point(kernel, potential, torus_grid(), 1e-13, 20000, 0.5);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> amp(0.02, 0.5);
  for (int trial = 0; trial < 25; ++trial) {
    DensityField f = perturbed(eq, amp(rng), 1 + trial % 4, 0.05 * amp(rng));
    auto rep = energy_gap_identity(f, eq, kernel, potential);
    CHECK(std::abs(rep.defect) <= 1e-8 * std::max(std::abs(rep.direct_gap), 1e-12));
  }
}

TEST_CASE("ckp: classical Pinsker for W = 0 and near-critical C_W") {
  auto kernel = make_zero_kernel();
  auto potential = make_cosine_potential(0.5);
  auto eq = fixed_point(kernel, potential, torus_grid(), 1e-12, 100, 1.0);
  DensityField f = perturbed(eq, 0.3, 1);
  auto rep = ckp_check(f, eq, kernel, potential, 0.0);
  CHECK(rep.applicable);
  CHECK(rep.holds);
  double kl = kl_divergence(f, eq.f_inf);
  CHECK(kl >= 0.5 * rep.l1 * rep.l1 - 1e-12);

  auto strong = make_difference_kernel(0.99, 1.0);
  auto eq2 = fixed_point(strong, potential, torus_grid(), 1e-11, 50000, 0.5);
  DensityField f2 = perturbed(eq2, 0.05, 1);
  auto rep2 = ckp_check(f2, eq2, strong, potential, 0.99);
  CHECK(rep2.applicable);
  CHECK(rep2.holds);
  CHECK(rep2.lower_bound < 1e-3);
}

TEST_CASE("ckp is inapplicable (not an exception) for C_W >= 1") {
  auto kernel = make_zero_kernel();
  auto potential = make_cosine_potential(0.5);
  auto eq = fixed_point(kernel, potential, torus_grid(16, 16), 1e-12, 100, 1.0);
  auto rep = ckp_check(eq.f_inf, eq, kernel, potential, 1.0);
  CHECK_FALSE(rep.applicable);
  CHECK_FALSE(rep.holds);
}

TEST_CASE("gauge invariance: U + c shifts E by c and nothing else") {
  auto kernel = make_difference_kernel(0.2, 1.0);
  auto base = make_cosine_potential(0.5);
  const double c = 1.7;
  PotentialModel shifted = base;
  shifted.eval = [base, c](const Vec& x) { return base.eval(x) + c; };
  auto grid = torus_grid(32, 32);
  auto eq1 = fixed_point(kernel, base, grid, 1e-12, 20000, 0.5);
  auto eq2 = fixed_point(kernel, shifted, grid, 1e-12, 20000, 0.5);
  for (int i = 0; i < grid.nx; ++i)
    CHECK(eq1.rho_inf[static_cast<std::size_t>(i)] ==
          doctest::Approx(eq2.rho_inf[static_cast<std::size_t>(i)]).epsilon(1e-10));
  DensityField f = perturbed(eq1, 0.2, 1);
  CHECK(free_energy(f, kernel, shifted) - free_energy(f, kernel, base) ==
        doctest::Approx(c).epsilon(1e-12));
  CHECK(fisher_a(f, kernel, shifted) == doctest::Approx(fisher_a(f, kernel, base)).epsilon(1e-10));
  CHECK(fisher_z(f, kernel, shifted, DirectionPair{1.0, 0.3}) ==
        doctest::Approx(fisher_z(f, kernel, base, DirectionPair{1.0, 0.3})).epsilon(1e-10));
}

TEST_CASE("quadrature refinement: E(f_inf) changes at second order") {
  auto kernel = make_difference_kernel(0.2, 1.0);
  auto potential = make_cosine_potential(0.5);
  double e_coarse = 0.0, e_mid = 0.0, e_fine = 0.0;
  for (int scale : {1, 2, 4}) {
    auto grid = torus_grid(24 * scale, 24 * scale);
    auto eq = fixed_point(kernel, potential, grid, 1e-12, 20000, 0.5);
    double e = free_energy(eq.f_inf, kernel, potential);
    if (scale == 1) e_coarse = e;
    if (scale == 2) e_mid = e;
    if (scale == 4) e_fine = e;
  }
  double change1 = std::abs(e_mid - e_coarse);
  double change2 = std::abs(e_fine - e_mid);
  CHECK(change2 <= 4.0 * change1 + 1e-12);
}

TEST_CASE("density field CSV round trip") {
  auto grid = torus_grid(12, 16);
  auto eq = fixed_point(make_zero_kernel(), make_cosine_potential(0.4), grid, 1e-12, 50, 1.0);
  std::string path = "density_roundtrip_test.csv";
  write_density_csv(eq.f_inf, path);
  auto back = read_density_csv(path, grid.domain);
  CHECK(back.grid.nx == grid.nx);
  CHECK(back.grid.nv == grid.nv);
  CHECK((back.values - eq.f_inf.values).abs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}
