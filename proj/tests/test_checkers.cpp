#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hypolab/infomatrix.hpp"
#include "oracles.hpp"

using namespace hypo;

namespace {
Vec pt(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}
}  // namespace

TEST_CASE("case 1 Gershgorin: zero cross Hessian, V eigenvalues at 0.9") {
  DirectionPair dir{1.0, 0.3};
  EigenBoundSpec bounds;
  bounds.wxx_range = EigRange(0.9, 0.9);  // eigenvalues of grad^2_xx V here
  bounds.wxy_range = EigRange(0.0, 0.0);
  auto res = check_case1_gershgorin(dir, bounds);
  CHECK(res.value("C1") == doctest::Approx(0.0));
  // C2 = min{0.3 - 0.245, 1.09 - 0.27 - 0.245} = 0.055
  CHECK(res.value("C2") == doctest::Approx(0.055));
  CHECK(res.feasible);
}

TEST_CASE("case 1 Gershgorin: C1 scales linearly and kills feasibility") {
  DirectionPair dir{1.0, 0.3};
  EigenBoundSpec bounds;
  bounds.wxx_range = EigRange(0.9, 0.9);
  bounds.wxy_range = EigRange(-10.0, 10.0);
  auto res = check_case1_gershgorin(dir, bounds);
  CHECK(res.value("C1") > res.value("C2"));
  CHECK_FALSE(res.feasible);

  EigenBoundSpec small = bounds;
  small.wxy_range = EigRange(-1.0, 1.0);
  auto res1 = check_case1_gershgorin(dir, small);
  CHECK(res.value("C1") == doctest::Approx(10.0 * res1.value("C1")));
}

TEST_CASE("case 1 Gershgorin: z2 = 0 is always infeasible") {
  EigenBoundSpec bounds;
  bounds.wxx_range = EigRange(0.5, 1.5);
  bounds.wxy_range = EigRange(0.0, 0.0);
  auto res = check_case1_gershgorin(DirectionPair{1.0, 0.0}, bounds);
  CHECK(res.value("C2") <= 0.0);
  CHECK_FALSE(res.feasible);
}

TEST_CASE("case 1 Gershgorin skips without declared bounds") {
  auto res = check_case1_gershgorin(DirectionPair{1.0, 0.3}, EigenBoundSpec{});
  CHECK_FALSE(res.applicable);
}

TEST_CASE("case 2 Schur: paper parameters") {
  // lambda = 0.99: 0.42*0.99 + 0.3759 = 0.7917 > 0.02 and 1.98 - 0.9801 > 0.98
  auto res = check_case2_schur(0.3, 0.99, 0.99, 0.02);
  CHECK(res.feasible);
  CHECK(res.value("first_lhs") == doctest::Approx(0.9999));
  CHECK(res.value("first_rhs") == doctest::Approx(0.98));
  CHECK(res.value("second_lhs") == doctest::Approx(0.42 * 0.99 + 0.3759));
  CHECK(res.value("general_feasible") == doctest::Approx(1.0));

  // lambda = 0.9: 1.8 - 0.81 = 0.99 > 0.98
  auto res9 = check_case2_schur(0.3, 0.9, 0.9, 0.02);
  CHECK(res9.feasible);
  CHECK(res9.value("first_lhs") == doctest::Approx(0.99));
}

TEST_CASE("case 2 Schur: z2 outside (0, (1+sqrt 5)/2) is infeasible") {
  CHECK_FALSE(check_case2_schur(0.0, 0.99, 0.99, 0.02).feasible);
  CHECK_FALSE(check_case2_schur(1.7, 0.99, 0.99, 0.02).feasible);
}

TEST_CASE("case 2 Schur: the delta-split pair implies the general z1 = 1 form") {
  std::mt19937 rng(5150);
  std::uniform_real_distribution<double> lam(0.05, 1.4);
  std::uniform_real_distribution<double> z2d(0.05, 1.6);
  std::uniform_real_distribution<double> dd(0.001, 0.5);
  for (int trial = 0; trial < 500; ++trial) {
    double lo = lam(rng);
    double hi = lo + 0.2 * lam(rng);
    auto res = check_case2_schur(z2d(rng), lo, hi, dd(rng));
    if (res.feasible) CHECK(res.value("general_feasible") == doctest::Approx(1.0));
  }
}

TEST_CASE("case 2 feasibility implies a positive numeric certificate") {
  // constant-Hessian model: quadratic U with hess = t on a line box, W = 0
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> td(0.3, 1.3);
  std::uniform_real_distribution<double> z2d(0.1, 1.2);
  int feasible_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    double t = td(rng);
    double z2 = z2d(rng);
    auto res = check_case2_schur(z2, t, t, 0.02);
    if (!res.feasible) continue;
    ++feasible_seen;
    double lam = lambda_at(make_zero_kernel(), make_quadratic_potential(t),
                           DirectionPair{1.0, z2}, pt(0.3), pt(-0.8));
    CHECK(lam > 0.0);
  }
  CHECK(feasible_seen > 20);  // the sweep actually exercised the implication
}

TEST_CASE("example 2 interval: paper endpoints at lambda_U = 0.2") {
  auto [lo, hi] = check_example2_interval(DirectionPair{1.0, 0.3}, 0.2);
  CHECK(lo == doctest::Approx(-0.5376123).epsilon(1e-5));
  CHECK(hi == doctest::Approx(0.2976123).epsilon(1e-5));
}

TEST_CASE("example 2 interval: symmetric when z2 = 0, scales as z1^-3") {
  auto [lo, hi] = check_example2_interval(DirectionPair{1.0, 0.0}, 1.0);
  CHECK(lo == doctest::Approx(-2.0));
  CHECK(hi == doctest::Approx(2.0));
  auto [lo2, hi2] = check_example2_interval(DirectionPair{2.0, 0.3}, 0.2);
  double root = std::sqrt(4.09);
  CHECK(lo2 == doctest::Approx(-2.0 * 0.2 * (0.3 + root) / 8.0));
  CHECK(hi2 == doctest::Approx(2.0 * 0.2 * (root - 0.3) / 8.0));
}

TEST_CASE("compute_lambda_U: paper value 0.2028 at (1, 0.3), 0.9") {
  double lam_u = compute_lambda_U(DirectionPair{1.0, 0.3}, 0.9, 0.9);
  CHECK(lam_u == doctest::Approx(0.2027536).epsilon(1e-5));
  CHECK(lam_u == doctest::Approx(oracle::symmetric2_min_eig(0.3, 0.245, 0.82)).epsilon(1e-12));
}

TEST_CASE("compute_lambda_U: vanishing off-diagonal and z2 = 0 degeneracy") {
  // t = 1.39 makes A2 diagonal: min(0.3, 1.09 - 0.417) = 0.3
  CHECK(compute_lambda_U(DirectionPair{1.0, 0.3}, 1.39, 1.39) == doctest::Approx(0.3));
  // z2 = 0: zero diagonal with nonzero off-diagonal forces min eig <= 0
  CHECK(compute_lambda_U(DirectionPair{1.0, 0.0}, 0.5, 0.5) <= 0.0);
}

TEST_CASE("compute_lambda_U equals the endpoint minimum (concavity in t)") {
  DirectionPair dir{1.0, 0.3};
  double swept = compute_lambda_U(dir, 0.4, 1.2, 257);
  double ends = std::min(compute_lambda_U(dir, 0.4, 0.4), compute_lambda_U(dir, 1.2, 1.2));
  CHECK(swept == doctest::Approx(ends).epsilon(1e-12));
}

TEST_CASE("example 2 Schur chain: paper smallness claim") {
  double lam_u = compute_lambda_U(DirectionPair{1.0, 0.3}, 0.9, 0.9);
  auto ok = check_example2_schur_chain(DirectionPair{1.0, 0.3}, lam_u, -0.12, 1e-3);
  CHECK(ok.feasible);
  CHECK(ok.value("D") > 0.0);
}

TEST_CASE("example 2 Schur chain: lambda_W = 0 reduces to 64 D^3 > 0") {
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> lu(0.05, 0.6);
  std::uniform_real_distribution<double> lt(-0.4, 0.4);
  for (int trial = 0; trial < 200; ++trial) {
    DirectionPair dir{1.0, 0.3};
    double lam_u = lu(rng);
    double wxx = lt(rng);
    auto res = check_example2_schur_chain(dir, lam_u, wxx, 0.0);
    double d = res.value("D");
    CHECK(res.value("cond2_lhs") == doctest::Approx(64.0 * d * d * d).epsilon(1e-10));
    CHECK(res.feasible == (d > 0.0));
  }
}

TEST_CASE("example 2 Schur chain: trivial case wxx = wxy = 0") {
  auto res = check_example2_schur_chain(DirectionPair{1.0, 0.3}, 0.2, 0.0, 0.0);
  CHECK(res.value("D") == doctest::Approx(0.04));
  CHECK(res.feasible);
}

TEST_CASE("remark 3 bounds") {
  auto res = check_remark3(DirectionPair{1.0, 0.3}, 0.5);
  CHECK(res.value("bound1") == doctest::Approx(-0.395));
  CHECK(res.value("bound2") == doctest::Approx(0.395 - 0.3));
  CHECK(res.value("lambda_upper") == doctest::Approx(-0.395));
  CHECK_FALSE(res.feasible);

  // z1 z2 = 1 + z2^2 with vanishing eigenvalue: bound degenerates to zero
  auto edge = check_remark3(DirectionPair{2.0, 1.0}, 0.0);
  CHECK(edge.value("lambda_upper") == doctest::Approx(0.0));
  CHECK_FALSE(edge.feasible);

  auto inactive = check_remark3(DirectionPair{1.0, 0.3}, 0.0);
  CHECK(inactive.value("lambda_upper") == doctest::Approx(-0.395));
}

TEST_CASE("remark 3 grid property: no (z1, z2) in (0,3]^2 certifies the pure difference kernel") {
  auto kernel = make_difference_kernel(0.5, 1.0);
  auto potential = make_zero_potential();
  for (int i = 1; i <= 20; ++i)
    for (int j = 1; j <= 20; ++j) {
      DirectionPair dir{3.0 * i / 20.0, 3.0 * j / 20.0};
      CHECK(lambda_at(kernel, potential, dir, pt(1.3), pt(1.3)) <= 1e-8);
    }
}
