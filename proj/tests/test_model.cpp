#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "hypolab/model.hpp"

using namespace hypo;

namespace {
Vec pt(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}
}  // namespace

TEST_CASE("torus wrap is canonical and idempotent") {
  auto dom = PositionDomain::torus(kTwoPi);
  CHECK(dom.wrap1(kTwoPi) == doctest::Approx(0.0));
  CHECK(dom.wrap1(-1e-9) >= 0.0);
  CHECK(dom.wrap1(-1e-9) < kTwoPi);
  for (double x : {-10.0, -0.1, 0.0, 3.2, 100.7}) {
    double w = dom.wrap1(x);
    CHECK(w >= 0.0);
    CHECK(w < kTwoPi);
    CHECK(dom.wrap1(w) == doctest::Approx(w));
  }
  auto line = PositionDomain::line(4.0);
  CHECK(line.wrap1(3.7) == 3.7);
  CHECK(line.wrap1(-9.9) == -9.9);
}

TEST_CASE("metric block values") {
  DirectionPair d13{1.0, 0.3};
  Mat m = metric_block(d13, 1);
  CHECK(m(0, 0) == doctest::Approx(1.0));
  CHECK(m(0, 1) == doctest::Approx(0.3));
  CHECK(m(1, 0) == doctest::Approx(0.3));
  CHECK(m(1, 1) == doctest::Approx(1.09));

  Mat id = metric_block(DirectionPair{1.0, 0.0}, 1);
  CHECK((id - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  // (2,1): [[4,2],[2,2]] with eigenvalues 3 +- sqrt(5)
  Mat m21 = metric_block(DirectionPair{2.0, 1.0}, 1);
  CHECK(m21(0, 0) == doctest::Approx(4.0));
  CHECK(m21(0, 1) == doctest::Approx(2.0));
  CHECK(m21(1, 1) == doctest::Approx(2.0));
  Eigen::SelfAdjointEigenSolver<Mat> es(m21);
  CHECK(es.eigenvalues()(0) == doctest::Approx(3.0 - std::sqrt(5.0)));
  CHECK(es.eigenvalues()(1) == doctest::Approx(3.0 + std::sqrt(5.0)));
}

TEST_CASE("metric block is positive definite whenever z1 != 0") {
  for (double z1 : {-2.0, -0.31, 0.05, 1.0, 3.0})
    for (double z2 : {-1.0, 0.0, 0.3, 2.5})
      for (int d : {1, 2, 3}) {
        Eigen::LLT<Mat> llt(metric_block(DirectionPair{z1, z2}, d));
        CHECK(llt.info() == Eigen::Success);
      }
}

TEST_CASE("zero model validates with exactly zero defects") {
  auto rep = validate_model(make_zero_kernel(), make_zero_potential(),
                            PositionDomain::torus(), 8);
  CHECK(rep.passed);
  CHECK(rep.kernel_grad_err == 0.0);
  CHECK(rep.kernel_hess_xx_err == 0.0);
  CHECK(rep.kernel_hess_xy_err == 0.0);
  CHECK(rep.kernel_symmetry == 0.0);
  CHECK(rep.potential_grad_err == 0.0);
  CHECK(rep.potential_hess_err == 0.0);
}

TEST_CASE("difference kernel passes FD validation with zero symmetry defect") {
  auto rep = validate_model(make_difference_kernel(1.0, 1.0), make_cosine_potential(0.9),
                            PositionDomain::torus(), 24);
  CHECK(rep.passed);
  CHECK(rep.kernel_symmetry == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(rep.kernel_grad_err <= 1e-6);
  CHECK(rep.kernel_hess_xx_err <= 1e-6);
  CHECK(rep.kernel_hess_xy_err <= 1e-6);
}

TEST_CASE("separable kernel: hess_xy closed form and FD check") {
  auto k = make_separable_kernel(1.0, "cos");
  // d^2/dxdy [cos x cos y] = sin x sin y
  for (double x : {0.3, 1.1, 4.0})
    for (double y : {0.0, 2.2, 5.5})
      CHECK(k.hess_xy(pt(x), pt(y))(0, 0) == doctest::Approx(std::sin(x) * std::sin(y)));
  auto rep = validate_model(k, make_zero_potential(), PositionDomain::torus(), 24);
  CHECK(rep.passed);
}

TEST_CASE("all builtins pass FD validation on their domains") {
  auto torus = PositionDomain::torus();
  auto line = PositionDomain::line(6.0);
  CHECK(validate_model(make_zero_kernel(), make_zero_potential(), torus, 8).passed);
  CHECK(validate_model(make_difference_kernel(0.2, 2.0), make_cosine_potential(0.5), torus, 16)
            .passed);
  CHECK(validate_model(make_separable_kernel(-0.7, "sin"), make_cosine_potential(1.3), torus, 16)
            .passed);
  CHECK(validate_model(make_difference_kernel(0.05, 1.0), make_quadratic_potential(0.9), line, 16)
            .passed);
}

TEST_CASE("difference kernel identity hess_xx + hess_xy = 0 on a 32-point grid") {
  auto k = make_difference_kernel(0.8, 1.0);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      double x = i * kTwoPi / 32;
      double y = j * kTwoPi / 32;
      double s = k.hess_xx(pt(x), pt(y))(0, 0) + k.hess_xy(pt(x), pt(y))(0, 0);
      CHECK(std::abs(s) <= 1e-15);
    }
}

TEST_CASE("kernel and potential periodicity on the torus") {
  auto k = make_difference_kernel(0.4, 1.0);
  auto ks = make_separable_kernel(0.4, "cos");
  auto u = make_cosine_potential(0.7);
  for (double x : {0.2, 1.9, 4.4}) {
    for (double y : {0.5, 3.3}) {
      CHECK(k.eval(pt(x + kTwoPi), pt(y)) == doctest::Approx(k.eval(pt(x), pt(y))));
      CHECK(ks.eval(pt(x + kTwoPi), pt(y)) == doctest::Approx(ks.eval(pt(x), pt(y))));
    }
    CHECK(u.eval(pt(x + kTwoPi)) == doctest::Approx(u.eval(pt(x))));
  }
}

TEST_CASE("non-finite evaluator raises an evaluation error naming the point") {
  KernelModel bad = make_zero_kernel();
  bad.is_zero = false;
  bad.eval = [](const Vec& x, const Vec&) { return x[0] > 3.0 ? std::nan("") : 0.0; };
  CHECK_THROWS_AS(validate_model(bad, make_zero_potential(), PositionDomain::torus(), 32),
                  EvaluationError);
}

TEST_CASE("declared bounds of builtins") {
  auto k = make_difference_kernel(0.5, 2.0);
  REQUIRE(k.wxx_bounds.has_value());
  CHECK(k.wxx_bounds->lo == doctest::Approx(-2.0));
  CHECK(k.wxx_bounds->hi == doctest::Approx(2.0));
  CHECK(*k.sup_abs == doctest::Approx(0.5));
  auto q = make_quadratic_potential(0.9);
  CHECK(q.hess_bounds->lo == doctest::Approx(0.9));
  CHECK(q.hess_bounds->hi == doctest::Approx(0.9));
}
