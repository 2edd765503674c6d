#include "gkpinn/problems.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gkpinn;
using gkpinn::test::rel_err;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("residual vanishes on the closed-form solutions") {
  std::mt19937_64 eng(1);
  std::uniform_real_distribution<double> coord(0.01, 0.99);
  for (int index : {1, 2, 3}) {
    for (double eps : {0.1, 0.01}) {
      const PerturbedProblem p = builtin_example(index, eps);
      const FieldEvaluator exact = gkpinn::test::analytic_jet_example(index, eps);
      for (int rep = 0; rep < 100; ++rep) {
        const Point x{coord(eng), 0.0};
        CHECK(std::abs(residual(p, exact, x)) < 1e-6);
      }
    }
  }
}

TEST_CASE("residual against hand-computed values") {
  // Example 1 with the exact solution at moderate epsilon.
  {
    const PerturbedProblem p = builtin_example(1, 0.1);
    const FieldEvaluator exact = gkpinn::test::analytic_jet_example(1, 0.1);
    CHECK(std::abs(residual(p, exact, {0.37, 0.0})) < 1e-8);
    CHECK(std::abs(residual(p, exact, {0.9, 0.0})) < 1e-8);
  }
  // Constant field u = 5: all derivatives vanish, so the residual is -f.
  {
    const PerturbedProblem p = builtin_example(1, 0.001);
    const FieldEvaluator constant = [](const Point&) {
      FieldJet j;
      j.value = 5.0;
      return j;
    };
    const double expected = -(0.001 * kPi * kPi * std::sin(kPi * 0.5) + kPi * std::cos(kPi * 0.5));
    CHECK(residual(p, constant, {0.5, 0.0}) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(-9.8696e-3).epsilon(1e-4));
  }
  // Example 3 (written with +eps u'') at eps = 0.1.
  {
    const PerturbedProblem p = builtin_example(3, 0.1);
    const FieldEvaluator exact = gkpinn::test::analytic_jet_example(3, 0.1);
    CHECK(std::abs(residual(p, exact, {0.3, 0.0})) < 1e-8);
  }
}

TEST_CASE("boundary values of the closed forms match the stated data") {
  for (double eps : {0.1, 1e-3}) {
    for (int index : {1, 2, 3}) {
      const PerturbedProblem p = builtin_example(index, eps);
      for (double x : {0.0, 1.0}) {
        const Point pt{x, 0.0};
        CHECK(std::abs(p.analytic(pt) - p.boundary(pt)) < 1e-12);
      }
    }
  }
  // Specific values from the problem statements.
  const PerturbedProblem e2 = builtin_example(2, 1e-3);
  CHECK(e2.analytic({1.0, 0.0}) == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-12));
  const PerturbedProblem e1 = builtin_example(1, 1e-3);
  CHECK(e1.analytic({1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
  const PerturbedProblem e3 = builtin_example(3, 1e-3);
  CHECK(e3.analytic({0.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("builtin_examples returns the full set with expected structure") {
  const auto all = builtin_examples(1e-3);
  REQUIRE(all.size() == 8);
  CHECK(all[0].kind == Kind::Steady1D);
  CHECK(all[3].kind == Kind::Steady2D);
  CHECK(all[6].kind == Kind::Time1D);
  CHECK(all[0].has_analytic());
  CHECK(all[1].has_analytic());
  CHECK(all[2].has_analytic());
  for (int i = 3; i < 8; ++i) CHECK(!all[i].has_analytic());
  CHECK(all[2].diffusion_sign == +1);
  CHECK(all[4].diffusion_sign == +1);
  CHECK(all[5].diffusion_sign == +1);
  CHECK_THROWS_AS(builtin_example(0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(builtin_example(9, 1e-3), std::invalid_argument);
}

TEST_CASE("analytic evaluation is overflow-safe at extreme epsilon") {
  // Example 1 at eps = 1e-3, x = 0.5: the layer term is below 1e-200.
  const PerturbedProblem e1 = builtin_example(1, 1e-3);
  CHECK(e1.analytic({0.5, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
  // Example 2 at eps = 1e-3, x = 0: the layer term underflows to zero.
  const PerturbedProblem e2 = builtin_example(2, 1e-3);
  CHECK(e2.analytic({0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  // Example 3 at eps = 1e-3, x = 1.
  const PerturbedProblem e3 = builtin_example(3, 1e-3);
  CHECK(e3.analytic({1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  // Nothing overflows even at eps = 1e-38 across the domain.
  for (int index : {1, 2, 3}) {
    const PerturbedProblem p = builtin_example(index, 1e-38);
    for (double x = 0.0; x <= 1.0; x += 0.01)
      CHECK(std::isfinite(p.analytic({x, 0.0})));
  }
}

TEST_CASE("analytic_on_grid evaluates batches and validates input") {
  const PerturbedProblem p = builtin_example(1, 1e-3);
  Matrix pts(1, 3);
  pts << 0.0, 0.5, 1.0;
  const RowVector v = analytic_on_grid(p, pts);
  CHECK(v(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v(2) == doctest::Approx(1.0).epsilon(1e-12));
  const PerturbedProblem p4 = builtin_example(4, 1e-3);
  CHECK_THROWS_AS(analytic_on_grid(p4, pts), std::runtime_error);
}

TEST_CASE("residual is linear in the field") {
  // residual(a*u + b*v) == a*res_hom(u) + b*res_hom(v) - f where
  // res_hom(w) = residual(w) + f.
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> coord(0.05, 0.95);
  const FieldEvaluator u = [](const Point& p) {
    FieldJet j;
    j.value = std::sin(2.0 * p[0]) + p[1];
    j.grad = {2.0 * std::cos(2.0 * p[0]), 1.0};
    j.diag_hess = {-4.0 * std::sin(2.0 * p[0]), 0.0};
    return j;
  };
  const FieldEvaluator v = [](const Point& p) {
    FieldJet j;
    j.value = p[0] * p[0] + std::exp(p[1]);
    j.grad = {2.0 * p[0], std::exp(p[1])};
    j.diag_hess = {2.0, std::exp(p[1])};
    return j;
  };
  const double a = 1.7, b = -0.6;
  const FieldEvaluator combo = [&](const Point& p) {
    const FieldJet ju = u(p), jv = v(p);
    FieldJet j;
    j.value = a * ju.value + b * jv.value;
    for (int k = 0; k < 2; ++k) {
      j.grad[k] = a * ju.grad[k] + b * jv.grad[k];
      j.diag_hess[k] = a * ju.diag_hess[k] + b * jv.diag_hess[k];
    }
    return j;
  };
  for (int index = 1; index <= 8; ++index) {
    const PerturbedProblem p = builtin_example(index, 0.05);
    for (int rep = 0; rep < 20; ++rep) {
      const Point x{coord(eng), coord(eng)};
      const double f = p.f(x);
      const double lhs = residual(p, combo, x);
      const double rhs = a * (residual(p, u, x) + f) + b * (residual(p, v, x) + f) - f;
      CHECK(rel_err(lhs, rhs, 1e-9) < 1e-9);
    }
  }
}

TEST_CASE("residual_batch agrees with pointwise residual") {
  const PerturbedProblem p = builtin_example(8, 0.05);
  Matrix pts(2, 4);
  pts << 0.1, 0.4, 0.6, 0.9, 0.2, 0.5, 0.7, 0.3;
  const FieldEvaluator u = [](const Point& q) {
    FieldJet j;
    j.value = q[0] * q[1];
    j.grad = {q[1], q[0]};
    j.diag_hess = {0.0, 0.0};
    return j;
  };
  const ResidualCoeffs coeffs = residual_coeffs(p, pts);
  JetBatch jets;
  jets.value.resize(4);
  for (int k = 0; k < 2; ++k) {
    jets.grad[k].resize(4);
    jets.hess[k].resize(4);
  }
  for (int j = 0; j < 4; ++j) {
    const FieldJet fj = u({pts(0, j), pts(1, j)});
    jets.value(j) = fj.value;
    for (int k = 0; k < 2; ++k) {
      jets.grad[k](j) = fj.grad[k];
      jets.hess[k](j) = fj.diag_hess[k];
    }
  }
  const RowVector r = residual_batch(p, coeffs, jets);
  for (int j = 0; j < 4; ++j)
    CHECK(r(j) == doctest::Approx(residual(p, u, {pts(0, j), pts(1, j)})).epsilon(1e-14));
}
