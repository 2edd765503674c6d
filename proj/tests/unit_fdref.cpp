#include "gkpinn/fdref.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace gkpinn;

TEST_CASE("shishkin mesh construction") {
  // Cap branch: tau would exceed 1/2, mesh is uniform.
  const ShishkinMesh1D uniform =
      shishkin_mesh(8, 0.25, BoundaryLayerSpec{LayerAxis::X, LayerSide::Right, 1.0});
  CHECK(uniform.tau == 0.5);
  for (int i = 0; i <= 8; ++i)
    CHECK(uniform.nodes(i) == doctest::Approx(i / 8.0).epsilon(1e-15));

  // Right layer, eps = 1e-3, N = 4.
  const ShishkinMesh1D m =
      shishkin_mesh(4, 1e-3, BoundaryLayerSpec{LayerAxis::X, LayerSide::Right, 1.0});
  const double tau = 2e-3 * std::log(4.0);
  CHECK(m.tau == doctest::Approx(tau).epsilon(1e-12));
  CHECK(m.nodes(0) == 0.0);
  CHECK(m.nodes(1) == doctest::Approx((1.0 - tau) / 2).epsilon(1e-12));
  CHECK(m.nodes(2) == doctest::Approx(1.0 - tau).epsilon(1e-12));
  CHECK(m.nodes(3) == doctest::Approx(1.0 - tau / 2).epsilon(1e-12));
  CHECK(m.nodes(4) == 1.0);

  CHECK_THROWS_AS(shishkin_mesh(5, 1e-3, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS(shishkin_mesh(2, 1e-3, std::nullopt), std::invalid_argument);
}

TEST_CASE("shishkin mesh nodes strictly increase for random inputs") {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> edist(-8.0, -0.5);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 * (2 + static_cast<int>(eng() % 200));
    const double eps = std::pow(10.0, edist(eng));
    const LayerSide side = rep % 2 == 0 ? LayerSide::Left : LayerSide::Right;
    const ShishkinMesh1D m =
        shishkin_mesh(n, eps, BoundaryLayerSpec{LayerAxis::X, side, 1.0});
    CHECK(m.nodes(0) == 0.0);
    CHECK(m.nodes(n) == 1.0);
    for (int i = 0; i < n; ++i) CHECK(m.nodes(i + 1) > m.nodes(i));
  }
  // Degenerate at extreme epsilon: the transition point collapses.
  CHECK_THROWS_AS(shishkin_mesh(64, 1e-38, BoundaryLayerSpec{LayerAxis::X, LayerSide::Right, 1.0}),
                  std::runtime_error);
}

TEST_CASE("solve_1d matches the closed forms at eps = 1e-3") {
  for (int index : {1, 2, 3}) {
    const PerturbedProblem p = builtin_example(index, 1e-3);
    double prev_err = 1e9;
    for (int n : {512, 1024, 2048}) {
      const ReferenceSolution sol = solve_1d(p, n);
      double err = 0.0;
      for (Eigen::Index i = 0; i < sol.xs.size(); ++i)
        err = std::max(err, std::abs(sol.values(0, i) - p.analytic({sol.xs(i), 0.0})));
      if (n == 1024) CHECK(err <= 1e-3);
      CHECK(err < prev_err);
      prev_err = err;
    }
  }
}

TEST_CASE("solve_1d at moderate epsilon") {
  const PerturbedProblem p = builtin_example(2, 0.1);
  const ReferenceSolution sol = solve_1d(p, 512);
  double err = 0.0;
  for (Eigen::Index i = 0; i < sol.xs.size(); ++i)
    err = std::max(err, std::abs(sol.values(0, i) - p.analytic({sol.xs(i), 0.0})));
  CHECK(err <= 1e-3);
}

TEST_CASE("solve_2d imposes Dirichlet data exactly and solves the trivial problem") {
  PerturbedProblem p = builtin_example(4, 1e-3);
  const ReferenceSolution sol = solve_2d(p, 64);
  for (Eigen::Index i = 0; i < sol.xs.size(); ++i) {
    CHECK(sol.values(0, i) == p.boundary({sol.xs(i), 0.0}));
    CHECK(sol.values(sol.ys.size() - 1, i) == p.boundary({sol.xs(i), 1.0}));
  }
  for (Eigen::Index j = 0; j < sol.ys.size(); ++j) {
    CHECK(sol.values(j, 0) == p.boundary({0.0, sol.ys(j)}));
    CHECK(sol.values(j, sol.xs.size() - 1) == p.boundary({1.0, sol.ys(j)}));
  }

  // Zero boundary data and f = 0: the unique solution is 0.
  PerturbedProblem trivial = p;
  trivial.boundary = [](const Point&) { return 0.0; };
  const ReferenceSolution zero = solve_2d(trivial, 32);
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solve_2d self-convergence at mild epsilon") {
  const PerturbedProblem p = builtin_example(4, 0.5);
  const ReferenceSolution coarse = solve_2d(p, 64);
  const ReferenceSolution fine = solve_2d(p, 128);
  Matrix pts(2, coarse.xs.size() * coarse.ys.size());
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < coarse.ys.size(); ++j)
    for (Eigen::Index i = 0; i < coarse.xs.size(); ++i, ++col) {
      pts(0, col) = coarse.xs(i);
      pts(1, col) = coarse.ys(j);
    }
  const RowVector fine_vals = fine.interpolate(pts);
  double diff = 0.0;
  col = 0;
  for (Eigen::Index j = 0; j < coarse.ys.size(); ++j)
    for (Eigen::Index i = 0; i < coarse.xs.size(); ++i, ++col)
      diff = std::max(diff, std::abs(coarse.values(j, i) - fine_vals(col)));
  CHECK(diff < 1e-3);
}

TEST_CASE("solve_2d SOR failure carries the achieved residual") {
  const PerturbedProblem p = builtin_example(4, 1e-3);
  SorOptions sor;
  sor.max_iter = 2;
  try {
    solve_2d(p, 64, sor);
    FAIL("expected convergence failure");
  } catch (const std::runtime_error& err) {
    CHECK(std::string(err.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("solve_time imposes initial and boundary data") {
  const PerturbedProblem p = builtin_example(8, 0.1);
  const ReferenceSolution sol = solve_time(p, 128, 64);
  for (Eigen::Index i = 0; i < sol.xs.size(); ++i)
    CHECK(sol.values(0, i) ==
          doctest::Approx(std::sin(2.0 * 3.14159265358979323846 * sol.xs(i)))
              .epsilon(1e-14));
  // Boundary traces for t > 0 (the x=1 corner at t=0 is incompatible by
  // construction and belongs to the initial slice).
  for (Eigen::Index j = 1; j < sol.ys.size(); ++j) {
    CHECK(sol.values(j, 0) == 0.0);
    CHECK(sol.values(j, sol.xs.size() - 1) == 1.0);
  }
}

TEST_CASE("solve_time self-convergence at eps = 0.1 away from the corner transient") {
  // The incompatible corner (u(1,0) differs between the initial and boundary
  // data) makes the first few time levels resolution-dependent; compare from
  // t = 0.05 on.
  for (int index : {7, 8}) {
    const PerturbedProblem p = builtin_example(index, 0.1);
    const ReferenceSolution coarse = solve_time(p, 256, 256);
    const ReferenceSolution fine = solve_time(p, 512, 512);
    double diff = 0.0;
    for (Eigen::Index j = 0; j <= 256; ++j) {
      const double t = coarse.ys(j);
      if (t < 0.05) continue;
      Matrix pts(2, coarse.xs.size());
      for (Eigen::Index i = 0; i < coarse.xs.size(); ++i) {
        pts(0, i) = coarse.xs(i);
        pts(1, i) = t;
      }
      const RowVector fv = fine.interpolate(pts);
      for (Eigen::Index i = 0; i < coarse.xs.size(); ++i)
        diff = std::max(diff, std::abs(coarse.values(j, i) - fv(i)));
    }
    CHECK(diff < 5e-3);
  }
}

TEST_CASE("reference solutions round-trip through the dump format") {
  const PerturbedProblem p1 = builtin_example(1, 1e-3);
  const ReferenceSolution a = solve_1d(p1, 64);
  std::stringstream buf;
  a.save(buf);
  const ReferenceSolution b = ReferenceSolution::load(buf);
  CHECK(b.kind == a.kind);
  CHECK(b.epsilon == a.epsilon);
  CHECK(b.xs == a.xs);
  CHECK(b.values == a.values);

  const PerturbedProblem p8 = builtin_example(8, 0.1);
  const ReferenceSolution c = solve_time(p8, 32, 16);
  std::stringstream buf2;
  c.save(buf2);
  const ReferenceSolution d = ReferenceSolution::load(buf2);
  CHECK(d.values == c.values);
  CHECK(d.ys == c.ys);
}

TEST_CASE("interpolation reproduces grid values and is linear between nodes") {
  const PerturbedProblem p = builtin_example(1, 0.1);
  const ReferenceSolution sol = solve_1d(p, 128);
  Matrix pts(1, 2);
  pts << sol.xs(40), 0.5 * (sol.xs(40) + sol.xs(41));
  const RowVector v = sol.interpolate(pts);
  CHECK(v(0) == doctest::Approx(sol.values(0, 40)).epsilon(1e-15));
  CHECK(v(1) ==
        doctest::Approx(0.5 * (sol.values(0, 40) + sol.values(0, 41))).epsilon(1e-14));
}
