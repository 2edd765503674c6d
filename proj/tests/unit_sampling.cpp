#include "gkpinn/sampling.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace gkpinn;

namespace {

// Stratification oracle: per dimension, every stratum [k/n,(k+1)/n) holds
// exactly one point.
bool stratified(const Matrix& pts) {
  const int n = static_cast<int>(pts.cols());
  for (int d = 0; d < pts.rows(); ++d) {
    std::vector<int> counts(n, 0);
    for (int i = 0; i < n; ++i) {
      const int k = static_cast<int>(pts(d, i) * n);
      if (k < 0 || k >= n) return false;
      counts[k]++;
    }
    for (int c : counts)
      if (c != 1) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("latin hypercube stratification") {
  const Matrix p4 = latin_hypercube(4, 1, 0);
  CHECK(stratified(p4));

  // 10-bin marginal histogram of 1000 points has exactly 100 per bin.
  const Matrix p1000 = latin_hypercube(1000, 1, 123);
  std::vector<int> bins(10, 0);
  for (int i = 0; i < 1000; ++i) bins[static_cast<int>(p1000(0, i) * 10)]++;
  for (int c : bins) CHECK(c == 100);
}

TEST_CASE("latin hypercube stratification holds over random configurations") {
  std::mt19937_64 eng(99);
  std::uniform_int_distribution<int> ndist(1, 400);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = ndist(eng);
    const int dim = 1 + rep % 2;
    const std::uint64_t seed = eng();
    const Matrix pts = latin_hypercube(n, dim, seed);
    CHECK(stratified(pts));
    CHECK((pts.array() > 0.0).all());
    CHECK((pts.array() < 1.0).all());
  }
}

TEST_CASE("latin hypercube determinism") {
  const Matrix a = latin_hypercube(257, 2, 42);
  const Matrix b = latin_hypercube(257, 2, 42);
  const Matrix c = latin_hypercube(257, 2, 43);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("1D boundary points sit exactly on the endpoints, balanced") {
  const PerturbedProblem p = builtin_example(1, 1e-3);
  const PointSets sets = sample_problem_points(p, 100, 50, 0, 7);
  REQUIRE(sets.boundary.cols() == 50);
  int at0 = 0, at1 = 0;
  for (int i = 0; i < 50; ++i) {
    if (sets.boundary(0, i) == 0.0) at0++;
    else if (sets.boundary(0, i) == 1.0) at1++;
  }
  CHECK(at0 == 25);
  CHECK(at1 == 25);
}

TEST_CASE("2D boundary points balanced over four faces with remainder low-first") {
  const PerturbedProblem p = builtin_example(4, 1e-3);
  const PointSets sets = sample_problem_points(p, 100, 102, 0, 7);
  std::array<int, 4> counts{0, 0, 0, 0};
  for (int i = 0; i < 102; ++i) counts[sets.boundary_face[i]]++;
  CHECK(counts[0] == 26);
  CHECK(counts[1] == 26);
  CHECK(counts[2] == 25);
  CHECK(counts[3] == 25);
  for (int i = 0; i < 102; ++i) {
    const double x = sets.boundary(0, i), y = sets.boundary(1, i);
    const bool on_face = x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0;
    CHECK(on_face);
  }
}

TEST_CASE("interior points lie strictly inside the open domain") {
  for (int index : {1, 4, 8}) {
    const PerturbedProblem p = builtin_example(index, 1e-3);
    const PointSets sets =
        sample_problem_points(p, 500, 40, p.kind == Kind::Time1D ? 30 : 0, 11);
    CHECK((sets.interior.array() > 0.0).all());
    CHECK((sets.interior.array() < 1.0).all());
  }
}

TEST_CASE("initial points only for time problems") {
  const PerturbedProblem steady = builtin_example(1, 1e-3);
  CHECK_THROWS_AS(sample_problem_points(steady, 10, 10, 5, 0), std::invalid_argument);
  const PerturbedProblem time = builtin_example(8, 1e-3);
  CHECK_THROWS_AS(sample_problem_points(time, 10, 10, 0, 0), std::invalid_argument);
  const PointSets sets = sample_problem_points(time, 10, 10, 100, 0);
  REQUIRE(sets.initial.cols() == 100);
  for (int i = 0; i < 100; ++i) {
    CHECK(sets.initial(1, i) == 0.0);
    CHECK(sets.initial(0, i) > 0.0);
    CHECK(sets.initial(0, i) < 1.0);
  }
}

TEST_CASE("full sampling determinism from the seed") {
  const PerturbedProblem p = builtin_example(8, 1e-3);
  const PointSets a = sample_problem_points(p, 64, 20, 16, 21);
  const PointSets b = sample_problem_points(p, 64, 20, 16, 21);
  CHECK(a.interior == b.interior);
  CHECK(a.boundary == b.boundary);
  CHECK(a.initial == b.initial);
}

TEST_CASE("test grid shapes") {
  const PerturbedProblem p1 = builtin_example(1, 1e-3);
  const Matrix g1 = test_grid(p1, 400);
  REQUIRE(g1.cols() == 400);
  CHECK(g1(0, 0) == 0.0);
  CHECK(g1(0, 399) == 1.0);
  CHECK(g1(0, 1) == doctest::Approx(1.0 / 399.0).epsilon(1e-15));

  const Matrix g2 = test_grid(p1, 2);
  REQUIRE(g2.cols() == 2);
  CHECK(g2(0, 0) == 0.0);
  CHECK(g2(0, 1) == 1.0);

  const PerturbedProblem p4 = builtin_example(4, 1e-3);
  const Matrix g4 = test_grid(p4, 400);
  REQUIRE(g4.cols() == 400);  // 20 x 20
  // Includes all four edges.
  CHECK(g4.row(0).minCoeff() == 0.0);
  CHECK(g4.row(0).maxCoeff() == 1.0);
  CHECK(g4.row(1).minCoeff() == 0.0);
  CHECK(g4.row(1).maxCoeff() == 1.0);
  // Second axis outermost: the first 20 points share y = 0.
  for (int i = 0; i < 20; ++i) CHECK(g4(1, i) == 0.0);
}
