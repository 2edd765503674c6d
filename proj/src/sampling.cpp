#include "gkpinn/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace gkpinn {

namespace {

// Uniform draw in (0,1): rejects the measure-zero 0.0 so stratified interior
// points stay strictly inside the open domain.
double open_unit(std::mt19937_64& eng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double u = dist(eng);
  while (u == 0.0) u = dist(eng);
  return u;
}

}  // namespace

Matrix latin_hypercube(int n, int dim, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("latin_hypercube: n must be >= 1");
  if (dim != 1 && dim != 2) throw std::invalid_argument("latin_hypercube: dim must be 1 or 2");
  std::mt19937_64 eng(seed);
  Matrix pts(dim, n);
  std::vector<int> strata(n);
  for (int d = 0; d < dim; ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), eng);
    for (int i = 0; i < n; ++i)
      pts(d, i) = (strata[i] + open_unit(eng)) / static_cast<double>(n);
  }
  return pts;
}

PointSets sample_problem_points(const PerturbedProblem& problem, int n_interior,
                                int n_boundary, int n_initial, std::uint64_t seed) {
  if (n_interior < 1 || n_boundary < 1)
    throw std::invalid_argument("sample_problem_points: counts must be positive");
  if (problem.kind == Kind::Time1D) {
    if (n_initial < 1)
      throw std::invalid_argument("sample_problem_points: Time1D needs initial points");
  } else if (n_initial > 0) {
    throw std::invalid_argument(
        "sample_problem_points: initial points only apply to time-dependent problems");
  }

  const int dim = problem.dim();
  PointSets sets;
  sets.interior = latin_hypercube(n_interior, dim, derive_seed(seed, 0));

  std::mt19937_64 eng(derive_seed(seed, 1));
  const int faces = problem.kind == Kind::Steady2D ? 4 : 2;
  sets.boundary.resize(dim, n_boundary);
  sets.boundary_face.resize(n_boundary);
  int col = 0;
  for (int face = 0; face < faces; ++face) {
    int count = n_boundary / faces + (face < n_boundary % faces ? 1 : 0);
    for (int i = 0; i < count; ++i, ++col) {
      sets.boundary_face[col] = face;
      if (problem.kind == Kind::Steady1D) {
        sets.boundary(0, col) = face == 0 ? 0.0 : 1.0;
      } else {
        const double free_coord = open_unit(eng);
        if (face < 2) {  // x = 0 / x = 1, free coordinate is y or t
          sets.boundary(0, col) = face == 0 ? 0.0 : 1.0;
          sets.boundary(1, col) = free_coord;
        } else {  // y = 0 / y = 1
          sets.boundary(0, col) = free_coord;
          sets.boundary(1, col) = face == 2 ? 0.0 : 1.0;
        }
      }
    }
  }

  if (problem.kind == Kind::Time1D) {
    std::mt19937_64 eng_ic(derive_seed(seed, 2));
    sets.initial.resize(2, n_initial);
    for (int i = 0; i < n_initial; ++i) {
      sets.initial(0, i) = open_unit(eng_ic);
      sets.initial(1, i) = 0.0;
    }
  }
  return sets;
}

Matrix test_grid(const PerturbedProblem& problem, int n) {
  if (n < 2) throw std::invalid_argument("test_grid: need n >= 2");
  if (problem.kind == Kind::Steady1D) {
    Matrix pts(1, n);
    for (int i = 0; i < n; ++i) pts(0, i) = static_cast<double>(i) / (n - 1);
    return pts;
  }
  const int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  Matrix pts(2, static_cast<Eigen::Index>(m) * m);
  Eigen::Index col = 0;
  for (int j = 0; j < m; ++j) {
    const double second = static_cast<double>(j) / (m - 1);
    for (int i = 0; i < m; ++i, ++col) {
      pts(0, col) = static_cast<double>(i) / (m - 1);
      pts(1, col) = second;
    }
  }
  return pts;
}

}  // namespace gkpinn
