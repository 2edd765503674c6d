#pragma once

#include "gkpinn/problems.hpp"

#include <cstdint>
#include <vector>

namespace gkpinn {

/// Collocation, boundary, initial, and test points for one training run.
/// Columns are points; the row count is the problem dimension.
struct PointSets {
  Matrix interior;
  Matrix boundary;
  std::vector<int> boundary_face;  // face index per boundary point
  Matrix initial;                  // Time1D only; empty otherwise
  Matrix test;                     // filled separately via test_grid
};

/// Latin hypercube sample: per dimension exactly one point in each of the n
/// strata [k/n, (k+1)/n), stratum permutations independent across dimensions,
/// reproducible from seed.
Matrix latin_hypercube(int n, int dim, std::uint64_t seed);

/// Interior points by Latin hypercube; boundary points uniform on the faces,
/// balanced across faces with the remainder going to the lowest-indexed
/// faces; initial points uniform on the t = 0 slice (Time1D only).
///
/// Face order: 1D and Time1D {x=0, x=1}; 2D {x=0, x=1, y=0, y=1}.
PointSets sample_problem_points(const PerturbedProblem& problem, int n_interior,
                                int n_boundary, int n_initial, std::uint64_t seed);

/// Evaluation grid: 1D gives n equispaced points on [0,1]; 2D and time give
/// a ceil(sqrt(n)) x ceil(sqrt(n)) tensor grid on the closed domain, ordered
/// with the second axis outermost.
Matrix test_grid(const PerturbedProblem& problem, int n);

}  // namespace gkpinn
