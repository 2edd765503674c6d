#pragma once

#include "gkpinn/layers.hpp"
#include "gkpinn/problems.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace gkpinn {

/// Piecewise-uniform fitted mesh: N/2 cells in the layer strip of width
/// tau = min(1/2, (2 eps / beta) ln N) adjacent to the layer side, N/2 in
/// the remainder. Without a layer the mesh is uniform.
struct ShishkinMesh1D {
  Vector nodes;     // N+1 strictly increasing nodes, nodes[0]=0, nodes[N]=1
  double tau = 0.5;
  int side = -1;    // -1 uniform, 0 left, 1 right
};

ShishkinMesh1D shishkin_mesh(int n_cells, double epsilon,
                             const std::optional<BoundaryLayerSpec>& layer);

// Over-relaxation (omega > 1) diverges or stalls on the strongly
// nonsymmetric upwind systems that arise at small epsilon, so the default is
// plain Gauss-Seidel with alternating sweep direction.
struct SorOptions {
  double omega = 1.0;
  double tol = 1e-10;   // infinity norm of the algebraic residual
  long max_iter = 1000000;
};

/// Finite-difference reference on a tensor grid. For Steady1D `ys` is empty
/// and `values` is 1 x nx; for Time1D `ys` holds the time levels.
struct ReferenceSolution {
  Kind kind = Kind::Steady1D;
  double epsilon = 0.0;
  Vector xs;
  Vector ys;       // y nodes (Steady2D) or t levels (Time1D)
  Matrix values;   // (ny x nx), row i = second-axis level i

  /// Piecewise-linear (1D) / bilinear (2D, per time level) interpolation.
  RowVector interpolate(const Matrix& points) const;

  void save(std::ostream& os) const;
  void save_file(const std::string& path) const;
  static ReferenceSolution load(std::istream& is);
  static ReferenceSolution load_file(const std::string& path);
};

/// Upwind scheme on a Shishkin mesh with one defect-correction pass toward
/// central differencing; Thomas-algorithm solves.
ReferenceSolution solve_1d(const PerturbedProblem& problem, int n_cells);

/// Five-point upwind on the tensor product of per-axis fitted meshes,
/// SOR sweeps with alternating direction, plus one defect-correction pass.
ReferenceSolution solve_2d(const PerturbedProblem& problem, int n_cells,
                           const SorOptions& sor = {});

/// Backward Euler in time, upwind fitted mesh in space, plus one
/// defect-correction pass toward Crank-Nicolson / central differencing
/// (the first two steps stay backward Euler).
ReferenceSolution solve_time(const PerturbedProblem& problem, int nx_cells, int nt_steps);

}  // namespace gkpinn
