#pragma once

#include "gkpinn/mlp.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gkpinn {

enum class Kind { Steady1D, Steady2D, Time1D };

/// Number of network inputs for a problem kind (time counts as an axis).
inline int kind_dim(Kind k) { return k == Kind::Steady1D ? 1 : 2; }

/// A singularly perturbed convection-diffusion problem on the unit
/// interval/square (time horizon (0,1]):
///
///   diffusion_sign * eps * Lap(u) + b . grad(u) + c u = f   (+ u_t for Time1D)
///
/// with Dirichlet boundary data and, for Time1D, initial data at t = 0.
/// Coefficients are stored with the signs of the source equation as written;
/// canonicalization happens only where layer locations are inferred.
struct PerturbedProblem {
  Kind kind = Kind::Steady1D;
  double epsilon = 1e-3;
  int diffusion_sign = -1;  // sign multiplying eps * Lap(u) as written
  std::function<std::array<double, 2>(const Point&)> b;
  std::function<double(const Point&)> c;
  std::function<double(const Point&)> f;
  std::function<double(const Point&)> boundary;  // valid on boundary faces
  std::function<double(const Point&)> initial;   // Time1D only, at t = 0
  std::function<double(const Point&)> analytic;  // optional closed form

  int dim() const { return kind_dim(kind); }
  bool has_analytic() const { return static_cast<bool>(analytic); }
};

/// PDE residual (written-form left-hand side minus right-hand side) of the
/// field at an interior point.
double residual(const PerturbedProblem& problem, const FieldEvaluator& field,
                const Point& x);

/// Same residual assembled from an already-computed jet.
double residual_from_jet(const PerturbedProblem& problem, const FieldJet& jet,
                         const Point& x);

/// Coefficient arrays frozen on a fixed point batch so training loops do not
/// re-evaluate coefficient callables every iteration.
struct ResidualCoeffs {
  RowVector bx;
  RowVector by;  // empty for Steady1D
  RowVector c;
  RowVector f;
};

ResidualCoeffs residual_coeffs(const PerturbedProblem& problem, const Matrix& points);

/// Residuals for a jet batch; points and jets must share the batch layout.
RowVector residual_batch(const PerturbedProblem& problem, const ResidualCoeffs& coeffs,
                         const JetBatch& jets);

/// The paper's eight benchmark problems, epsilon left as a parameter.
/// Examples 1-3 (indices 0-2) carry closed-form solutions.
std::vector<PerturbedProblem> builtin_examples(double epsilon);

/// One benchmark by 1-based index.
PerturbedProblem builtin_example(int index, double epsilon);

/// Closed-form values on a batch of points. All built-in solutions are
/// expressed in overflow-safe form (exponents are always <= 0), so no value
/// of epsilon can overflow. Throws if the problem has no analytic solution.
RowVector analytic_on_grid(const PerturbedProblem& problem, const Matrix& points);

}  // namespace gkpinn
