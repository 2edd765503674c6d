#pragma once

#include "gkpinn/mlp.hpp"
#include "gkpinn/problems.hpp"

#include <utility>
#include <vector>

namespace gkpinn {

enum class LayerAxis { X = 0, Y = 1 };  // Y is the second spatial axis; the
                                        // time axis never carries a layer
enum class LayerSide { Left = 0, Right = 1 };

/// Location and strength of one exponential boundary layer, inferred from
/// the sign of the convection coefficient.
struct BoundaryLayerSpec {
  LayerAxis axis = LayerAxis::X;
  LayerSide side = LayerSide::Right;
  double coeff = 1.0;  // |b| at the layer boundary, > 0
};

/// The fixed multiplier exp(-alpha) with alpha = coeff * dist_to_side / eps.
/// Evaluation clamps to exactly zero once alpha exceeds 745 so that extreme
/// epsilon never produces overflow, NaN, or subnormal noise downstream.
struct ExponentialFactor {
  BoundaryLayerSpec spec;
  double epsilon = 1e-3;

  static constexpr double kClampAlpha = 745.0;

  double alpha(const Point& x) const;
  double value(const Point& x) const;
  /// Factor value plus first/second derivative along the layer axis
  /// (derivatives along the other axis are identically zero).
  void eval(const Point& x, double& e, double& de, double& d2e) const;
};

/// Smooth network plus per-layer (network, factor) products:
///   u0(x) + sum_i u_i(x) * exp(-alpha_i(x)).
/// A plain PINN is the degenerate case with no layer terms.
struct CompositeModel {
  MlpParams smooth;
  std::vector<std::pair<MlpParams, ExponentialFactor>> layer_terms;

  int input_dim() const { return smooth.input_dim(); }
};

enum class ModelMode { PINN, GKPINN };

/// Infer boundary-layer locations from the convection coefficient after
/// canonicalizing to the -eps Lap(u) + b.grad(u) + c u = f form. The sign of
/// each component must be constant over a 101-point-per-axis probe; a sign
/// change is an unsupported turning-point problem.
std::vector<BoundaryLayerSpec> infer_layers(const PerturbedProblem& problem);

ExponentialFactor build_factor(const BoundaryLayerSpec& spec, double epsilon);

/// Jet of the composite model via the product rule; terms whose clamped
/// factor is zero contribute nothing, derivatives included.
FieldJet composite_jet(const CompositeModel& model, const Point& x);

CompositeModel build_model(const PerturbedProblem& problem,
                           const std::vector<int>& hidden_sizes,
                           Activation activation, std::uint64_t seed,
                           ModelMode mode);

FieldEvaluator as_field(const CompositeModel& model);

/// Factor data frozen on a fixed point batch: the indices of columns where
/// the factor is nonzero and the factor/derivative values there.
struct FactorBatch {
  std::vector<Eigen::Index> active;
  RowVector e, de, d2e;
};

FactorBatch factor_batch(const ExponentialFactor& factor, const Matrix& points);

/// Composite model values on a point batch (no derivatives).
RowVector composite_values(const CompositeModel& model, const Matrix& points);

}  // namespace gkpinn
