#pragma once

#include "gkpinn/layers.hpp"
#include "gkpinn/problems.hpp"
#include "gkpinn/sampling.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gkpinn {

/// Per-collocation-point attention weights, updated as an exponential moving
/// average of normalized residual magnitudes. Starting from values in [0,1]
/// the weights stay in [0,1] forever.
struct RbaWeights {
  RowVector lambda;
  double eta_star = 1e-4;
};

/// How the weights enter the residual loss: (lambda*R)^2 or lambda*R^2.
enum class RbaForm { SquaredProduct, WeightedSquare };

struct AdamParams {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

/// First/second moment accumulators for one network.
struct AdamState {
  MlpGrads m;
  MlpGrads v;
  std::int64_t step = 0;

  static AdamState zeros_like(const MlpParams& p) {
    return AdamState{MlpGrads::zeros_like(p), MlpGrads::zeros_like(p), 0};
  }
};

struct LossBreakdown {
  double ic = 0.0;
  double bc = 0.0;
  double r = 0.0;
  double total = 0.0;
};

struct LossTerms {
  LossBreakdown loss;
  RowVector residuals;  // raw residuals at the interior points
};

struct TrainConfig {
  std::int64_t iterations = 50000;
  AdamParams adam;
  bool rba_enabled = true;
  double eta_star = 1e-4;
  RbaForm rba_form = RbaForm::SquaredProduct;
  std::uint64_t seed = 0;
  std::int64_t history_stride = 100;
  int workers = 1;  // member networks evaluated concurrently when > 1
};

struct HistoryRow {
  std::int64_t iter = 0;
  LossBreakdown loss;
};

using TrainHistory = std::vector<HistoryRow>;

/// Thrown when a loss or gradient turns non-finite; carries the iteration.
class TrainingAbort : public std::runtime_error {
 public:
  TrainingAbort(std::int64_t iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  std::int64_t iteration() const { return iteration_; }

 private:
  std::int64_t iteration_;
};

/// Loss of Eq.-style form L = L_ic + L_bc + L_r evaluated through a generic
/// field: L_r is the (optionally RBA-weighted) mean squared residual over
/// interior points, L_bc / L_ic are mean squared Dirichlet / initial
/// mismatches. Raw residuals are returned for the RBA update.
LossTerms assemble_loss(const FieldEvaluator& field, const PerturbedProblem& problem,
                        const PointSets& points,
                        const std::optional<RbaWeights>& rba = std::nullopt,
                        RbaForm form = RbaForm::SquaredProduct);

/// lambda_i <- (1 - eta*) lambda_i + eta* |e_i| / max|e|; returns the input
/// unchanged when all residuals vanish.
RbaWeights rba_update(const RbaWeights& weights, const RowVector& residuals);

/// One Adam update with bias correction, in place.
void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state,
               const AdamParams& hyper);

/// Invoked during training every `stride` iterations (and once after the
/// final iteration) so callers can log test metrics against the live model.
using TrainCallback = std::function<void(std::int64_t iter, const CompositeModel&)>;

/// Full-batch training loop: assemble loss, backpropagate through every
/// member network jointly, Adam-update each network, update RBA weights.
/// The returned history holds rows for iteration 0, every history_stride-th
/// iteration, and a final row at iteration == config.iterations describing
/// the trained model. Deterministic for a fixed worker count.
TrainHistory train(CompositeModel& model, const PerturbedProblem& problem,
                   const PointSets& points, const TrainConfig& config,
                   std::int64_t eval_stride = 0, const TrainCallback& callback = {});

}  // namespace gkpinn
