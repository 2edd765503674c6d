#include "gkpinn/training.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace gkpinn {

namespace {

ChannelMask interior_mask(Kind kind) {
  ChannelMask m;
  switch (kind) {
    case Kind::Steady1D:
      m.hess[0] = true;
      break;
    case Kind::Steady2D:
      m.hess[0] = m.hess[1] = true;
      break;
    case Kind::Time1D:
      m.hess[0] = true;
      m.grad[1] = true;  // u_t; no second time derivative needed
      break;
  }
  return m;
}

Point column_point(const Matrix& pts, Eigen::Index j) {
  return Point{pts(0, j), pts.rows() > 1 ? pts(1, j) : 0.0};
}

RowVector boundary_targets(const PerturbedProblem& problem, const Matrix& pts) {
  RowVector t(pts.cols());
  for (Eigen::Index j = 0; j < pts.cols(); ++j)
    t(j) = problem.boundary(column_point(pts, j));
  return t;
}

RowVector initial_targets(const PerturbedProblem& problem, const Matrix& pts) {
  RowVector t(pts.cols());
  for (Eigen::Index j = 0; j < pts.cols(); ++j)
    t(j) = problem.initial(column_point(pts, j));
  return t;
}

double weighted_residual_loss(const RowVector& r, const RowVector* lambda, RbaForm form) {
  if (lambda == nullptr) return r.squaredNorm() / static_cast<double>(r.size());
  if (form == RbaForm::SquaredProduct)
    return lambda->cwiseProduct(r).squaredNorm() / static_cast<double>(r.size());
  return lambda->cwiseProduct(r.cwiseAbs2()).sum() / static_cast<double>(r.size());
}

// dLr/dR for the two weighting forms.
RowVector residual_loss_adjoint(const RowVector& r, const RowVector* lambda, RbaForm form) {
  const double n = static_cast<double>(r.size());
  if (lambda == nullptr) return (2.0 / n) * r;
  if (form == RbaForm::SquaredProduct)
    return (2.0 / n) * lambda->cwiseAbs2().cwiseProduct(r);
  return (2.0 / n) * lambda->cwiseProduct(r);
}

// Per-member-network batch state on one point set.
struct MemberBatch {
  Matrix points;   // restricted to active columns for layer terms
  FactorBatch fb;  // empty active list means "term never contributes"
  ForwardCache cache;
  JetBatch jets;
  bool is_layer = false;
  int axis = 0;
};

MemberBatch make_member_batch(const Matrix& pts, const ExponentialFactor* factor) {
  MemberBatch mb;
  if (factor == nullptr) {
    mb.points = pts;
    return mb;
  }
  mb.is_layer = true;
  mb.axis = static_cast<int>(factor->spec.axis);
  mb.fb = factor_batch(*factor, pts);
  mb.points.resize(pts.rows(), static_cast<Eigen::Index>(mb.fb.active.size()));
  for (std::size_t i = 0; i < mb.fb.active.size(); ++i)
    mb.points.col(static_cast<Eigen::Index>(i)) = pts.col(mb.fb.active[i]);
  return mb;
}

// Scatter-add this member's contribution into the composite jets.
void accumulate_composite(const MemberBatch& mb, const ChannelMask& mask, int dim,
                          JetBatch& out) {
  if (!mb.is_layer) {
    out.value += mb.jets.value;
    for (int k = 0; k < dim; ++k) {
      if (mask.grad_active(k)) out.grad[k] += mb.jets.grad[k];
      if (mask.hess[k]) out.hess[k] += mb.jets.hess[k];
    }
    return;
  }
  const int a = mb.axis;
  for (std::size_t i = 0; i < mb.fb.active.size(); ++i) {
    const Eigen::Index src = static_cast<Eigen::Index>(i);
    const Eigen::Index dst = mb.fb.active[i];
    const double e = mb.fb.e(src), de = mb.fb.de(src), d2e = mb.fb.d2e(src);
    out.value(dst) += mb.jets.value(src) * e;
    for (int k = 0; k < dim; ++k) {
      if (mask.grad_active(k)) out.grad[k](dst) += mb.jets.grad[k](src) * e;
      if (mask.hess[k]) out.hess[k](dst) += mb.jets.hess[k](src) * e;
    }
    if (mask.grad_active(a)) out.grad[a](dst) += mb.jets.value(src) * de;
    if (mask.hess[a])
      out.hess[a](dst) += 2.0 * mb.jets.grad[a](src) * de + mb.jets.value(src) * d2e;
  }
}

// Gather the composite adjoint back onto this member's own jet channels.
JetBatch member_adjoint(const MemberBatch& mb, const ChannelMask& mask, int dim,
                        const JetBatch& composite_adj) {
  JetBatch adj = JetBatch::zeros(dim, mb.points.cols(), mask);
  if (!mb.is_layer) {
    adj.value = composite_adj.value;
    for (int k = 0; k < dim; ++k) {
      if (mask.grad_active(k)) adj.grad[k] = composite_adj.grad[k];
      if (mask.hess[k]) adj.hess[k] = composite_adj.hess[k];
    }
    return adj;
  }
  const int a = mb.axis;
  for (std::size_t i = 0; i < mb.fb.active.size(); ++i) {
    const Eigen::Index dst = static_cast<Eigen::Index>(i);
    const Eigen::Index src = mb.fb.active[i];
    const double e = mb.fb.e(dst), de = mb.fb.de(dst), d2e = mb.fb.d2e(dst);
    adj.value(dst) += composite_adj.value(src) * e;
    for (int k = 0; k < dim; ++k) {
      if (mask.grad_active(k)) adj.grad[k](dst) += composite_adj.grad[k](src) * e;
      if (mask.hess[k]) adj.hess[k](dst) += composite_adj.hess[k](src) * e;
    }
    if (mask.grad_active(a)) adj.value(dst) += composite_adj.grad[a](src) * de;
    if (mask.hess[a]) {
      adj.value(dst) += composite_adj.hess[a](src) * d2e;
      adj.grad[a](dst) += 2.0 * composite_adj.hess[a](src) * de;
    }
  }
  return adj;
}

void run_over_members(std::size_t count, int workers,
                      const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t active = std::min<std::size_t>(count, static_cast<std::size_t>(workers));
  // Static assignment keeps results independent of scheduling.
  for (std::size_t w = 0; w < active; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += active) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

LossTerms assemble_loss(const FieldEvaluator& field, const PerturbedProblem& problem,
                        const PointSets& points, const std::optional<RbaWeights>& rba,
                        RbaForm form) {
  if (points.interior.rows() != problem.dim())
    throw std::invalid_argument("assemble_loss: point dimension does not match problem kind");
  LossTerms out;
  const Eigen::Index nr = points.interior.cols();
  out.residuals.resize(nr);
  for (Eigen::Index j = 0; j < nr; ++j) {
    const Point p = column_point(points.interior, j);
    out.residuals(j) = residual(problem, field, p);
  }
  const RowVector* lambda = nullptr;
  if (rba.has_value()) {
    if (rba->lambda.size() != nr)
      throw std::invalid_argument("assemble_loss: RBA weight count mismatch");
    lambda = &rba->lambda;
  }
  out.loss.r = weighted_residual_loss(out.residuals, lambda, form);

  double bc = 0.0;
  for (Eigen::Index j = 0; j < points.boundary.cols(); ++j) {
    const Point p = column_point(points.boundary, j);
    const double diff = field(p).value - problem.boundary(p);
    bc += diff * diff;
  }
  out.loss.bc = points.boundary.cols() > 0 ? bc / points.boundary.cols() : 0.0;

  double ic = 0.0;
  for (Eigen::Index j = 0; j < points.initial.cols(); ++j) {
    const Point p = column_point(points.initial, j);
    const double diff = field(p).value - problem.initial(p);
    ic += diff * diff;
  }
  out.loss.ic = points.initial.cols() > 0 ? ic / points.initial.cols() : 0.0;

  out.loss.total = out.loss.ic + out.loss.bc + out.loss.r;
  if (!std::isfinite(out.loss.total))
    throw std::runtime_error("assemble_loss: non-finite loss");
  return out;
}

RbaWeights rba_update(const RbaWeights& weights, const RowVector& residuals) {
  if (weights.lambda.size() != residuals.size())
    throw std::invalid_argument("rba_update: residual count mismatch");
  const double max_abs = residuals.cwiseAbs().maxCoeff();
  if (max_abs == 0.0) return weights;  // division guard: leave weights untouched
  RbaWeights out = weights;
  const double eta = weights.eta_star;
  out.lambda = (1.0 - eta) * weights.lambda + (eta / max_abs) * residuals.cwiseAbs();
  return out;
}

void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state,
               const AdamParams& hyper) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
  auto update = [&](auto& theta, auto& m, auto& v, const auto& g) {
    m = hyper.beta1 * m + (1.0 - hyper.beta1) * g;
    v = hyper.beta2 * v.array().matrix() + (1.0 - hyper.beta2) * g.array().square().matrix();
    theta.array() -=
        hyper.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + hyper.eps_hat);
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    update(params.weights[l], state.m.weights[l], state.v.weights[l], grads.weights[l]);
    update(params.biases[l], state.m.biases[l], state.v.biases[l], grads.biases[l]);
  }
}

TrainHistory train(CompositeModel& model, const PerturbedProblem& problem,
                   const PointSets& points, const TrainConfig& config,
                   std::int64_t eval_stride, const TrainCallback& callback) {
  const int dim = problem.dim();
  if (points.interior.rows() != dim)
    throw std::invalid_argument("train: point dimension does not match problem kind");
  const Eigen::Index nr = points.interior.cols();
  const Eigen::Index nb = points.boundary.cols();
  const Eigen::Index ni = points.initial.cols();
  const ChannelMask mask = interior_mask(problem.kind);
  const ChannelMask vmask = ChannelMask::value_only();

  // Frozen per-run data.
  const ResidualCoeffs coeffs = residual_coeffs(problem, points.interior);
  const RowVector bc_target = boundary_targets(problem, points.boundary);
  const RowVector ic_target = ni > 0 ? initial_targets(problem, points.initial) : RowVector();

  // Member 0 is the smooth net; members 1.. are layer terms.
  const std::size_t members = 1 + model.layer_terms.size();
  std::vector<MlpParams*> nets(members);
  nets[0] = &model.smooth;
  std::vector<MemberBatch> mb_int(members), mb_bc(members), mb_ic(members);
  mb_int[0] = make_member_batch(points.interior, nullptr);
  mb_bc[0] = make_member_batch(points.boundary, nullptr);
  if (ni > 0) mb_ic[0] = make_member_batch(points.initial, nullptr);
  for (std::size_t i = 0; i < model.layer_terms.size(); ++i) {
    auto& [net, factor] = model.layer_terms[i];
    nets[i + 1] = &net;
    mb_int[i + 1] = make_member_batch(points.interior, &factor);
    mb_bc[i + 1] = make_member_batch(points.boundary, &factor);
    if (ni > 0) mb_ic[i + 1] = make_member_batch(points.initial, &factor);
  }

  std::vector<AdamState> adam(members);
  std::vector<MlpGrads> grads(members);
  for (std::size_t m = 0; m < members; ++m) {
    adam[m] = AdamState::zeros_like(*nets[m]);
    grads[m] = MlpGrads::zeros_like(*nets[m]);
  }

  RbaWeights rba;
  rba.eta_star = config.eta_star;
  if (config.rba_enabled) rba.lambda = RowVector::Ones(nr);

  TrainHistory history;
  JetBatch composite;
  RowVector boundary_values(nb), initial_values(ni);

  auto forward_all = [&](std::size_t m) {
    if (mb_int[m].points.cols() > 0)
      mb_int[m].jets = mlp_forward(*nets[m], mb_int[m].points, mask, mb_int[m].cache);
    if (mb_bc[m].points.cols() > 0)
      mb_bc[m].jets = mlp_forward(*nets[m], mb_bc[m].points, vmask, mb_bc[m].cache);
    if (ni > 0 && mb_ic[m].points.cols() > 0)
      mb_ic[m].jets = mlp_forward(*nets[m], mb_ic[m].points, vmask, mb_ic[m].cache);
  };

  auto evaluate = [&]() -> LossTerms {
    run_over_members(members, config.workers, forward_all);
    composite = JetBatch::zeros(dim, nr, mask);
    boundary_values.setZero();
    if (ni > 0) initial_values.setZero();
    for (std::size_t m = 0; m < members; ++m) {
      accumulate_composite(mb_int[m], mask, dim, composite);
      if (mb_bc[m].points.cols() > 0) {
        if (!mb_bc[m].is_layer) {
          boundary_values += mb_bc[m].jets.value;
        } else {
          for (std::size_t i = 0; i < mb_bc[m].fb.active.size(); ++i)
            boundary_values(mb_bc[m].fb.active[i]) +=
                mb_bc[m].jets.value(static_cast<Eigen::Index>(i)) *
                mb_bc[m].fb.e(static_cast<Eigen::Index>(i));
        }
      }
      if (ni > 0 && mb_ic[m].points.cols() > 0) {
        if (!mb_ic[m].is_layer) {
          initial_values += mb_ic[m].jets.value;
        } else {
          for (std::size_t i = 0; i < mb_ic[m].fb.active.size(); ++i)
            initial_values(mb_ic[m].fb.active[i]) +=
                mb_ic[m].jets.value(static_cast<Eigen::Index>(i)) *
                mb_ic[m].fb.e(static_cast<Eigen::Index>(i));
        }
      }
    }
    LossTerms terms;
    terms.residuals = residual_batch(problem, coeffs, composite);
    const RowVector* lambda = config.rba_enabled ? &rba.lambda : nullptr;
    terms.loss.r = weighted_residual_loss(terms.residuals, lambda, config.rba_form);
    terms.loss.bc = nb > 0 ? (boundary_values - bc_target).squaredNorm() / nb : 0.0;
    terms.loss.ic = ni > 0 ? (initial_values - ic_target).squaredNorm() / ni : 0.0;
    terms.loss.total = terms.loss.ic + terms.loss.bc + terms.loss.r;
    return terms;
  };

  for (std::int64_t iter = 0; iter < config.iterations; ++iter) {
    LossTerms terms = evaluate();
    if (!std::isfinite(terms.loss.total))
      throw TrainingAbort(iter, "train: non-finite loss at iteration " + std::to_string(iter));
    if (iter % config.history_stride == 0) history.push_back({iter, terms.loss});
    if (callback && eval_stride > 0 && iter % eval_stride == 0) callback(iter, model);

    // Adjoint of the total loss w.r.t. the composite jets.
    const RowVector* lambda = config.rba_enabled ? &rba.lambda : nullptr;
    const RowVector dr = residual_loss_adjoint(terms.residuals, lambda, config.rba_form);
    JetBatch cadj = JetBatch::zeros(dim, nr, mask);
    cadj.value = dr.cwiseProduct(coeffs.c);
    cadj.grad[0] = dr.cwiseProduct(coeffs.bx);
    cadj.hess[0] = (problem.diffusion_sign * problem.epsilon) * dr;
    if (problem.kind == Kind::Steady2D) {
      cadj.grad[1] = dr.cwiseProduct(coeffs.by);
      cadj.hess[1] = (problem.diffusion_sign * problem.epsilon) * dr;
    } else if (problem.kind == Kind::Time1D) {
      cadj.grad[1] = dr;
    }
    const RowVector bc_adj = nb > 0 ? RowVector((2.0 / nb) * (boundary_values - bc_target))
                                    : RowVector();
    const RowVector ic_adj = ni > 0 ? RowVector((2.0 / ni) * (initial_values - ic_target))
                                    : RowVector();

    run_over_members(members, config.workers, [&](std::size_t m) {
      MlpGrads& g = grads[m];
      for (auto& w : g.weights) w.setZero();
      for (auto& b : g.biases) b.setZero();
      if (mb_int[m].points.cols() > 0) {
        const JetBatch adj = member_adjoint(mb_int[m], mask, dim, cadj);
        mlp_backward(*nets[m], mb_int[m].cache, adj, g);
      }
      if (nb > 0 && mb_bc[m].points.cols() > 0) {
        JetBatch adj = JetBatch::zeros(dim, mb_bc[m].points.cols(), vmask);
        if (!mb_bc[m].is_layer) {
          adj.value = bc_adj;
        } else {
          for (std::size_t i = 0; i < mb_bc[m].fb.active.size(); ++i)
            adj.value(static_cast<Eigen::Index>(i)) =
                bc_adj(mb_bc[m].fb.active[i]) * mb_bc[m].fb.e(static_cast<Eigen::Index>(i));
        }
        mlp_backward(*nets[m], mb_bc[m].cache, adj, g);
      }
      if (ni > 0 && mb_ic[m].points.cols() > 0) {
        JetBatch adj = JetBatch::zeros(dim, mb_ic[m].points.cols(), vmask);
        if (!mb_ic[m].is_layer) {
          adj.value = ic_adj;
        } else {
          for (std::size_t i = 0; i < mb_ic[m].fb.active.size(); ++i)
            adj.value(static_cast<Eigen::Index>(i)) =
                ic_adj(mb_ic[m].fb.active[i]) * mb_ic[m].fb.e(static_cast<Eigen::Index>(i));
        }
        mlp_backward(*nets[m], mb_ic[m].cache, adj, g);
      }
    });

    for (std::size_t m = 0; m < members; ++m) {
      if (!grads[m].all_finite())
        throw TrainingAbort(iter,
                            "train: non-finite gradient at iteration " + std::to_string(iter));
      adam_step(*nets[m], grads[m], adam[m], config.adam);
    }
    if (config.rba_enabled) rba = rba_update(rba, terms.residuals);
  }

  const LossTerms final_terms = evaluate();
  if (!std::isfinite(final_terms.loss.total))
    throw TrainingAbort(config.iterations, "train: non-finite final loss");
  history.push_back({config.iterations, final_terms.loss});
  if (callback) callback(config.iterations, model);
  return history;
}

}  // namespace gkpinn
