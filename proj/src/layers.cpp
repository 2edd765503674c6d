#include "gkpinn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace gkpinn {

double ExponentialFactor::alpha(const Point& x) const {
  const double coord = x[static_cast<int>(spec.axis)];
  const double dist = spec.side == LayerSide::Right ? 1.0 - coord : coord;
  return spec.coeff * dist / epsilon;
}

double ExponentialFactor::value(const Point& x) const {
  const double a = alpha(x);
  return a > kClampAlpha ? 0.0 : std::exp(-a);
}

void ExponentialFactor::eval(const Point& x, double& e, double& de, double& d2e) const {
  const double a = alpha(x);
  if (a > kClampAlpha) {
    e = de = d2e = 0.0;
    return;
  }
  e = std::exp(-a);
  // d/dx exp(-coeff*(1-x)/eps) = +(coeff/eps) * e   (right layer)
  // d/dx exp(-coeff*x/eps)     = -(coeff/eps) * e   (left layer)
  const double rate = spec.coeff / epsilon;
  de = (spec.side == LayerSide::Right ? rate : -rate) * e;
  d2e = rate * (rate * e);
}

namespace {

struct SignProbe {
  bool any_pos = false;
  bool any_neg = false;
  double at_right = 0.0;
  double at_left = 0.0;
};

// Probes one component of the canonicalized convection coefficient on a
// 101-point grid per axis and records its sign pattern plus the values at
// the candidate layer boundaries (edge midpoints in 2D).
SignProbe probe_component(const PerturbedProblem& problem, int axis, double flip) {
  SignProbe probe;
  const int n = 101;
  const bool planar = problem.dim() == 2;
  for (int i = 0; i <= n - 1; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    for (int j = 0; j <= (planar ? n - 1 : 0); ++j) {
      Point p{0.0, 0.0};
      p[axis] = s;
      if (planar) p[1 - axis] = static_cast<double>(j) / (n - 1);
      const double v = flip * problem.b(p)[axis];
      if (v > 0.0) probe.any_pos = true;
      if (v < 0.0) probe.any_neg = true;
    }
  }
  Point edge{0.0, 0.0};
  if (planar) edge[1 - axis] = 0.5;
  edge[axis] = 1.0;
  probe.at_right = flip * problem.b(edge)[axis];
  edge[axis] = 0.0;
  probe.at_left = flip * problem.b(edge)[axis];
  return probe;
}

}  // namespace

std::vector<BoundaryLayerSpec> infer_layers(const PerturbedProblem& problem) {
  if (problem.kind == Kind::Time1D && problem.diffusion_sign == +1)
    throw std::invalid_argument(
        "infer_layers: time-dependent problem with +eps*u_xx alongside u_t is unsupported");
  // Canonical form -eps Lap(u) + b.grad(u) + c u = f: multiply the written
  // equation by -1 when it carries +eps.
  const double flip = problem.diffusion_sign == +1 ? -1.0 : 1.0;
  const int spatial_axes = problem.kind == Kind::Steady2D ? 2 : 1;
  std::vector<BoundaryLayerSpec> specs;
  for (int axis = 0; axis < spatial_axes; ++axis) {
    const SignProbe probe = probe_component(problem, axis, flip);
    if (probe.any_pos && probe.any_neg)
      throw std::invalid_argument(
          "infer_layers: convection coefficient changes sign (turning point); unsupported");
    if (!probe.any_pos && !probe.any_neg) continue;  // b component is zero: no layer
    BoundaryLayerSpec spec;
    spec.axis = static_cast<LayerAxis>(axis);
    spec.side = probe.any_pos ? LayerSide::Right : LayerSide::Left;
    spec.coeff = std::abs(probe.any_pos ? probe.at_right : probe.at_left);
    specs.push_back(spec);
  }
  return specs;
}

ExponentialFactor build_factor(const BoundaryLayerSpec& spec, double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("build_factor: epsilon must be positive");
  if (!(spec.coeff > 0.0))
    throw std::invalid_argument("build_factor: layer coefficient must be positive");
  return ExponentialFactor{spec, epsilon};
}

FieldJet composite_jet(const CompositeModel& model, const Point& x) {
  FieldJet jet = eval_jet(model.smooth, x);
  for (const auto& [net, factor] : model.layer_terms) {
    double e, de, d2e;
    factor.eval(x, e, de, d2e);
    if (e == 0.0) continue;  // clamped: the whole term vanishes
    const FieldJet term = eval_jet(net, x);
    const int a = static_cast<int>(factor.spec.axis);
    jet.value += term.value * e;
    for (int k = 0; k < net.input_dim(); ++k) {
      jet.grad[k] += term.grad[k] * e;
      jet.diag_hess[k] += term.diag_hess[k] * e;
    }
    jet.grad[a] += term.value * de;
    jet.diag_hess[a] += 2.0 * term.grad[a] * de + term.value * d2e;
  }
  return jet;
}

CompositeModel build_model(const PerturbedProblem& problem,
                           const std::vector<int>& hidden_sizes,
                           Activation activation, std::uint64_t seed,
                           ModelMode mode) {
  std::vector<int> sizes;
  sizes.push_back(problem.dim());
  sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  sizes.push_back(1);

  CompositeModel model;
  model.smooth = init_mlp(sizes, activation, seed);
  if (mode == ModelMode::GKPINN) {
    const auto specs = infer_layers(problem);
    for (std::size_t i = 0; i < specs.size(); ++i) {
      MlpParams net = init_mlp(sizes, activation, seed + 1 + i);
      model.layer_terms.emplace_back(std::move(net),
                                     build_factor(specs[i], problem.epsilon));
    }
  }
  return model;
}

FieldEvaluator as_field(const CompositeModel& model) {
  return [model](const Point& x) { return composite_jet(model, x); };
}

FactorBatch factor_batch(const ExponentialFactor& factor, const Matrix& points) {
  FactorBatch out;
  std::vector<double> e, de, d2e;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    Point p{points(0, j), points.rows() > 1 ? points(1, j) : 0.0};
    double ev, dev, d2ev;
    factor.eval(p, ev, dev, d2ev);
    if (ev == 0.0) continue;
    out.active.push_back(j);
    e.push_back(ev);
    de.push_back(dev);
    d2e.push_back(d2ev);
  }
  out.e = Eigen::Map<const RowVector>(e.data(), static_cast<Eigen::Index>(e.size()));
  out.de = Eigen::Map<const RowVector>(de.data(), static_cast<Eigen::Index>(de.size()));
  out.d2e = Eigen::Map<const RowVector>(d2e.data(), static_cast<Eigen::Index>(d2e.size()));
  return out;
}

RowVector composite_values(const CompositeModel& model, const Matrix& points) {
  ForwardCache cache;
  const ChannelMask mask = ChannelMask::value_only();
  RowVector values = mlp_forward(model.smooth, points, mask, cache).value;
  for (const auto& [net, factor] : model.layer_terms) {
    const FactorBatch fb = factor_batch(factor, points);
    if (fb.active.empty()) continue;
    Matrix sub(points.rows(), static_cast<Eigen::Index>(fb.active.size()));
    for (std::size_t i = 0; i < fb.active.size(); ++i) sub.col(i) = points.col(fb.active[i]);
    ForwardCache sub_cache;
    const RowVector term = mlp_forward(net, sub, mask, sub_cache).value;
    for (std::size_t i = 0; i < fb.active.size(); ++i)
      values(fb.active[i]) += term(static_cast<Eigen::Index>(i)) * fb.e(static_cast<Eigen::Index>(i));
  }
  return values;
}

}  // namespace gkpinn
