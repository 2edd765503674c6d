#include "gkpinn/training.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gkpinn;
using gkpinn::test::rel_err;

TEST_CASE("assemble_loss vanishes on the exact solution") {
  const PerturbedProblem p = builtin_example(1, 0.1);
  PointSets points = sample_problem_points(p, 200, 20, 0, 3);
  const LossTerms terms =
      assemble_loss(gkpinn::test::analytic_jet_example(1, 0.1), p, points);
  CHECK(terms.loss.total < 1e-10);
  CHECK(terms.loss.total == terms.loss.ic + terms.loss.bc + terms.loss.r);
}

TEST_CASE("assemble_loss boundary term for the zero field") {
  const PerturbedProblem p = builtin_example(1, 0.1);
  PointSets points;
  points.interior = Matrix::Constant(1, 4, 0.5);
  points.boundary.resize(1, 2);
  points.boundary << 0.0, 1.0;
  points.boundary_face = {0, 1};
  const FieldEvaluator zero = [](const Point&) { return FieldJet{}; };
  const LossTerms terms = assemble_loss(zero, p, points);
  // u(0)=0 matched, u(1)=1 missed: (0 + 1)/2.
  CHECK(terms.loss.bc == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("assemble_loss RBA weighting") {
  const PerturbedProblem p = builtin_example(1, 0.1);
  PointSets points;
  points.interior = latin_hypercube(32, 1, 5);
  points.boundary.resize(1, 2);
  points.boundary << 0.0, 1.0;
  points.boundary_face = {0, 1};
  const FieldEvaluator zero = [](const Point&) { return FieldJet{}; };

  RbaWeights rba;
  rba.lambda = RowVector::Zero(32);
  const LossTerms weighted = assemble_loss(zero, p, points, rba);
  CHECK(weighted.loss.r == 0.0);

  RbaWeights ones;
  ones.lambda = RowVector::Ones(32);
  const LossTerms unweighted = assemble_loss(zero, p, points);
  const LossTerms lambda_one = assemble_loss(zero, p, points, ones);
  CHECK(lambda_one.loss.r == doctest::Approx(unweighted.loss.r).epsilon(1e-15));
  // Raw residuals are retained either way.
  CHECK(weighted.residuals.size() == 32);
  CHECK(weighted.residuals.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("rba_update fixed point and arithmetic") {
  RbaWeights w;
  w.lambda = RowVector::Ones(8);
  w.eta_star = 0.1;
  const RowVector equal = RowVector::Constant(8, 0.37);
  const RbaWeights fixed = rba_update(w, equal);
  for (int i = 0; i < 8; ++i) CHECK(fixed.lambda(i) == doctest::Approx(1.0).epsilon(1e-15));

  RowVector mixed = RowVector::Constant(8, 2.0);
  mixed(3) = 0.0;
  const RbaWeights updated = rba_update(w, mixed);
  CHECK(updated.lambda(3) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(updated.lambda(0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rba_update zero-residual guard") {
  RbaWeights w;
  w.lambda = RowVector::Constant(5, 0.42);
  const RbaWeights out = rba_update(w, RowVector::Zero(5));
  CHECK(out.lambda == w.lambda);
}

TEST_CASE("rba weights stay in [0,1] under random iteration") {
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> rdist(-3.0, 3.0);
  RbaWeights w;
  w.lambda.resize(16);
  for (int i = 0; i < 16; ++i) w.lambda(i) = u01(eng);
  w.eta_star = 0.05;
  RowVector r(16);
  for (int it = 0; it < 10000; ++it) {
    for (int i = 0; i < 16; ++i) r(i) = rdist(eng);
    w = rba_update(w, r);
    CHECK(w.lambda.minCoeff() >= 0.0);
    CHECK(w.lambda.maxCoeff() <= 1.0);
  }
}

TEST_CASE("adam_step oracles") {
  MlpParams p = init_mlp({1, 4, 1}, Activation::Tanh, 0);
  const MlpParams before = p;
  AdamState state = AdamState::zeros_like(p);
  const MlpGrads zero = MlpGrads::zeros_like(p);
  adam_step(p, zero, state, AdamParams{});
  for (std::size_t l = 0; l < p.weights.size(); ++l) CHECK(p.weights[l] == before.weights[l]);

  // Fresh state, scalar gradient 1: bias-corrected first step is
  // -lr / (1 + eps_hat).
  MlpGrads g = MlpGrads::zeros_like(p);
  g.biases[1](0) = 1.0;
  AdamState s2 = AdamState::zeros_like(p);
  MlpParams q = before;
  adam_step(q, g, s2, AdamParams{});
  const double delta = q.biases[1](0) - before.biases[1](0);
  CHECK(delta == doctest::Approx(-0.001 / (1.0 + 1e-8)).epsilon(1e-12));
  CHECK(delta == doctest::Approx(-9.9999999e-4).epsilon(1e-7));
}

TEST_CASE("adam_step odd symmetry in the gradient") {
  MlpParams base = init_mlp({2, 6, 1}, Activation::Sigmoid, 9);
  MlpGrads g = MlpGrads::zeros_like(base);
  std::mt19937_64 eng(31);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (auto& w : g.weights)
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) w(r, c) = d(eng);
  MlpGrads neg = MlpGrads::zeros_like(base);
  for (std::size_t l = 0; l < g.weights.size(); ++l) neg.weights[l] = -g.weights[l];

  MlpParams plus = base, minus = base;
  AdamState sp = AdamState::zeros_like(base), sm = AdamState::zeros_like(base);
  adam_step(plus, g, sp, AdamParams{});
  adam_step(minus, neg, sm, AdamParams{});
  for (std::size_t l = 0; l < base.weights.size(); ++l) {
    const Matrix dp = plus.weights[l] - base.weights[l];
    const Matrix dm = minus.weights[l] - base.weights[l];
    CHECK((dp + dm).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("zero-iteration training is a no-op") {
  const PerturbedProblem p = builtin_example(1, 0.1);
  PointSets points = sample_problem_points(p, 50, 10, 0, 1);
  CompositeModel model = build_model(p, {8}, Activation::Sigmoid, 2, ModelMode::GKPINN);
  const CompositeModel before = model;
  TrainConfig cfg;
  cfg.iterations = 0;
  const TrainHistory history = train(model, p, points, cfg);
  REQUIRE(history.size() == 1);
  CHECK(history[0].iter == 0);
  for (std::size_t l = 0; l < model.smooth.weights.size(); ++l)
    CHECK(model.smooth.weights[l] == before.smooth.weights[l]);
  CHECK(model.layer_terms[0].first.weights[0] == before.layer_terms[0].first.weights[0]);
}

TEST_CASE("training is deterministic and decreases the loss") {
  const PerturbedProblem p = builtin_example(1, 0.1);
  PointSets points = sample_problem_points(p, 100, 10, 0, 1);
  TrainConfig cfg;
  cfg.iterations = 200;
  cfg.history_stride = 50;

  CompositeModel m1 = build_model(p, {16, 16}, Activation::Sigmoid, 4, ModelMode::GKPINN);
  CompositeModel m2 = build_model(p, {16, 16}, Activation::Sigmoid, 4, ModelMode::GKPINN);
  const TrainHistory h1 = train(m1, p, points, cfg);
  const TrainHistory h2 = train(m2, p, points, cfg);
  REQUIRE(h1.size() == h2.size());
  for (std::size_t i = 0; i < h1.size(); ++i) {
    CHECK(h1[i].iter == h2[i].iter);
    CHECK(h1[i].loss.total == h2[i].loss.total);
    CHECK(h1[i].loss.total == h1[i].loss.ic + h1[i].loss.bc + h1[i].loss.r);
    CHECK(std::isfinite(h1[i].loss.total));
  }
  CHECK(m1.smooth.weights[1] == m2.smooth.weights[1]);
  CHECK(h1.back().loss.total < h1.front().loss.total);
  CHECK(h1.back().iter == 200);
}

TEST_CASE("worker count does not change results") {
  const PerturbedProblem p = builtin_example(6, 0.05);
  PointSets points = sample_problem_points(p, 80, 16, 0, 2);
  TrainConfig serial, threaded;
  serial.iterations = threaded.iterations = 30;
  threaded.workers = 2;
  CompositeModel m1 = build_model(p, {10}, Activation::Tanh, 5, ModelMode::GKPINN);
  CompositeModel m2 = m1;
  const TrainHistory h1 = train(m1, p, points, serial);
  const TrainHistory h2 = train(m2, p, points, threaded);
  for (std::size_t i = 0; i < h1.size(); ++i)
    CHECK(h1[i].loss.total == h2[i].loss.total);
  CHECK(m1.smooth.weights[0] == m2.smooth.weights[0]);
  CHECK(m1.layer_terms[1].first.weights[0] == m2.layer_terms[1].first.weights[0]);
}

TEST_CASE("train gradient path matches finite differences of the total loss") {
  // End-to-end check of the composite backward pass: perturb one parameter,
  // re-assemble the loss, compare to a one-step gradient via a tiny train().
  const PerturbedProblem p = builtin_example(8, 0.05);
  PointSets points = sample_problem_points(p, 24, 8, 8, 6);
  CompositeModel model = build_model(p, {7, 5}, Activation::Tanh, 8, ModelMode::GKPINN);
  REQUIRE(model.layer_terms.size() == 1);

  // Gradient via the public API: run one Adam step with beta1=beta2=0 and a
  // tiny lr; the parameter delta is -lr * g / (|g| + eps_hat), so recover g's
  // sign pattern... instead verify directly against assemble_loss finite
  // differences through the generic field evaluator.
  const auto loss_of = [&](const CompositeModel& m) {
    return assemble_loss(as_field(m), p, points, std::nullopt).loss.total;
  };

  TrainConfig cfg;
  cfg.iterations = 1;
  cfg.rba_enabled = false;
  cfg.adam.lr = 1e-12;  // keep the model essentially frozen
  CompositeModel trained = model;
  train(trained, p, points, cfg);

  // Adam's first step moves every parameter by -lr*sign(g) (bias-corrected),
  // so compare movement direction with the FD gradient sign for a sample of
  // parameters with non-negligible gradients.
  std::mt19937_64 eng(12);
  int checked = 0;
  for (int attempt = 0; attempt < 200 && checked < 25; ++attempt) {
    const int member = static_cast<int>(eng() % 2);
    MlpParams& nets = member == 0 ? model.smooth : model.layer_terms[0].first;
    const MlpParams& trained_net = member == 0 ? trained.smooth : trained.layer_terms[0].first;
    const int layer = static_cast<int>(eng() % nets.weights.size());
    const int r = static_cast<int>(eng() % nets.weights[layer].rows());
    const int c = static_cast<int>(eng() % nets.weights[layer].cols());
    const double h = 1e-6;
    const double orig = nets.weights[layer](r, c);
    nets.weights[layer](r, c) = orig + h;
    const double up = loss_of(model);
    nets.weights[layer](r, c) = orig - h;
    const double dn = loss_of(model);
    nets.weights[layer](r, c) = orig;
    const double fd = (up - dn) / (2.0 * h);
    if (std::abs(fd) < 1e-7) continue;
    const double moved = trained_net.weights[layer](r, c) - orig;
    CHECK(moved * fd < 0.0);  // moved against the gradient
    ++checked;
  }
  CHECK(checked >= 25);
}

TEST_CASE("training aborts with the iteration index on non-finite loss") {
  const PerturbedProblem p = builtin_example(1, 0.1);
  PointSets points = sample_problem_points(p, 20, 4, 0, 1);
  CompositeModel model = build_model(p, {8}, Activation::Sigmoid, 1, ModelMode::PINN);
  model.smooth.weights[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
  TrainConfig cfg;
  cfg.iterations = 5;
  try {
    train(model, p, points, cfg);
    FAIL("expected TrainingAbort");
  } catch (const TrainingAbort& abort) {
    CHECK(abort.iteration() == 0);
  }
}
