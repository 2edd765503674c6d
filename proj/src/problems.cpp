#include "gkpinn/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace gkpinn {

namespace {

constexpr double kPi = 3.14159265358979323846;

Point column_point(const Matrix& pts, Eigen::Index j) {
  Point p{pts(0, j), 0.0};
  if (pts.rows() > 1) p[1] = pts(1, j);
  return p;
}

}  // namespace

double residual_from_jet(const PerturbedProblem& problem, const FieldJet& jet,
                         const Point& x) {
  const double s = static_cast<double>(problem.diffusion_sign);
  const auto bv = problem.b(x);
  const double cv = problem.c(x);
  const double fv = problem.f(x);
  switch (problem.kind) {
    case Kind::Steady1D:
      return s * problem.epsilon * jet.diag_hess[0] + bv[0] * jet.grad[0] +
             cv * jet.value - fv;
    case Kind::Steady2D:
      return s * problem.epsilon * (jet.diag_hess[0] + jet.diag_hess[1]) +
             bv[0] * jet.grad[0] + bv[1] * jet.grad[1] + cv * jet.value - fv;
    case Kind::Time1D:
      return jet.grad[1] + s * problem.epsilon * jet.diag_hess[0] +
             bv[0] * jet.grad[0] + cv * jet.value - fv;
  }
  return 0.0;
}

double residual(const PerturbedProblem& problem, const FieldEvaluator& field,
                const Point& x) {
  return residual_from_jet(problem, field(x), x);
}

ResidualCoeffs residual_coeffs(const PerturbedProblem& problem, const Matrix& points) {
  if (points.rows() != problem.dim())
    throw std::invalid_argument("residual_coeffs: point dimension does not match problem kind");
  const Eigen::Index n = points.cols();
  ResidualCoeffs out;
  out.bx.resize(n);
  out.c.resize(n);
  out.f.resize(n);
  if (problem.kind == Kind::Steady2D) out.by.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Point p = column_point(points, j);
    const auto bv = problem.b(p);
    out.bx(j) = bv[0];
    if (problem.kind == Kind::Steady2D) out.by(j) = bv[1];
    out.c(j) = problem.c(p);
    out.f(j) = problem.f(p);
  }
  return out;
}

RowVector residual_batch(const PerturbedProblem& problem, const ResidualCoeffs& coeffs,
                         const JetBatch& jets) {
  const double s = static_cast<double>(problem.diffusion_sign);
  RowVector r = coeffs.c.cwiseProduct(jets.value) - coeffs.f;
  r += coeffs.bx.cwiseProduct(jets.grad[0]);
  r += (s * problem.epsilon) * jets.hess[0];
  if (problem.kind == Kind::Steady2D) {
    r += coeffs.by.cwiseProduct(jets.grad[1]);
    r += (s * problem.epsilon) * jets.hess[1];
  } else if (problem.kind == Kind::Time1D) {
    r += jets.grad[1];
  }
  return r;
}

namespace {

PerturbedProblem example1(double eps) {
  PerturbedProblem p;
  p.kind = Kind::Steady1D;
  p.epsilon = eps;
  p.diffusion_sign = -1;
  p.b = [](const Point&) { return std::array<double, 2>{1.0, 0.0}; };
  p.c = [](const Point&) { return 0.0; };
  p.f = [eps](const Point& x) {
    return eps * kPi * kPi * std::sin(kPi * x[0]) + kPi * std::cos(kPi * x[0]);
  };
  p.boundary = [](const Point& x) { return x[0] >= 0.5 ? 1.0 : 0.0; };
  // sin(pi x) + (e^{(x-1)/eps} - e^{-1/eps}) / (1 - e^{-1/eps})
  p.analytic = [eps](const Point& x) {
    const double em = std::exp(-1.0 / eps);
    return std::sin(kPi * x[0]) + (std::exp((x[0] - 1.0) / eps) - em) / (1.0 - em);
  };
  return p;
}

PerturbedProblem example2(double eps) {
  PerturbedProblem p;
  p.kind = Kind::Steady1D;
  p.epsilon = eps;
  p.diffusion_sign = -1;
  p.b = [](const Point&) { return std::array<double, 2>{1.0, 0.0}; };
  p.c = [eps](const Point&) { return 1.0 + eps; };
  p.f = [](const Point&) { return 0.0; };
  p.boundary = [eps](const Point& x) {
    return x[0] >= 0.5 ? 1.0 + std::exp(-1.0)
                       : 1.0 + std::exp(-(1.0 + eps) / eps);
  };
  // e^{-x} + e^{(1+eps)(x-1)/eps}
  p.analytic = [eps](const Point& x) {
    return std::exp(-x[0]) + std::exp((1.0 + eps) * (x[0] - 1.0) / eps);
  };
  return p;
}

PerturbedProblem example3(double eps) {
  PerturbedProblem p;
  p.kind = Kind::Steady1D;
  p.epsilon = eps;
  p.diffusion_sign = +1;
  p.b = [eps](const Point&) { return std::array<double, 2>{1.0 + eps, 0.0}; };
  p.c = [](const Point&) { return 1.0; };
  p.f = [](const Point&) { return 0.0; };
  p.boundary = [](const Point& x) { return x[0] >= 0.5 ? 1.0 : 0.0; };
  // (e^{-x} - e^{-x/eps}) / (e^{-1} - e^{-1/eps})
  p.analytic = [eps](const Point& x) {
    const double denom = std::exp(-1.0) - std::exp(-1.0 / eps);
    return (std::exp(-x[0]) - std::exp(-x[0] / eps)) / denom;
  };
  return p;
}

PerturbedProblem example4(double eps) {
  PerturbedProblem p;
  p.kind = Kind::Steady2D;
  p.epsilon = eps;
  p.diffusion_sign = -1;
  p.b = [](const Point&) { return std::array<double, 2>{1.0, 0.0}; };
  p.c = [](const Point&) { return 0.0; };
  p.f = [](const Point&) { return 0.0; };
  p.boundary = [](const Point& pt) {
    const double x = pt[0], y = pt[1];
    if (y == 0.0 || y == 1.0) return 0.0;
    if (x == 0.0) return std::sin(kPi * y);
    return 2.0 * std::sin(kPi * y);  // x == 1
  };
  return p;
}

PerturbedProblem example5(double eps) {
  PerturbedProblem p;
  p.kind = Kind::Steady2D;
  p.epsilon = eps;
  p.diffusion_sign = +1;
  p.b = [](const Point&) { return std::array<double, 2>{0.0, 1.0}; };
  p.c = [](const Point&) { return 0.0; };
  p.f = [](const Point&) { return 0.0; };
  p.boundary = [](const Point& pt) {
    const double x = pt[0], y = pt[1];
    if (x == 0.0 || x == 1.0) return 0.0;
    if (y == 0.0) return std::sin(kPi * x);
    return 2.0 * std::sin(kPi * x);  // y == 1
  };
  return p;
}

PerturbedProblem example6(double eps) {
  PerturbedProblem p = example5(eps);
  p.b = [](const Point&) { return std::array<double, 2>{1.0, 1.0}; };
  return p;
}

PerturbedProblem example7(double eps) {
  PerturbedProblem p;
  p.kind = Kind::Time1D;
  p.epsilon = eps;
  p.diffusion_sign = -1;
  p.b = [](const Point&) { return std::array<double, 2>{-1.0, 0.0}; };
  p.c = [](const Point&) { return -1.0; };
  p.f = [](const Point&) { return 0.0; };
  p.boundary = [](const Point& pt) { return pt[0] >= 0.5 ? 1.0 : 0.0; };
  p.initial = [](const Point& pt) { return std::cos(2.0 * kPi * pt[0]); };
  return p;
}

PerturbedProblem example8(double eps) {
  PerturbedProblem p;
  p.kind = Kind::Time1D;
  p.epsilon = eps;
  p.diffusion_sign = -1;
  p.b = [](const Point&) { return std::array<double, 2>{1.0, 0.0}; };
  p.c = [](const Point&) { return 5.0; };
  p.f = [](const Point&) { return 0.0; };
  p.boundary = [](const Point& pt) { return pt[0] >= 0.5 ? 1.0 : 0.0; };
  p.initial = [](const Point& pt) { return std::sin(2.0 * kPi * pt[0]); };
  return p;
}

}  // namespace

std::vector<PerturbedProblem> builtin_examples(double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("builtin_examples: epsilon must be positive");
  return {example1(epsilon), example2(epsilon), example3(epsilon),
          example4(epsilon), example5(epsilon), example6(epsilon),
          example7(epsilon), example8(epsilon)};
}

PerturbedProblem builtin_example(int index, double epsilon) {
  if (index < 1 || index > 8)
    throw std::invalid_argument("builtin_example: index must be in 1..8");
  return builtin_examples(epsilon)[static_cast<std::size_t>(index - 1)];
}

RowVector analytic_on_grid(const PerturbedProblem& problem, const Matrix& points) {
  if (!problem.has_analytic())
    throw std::runtime_error("analytic_on_grid: problem has no analytic solution");
  if (points.rows() != problem.dim())
    throw std::invalid_argument("analytic_on_grid: point dimension mismatch");
  RowVector out(points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j)
    out(j) = problem.analytic(column_point(points, j));
  return out;
}

}  // namespace gkpinn
