#pragma once

// Shared test oracles: finite-difference derivatives, exact jets of the
// closed-form benchmark solutions, and tolerance helpers. Everything here is
// independent of the library's own derivative paths.

#include "gkpinn/mlp.hpp"
#include "gkpinn/problems.hpp"

#include <cmath>
#include <functional>

namespace gkpinn::test {

inline double rel_err(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Central differences on a scalar field callable.
inline double fd_grad(const std::function<double(Point)>& f, Point x, int axis,
                      double h = 1e-5) {
  Point xp = x, xm = x;
  xp[axis] += h;
  xm[axis] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

// Fourth-order five-point stencil: the plain 3-point formula loses too much
// to rounding (eps/h^2) when the target second derivative is small.
inline double fd_hess(const std::function<double(Point)>& f, Point x, int axis,
                      double h = 1e-3) {
  auto at = [&](double delta) {
    Point q = x;
    q[axis] += delta;
    return f(q);
  };
  return (-at(2 * h) + 16.0 * at(h) - 30.0 * at(0.0) + 16.0 * at(-h) - at(-2 * h)) /
         (12.0 * h * h);
}

// Exact jets of the closed forms for benchmark problems 1-3, written in the
// same overflow-safe style as the solutions themselves.

// sin(pi x) + (e^{(x-1)/eps} - e^{-1/eps}) / (1 - e^{-1/eps})
inline FieldEvaluator analytic_jet_example1(double eps) {
  return [eps](const Point& p) {
    const double x = p[0];
    const double pi = 3.14159265358979323846;
    const double em = std::exp(-1.0 / eps);
    const double den = 1.0 - em;
    const double layer = std::exp((x - 1.0) / eps);
    FieldJet j;
    j.value = std::sin(pi * x) + (layer - em) / den;
    j.grad[0] = pi * std::cos(pi * x) + layer / (eps * den);
    j.diag_hess[0] = -pi * pi * std::sin(pi * x) + layer / (eps * eps * den);
    return j;
  };
}

// e^{-x} + e^{(1+eps)(x-1)/eps}
inline FieldEvaluator analytic_jet_example2(double eps) {
  return [eps](const Point& p) {
    const double x = p[0];
    const double rate = (1.0 + eps) / eps;
    const double layer = std::exp(rate * (x - 1.0));
    FieldJet j;
    j.value = std::exp(-x) + layer;
    j.grad[0] = -std::exp(-x) + rate * layer;
    j.diag_hess[0] = std::exp(-x) + rate * rate * layer;
    return j;
  };
}

// (e^{-x} - e^{-x/eps}) / (e^{-1} - e^{-1/eps})
inline FieldEvaluator analytic_jet_example3(double eps) {
  return [eps](const Point& p) {
    const double x = p[0];
    const double den = std::exp(-1.0) - std::exp(-1.0 / eps);
    const double layer = std::exp(-x / eps);
    FieldJet j;
    j.value = (std::exp(-x) - layer) / den;
    j.grad[0] = (-std::exp(-x) + layer / eps) / den;
    j.diag_hess[0] = (std::exp(-x) - layer / (eps * eps)) / den;
    return j;
  };
}

inline FieldEvaluator analytic_jet_example(int index, double eps) {
  switch (index) {
    case 1: return analytic_jet_example1(eps);
    case 2: return analytic_jet_example2(eps);
    case 3: return analytic_jet_example3(eps);
  }
  throw std::invalid_argument("no closed-form jet for this example");
}

}  // namespace gkpinn::test
