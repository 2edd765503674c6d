#include "gkpinn/fdref.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace gkpinn {

namespace {

// Canonical coefficients: multiply the written equation by -1 when it
// carries +eps, so the operator is always -eps u'' + b u' + c u = f.
struct Canonical {
  double flip;
  const PerturbedProblem* p;
  std::array<double, 2> b(const Point& x) const {
    auto v = p->b(x);
    return {flip * v[0], flip * v[1]};
  }
  double c(const Point& x) const { return flip * p->c(x); }
  double f(const Point& x) const { return flip * p->f(x); }
};

Canonical canonicalize(const PerturbedProblem& problem) {
  return Canonical{problem.diffusion_sign == +1 ? -1.0 : 1.0, &problem};
}

struct TriDiag {
  Vector lo, di, up;  // lo[0] and up[n-1] are couplings to boundary values

  // y = A x for the interior-interior part plus boundary couplings g0/g1.
  Vector apply(const Vector& x, double g0, double g1) const {
    const Eigen::Index n = di.size();
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = di(i) * x(i);
      v += i == 0 ? lo(0) * g0 : lo(i) * x(i - 1);
      v += i == n - 1 ? up(n - 1) * g1 : up(i) * x(i + 1);
      y(i) = v;
    }
    return y;
  }
};

Vector thomas_solve(const TriDiag& a, const Vector& rhs) {
  const Eigen::Index n = a.di.size();
  Vector c(n), d(n);
  if (std::abs(a.di(0)) < 1e-300) throw std::runtime_error("thomas_solve: singular system");
  c(0) = a.up(0) / a.di(0);
  d(0) = rhs(0) / a.di(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    const double m = a.di(i) - a.lo(i) * c(i - 1);
    if (std::abs(m) < 1e-300) throw std::runtime_error("thomas_solve: singular system");
    c(i) = a.up(i) / m;
    d(i) = (rhs(i) - a.lo(i) * d(i - 1)) / m;
  }
  Vector x(n);
  x(n - 1) = d(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = d(i) - c(i) * x(i + 1);
  return x;
}

// 1D operator stencils (-eps u'' + b u' + c u) at the interior nodes of a
// mesh; `upwind` selects one-sided vs central convection.
TriDiag build_stencil(const Vector& nodes, double eps, const Vector& b, const Vector& c,
                      bool upwind) {
  const Eigen::Index n = nodes.size() - 2;
  TriDiag a;
  a.lo.resize(n);
  a.di.resize(n);
  a.up.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hm = nodes(i + 1) - nodes(i);
    const double hp = nodes(i + 2) - nodes(i + 1);
    double lo = -eps * 2.0 / (hm * (hm + hp));
    double up = -eps * 2.0 / (hp * (hm + hp));
    double di = eps * 2.0 / (hm * hp) + c(i);
    const double bi = b(i);
    if (upwind) {
      if (bi > 0.0) {
        lo += -bi / hm;
        di += bi / hm;
      } else {
        di += -bi / hp;
        up += bi / hp;
      }
    } else {
      lo += -bi * hp / (hm * (hm + hp));
      di += bi * (hp - hm) / (hm * hp);
      up += bi * hm / (hp * (hm + hp));
    }
    a.lo(i) = lo;
    a.di(i) = di;
    a.up(i) = up;
  }
  return a;
}

std::optional<BoundaryLayerSpec> layer_on_axis(const PerturbedProblem& problem,
                                               LayerAxis axis) {
  for (const auto& spec : infer_layers(problem))
    if (spec.axis == axis) return spec;
  return std::nullopt;
}

}  // namespace

ShishkinMesh1D shishkin_mesh(int n_cells, double epsilon,
                             const std::optional<BoundaryLayerSpec>& layer) {
  if (n_cells < 4 || n_cells % 2 != 0)
    throw std::invalid_argument("shishkin_mesh: N must be even and >= 4");
  if (!(epsilon > 0.0)) throw std::invalid_argument("shishkin_mesh: epsilon must be positive");
  ShishkinMesh1D mesh;
  mesh.nodes.resize(n_cells + 1);
  if (!layer.has_value()) {
    mesh.side = -1;
    mesh.tau = 0.5;
    for (int i = 0; i <= n_cells; ++i)
      mesh.nodes(i) = static_cast<double>(i) / n_cells;
    return mesh;
  }
  const double beta = layer->coeff;
  const double tau =
      std::min(0.5, 2.0 * epsilon / beta * std::log(static_cast<double>(n_cells)));
  mesh.tau = tau;
  mesh.side = layer->side == LayerSide::Right ? 1 : 0;
  const int half = n_cells / 2;
  if (mesh.side == 1) {
    for (int i = 0; i <= half; ++i)
      mesh.nodes(i) = (1.0 - tau) * static_cast<double>(i) / half;
    for (int i = 1; i <= half; ++i)
      mesh.nodes(half + i) = (1.0 - tau) + tau * static_cast<double>(i) / half;
  } else {
    for (int i = 0; i <= half; ++i)
      mesh.nodes(i) = tau * static_cast<double>(i) / half;
    for (int i = 1; i <= half; ++i)
      mesh.nodes(half + i) = tau + (1.0 - tau) * static_cast<double>(i) / half;
  }
  mesh.nodes(0) = 0.0;
  mesh.nodes(n_cells) = 1.0;
  for (int i = 0; i < n_cells; ++i)
    if (!(mesh.nodes(i + 1) > mesh.nodes(i)))
      throw std::runtime_error("shishkin_mesh: mesh degenerate for this epsilon");
  return mesh;
}

ReferenceSolution solve_1d(const PerturbedProblem& problem, int n_cells) {
  if (problem.kind != Kind::Steady1D)
    throw std::invalid_argument("solve_1d: problem is not Steady1D");
  const Canonical canon = canonicalize(problem);
  const ShishkinMesh1D mesh =
      shishkin_mesh(n_cells, problem.epsilon, layer_on_axis(problem, LayerAxis::X));
  const Vector& xs = mesh.nodes;
  const Eigen::Index n = xs.size() - 2;

  Vector b(n), c(n), f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point p{xs(i + 1), 0.0};
    b(i) = canon.b(p)[0];
    c(i) = canon.c(p);
    f(i) = canon.f(p);
  }
  const double g0 = problem.boundary(Point{0.0, 0.0});
  const double g1 = problem.boundary(Point{1.0, 0.0});

  const TriDiag a_up = build_stencil(xs, problem.epsilon, b, c, true);
  const TriDiag a_ce = build_stencil(xs, problem.epsilon, b, c, false);

  Vector rhs = f;
  rhs(0) -= a_up.lo(0) * g0;
  rhs(n - 1) -= a_up.up(n - 1) * g1;
  Vector u = thomas_solve(a_up, rhs);

  // One defect-correction pass toward the central-difference operator.
  Vector resid = f - a_ce.apply(u, g0, g1);
  u += thomas_solve(a_up, resid);

  ReferenceSolution sol;
  sol.kind = Kind::Steady1D;
  sol.epsilon = problem.epsilon;
  sol.xs = xs;
  sol.values.resize(1, xs.size());
  sol.values(0, 0) = g0;
  sol.values(0, xs.size() - 1) = g1;
  for (Eigen::Index i = 0; i < n; ++i) sol.values(0, i + 1) = u(i);
  return sol;
}

namespace {

// Five-point stencil data for the 2D solvers, stored per interior point.
struct Grid2D {
  Eigen::Index nx, ny;  // interior counts
  Matrix w, e, s, n, diag, rhs;
};

// Assemble -eps Lap + b.grad + c on the tensor mesh. Boundary values are
// folded into rhs. `upwind` selects the convection stencil.
Grid2D assemble_2d(const PerturbedProblem& problem, const Canonical& canon,
                   const Vector& xs, const Vector& ys, bool upwind) {
  const double eps = problem.epsilon;
  Grid2D g;
  g.nx = xs.size() - 2;
  g.ny = ys.size() - 2;
  g.w.resize(g.ny, g.nx);
  g.e.resize(g.ny, g.nx);
  g.s.resize(g.ny, g.nx);
  g.n.resize(g.ny, g.nx);
  g.diag.resize(g.ny, g.nx);
  g.rhs.resize(g.ny, g.nx);
  for (Eigen::Index j = 0; j < g.ny; ++j) {
    const double hym = ys(j + 1) - ys(j);
    const double hyp = ys(j + 2) - ys(j + 1);
    for (Eigen::Index i = 0; i < g.nx; ++i) {
      const double hxm = xs(i + 1) - xs(i);
      const double hxp = xs(i + 2) - xs(i + 1);
      const Point p{xs(i + 1), ys(j + 1)};
      const auto bv = canon.b(p);
      double w = -eps * 2.0 / (hxm * (hxm + hxp));
      double e = -eps * 2.0 / (hxp * (hxm + hxp));
      double s = -eps * 2.0 / (hym * (hym + hyp));
      double nn = -eps * 2.0 / (hyp * (hym + hyp));
      double d = eps * 2.0 / (hxm * hxp) + eps * 2.0 / (hym * hyp) + canon.c(p);
      if (upwind) {
        if (bv[0] > 0.0) { w += -bv[0] / hxm; d += bv[0] / hxm; }
        else { d += -bv[0] / hxp; e += bv[0] / hxp; }
        if (bv[1] > 0.0) { s += -bv[1] / hym; d += bv[1] / hym; }
        else { d += -bv[1] / hyp; nn += bv[1] / hyp; }
      } else {
        w += -bv[0] * hxp / (hxm * (hxm + hxp));
        e += bv[0] * hxm / (hxp * (hxm + hxp));
        d += bv[0] * (hxp - hxm) / (hxm * hxp);
        s += -bv[1] * hyp / (hym * (hym + hyp));
        nn += bv[1] * hym / (hyp * (hym + hyp));
        d += bv[1] * (hyp - hym) / (hym * hyp);
      }
      g.w(j, i) = w;
      g.e(j, i) = e;
      g.s(j, i) = s;
      g.n(j, i) = nn;
      g.diag(j, i) = d;
      g.rhs(j, i) = canon.f(p);
    }
  }
  // Fold Dirichlet data into rhs.
  for (Eigen::Index j = 0; j < g.ny; ++j) {
    g.rhs(j, 0) -= g.w(j, 0) * problem.boundary(Point{0.0, ys(j + 1)});
    g.rhs(j, g.nx - 1) -= g.e(j, g.nx - 1) * problem.boundary(Point{1.0, ys(j + 1)});
  }
  for (Eigen::Index i = 0; i < g.nx; ++i) {
    g.rhs(0, i) -= g.s(0, i) * problem.boundary(Point{xs(i + 1), 0.0});
    g.rhs(g.ny - 1, i) -= g.n(g.ny - 1, i) * problem.boundary(Point{xs(i + 1), 1.0});
  }
  return g;
}

double residual_inf_norm(const Grid2D& g, const Matrix& u) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < g.ny; ++j)
    for (Eigen::Index i = 0; i < g.nx; ++i) {
      double r = g.rhs(j, i) - g.diag(j, i) * u(j, i);
      if (i > 0) r -= g.w(j, i) * u(j, i - 1);
      if (i < g.nx - 1) r -= g.e(j, i) * u(j, i + 1);
      if (j > 0) r -= g.s(j, i) * u(j - 1, i);
      if (j < g.ny - 1) r -= g.n(j, i) * u(j + 1, i);
      worst = std::max(worst, std::abs(r));
    }
  return worst;
}

// Line-relaxation sweeps: each pass solves whole mesh lines exactly with the
// Thomas algorithm, alternating x-lines and y-lines and reversing the sweep
// direction. Point relaxation is useless here because the fitted meshes are
// strongly anisotropic inside the layer strips; line sweeps contract fast
// and stay within the SOR-sweep contract (omega, residual tolerance, cap).
Matrix sor_solve(const Grid2D& g, const SorOptions& sor) {
  Matrix u = Matrix::Zero(g.ny, g.nx);
  const double omega = sor.omega;
  TriDiag line_x, line_y;
  line_x.lo.resize(g.nx);
  line_x.di.resize(g.nx);
  line_x.up.resize(g.nx);
  line_y.lo.resize(g.ny);
  line_y.di.resize(g.ny);
  line_y.up.resize(g.ny);
  Vector rhs_x(g.nx), rhs_y(g.ny);

  if (residual_inf_norm(g, u) <= sor.tol) return u;
  for (long sweep = 0; sweep < sor.max_iter; ++sweep) {
    const int ordering = sweep % 4;
    if (ordering < 2) {
      const bool fwd = ordering == 0;
      for (Eigen::Index jj = 0; jj < g.ny; ++jj) {
        const Eigen::Index j = fwd ? jj : g.ny - 1 - jj;
        for (Eigen::Index i = 0; i < g.nx; ++i) {
          line_x.lo(i) = g.w(j, i);
          line_x.di(i) = g.diag(j, i);
          line_x.up(i) = g.e(j, i);
          double r = g.rhs(j, i);
          if (j > 0) r -= g.s(j, i) * u(j - 1, i);
          if (j < g.ny - 1) r -= g.n(j, i) * u(j + 1, i);
          rhs_x(i) = r;
        }
        const Vector sol = thomas_solve(line_x, rhs_x);
        for (Eigen::Index i = 0; i < g.nx; ++i)
          u(j, i) += omega * (sol(i) - u(j, i));
      }
    } else {
      const bool fwd = ordering == 2;
      for (Eigen::Index ii = 0; ii < g.nx; ++ii) {
        const Eigen::Index i = fwd ? ii : g.nx - 1 - ii;
        for (Eigen::Index j = 0; j < g.ny; ++j) {
          line_y.lo(j) = g.s(j, i);
          line_y.di(j) = g.diag(j, i);
          line_y.up(j) = g.n(j, i);
          double r = g.rhs(j, i);
          if (i > 0) r -= g.w(j, i) * u(j, i - 1);
          if (i < g.nx - 1) r -= g.e(j, i) * u(j, i + 1);
          rhs_y(j) = r;
        }
        const Vector sol = thomas_solve(line_y, rhs_y);
        for (Eigen::Index j = 0; j < g.ny; ++j)
          u(j, i) += omega * (sol(j) - u(j, i));
      }
    }
    if (residual_inf_norm(g, u) <= sor.tol) return u;
  }
  std::ostringstream msg;
  msg << "sor_solve: iteration cap " << sor.max_iter
      << " hit; residual " << residual_inf_norm(g, u);
  throw std::runtime_error(msg.str());
}

Matrix apply_2d(const Grid2D& g, const Matrix& u) {
  Matrix y(g.ny, g.nx);
  for (Eigen::Index j = 0; j < g.ny; ++j)
    for (Eigen::Index i = 0; i < g.nx; ++i) {
      double v = g.diag(j, i) * u(j, i);
      if (i > 0) v += g.w(j, i) * u(j, i - 1);
      if (i < g.nx - 1) v += g.e(j, i) * u(j, i + 1);
      if (j > 0) v += g.s(j, i) * u(j - 1, i);
      if (j < g.ny - 1) v += g.n(j, i) * u(j + 1, i);
      y(j, i) = v;
    }
  return y;
}

}  // namespace

ReferenceSolution solve_2d(const PerturbedProblem& problem, int n_cells,
                           const SorOptions& sor) {
  if (problem.kind != Kind::Steady2D)
    throw std::invalid_argument("solve_2d: problem is not Steady2D");
  const Canonical canon = canonicalize(problem);
  const ShishkinMesh1D mx =
      shishkin_mesh(n_cells, problem.epsilon, layer_on_axis(problem, LayerAxis::X));
  const ShishkinMesh1D my =
      shishkin_mesh(n_cells, problem.epsilon, layer_on_axis(problem, LayerAxis::Y));

  const Grid2D g_up = assemble_2d(problem, canon, mx.nodes, my.nodes, true);
  Matrix u = sor_solve(g_up, sor);

  // Defect correction toward the central stencil: A_up du = rhs_c - A_c u.
  const Grid2D g_ce = assemble_2d(problem, canon, mx.nodes, my.nodes, false);
  Grid2D corr = g_up;
  corr.rhs = g_ce.rhs - apply_2d(g_ce, u);
  u += sor_solve(corr, sor);

  ReferenceSolution sol;
  sol.kind = Kind::Steady2D;
  sol.epsilon = problem.epsilon;
  sol.xs = mx.nodes;
  sol.ys = my.nodes;
  const Eigen::Index nxn = mx.nodes.size(), nyn = my.nodes.size();
  sol.values.resize(nyn, nxn);
  for (Eigen::Index j = 0; j < nyn; ++j)
    for (Eigen::Index i = 0; i < nxn; ++i) {
      const bool edge = i == 0 || i == nxn - 1 || j == 0 || j == nyn - 1;
      sol.values(j, i) = edge ? problem.boundary(Point{mx.nodes(i), my.nodes(j)})
                              : u(j - 1, i - 1);
    }
  return sol;
}

ReferenceSolution solve_time(const PerturbedProblem& problem, int nx_cells, int nt_steps) {
  if (problem.kind != Kind::Time1D)
    throw std::invalid_argument("solve_time: problem is not Time1D");
  if (nt_steps < 1) throw std::invalid_argument("solve_time: need at least one time step");
  const Canonical canon = canonicalize(problem);
  const ShishkinMesh1D mesh =
      shishkin_mesh(nx_cells, problem.epsilon, layer_on_axis(problem, LayerAxis::X));
  const Vector& xs = mesh.nodes;
  const Eigen::Index n = xs.size() - 2;
  const double dt = 1.0 / nt_steps;

  // Spatial coefficients are time-independent for every benchmark; freeze
  // them at t = 0.5 of the run (they are constants in all built-ins).
  Vector b(n), c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point p{xs(i + 1), 0.5};
    b(i) = canon.b(p)[0];
    c(i) = canon.c(p);
  }
  const TriDiag a_up = build_stencil(xs, problem.epsilon, b, c, true);
  const TriDiag a_ce = build_stencil(xs, problem.epsilon, b, c, false);
  TriDiag a_be = a_up;
  a_be.di.array() += 1.0 / dt;

  auto forcing = [&](double t) {
    Vector f(n);
    for (Eigen::Index i = 0; i < n; ++i) f(i) = canon.f(Point{xs(i + 1), t});
    return f;
  };
  auto q0 = [&](double t) { return problem.boundary(Point{0.0, t}); };
  auto q1 = [&](double t) { return problem.boundary(Point{1.0, t}); };

  Matrix sol(nt_steps + 1, xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i)
    sol(0, i) = problem.initial(Point{xs(i), 0.0});

  // Backward-Euler upwind march.
  Vector u = sol.row(0).segment(1, n).transpose();
  for (int step = 1; step <= nt_steps; ++step) {
    const double t = step * dt;
    Vector rhs = u / dt + forcing(t);
    rhs(0) -= a_up.lo(0) * q0(t);
    rhs(n - 1) -= a_up.up(n - 1) * q1(t);
    u = thomas_solve(a_be, rhs);
    sol(step, 0) = q0(t);
    sol(step, xs.size() - 1) = q1(t);
    sol.row(step).segment(1, n) = u.transpose();
  }

  // One defect-correction pass toward Crank-Nicolson in time and central
  // differencing in space. The first two steps stay backward Euler so the
  // incompatible-corner transient is not excited.
  Matrix corrected = sol;
  for (int step = 1; step <= nt_steps; ++step) {
    const double t = step * dt;
    const Vector u_t = sol.row(step).segment(1, n).transpose();
    const Vector prev = corrected.row(step - 1).segment(1, n).transpose();
    const double prev_g0 = corrected(step - 1, 0);
    const double prev_g1 = corrected(step - 1, xs.size() - 1);
    Vector target = (u_t - prev) / dt;
    if (step <= 2) {
      target += a_ce.apply(u_t, q0(t), q1(t)) - forcing(t);
    } else {
      target += 0.5 * (a_ce.apply(u_t, q0(t), q1(t)) - forcing(t));
      target += 0.5 * (a_ce.apply(prev, prev_g0, prev_g1) - forcing(t - dt));
    }
    const Vector delta = thomas_solve(a_be, -target);
    corrected.row(step).segment(1, n) = (u_t + delta).transpose();
  }

  ReferenceSolution out;
  out.kind = Kind::Time1D;
  out.epsilon = problem.epsilon;
  out.xs = xs;
  out.ys.resize(nt_steps + 1);
  for (int sIdx = 0; sIdx <= nt_steps; ++sIdx) out.ys(sIdx) = sIdx * dt;
  out.values = corrected;
  return out;
}

namespace {

Eigen::Index locate(const Vector& nodes, double x) {
  // Index of the cell containing x; clamped to the grid.
  Eigen::Index lo = 0, hi = nodes.size() - 1;
  if (x <= nodes(0)) return 0;
  if (x >= nodes(hi)) return hi - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    (x >= nodes(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

RowVector ReferenceSolution::interpolate(const Matrix& points) const {
  RowVector out(points.cols());
  for (Eigen::Index col = 0; col < points.cols(); ++col) {
    const double x = points(0, col);
    const Eigen::Index i = locate(xs, x);
    const double tx = (x - xs(i)) / (xs(i + 1) - xs(i));
    if (kind == Kind::Steady1D) {
      out(col) = (1.0 - tx) * values(0, i) + tx * values(0, i + 1);
      continue;
    }
    const double y = points(1, col);
    const Eigen::Index j = locate(ys, y);
    const double ty = (y - ys(j)) / (ys(j + 1) - ys(j));
    out(col) = (1.0 - ty) * ((1.0 - tx) * values(j, i) + tx * values(j, i + 1)) +
               ty * ((1.0 - tx) * values(j + 1, i) + tx * values(j + 1, i + 1));
  }
  return out;
}

void ReferenceSolution::save(std::ostream& os) const {
  os.precision(17);
  const char* second = kind == Kind::Steady2D ? "y" : (kind == Kind::Time1D ? "t" : nullptr);
  os << "# gkpinn-reference kind=" << static_cast<int>(kind) << " epsilon=" << epsilon
     << " nx=" << xs.size() << " ny=" << ys.size() << "\n";
  if (second == nullptr) {
    os << "x,value\n";
    for (Eigen::Index i = 0; i < xs.size(); ++i) os << xs(i) << "," << values(0, i) << "\n";
    return;
  }
  os << "x," << second << ",value\n";
  for (Eigen::Index j = 0; j < ys.size(); ++j)
    for (Eigen::Index i = 0; i < xs.size(); ++i)
      os << xs(i) << "," << ys(j) << "," << values(j, i) << "\n";
}

void ReferenceSolution::save_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("ReferenceSolution::save_file: cannot open " + path);
  save(os);
}

ReferenceSolution ReferenceSolution::load(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# gkpinn-reference", 0) != 0)
    throw std::runtime_error("ReferenceSolution::load: missing header");
  ReferenceSolution sol;
  Eigen::Index nx = 0, ny = 0;
  {
    std::istringstream hs(line.substr(std::string("# gkpinn-reference").size()));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "kind") sol.kind = static_cast<Kind>(std::stoi(val));
      else if (key == "epsilon") sol.epsilon = std::stod(val);
      else if (key == "nx") nx = std::stol(val);
      else if (key == "ny") ny = std::stol(val);
    }
  }
  std::getline(is, line);  // column header
  sol.xs.resize(nx);
  if (sol.kind == Kind::Steady1D) {
    sol.values.resize(1, nx);
    for (Eigen::Index i = 0; i < nx; ++i) {
      std::getline(is, line);
      std::istringstream ls(line);
      char comma;
      ls >> sol.xs(i) >> comma >> sol.values(0, i);
    }
    return sol;
  }
  sol.ys.resize(ny);
  sol.values.resize(ny, nx);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) {
      std::getline(is, line);
      std::istringstream ls(line);
      char comma;
      ls >> sol.xs(i) >> comma >> sol.ys(j) >> comma >> sol.values(j, i);
    }
  return sol;
}

ReferenceSolution ReferenceSolution::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("ReferenceSolution::load_file: cannot open " + path);
  return load(is);
}

}  // namespace gkpinn
