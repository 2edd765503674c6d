#include "gkpinn/evaluation.hpp"

#include "gkpinn/problems.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gkpinn {

double l2_relative_error(const RowVector& pred, const RowVector& ref, ErrorNorm norm) {
  if (pred.size() != ref.size() || pred.size() == 0)
    throw std::invalid_argument("l2_relative_error: length mismatch");
  const double num = (pred - ref).squaredNorm();
  const double den = norm == ErrorNorm::Paper ? pred.squaredNorm() : ref.squaredNorm();
  if (den == 0.0) {
    std::cerr << "l2_relative_error: zero normalization, returning +inf\n";
    return std::numeric_limits<double>::infinity();
  }
  return std::sqrt(num / den);
}

namespace {

std::optional<RowVector> reference_values(const PerturbedProblem& problem,
                                          const Reference& reference, const Matrix& pts) {
  if (std::holds_alternative<std::monostate>(reference)) return std::nullopt;
  if (const auto* p = std::get_if<const PerturbedProblem*>(&reference))
    return analytic_on_grid(**p, pts);
  return std::get<const ReferenceSolution*>(reference)->interpolate(pts);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RunReport evaluate_run(const CompositeModel& model, const PerturbedProblem& problem,
                       const Reference& reference, const Matrix& test_points,
                       ErrorNorm norm) {
  RunReport report;
  report.epsilon = problem.epsilon;
  const RowVector pred = composite_values(model, test_points);
  const auto ref = reference_values(problem, reference, test_points);
  if (ref.has_value()) report.l2_test = l2_relative_error(pred, *ref, norm);
  return report;
}

void export_solution_grid(const CompositeModel& model, const PerturbedProblem& problem,
                          int resolution, const Reference& reference, std::ostream& os) {
  if (resolution < 2) throw std::invalid_argument("export_solution_grid: resolution >= 2");
  const int dim = problem.dim();
  Matrix pts;
  if (dim == 1) {
    pts.resize(1, resolution);
    for (int i = 0; i < resolution; ++i)
      pts(0, i) = static_cast<double>(i) / (resolution - 1);
  } else {
    pts.resize(2, static_cast<Eigen::Index>(resolution) * resolution);
    Eigen::Index col = 0;
    for (int j = 0; j < resolution; ++j)
      for (int i = 0; i < resolution; ++i, ++col) {
        pts(0, col) = static_cast<double>(i) / (resolution - 1);
        pts(1, col) = static_cast<double>(j) / (resolution - 1);
      }
  }
  const RowVector pred = composite_values(model, pts);
  const auto ref = reference_values(problem, reference, pts);

  os.precision(17);
  const char* second = problem.kind == Kind::Steady2D ? "y"
                       : problem.kind == Kind::Time1D ? "t"
                                                      : nullptr;
  os << "x";
  if (second) os << "," << second;
  os << ",value";
  if (ref.has_value()) os << ",reference,abs_error";
  os << "\n";
  for (Eigen::Index col = 0; col < pts.cols(); ++col) {
    os << pts(0, col);
    if (second) os << "," << pts(1, col);
    os << "," << pred(col);
    if (ref.has_value())
      os << "," << (*ref)(col) << "," << std::abs(pred(col) - (*ref)(col));
    os << "\n";
  }
}

void RunReport::serialize(std::ostream& os) const {
  os << "example = " << example << "\n";
  os << "mode = " << mode << "\n";
  os << "epsilon = " << format_double(epsilon) << "\n";
  os << "final_loss_ic = " << format_double(final_loss.ic) << "\n";
  os << "final_loss_bc = " << format_double(final_loss.bc) << "\n";
  os << "final_loss_r = " << format_double(final_loss.r) << "\n";
  os << "final_loss_total = " << format_double(final_loss.total) << "\n";
  if (l2_test.has_value()) os << "l2_test = " << format_double(*l2_test) << "\n";
  os << "wall_time_seconds = " << format_double(wall_time_seconds) << "\n";
  os << "history_file = " << history_file << "\n";
  for (const auto& [key, value] : config_echo) os << "config." << key << " = " << value << "\n";
}

RunReport RunReport::parse(std::istream& is) {
  RunReport r;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    if (key == "example") r.example = value;
    else if (key == "mode") r.mode = value;
    else if (key == "epsilon") r.epsilon = std::stod(value);
    else if (key == "final_loss_ic") r.final_loss.ic = std::stod(value);
    else if (key == "final_loss_bc") r.final_loss.bc = std::stod(value);
    else if (key == "final_loss_r") r.final_loss.r = std::stod(value);
    else if (key == "final_loss_total") r.final_loss.total = std::stod(value);
    else if (key == "l2_test") r.l2_test = std::stod(value);
    else if (key == "wall_time_seconds") r.wall_time_seconds = std::stod(value);
    else if (key == "history_file") r.history_file = value;
    else if (key.rfind("config.", 0) == 0) r.config_echo.emplace_back(key.substr(7), value);
  }
  return r;
}

bool RunReport::operator==(const RunReport& other) const {
  return example == other.example && mode == other.mode && epsilon == other.epsilon &&
         final_loss.ic == other.final_loss.ic && final_loss.bc == other.final_loss.bc &&
         final_loss.r == other.final_loss.r && final_loss.total == other.final_loss.total &&
         l2_test == other.l2_test && wall_time_seconds == other.wall_time_seconds &&
         config_echo == other.config_echo && history_file == other.history_file;
}

}  // namespace gkpinn
