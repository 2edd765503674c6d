#pragma once

#include "gkpinn/fdref.hpp"
#include "gkpinn/layers.hpp"
#include "gkpinn/training.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gkpinn {

/// Which sum of squares normalizes the L2 test error: the approximation's
/// (as the source formula is printed) or the reference's.
enum class ErrorNorm { Paper, Exact };

/// sqrt(sum |pred-ref|^2 / sum |pred|^2); +inf sentinel when the denominator
/// vanishes (a warning goes to stderr). ErrorNorm::Exact divides by the
/// reference instead.
double l2_relative_error(const RowVector& pred, const RowVector& ref,
                         ErrorNorm norm = ErrorNorm::Paper);

/// Reference against which a trained model is scored.
using Reference = std::variant<std::monostate,        // none: no L2 available
                               const PerturbedProblem*,  // analytic solution
                               const ReferenceSolution*>;  // FD grid

/// Everything one experiment produced. config_echo carries the full runner
/// configuration as ordered key/value pairs sufficient to reproduce the run.
struct RunReport {
  std::string example;  // "1".."8" or a problem-file path
  std::string mode;     // "pinn" | "gkpinn"
  double epsilon = 0.0;
  LossBreakdown final_loss;
  std::optional<double> l2_test;
  double wall_time_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::string history_file;

  void serialize(std::ostream& os) const;
  static RunReport parse(std::istream& is);
  bool operator==(const RunReport& other) const;
};

/// Model values on the test points scored against the chosen reference.
/// With Reference = none the report carries no l2_test (the "x" cells).
RunReport evaluate_run(const CompositeModel& model, const PerturbedProblem& problem,
                       const Reference& reference, const Matrix& test_points,
                       ErrorNorm norm = ErrorNorm::Paper);

/// Dense tensor grid of coordinates, model value, and (when a reference is
/// available) reference value and pointwise absolute error, as CSV with a
/// one-line header. `resolution` is the per-axis point count; 2D rows are
/// emitted row-major with the second axis outermost.
void export_solution_grid(const CompositeModel& model, const PerturbedProblem& problem,
                          int resolution, const Reference& reference, std::ostream& os);

}  // namespace gkpinn
