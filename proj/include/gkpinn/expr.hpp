#pragma once

#include <memory>
#include <string>

namespace gkpinn {

/// Arithmetic expression over the variables x, y, t, eps with the usual
/// operators (+ - * / ^), parentheses, and the unary functions sin, cos,
/// tan, exp, log, sqrt, abs, sinh, cosh, tanh. The constants pi and e are
/// predefined. Used for problem definitions loaded from text files.
class Expr {
 public:
  static Expr parse(const std::string& text);
  double eval(double x, double y_or_t = 0.0, double eps = 0.0) const;
  const std::string& text() const { return text_; }

  Expr() = default;

  struct Node;  // exposed for the parser implementation

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace gkpinn
