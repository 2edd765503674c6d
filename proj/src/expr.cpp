#include "gkpinn/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace gkpinn {

struct Expr::Node {
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Func };
  Op op = Op::Const;
  double constant = 0.0;
  int var = 0;  // 0 x, 1 y/t, 2 eps
  double (*func)(double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double x, double yt, double eps) const {
    switch (op) {
      case Op::Const: return constant;
      case Op::Var: return var == 0 ? x : (var == 1 ? yt : eps);
      case Op::Add: return lhs->eval(x, yt, eps) + rhs->eval(x, yt, eps);
      case Op::Sub: return lhs->eval(x, yt, eps) - rhs->eval(x, yt, eps);
      case Op::Mul: return lhs->eval(x, yt, eps) * rhs->eval(x, yt, eps);
      case Op::Div: return lhs->eval(x, yt, eps) / rhs->eval(x, yt, eps);
      case Op::Pow: return std::pow(lhs->eval(x, yt, eps), rhs->eval(x, yt, eps));
      case Op::Neg: return -lhs->eval(x, yt, eps);
      case Op::Func: return func(lhs->eval(x, yt, eps));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_const(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Expr::Node::Op::Const;
  n->constant = v;
  return n;
}

NodePtr make_binary(Expr::Node::Op op, NodePtr l, NodePtr r) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expression();
    skip_ws();
    if (pos_ != s_.size())
      throw std::invalid_argument("Expr: trailing input at '" + s_.substr(pos_) + "'");
    return e;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (consume('+')) lhs = make_binary(Expr::Node::Op::Add, lhs, term());
      else if (consume('-')) lhs = make_binary(Expr::Node::Op::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (consume('*')) lhs = make_binary(Expr::Node::Op::Mul, lhs, factor());
      else if (consume('/')) lhs = make_binary(Expr::Node::Op::Div, lhs, factor());
      else return lhs;
    }
  }

  NodePtr factor() {
    if (consume('-')) {
      auto n = std::make_shared<Expr::Node>();
      n->op = Expr::Node::Op::Neg;
      n->lhs = factor();
      return n;
    }
    if (consume('+')) return factor();
    NodePtr base = primary();
    if (consume('^')) return make_binary(Expr::Node::Op::Pow, base, factor());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) throw std::invalid_argument("Expr: unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (consume('(')) {
      NodePtr e = expression();
      if (!consume(')')) throw std::invalid_argument("Expr: missing ')'");
      return e;
    }
    throw std::invalid_argument(std::string("Expr: unexpected character '") + c + "'");
  }

  NodePtr number() {
    std::size_t end = 0;
    const double v = std::stod(s_.substr(pos_), &end);
    pos_ += end;
    return make_const(v);
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    static const std::vector<std::pair<std::string, double (*)(double)>> funcs = {
        {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},
        {"exp", std::exp},   {"log", std::log},   {"sqrt", std::sqrt},
        {"abs", std::fabs},  {"sinh", std::sinh}, {"cosh", std::cosh},
        {"tanh", std::tanh}};
    for (const auto& [fname, fptr] : funcs) {
      if (name == fname) {
        if (!consume('(')) throw std::invalid_argument("Expr: expected '(' after " + name);
        NodePtr arg = expression();
        if (!consume(')')) throw std::invalid_argument("Expr: missing ')' after " + name);
        auto n = std::make_shared<Expr::Node>();
        n->op = Expr::Node::Op::Func;
        n->func = fptr;
        n->lhs = arg;
        return n;
      }
    }
    if (name == "pi") return make_const(3.14159265358979323846);
    if (name == "e") return make_const(2.71828182845904523536);
    auto n = std::make_shared<Expr::Node>();
    n->op = Expr::Node::Op::Var;
    if (name == "x") n->var = 0;
    else if (name == "y" || name == "t") n->var = 1;
    else if (name == "eps" || name == "epsilon") n->var = 2;
    else throw std::invalid_argument("Expr: unknown identifier '" + name + "'");
    return n;
  }
};

}  // namespace

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.root_ = Parser(text).parse();
  e.text_ = text;
  return e;
}

double Expr::eval(double x, double y_or_t, double eps) const {
  if (!root_) throw std::logic_error("Expr: evaluating an empty expression");
  return root_->eval(x, y_or_t, eps);
}

}  // namespace gkpinn
