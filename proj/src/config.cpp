#include "gkpinn/config.hpp"

#include "gkpinn/expr.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gkpinn {

ExperimentConfig ExperimentConfig::defaults_for(Kind kind) {
  ExperimentConfig c;
  if (kind == Kind::Steady1D) {
    c.activation = Activation::Sigmoid;
    c.n_interior = 1000;
    c.n_boundary = 50;
    c.n_initial = 0;
  } else {
    c.activation = Activation::Tanh;
    c.n_interior = 10000;
    c.n_boundary = 100;
    c.n_initial = kind == Kind::Time1D ? 100 : 0;
  }
  return c;
}

const char* to_string(ModelMode mode) { return mode == ModelMode::PINN ? "pinn" : "gkpinn"; }

const char* to_string(ReferenceKind ref) {
  switch (ref) {
    case ReferenceKind::Auto: return "auto";
    case ReferenceKind::Analytic: return "analytic";
    case ReferenceKind::FD: return "fd";
    case ReferenceKind::None: return "none";
  }
  return "?";
}

const char* to_string(Activation act) {
  return act == Activation::Sigmoid ? "sigmoid" : "tanh";
}

const char* to_string(ErrorNorm norm) { return norm == ErrorNorm::Paper ? "paper" : "exact"; }

const char* to_string(RbaForm form) {
  return form == RbaForm::SquaredProduct ? "squared-product" : "weighted-square";
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.begin();
  while (b != s.end() && std::isspace(static_cast<unsigned char>(*b))) ++b;
  auto e = s.end();
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  return os.str();
}

std::vector<int> parse_int_list(const std::string& s, const std::string& field) {
  std::vector<int> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    try {
      out.push_back(std::stoi(trim(tok)));
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad integer list for '" + field + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("config: empty list for '" + field + "'");
  return out;
}

template <typename T>
T parse_num(const std::string& s, const std::string& field) {
  try {
    if constexpr (std::is_same_v<T, double>) return std::stod(s);
    else if constexpr (std::is_same_v<T, std::int64_t>) return std::stoll(s);
    else if constexpr (std::is_same_v<T, std::uint64_t>) return std::stoull(s);
    else return std::stoi(s);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad value for '" + field + "': " + s);
  }
}

bool parse_bool(const std::string& s, const std::string& field) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw std::invalid_argument("config: bad flag for '" + field + "': " + s);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("example", std::to_string(example));
  if (!problem_file.empty()) kv.emplace_back("problem_file", problem_file);
  kv.emplace_back("mode", to_string(mode));
  kv.emplace_back("epsilon", format_double(epsilon));
  kv.emplace_back("iters", std::to_string(iterations));
  kv.emplace_back("seed", std::to_string(seed));
  kv.emplace_back("n_interior", std::to_string(n_interior));
  kv.emplace_back("n_boundary", std::to_string(n_boundary));
  kv.emplace_back("n_initial", std::to_string(n_initial));
  kv.emplace_back("n_test", std::to_string(n_test));
  kv.emplace_back("hidden", join_ints(hidden));
  kv.emplace_back("activation", to_string(activation));
  kv.emplace_back("lr", format_double(adam.lr));
  kv.emplace_back("beta1", format_double(adam.beta1));
  kv.emplace_back("beta2", format_double(adam.beta2));
  kv.emplace_back("eps_hat", format_double(adam.eps_hat));
  kv.emplace_back("rba", rba_enabled ? "on" : "off");
  kv.emplace_back("eta_star", format_double(eta_star));
  kv.emplace_back("rba_form", to_string(rba_form));
  kv.emplace_back("reference", to_string(reference));
  kv.emplace_back("fd_n", std::to_string(fd_n));
  kv.emplace_back("norm", to_string(norm));
  kv.emplace_back("history_stride", std::to_string(history_stride));
  kv.emplace_back("eval_stride", std::to_string(eval_stride));
  kv.emplace_back("workers", std::to_string(workers));
  kv.emplace_back("out_dir", out_dir);
  return kv;
}

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: malformed line '" + line + "'");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_kv_text(buf.str());
}

void apply_config_kv(ExperimentConfig& config,
                     const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "example") config.example = parse_num<int>(value, key);
    else if (key == "problem_file") config.problem_file = value;
    else if (key == "mode") {
      if (value == "pinn") config.mode = ModelMode::PINN;
      else if (value == "gkpinn") config.mode = ModelMode::GKPINN;
      else throw std::invalid_argument("config: bad value for 'mode': " + value);
    } else if (key == "epsilon") config.epsilon = parse_num<double>(value, key);
    else if (key == "iters") config.iterations = parse_num<std::int64_t>(value, key);
    else if (key == "seed") config.seed = parse_num<std::uint64_t>(value, key);
    else if (key == "n_interior") config.n_interior = parse_num<int>(value, key);
    else if (key == "n_boundary") config.n_boundary = parse_num<int>(value, key);
    else if (key == "n_initial") config.n_initial = parse_num<int>(value, key);
    else if (key == "n_test") config.n_test = parse_num<int>(value, key);
    else if (key == "hidden") config.hidden = parse_int_list(value, key);
    else if (key == "activation") {
      if (value == "sigmoid") config.activation = Activation::Sigmoid;
      else if (value == "tanh") config.activation = Activation::Tanh;
      else throw std::invalid_argument("config: bad value for 'activation': " + value);
    } else if (key == "lr") config.adam.lr = parse_num<double>(value, key);
    else if (key == "beta1") config.adam.beta1 = parse_num<double>(value, key);
    else if (key == "beta2") config.adam.beta2 = parse_num<double>(value, key);
    else if (key == "eps_hat") config.adam.eps_hat = parse_num<double>(value, key);
    else if (key == "rba") config.rba_enabled = parse_bool(value, key);
    else if (key == "eta_star") config.eta_star = parse_num<double>(value, key);
    else if (key == "rba_form") {
      if (value == "squared-product") config.rba_form = RbaForm::SquaredProduct;
      else if (value == "weighted-square") config.rba_form = RbaForm::WeightedSquare;
      else throw std::invalid_argument("config: bad value for 'rba_form': " + value);
    } else if (key == "reference") {
      if (value == "auto") config.reference = ReferenceKind::Auto;
      else if (value == "analytic") config.reference = ReferenceKind::Analytic;
      else if (value == "fd") config.reference = ReferenceKind::FD;
      else if (value == "none") config.reference = ReferenceKind::None;
      else throw std::invalid_argument("config: bad value for 'reference': " + value);
    } else if (key == "fd_n") config.fd_n = parse_num<int>(value, key);
    else if (key == "norm") {
      if (value == "paper") config.norm = ErrorNorm::Paper;
      else if (value == "exact") config.norm = ErrorNorm::Exact;
      else throw std::invalid_argument("config: bad value for 'norm': " + value);
    } else if (key == "history_stride") config.history_stride = parse_num<std::int64_t>(value, key);
    else if (key == "eval_stride") config.eval_stride = parse_num<std::int64_t>(value, key);
    else if (key == "workers") config.workers = parse_num<int>(value, key);
    else if (key == "out_dir") config.out_dir = value;
    else throw std::invalid_argument("config: unknown field '" + key + "'");
  }
}

namespace {

Expr require_expr(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end())
    throw std::invalid_argument("problem file: missing field '" + key + "'");
  return Expr::parse(it->second);
}

std::optional<Expr> optional_expr(const std::map<std::string, std::string>& kv,
                                  const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) return std::nullopt;
  return Expr::parse(it->second);
}

}  // namespace

PerturbedProblem load_problem_file(const std::string& path, double epsilon) {
  const auto kv = parse_kv_file(path);
  PerturbedProblem p;
  p.epsilon = epsilon;

  const auto kind_it = kv.find("kind");
  if (kind_it == kv.end()) throw std::invalid_argument("problem file: missing field 'kind'");
  if (kind_it->second == "steady1d") p.kind = Kind::Steady1D;
  else if (kind_it->second == "steady2d") p.kind = Kind::Steady2D;
  else if (kind_it->second == "time1d") p.kind = Kind::Time1D;
  else throw std::invalid_argument("problem file: bad 'kind': " + kind_it->second);

  const auto sign_it = kv.find("diffusion_sign");
  p.diffusion_sign = sign_it == kv.end() ? -1 : std::stoi(sign_it->second);
  if (p.diffusion_sign != 1 && p.diffusion_sign != -1)
    throw std::invalid_argument("problem file: 'diffusion_sign' must be +1 or -1");

  const double eps = epsilon;
  if (p.kind == Kind::Steady2D) {
    const Expr b1 = require_expr(kv, "b1"), b2 = require_expr(kv, "b2");
    p.b = [b1, b2, eps](const Point& x) {
      return std::array<double, 2>{b1.eval(x[0], x[1], eps), b2.eval(x[0], x[1], eps)};
    };
  } else {
    const Expr b = require_expr(kv, "b");
    p.b = [b, eps](const Point& x) {
      return std::array<double, 2>{b.eval(x[0], x[1], eps), 0.0};
    };
  }
  const Expr c = require_expr(kv, "c"), f = require_expr(kv, "f");
  p.c = [c, eps](const Point& x) { return c.eval(x[0], x[1], eps); };
  p.f = [f, eps](const Point& x) { return f.eval(x[0], x[1], eps); };

  switch (p.kind) {
    case Kind::Steady1D: {
      const Expr u0 = require_expr(kv, "u0"), u1 = require_expr(kv, "u1");
      const double v0 = u0.eval(0.0, 0.0, eps), v1 = u1.eval(1.0, 0.0, eps);
      p.boundary = [v0, v1](const Point& x) { return x[0] >= 0.5 ? v1 : v0; };
      break;
    }
    case Kind::Steady2D: {
      const Expr bx0 = require_expr(kv, "bc_x0"), bx1 = require_expr(kv, "bc_x1");
      const Expr by0 = require_expr(kv, "bc_y0"), by1 = require_expr(kv, "bc_y1");
      p.boundary = [bx0, bx1, by0, by1, eps](const Point& pt) {
        if (pt[0] == 0.0) return bx0.eval(pt[1], pt[1], eps);
        if (pt[0] == 1.0) return bx1.eval(pt[1], pt[1], eps);
        if (pt[1] == 0.0) return by0.eval(pt[0], pt[0], eps);
        return by1.eval(pt[0], pt[0], eps);
      };
      break;
    }
    case Kind::Time1D: {
      const Expr q0 = require_expr(kv, "q0"), q1 = require_expr(kv, "q1");
      const Expr g = require_expr(kv, "g");
      p.boundary = [q0, q1, eps](const Point& pt) {
        return pt[0] >= 0.5 ? q1.eval(0.0, pt[1], eps) : q0.eval(0.0, pt[1], eps);
      };
      p.initial = [g, eps](const Point& pt) { return g.eval(pt[0], 0.0, eps); };
      break;
    }
  }

  if (const auto analytic = optional_expr(kv, "analytic"); analytic.has_value()) {
    const Expr a = *analytic;
    p.analytic = [a, eps](const Point& pt) { return a.eval(pt[0], pt[1], eps); };
  }
  return p;
}

}  // namespace gkpinn
