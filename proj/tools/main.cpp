#include "gkpinn/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

using namespace gkpinn;

struct FlagValues {
  int example = 1;
  std::string problem_file;
  std::string mode = "gkpinn";
  double epsilon = 1e-3;
  std::int64_t iters = 50000;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string reference = "auto";
  int fd_n = 0;
  std::string rba = "on";
  std::string norm = "paper";
  std::string config_file;
  int n_interior = 0;
  int n_boundary = 0;
  int n_initial = -1;
  int n_test = 0;
  std::string hidden;
  std::string activation;
  double lr = 0.0;
  double beta1 = -1.0, beta2 = -1.0, eps_hat = -1.0;
  double eta_star = -1.0;
  std::string rba_form;
  std::int64_t history_stride = 0;
  std::int64_t eval_stride = -1;
  std::string examples_list = "1,2,3,4,5,6,7,8";
  std::string modes_list = "pinn,gkpinn";
  std::string epsilons_list = "1e-3";
};

void add_shared_options(CLI::App* cmd, FlagValues& v) {
  cmd->add_option("--epsilon", v.epsilon, "Perturbation parameter");
  cmd->add_option("--iters", v.iters, "Training iterations");
  cmd->add_option("--seed", v.seed, "Base seed for sampling and initialization");
  cmd->add_option("--out-dir", v.out_dir, "Output directory");
  cmd->add_option("--reference", v.reference, "Reference: auto|analytic|fd|none");
  cmd->add_option("--fd-n", v.fd_n, "FD reference mesh cells per axis");
  cmd->add_option("--rba", v.rba, "Residual-based attention: on|off");
  cmd->add_option("--norm", v.norm, "L2 normalization: paper|exact");
  cmd->add_option("--config", v.config_file, "Config file (lower precedence than flags)");
  cmd->add_option("--n-interior", v.n_interior, "Interior collocation points");
  cmd->add_option("--n-boundary", v.n_boundary, "Boundary points");
  cmd->add_option("--n-initial", v.n_initial, "Initial points (time problems)");
  cmd->add_option("--n-test", v.n_test, "Test points");
  cmd->add_option("--hidden", v.hidden, "Hidden layer sizes, e.g. 100,100");
  cmd->add_option("--activation", v.activation, "sigmoid|tanh");
  cmd->add_option("--lr", v.lr, "Adam learning rate");
  cmd->add_option("--beta1", v.beta1, "Adam beta1");
  cmd->add_option("--beta2", v.beta2, "Adam beta2");
  cmd->add_option("--eps-hat", v.eps_hat, "Adam epsilon");
  cmd->add_option("--eta-star", v.eta_star, "RBA learning rate");
  cmd->add_option("--rba-form", v.rba_form, "squared-product|weighted-square");
  cmd->add_option("--history-stride", v.history_stride, "History row stride");
  cmd->add_option("--eval-stride", v.eval_stride, "L2 checkpoint stride (0: final only)");
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Flags the user actually passed override the config file, which overrides
// the per-kind defaults.
void apply_flags(const CLI::App* cmd, const FlagValues& v, ExperimentConfig& cfg) {
  auto passed = [cmd](const std::string& name) { return cmd->count(name) > 0; };
  std::map<std::string, std::string> kv;
  if (passed("--epsilon")) kv["epsilon"] = fmt_double(v.epsilon);
  if (passed("--iters")) kv["iters"] = std::to_string(v.iters);
  if (passed("--seed")) kv["seed"] = std::to_string(v.seed);
  if (passed("--out-dir")) kv["out_dir"] = v.out_dir;
  if (passed("--reference")) kv["reference"] = v.reference;
  if (passed("--fd-n")) kv["fd_n"] = std::to_string(v.fd_n);
  if (passed("--rba")) kv["rba"] = v.rba;
  if (passed("--norm")) kv["norm"] = v.norm;
  if (passed("--n-interior")) kv["n_interior"] = std::to_string(v.n_interior);
  if (passed("--n-boundary")) kv["n_boundary"] = std::to_string(v.n_boundary);
  if (passed("--n-initial")) kv["n_initial"] = std::to_string(v.n_initial);
  if (passed("--n-test")) kv["n_test"] = std::to_string(v.n_test);
  if (passed("--hidden")) kv["hidden"] = v.hidden;
  if (passed("--activation")) kv["activation"] = v.activation;
  if (passed("--lr")) kv["lr"] = fmt_double(v.lr);
  if (passed("--beta1")) kv["beta1"] = fmt_double(v.beta1);
  if (passed("--beta2")) kv["beta2"] = fmt_double(v.beta2);
  if (passed("--eps-hat")) kv["eps_hat"] = fmt_double(v.eps_hat);
  if (passed("--eta-star")) kv["eta_star"] = fmt_double(v.eta_star);
  if (passed("--rba-form")) kv["rba_form"] = v.rba_form;
  if (passed("--history-stride")) kv["history_stride"] = std::to_string(v.history_stride);
  if (passed("--eval-stride")) kv["eval_stride"] = std::to_string(v.eval_stride);
  apply_config_kv(cfg, kv);
}

ExperimentConfig resolve_config(const CLI::App* cmd, const FlagValues& v) {
  // The problem kind decides the per-kind defaults, so settle the problem
  // identity (flags beat config file) before anything else.
  int example = v.example;
  std::string problem_file = v.problem_file;
  double epsilon = v.epsilon;
  std::map<std::string, std::string> file_kv;
  if (!v.config_file.empty()) file_kv = parse_kv_file(v.config_file);
  if (cmd->count("--example") == 0 && file_kv.count("example"))
    example = std::stoi(file_kv.at("example"));
  if (cmd->count("--problem-file") == 0 && file_kv.count("problem_file"))
    problem_file = file_kv.at("problem_file");
  if (cmd->count("--epsilon") == 0 && file_kv.count("epsilon"))
    epsilon = std::stod(file_kv.at("epsilon"));

  const Kind kind = problem_file.empty()
                        ? builtin_example(example, epsilon).kind
                        : load_problem_file(problem_file, epsilon).kind;
  ExperimentConfig cfg = ExperimentConfig::defaults_for(kind);
  cfg.example = example;
  cfg.problem_file = problem_file;
  cfg.epsilon = epsilon;
  apply_config_kv(cfg, file_kv);
  apply_flags(cmd, v, cfg);
  if (cmd->count("--mode") > 0 || file_kv.count("mode") == 0)
    apply_config_kv(cfg, {{"mode", v.mode}});
  cfg.example = example;
  cfg.problem_file = problem_file;
  if (const char* workers = std::getenv("GKPINN_WORKERS"); workers != nullptr)
    cfg.workers = std::max(1, std::atoi(workers));
  return cfg;
}

template <typename T>
std::vector<T> split_list(const std::string& s, T (*conv)(const std::string&)) {
  std::vector<T> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(conv(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singularly perturbed convection-diffusion solver: baseline PINN and "
               "boundary-layer-augmented GKPINN"};
  app.require_subcommand(1);

  FlagValues v;
  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--example", v.example, "Benchmark problem index (1-8)");
  run->add_option("--problem-file", v.problem_file, "Custom problem definition file");
  run->add_option("--mode", v.mode, "pinn|gkpinn");
  add_shared_options(run, v);

  CLI::App* matrix = app.add_subcommand("matrix", "Run an experiment matrix");
  matrix->add_option("--examples", v.examples_list, "Comma list of example indices");
  matrix->add_option("--modes", v.modes_list, "Comma list of modes");
  matrix->add_option("--epsilons", v.epsilons_list, "Comma list of epsilon values");
  add_shared_options(matrix, v);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const ExperimentConfig cfg = resolve_config(run, v);
      const RunReport report = run_experiment(cfg);
      report.serialize(std::cout);
      return 0;
    }
    // matrix
    ExperimentConfig tmpl = ExperimentConfig::defaults_for(Kind::Steady1D);
    if (!v.config_file.empty()) apply_config_kv(tmpl, parse_kv_file(v.config_file));
    apply_flags(matrix, v, tmpl);
    if (const char* workers = std::getenv("GKPINN_WORKERS"); workers != nullptr)
      tmpl.workers = std::max(1, std::atoi(workers));
    const auto examples =
        split_list<int>(v.examples_list, +[](const std::string& s) { return std::stoi(s); });
    const auto epsilons = split_list<double>(
        v.epsilons_list, +[](const std::string& s) { return std::stod(s); });
    const auto modes = split_list<ModelMode>(v.modes_list, +[](const std::string& s) {
      if (s == "pinn") return ModelMode::PINN;
      if (s == "gkpinn") return ModelMode::GKPINN;
      throw std::invalid_argument("bad mode: " + s);
    });
    const auto cells = run_matrix(tmpl, examples, modes, epsilons);
    std::cout << "wrote " << tmpl.out_dir << "/matrix.csv (" << cells.size() << " cells)\n";
    for (const auto& cell : cells)
      if (!cell.error.empty())
        std::cerr << "example " << cell.example << " " << to_string(cell.mode)
                  << " eps=" << cell.epsilon << " failed: " << cell.error << "\n";
    return 0;
  } catch (const TrainingAbort& abort) {
    std::cerr << "training aborted: " << abort.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& err) {
    std::cerr << "configuration error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
