// Command-line harness around the filtering library: runs the built-in or
// user-supplied experiment configurations and emits CSV/diagnostics.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wonham/harness.hpp"

namespace {

using namespace wonham;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct GlobalOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> prior;
  std::optional<std::string> metric;
};

ExperimentConfig load_with_overrides(const std::string& config_path,
                                     const GlobalOverrides& ov) {
  ExperimentConfig cfg = load_config_file(config_path);
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.prior) {
    if (*ov.prior == "euler") cfg.prior_method = PriorMethod::euler;
    else if (*ov.prior == "resolvent") cfg.prior_method = PriorMethod::resolvent;
    else if (*ov.prior == "expm") cfg.prior_method = PriorMethod::expm;
    else throw ValidationError("unknown --prior value: " + *ov.prior);
  }
  if (ov.metric) {
    if (*ov.metric == "inverse") cfg.metric_mode = MetricMode::inverse_weighted;
    else if (*ov.metric == "direct") cfg.metric_mode = MetricMode::direct_weighted;
    else throw ValidationError("unknown --metric value: " + *ov.metric);
  }
  return cfg;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

int cmd_stationary(const ExperimentConfig& cfg) {
  RateMatrix q = RateMatrix::validate(cfg.q);
  ProbabilityVector pi = stationary_distribution(q);
  std::cout << "pi_inf =";
  for (Eigen::Index i = 0; i < pi.size(); ++i) std::cout << ' ' << fmt17(pi[i]);
  std::cout << '\n';
  std::cout << "reversible = "
            << (is_reversible(q, pi, 1e-9) ? "yes" : "no") << '\n';
  return kExitOk;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_path) {
  ExperimentSetup setup = make_setup(cfg);
  const double horizon = std::max(cfg.t_final, cfg.lambda);
  StatePath path = sample_path(setup.model, setup.pi0, horizon, cfg.seed);
  ObservationPath obs =
      simulate_observations(setup.observation, path, setup.grid, cfg.seed);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open " + out_path);
  out << "t,x,z\n";
  for (int k = 0; k <= setup.grid.k_max; ++k) {
    const double t = setup.grid.time_at(k);
    const int s = path_state_at(path, std::min(t, path.horizon));
    out << fmt17(t) << ','
        << fmt17(cfg.states[static_cast<std::size_t>(s)]) << ','
        << fmt17(obs.z[static_cast<std::size_t>(k)]) << '\n';
  }
  if (!out) throw IoError("write failure on " + out_path);
  return kExitOk;
}

int cmd_filter(const ExperimentConfig& cfg, const std::string& out_path) {
  FilterRun run = run_experiment(cfg);
  emit_csv(run, out_path);
  std::cout << "sup_error = " << fmt17(run.metrics.sup_error) << '\n';
  std::cout << "rows = " << run.obs.grid.k_max + 1 << '\n';
  return kExitOk;
}

int cmd_compare(const ExperimentConfig& cfg) {
  FilterRun run = run_experiment(cfg);
  std::cout << "sup_error = " << fmt17(run.metrics.sup_error) << '\n';
  std::cout << "final_error = " << fmt17(run.metrics.final_error) << '\n';
  std::cout << "per_component_max =";
  for (Eigen::Index i = 0; i < run.metrics.per_component_max.size(); ++i)
    std::cout << ' ' << fmt17(run.metrics.per_component_max[i]);
  std::cout << '\n';
  std::cout << "max_clamp_deficit = " << fmt17(run.reference.max_clamp_deficit)
            << '\n';
  std::cout << "wall_ms simulate=" << fmt17(run.wall_ms[0])
            << " reference=" << fmt17(run.wall_ms[1])
            << " proximal=" << fmt17(run.wall_ms[2]) << '\n';
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& lambdas_arg) {
  std::vector<double> lambdas;
  std::stringstream ss(lambdas_arg);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) lambdas.push_back(std::stod(item));
  auto rows = lambda_sweep(cfg, lambdas);
  std::cout << "lambda,sup_error\n";
  for (const auto& r : rows)
    std::cout << fmt17(r.lambda) << ',' << fmt17(r.sup_error) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wonham filter vs. proximal recursion harness"};
  app.require_subcommand(1);

  GlobalOverrides ov;
  std::uint64_t seed_val = 0;
  std::string prior_val, metric_val;
  auto* seed_opt = app.add_option("--seed", seed_val, "Override config seed");
  auto* prior_opt =
      app.add_option("--prior", prior_val, "Override prior method")
          ->check(CLI::IsMember({"euler", "resolvent", "expm"}));
  auto* metric_opt =
      app.add_option("--metric", metric_val, "Override metric mode")
          ->check(CLI::IsMember({"inverse", "direct"}));

  std::string config_path, out_path, lambdas_arg;
  int example_id = 0;

  auto* stationary = app.add_subcommand(
      "stationary", "Print the stationary distribution and reversibility");
  stationary->add_option("--config", config_path)->required();

  auto* simulate =
      app.add_subcommand("simulate", "Emit state and observation paths");
  simulate->add_option("--config", config_path)->required();
  simulate->add_option("--out", out_path)->required();

  auto* filter =
      app.add_subcommand("filter", "Run both filters and emit the full CSV");
  filter->add_option("--config", config_path)->required();
  filter->add_option("--out", out_path)->required();

  auto* compare =
      app.add_subcommand("compare", "Run both filters and print metrics");
  compare->add_option("--config", config_path)->required();

  auto* sweep = app.add_subcommand(
      "sweep", "Reference-vs-proximal error per step size, shared noise");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--lambdas", lambdas_arg, "Comma-separated, decreasing")
      ->required();

  auto* example =
      app.add_subcommand("example", "Emit a built-in configuration");
  example->add_option("--id", example_id, "1 or 2")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (seed_opt->count()) ov.seed = seed_val;
  if (prior_opt->count()) ov.prior = prior_val;
  if (metric_opt->count()) ov.metric = metric_val;

  try {
    if (example->parsed()) {
      wonham::save_config(wonham::builtin_example(example_id), std::cout);
      return kExitOk;
    }
    const auto cfg = load_with_overrides(config_path, ov);
    if (stationary->parsed()) return cmd_stationary(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg, out_path);
    if (filter->parsed()) return cmd_filter(cfg, out_path);
    if (compare->parsed()) return cmd_compare(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg, lambdas_arg);
  } catch (const wonham::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const wonham::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const wonham::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
