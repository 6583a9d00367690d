#ifndef WONHAM_HARNESS_HPP
#define WONHAM_HARNESS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "wonham/proximal.hpp"

namespace wonham {

// Flat key = value experiment description. See load_config for the keys.
struct ExperimentConfig {
  std::vector<double> states;
  Mat q;

  // Sensing map: either h(a) = h_gain * a, or an explicit per-state table.
  bool h_is_gain = true;
  double h_gain = 0.0;
  std::vector<double> h_table;

  // Noise intensity: constant, or tabulated (times/values, interpolated).
  bool sigma_is_constant = true;
  double sigma = 0.0;
  std::vector<double> sigma_times;
  std::vector<double> sigma_values;

  double lambda = 0.0;
  double t_final = 0.0;
  std::vector<double> pi0;
  PriorMethod prior_method = PriorMethod::euler;
  MetricMode metric_mode = MetricMode::inverse_weighted;
  std::uint64_t seed = 0;
  std::string output_path;
};

// Validated, ready-to-run form of a config.
struct ExperimentSetup {
  CtmcModel model;
  ObservationModel observation;
  ProbabilityVector pi0;
  ProbabilityVector pi_inf;
  WeightedMetric metric;
  TimeGrid grid;
};

struct RunMetrics {
  double sup_error = 0.0;          // max over grid points and components
  Vec per_component_max;           // per-component max |ref - prox|
  double final_error = 0.0;        // max component error at t_final
  std::vector<double> xhat_ref;    // conditional expectation series
  std::vector<double> xhat_prox;
};

struct FilterRun {
  StatePath state_path;
  ObservationPath obs;
  PosteriorTrajectory reference;
  PosteriorTrajectory proximal;
  RunMetrics metrics;
  std::vector<double> states;        // state values, for x / xhat columns
  std::vector<double> wall_ms;       // per-phase timings: simulate, ref, prox
};

struct SweepRow {
  double lambda;
  double sup_error;
};

// The two built-in 3-state experiment configurations.
ExperimentConfig builtin_example(int id);

ExperimentConfig load_config(std::istream& in);
ExperimentConfig load_config_file(const std::string& path);
void save_config(const ExperimentConfig& cfg, std::ostream& out);

// Cross-module validation of a config (simplex, rate matrix, injectivity,
// Euler stability bound lambda * max|Q_ii| < 1, irreducibility).
ExperimentSetup make_setup(const ExperimentConfig& cfg);

// One chain path + one observation path from the seed, then the
// Euler-Maruyama reference and the proximal recursion on identical
// increments, with error metrics. Deterministic given the config.
FilterRun run_experiment(const ExperimentConfig& cfg);

double conditional_expectation(const ProbabilityVector& p,
                               const std::vector<double>& states);

// Reference-vs-proximal sup error per step size, on one chain path and one
// continuous noise realization shared across grids by Brownian-bridge
// refinement. Lambdas must be decreasing and nest into the coarsest.
std::vector<SweepRow> lambda_sweep(const ExperimentConfig& cfg,
                                   const std::vector<double>& lambdas);

// CSV contract: header t,x,z,pi_ref_1..m,p_prox_1..m,xhat_ref,xhat_prox;
// 17 significant digits; LF line endings.
void emit_csv(const FilterRun& run, const std::string& path);
void emit_csv(const FilterRun& run, std::ostream& out);

}  // namespace wonham

#endif
