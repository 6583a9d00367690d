#include "wonham/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace wonham {

namespace {

std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("config: bad number '" + item + "' for key " + key);
    }
  }
  if (out.empty()) throw ValidationError("config: empty value for key " + key);
  return out;
}

double parse_scalar(const std::string& s, const std::string& key) {
  const auto v = parse_list(s, key);
  if (v.size() != 1)
    throw ValidationError("config: key " + key + " expects a single number");
  return v[0];
}

PriorMethod parse_prior_method(const std::string& s) {
  if (s == "euler") return PriorMethod::euler;
  if (s == "resolvent") return PriorMethod::resolvent;
  if (s == "expm") return PriorMethod::expm;
  throw ValidationError("config: unknown prior_method '" + s + "'");
}

MetricMode parse_metric_mode(const std::string& s) {
  if (s == "inverse") return MetricMode::inverse_weighted;
  if (s == "direct") return MetricMode::direct_weighted;
  throw ValidationError("config: unknown metric_mode '" + s + "'");
}

const char* prior_method_name(PriorMethod m) {
  switch (m) {
    case PriorMethod::euler: return "euler";
    case PriorMethod::resolvent: return "resolvent";
    case PriorMethod::expm: return "expm";
  }
  return "?";
}

std::string join17(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format17(v[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig builtin_example(int id) {
  ExperimentConfig cfg;
  cfg.states = {-1.0, 0.0, 1.0};
  cfg.q = Mat(3, 3);
  if (id == 1) {
    cfg.q << -1.0, 0.5, 0.5,
              2.0, -2.0, 0.0,
              3.0, 0.0, -3.0;
    cfg.prior_method = PriorMethod::resolvent;
  } else if (id == 2) {
    cfg.q << -5.0, 3.0, 2.0,
              4.0, -10.0, 6.0,
              3.0, 4.0, -7.0;
    cfg.prior_method = PriorMethod::euler;
  } else {
    throw ValidationError("builtin_example: unknown id " + std::to_string(id));
  }
  cfg.h_is_gain = true;
  cfg.h_gain = 0.01;
  cfg.sigma_is_constant = true;
  cfg.sigma = 0.01;
  cfg.lambda = 1e-3;
  cfg.t_final = 1.0;
  cfg.pi0 = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  cfg.metric_mode = MetricMode::inverse_weighted;
  cfg.seed = 1;
  return cfg;
}

ExperimentConfig load_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: line " + std::to_string(line_no) +
                            " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kv.emplace(key, value).second)
      throw ValidationError("config: duplicate key '" + key + "'");
  }

  const auto take = [&](const char* key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end())
      throw ValidationError(std::string("config: missing key '") + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  const auto maybe = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  ExperimentConfig cfg;
  cfg.states = parse_list(take("states"), "states");
  const auto m = cfg.states.size();
  const auto q_flat = parse_list(take("q"), "q");
  if (q_flat.size() != m * m)
    throw ValidationError("config: q must have " + std::to_string(m * m) +
                          " row-major entries");
  cfg.q = Mat(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      cfg.q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          q_flat[i * m + j];

  if (auto g = maybe("h_gain")) {
    cfg.h_is_gain = true;
    cfg.h_gain = parse_scalar(*g, "h_gain");
  } else if (auto t = maybe("h_values")) {
    cfg.h_is_gain = false;
    cfg.h_table = parse_list(*t, "h_values");
  } else {
    throw ValidationError("config: need h_gain or h_values");
  }

  if (auto st = maybe("sigma_times")) {
    cfg.sigma_is_constant = false;
    cfg.sigma_times = parse_list(*st, "sigma_times");
    cfg.sigma_values = parse_list(take("sigma_values"), "sigma_values");
  } else {
    cfg.sigma_is_constant = true;
    cfg.sigma = parse_scalar(take("sigma"), "sigma");
  }

  cfg.lambda = parse_scalar(take("lambda"), "lambda");
  cfg.t_final = parse_scalar(take("t_final"), "t_final");
  cfg.pi0 = parse_list(take("pi0"), "pi0");
  cfg.prior_method = parse_prior_method(trim(take("prior_method")));
  if (auto mm = maybe("metric_mode")) cfg.metric_mode = parse_metric_mode(*mm);
  cfg.seed = static_cast<std::uint64_t>(parse_scalar(take("seed"), "seed"));
  if (auto out = maybe("output_path")) cfg.output_path = *out;

  if (!kv.empty())
    throw ValidationError("config: unknown key '" + kv.begin()->first + "'");
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return load_config(in);
}

void save_config(const ExperimentConfig& cfg, std::ostream& out) {
  out << "states = " << join17(cfg.states) << "\n";
  out << "q = ";
  for (Eigen::Index i = 0; i < cfg.q.rows(); ++i)
    for (Eigen::Index j = 0; j < cfg.q.cols(); ++j)
      out << (i == 0 && j == 0 ? "" : ", ") << format17(cfg.q(i, j));
  out << "\n";
  if (cfg.h_is_gain)
    out << "h_gain = " << format17(cfg.h_gain) << "\n";
  else
    out << "h_values = " << join17(cfg.h_table) << "\n";
  if (cfg.sigma_is_constant) {
    out << "sigma = " << format17(cfg.sigma) << "\n";
  } else {
    out << "sigma_times = " << join17(cfg.sigma_times) << "\n";
    out << "sigma_values = " << join17(cfg.sigma_values) << "\n";
  }
  out << "lambda = " << format17(cfg.lambda) << "\n";
  out << "t_final = " << format17(cfg.t_final) << "\n";
  out << "pi0 = " << join17(cfg.pi0) << "\n";
  out << "prior_method = " << prior_method_name(cfg.prior_method) << "\n";
  out << "metric_mode = "
      << (cfg.metric_mode == MetricMode::inverse_weighted ? "inverse"
                                                          : "direct")
      << "\n";
  out << "seed = " << cfg.seed << "\n";
  if (!cfg.output_path.empty()) out << "output_path = " << cfg.output_path << "\n";
}

ExperimentSetup make_setup(const ExperimentConfig& cfg) {
  RateMatrix q = RateMatrix::validate(cfg.q);
  CtmcModel model(cfg.states, q);

  std::vector<double> h;
  if (cfg.h_is_gain) {
    h.reserve(cfg.states.size());
    for (double a : cfg.states) h.push_back(cfg.h_gain * a);
  } else {
    h = cfg.h_table;
    if (h.size() != cfg.states.size())
      throw ValidationError("config: h_values size does not match states");
  }
  SigmaSchedule sigma =
      cfg.sigma_is_constant ? SigmaSchedule(cfg.sigma)
                            : SigmaSchedule(cfg.sigma_times, cfg.sigma_values);
  ObservationModel observation(std::move(h), std::move(sigma));

  Vec pi0_raw(static_cast<Eigen::Index>(cfg.pi0.size()));
  for (std::size_t i = 0; i < cfg.pi0.size(); ++i)
    pi0_raw[static_cast<Eigen::Index>(i)] = cfg.pi0[i];
  ProbabilityVector pi0(pi0_raw);
  if (pi0.size() != q.size())
    throw ValidationError("config: pi0 size does not match states");

  if (!(cfg.lambda > 0.0)) throw ValidationError("config: lambda must be > 0");
  if (cfg.t_final < 0.0) throw ValidationError("config: t_final must be >= 0");
  if (cfg.lambda * q.max_exit_rate() >= 1.0)
    throw ValidationError("config: stability bound lambda * max|Q_ii| < 1 violated");

  const double steps = cfg.t_final / cfg.lambda;
  const int k_max = static_cast<int>(std::llround(steps));
  if (std::abs(steps - k_max) > 1e-9 * std::max(1.0, steps))
    throw ValidationError("config: lambda must divide t_final");

  ProbabilityVector pi_inf = stationary_distribution(q);
  WeightedMetric metric(pi_inf, cfg.metric_mode);
  if (cfg.prior_method == PriorMethod::resolvent &&
      !is_reversible(q, pi_inf, 1e-9))
    throw ValidationError(
        "config: resolvent prior requires a reversible chain; use euler");

  return ExperimentSetup{std::move(model), std::move(observation),
                         std::move(pi0),   std::move(pi_inf),
                         std::move(metric), TimeGrid(cfg.lambda, k_max)};
}

double conditional_expectation(const ProbabilityVector& p,
                               const std::vector<double>& states) {
  if (static_cast<std::size_t>(p.size()) != states.size())
    throw ValidationError("conditional_expectation: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    s += states[static_cast<std::size_t>(i)] * p[i];
  return s;
}

namespace {

RunMetrics compute_metrics(const FilterRun& run) {
  RunMetrics m;
  const auto& ref = run.reference.probabilities;
  const auto& prox = run.proximal.probabilities;
  const Eigen::Index dim = ref.front().size();
  m.per_component_max = Vec::Zero(dim);
  for (std::size_t k = 0; k < ref.size(); ++k) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double e = std::abs(ref[k][i] - prox[k][i]);
      m.per_component_max[i] = std::max(m.per_component_max[i], e);
      m.sup_error = std::max(m.sup_error, e);
      if (k + 1 == ref.size()) m.final_error = std::max(m.final_error, e);
    }
    m.xhat_ref.push_back(conditional_expectation(ref[k], run.states));
    m.xhat_prox.push_back(conditional_expectation(prox[k], run.states));
  }
  return m;
}

}  // namespace

FilterRun run_experiment(const ExperimentConfig& cfg) {
  ExperimentSetup setup = make_setup(cfg);
  using clock = std::chrono::steady_clock;
  const auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  // Keep the path horizon positive so a zero-length grid still has a
  // well-defined state at t = 0.
  const double horizon = std::max(cfg.t_final, cfg.lambda);

  FilterRun run{{},
                ObservationPath{{0.0}, setup.grid},
                PosteriorTrajectory{{}, setup.grid, TrajectoryMethod::wonham_em},
                PosteriorTrajectory{{}, setup.grid, TrajectoryMethod::proximal},
                {},
                cfg.states,
                {}};
  const auto t0 = clock::now();
  try {
    run.state_path = sample_path(setup.model, setup.pi0, horizon, cfg.seed);
    run.obs =
        simulate_observations(setup.observation, run.state_path, setup.grid,
                              cfg.seed);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("run_experiment: simulate: ") + e.what());
  }
  const auto t1 = clock::now();
  try {
    run.reference = wonham_em_run(setup.pi0, setup.model.rate,
                                  setup.observation, run.obs);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("run_experiment: reference: ") + e.what());
  }
  const auto t2 = clock::now();
  try {
    run.proximal = proximal_run(setup.pi0, setup.model.rate, setup.observation,
                                run.obs, cfg.prior_method, setup.metric);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("run_experiment: proximal: ") + e.what());
  }
  const auto t3 = clock::now();

  run.wall_ms = {ms(t0, t1), ms(t1, t2), ms(t2, t3)};
  run.metrics = compute_metrics(run);
  return run;
}

std::vector<SweepRow> lambda_sweep(const ExperimentConfig& cfg,
                                   const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw ValidationError("lambda_sweep: empty lambda list");
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] < lambdas[i - 1]))
      throw ValidationError("lambda_sweep: lambdas must be decreasing");

  const double coarse_lambda = lambdas.front();
  std::vector<SweepRow> rows;
  ExperimentConfig coarse_cfg = cfg;
  coarse_cfg.lambda = coarse_lambda;
  ExperimentSetup coarse = make_setup(coarse_cfg);

  const double horizon = std::max(cfg.t_final, coarse_lambda);
  const StatePath path =
      sample_path(coarse.model, coarse.pi0, horizon, cfg.seed);
  const std::vector<double> w_coarse = brownian_grid(coarse.grid, cfg.seed);

  for (double lambda : lambdas) {
    const double ratio = coarse_lambda / lambda;
    const int factor = static_cast<int>(std::llround(ratio));
    if (std::abs(ratio - factor) > 1e-9 * factor)
      throw ValidationError(
          "lambda_sweep: grids do not nest (lambda " + format17(lambda) +
          " does not divide " + format17(coarse_lambda) + ")");

    ExperimentConfig c = cfg;
    c.lambda = lambda;
    ExperimentSetup setup = make_setup(c);
    const std::vector<double> w =
        refine_brownian(w_coarse, coarse.grid, factor, cfg.seed);
    const ObservationPath obs =
        observations_from_noise(setup.observation, path, setup.grid, w);

    const PosteriorTrajectory ref =
        wonham_em_run(setup.pi0, setup.model.rate, setup.observation, obs);
    const PosteriorTrajectory prox =
        proximal_run(setup.pi0, setup.model.rate, setup.observation, obs,
                     cfg.prior_method, setup.metric);

    double sup = 0.0;
    for (std::size_t k = 0; k < ref.probabilities.size(); ++k)
      sup = std::max(sup, (ref.probabilities[k].entries() -
                           prox.probabilities[k].entries())
                              .cwiseAbs()
                              .maxCoeff());
    rows.push_back(SweepRow{lambda, sup});
  }
  return rows;
}

void emit_csv(const FilterRun& run, std::ostream& out) {
  const Eigen::Index m = run.reference.probabilities.front().size();
  out << "t,x,z";
  for (Eigen::Index i = 1; i <= m; ++i) out << ",pi_ref_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",p_prox_" << i;
  out << ",xhat_ref,xhat_prox\n";
  for (int k = 0; k <= run.obs.grid.k_max; ++k) {
    const double t = run.obs.grid.time_at(k);
    const int state =
        path_state_at(run.state_path, std::min(t, run.state_path.horizon));
    out << format17(t) << ','
        << format17(run.states[static_cast<std::size_t>(state)]) << ','
        << format17(run.obs.z[static_cast<std::size_t>(k)]);
    const auto ku = static_cast<std::size_t>(k);
    for (Eigen::Index i = 0; i < m; ++i)
      out << ',' << format17(run.reference.probabilities[ku][i]);
    for (Eigen::Index i = 0; i < m; ++i)
      out << ',' << format17(run.proximal.probabilities[ku][i]);
    out << ',' << format17(run.metrics.xhat_ref[ku]) << ','
        << format17(run.metrics.xhat_prox[ku]) << '\n';
  }
  if (!out) throw IoError("emit_csv: write failure");
}

void emit_csv(const FilterRun& run, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("emit_csv: cannot open " + path);
  emit_csv(run, out);
  out.close();
  if (!out) throw IoError("emit_csv: write failure on " + path);
}

}  // namespace wonham
