#include <cmath>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "test_util.hpp"
#include "wonham/harness.hpp"

using namespace wonham;
using namespace wonham::test;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

TEST_CASE("builtin examples") {
  const auto c1 = builtin_example(1);
  CHECK(c1.states == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(c1.q == example1_q());
  CHECK(c1.h_is_gain);
  CHECK(c1.h_gain == 0.01);
  CHECK(c1.sigma == 0.01);
  CHECK(c1.lambda == 1e-3);
  CHECK(c1.t_final == 1.0);
  CHECK(c1.prior_method == PriorMethod::resolvent);

  const auto c2 = builtin_example(2);
  CHECK(c2.q == example2_q());
  CHECK(c2.prior_method == PriorMethod::euler);

  CHECK_THROWS_AS(builtin_example(3), ValidationError);
  CHECK_THROWS_AS(builtin_example(0), ValidationError);
}

TEST_CASE("config round trip through save/load") {
  auto cfg = builtin_example(2);
  cfg.seed = 77;
  cfg.metric_mode = MetricMode::direct_weighted;
  cfg.output_path = "out.csv";

  std::stringstream ss;
  save_config(cfg, ss);
  const auto back = load_config(ss);

  CHECK(back.states == cfg.states);
  CHECK(back.q == cfg.q);
  CHECK(back.h_is_gain == cfg.h_is_gain);
  CHECK(back.h_gain == cfg.h_gain);
  CHECK(back.sigma == cfg.sigma);
  CHECK(back.lambda == cfg.lambda);
  CHECK(back.t_final == cfg.t_final);
  CHECK(back.pi0 == cfg.pi0);
  CHECK(back.prior_method == cfg.prior_method);
  CHECK(back.metric_mode == cfg.metric_mode);
  CHECK(back.seed == cfg.seed);
  CHECK(back.output_path == cfg.output_path);
}

TEST_CASE("load_config error paths") {
  std::stringstream base;
  save_config(builtin_example(1), base);
  const std::string text = base.str();
  {
    std::stringstream ss(text + "lambda = 2e-3\n");  // duplicate key
    CHECK_THROWS_AS(load_config(ss), ValidationError);
  }
  {
    std::stringstream ss(text + "unknown_key = 1\n");
    CHECK_THROWS_AS(load_config(ss), ValidationError);
  }
  {
    std::stringstream ss("seed = 5\n");  // missing mandatory keys
    CHECK_THROWS_AS(load_config(ss), ValidationError);
  }
  {
    std::stringstream ss("# leading comment\n" + text);
    CHECK(load_config(ss).seed == builtin_example(1).seed);
  }
  CHECK_THROWS_AS(load_config_file("/nonexistent/path/config.txt"), IoError);
}

TEST_CASE("make_setup validation") {
  auto cfg = builtin_example(1);
  CHECK_NOTHROW(make_setup(cfg));

  SUBCASE("lambda must divide t_final") {
    cfg.lambda = 3e-4;
    CHECK_THROWS_AS(make_setup(cfg), ValidationError);
  }
  SUBCASE("euler stability bound") {
    cfg.lambda = 0.5;  // 0.5 * 3 >= 1
    cfg.t_final = 1.0;
    CHECK_THROWS_AS(make_setup(cfg), ValidationError);
  }
  SUBCASE("pi0 must be a distribution") {
    cfg.pi0 = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(make_setup(cfg), ValidationError);
  }
  SUBCASE("resolvent refused for the non-reversible chain") {
    auto c2 = builtin_example(2);
    c2.prior_method = PriorMethod::resolvent;
    CHECK_THROWS_AS(make_setup(c2), ValidationError);
  }
}

TEST_CASE("conditional_expectation") {
  const std::vector<double> states = {-1.0, 0.0, 1.0};
  CHECK(conditional_expectation(ProbabilityVector::unit(3, 2), states) == 1.0);
  CHECK(conditional_expectation(ProbabilityVector::uniform(3), states) ==
        doctest::Approx(0.0).epsilon(1e-15));
  Vec p(3);
  p << 0.2, 0.3, 0.5;
  CHECK(conditional_expectation(ProbabilityVector(p), states) ==
        doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("run_experiment basics and determinism") {
  auto cfg = builtin_example(1);
  cfg.seed = 11;
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);

  const std::size_t n = static_cast<std::size_t>(std::llround(
                            cfg.t_final / cfg.lambda)) +
                        1;
  REQUIRE(a.reference.probabilities.size() == n);
  REQUIRE(a.proximal.probabilities.size() == n);
  REQUIRE(a.obs.z.size() == n);
  CHECK(a.metrics.xhat_ref.size() == n);

  for (std::size_t k = 0; k < n; ++k) {
    CHECK(a.reference.probabilities[k].entries() ==
          b.reference.probabilities[k].entries());
    CHECK(a.proximal.probabilities[k].entries() ==
          b.proximal.probabilities[k].entries());
    CHECK(a.metrics.xhat_ref[k] >= -1.0);
    CHECK(a.metrics.xhat_ref[k] <= 1.0);
    CHECK(a.metrics.xhat_prox[k] >= -1.0);
    CHECK(a.metrics.xhat_prox[k] <= 1.0);
  }
  CHECK(a.metrics.sup_error == b.metrics.sup_error);
  CHECK(a.metrics.sup_error >= a.metrics.final_error);
  CHECK(a.metrics.per_component_max.maxCoeff() == a.metrics.sup_error);
  CHECK(a.wall_ms.size() == 3);

  auto other = cfg;
  other.seed = 12;
  const auto c = run_experiment(other);
  CHECK(a.obs.z != c.obs.z);
}

TEST_CASE("run_experiment with t_final = 0 yields only the initial point") {
  auto cfg = builtin_example(1);
  cfg.t_final = 0.0;
  const auto run = run_experiment(cfg);
  REQUIRE(run.reference.probabilities.size() == 1);
  REQUIRE(run.proximal.probabilities.size() == 1);
  CHECK(run.metrics.sup_error == 0.0);
  for (int i = 0; i < 3; ++i)
    CHECK(run.reference.probabilities[0][i] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("single-entry lambda sweep reproduces run_experiment") {
  auto cfg = builtin_example(1);
  cfg.seed = 21;
  const auto run = run_experiment(cfg);
  const auto rows = lambda_sweep(cfg, {cfg.lambda});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].lambda == cfg.lambda);
  CHECK(rows[0].sup_error == run.metrics.sup_error);
}

TEST_CASE("lambda sweep validates nesting and ordering") {
  auto cfg = builtin_example(1);
  CHECK_THROWS_AS(lambda_sweep(cfg, {1e-4, 1e-3}), ValidationError);
  CHECK_THROWS_AS(lambda_sweep(cfg, {1e-3, 3e-4}), ValidationError);
  CHECK_NOTHROW(lambda_sweep(cfg, {1e-2, 5e-3, 1e-3}));
}

TEST_CASE("lambda sweep error shrinks with the step") {
  auto cfg = builtin_example(1);
  cfg.seed = 4;
  const auto rows = lambda_sweep(cfg, {1e-3, 1e-4});
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].sup_error < rows[0].sup_error);
}

TEST_CASE("emit_csv layout") {
  auto cfg = builtin_example(1);
  cfg.t_final = 0.05;
  cfg.seed = 31;
  const auto run = run_experiment(cfg);

  std::ostringstream out;
  emit_csv(run, out);
  const auto lines = split_lines(out.str());
  REQUIRE(lines.size() == 52);  // header + 51 grid points
  CHECK(lines[0] ==
        "t,x,z,pi_ref_1,pi_ref_2,pi_ref_3,p_prox_1,p_prox_2,p_prox_3,"
        "xhat_ref,xhat_prox");
  CHECK(out.str().find('\r') == std::string::npos);

  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_csv(lines[r]);
    REQUIRE(fields.size() == 11);
    const std::size_t k = r - 1;
    CHECK(std::stod(fields[0]) == doctest::Approx(k * cfg.lambda));
    CHECK(std::stod(fields[1]) ==
          run.states[static_cast<std::size_t>(path_state_at(
              run.state_path, static_cast<double>(k) * cfg.lambda))]);
    CHECK(std::stod(fields[2]) == run.obs.z[k]);
    double ref_sum = 0.0, prox_sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double ref = std::stod(fields[static_cast<std::size_t>(3 + i)]);
      const double prox = std::stod(fields[static_cast<std::size_t>(6 + i)]);
      CHECK(ref == run.reference.probabilities[k][i]);
      CHECK(prox == run.proximal.probabilities[k][i]);
      ref_sum += ref;
      prox_sum += prox;
    }
    CHECK(std::abs(ref_sum - 1.0) <= 1e-12);
    CHECK(std::abs(prox_sum - 1.0) <= 1e-12);
    CHECK(std::stod(fields[9]) == run.metrics.xhat_ref[k]);
    CHECK(std::stod(fields[10]) == run.metrics.xhat_prox[k]);
  }
}

TEST_CASE("csv parse-back reproduces the sup error") {
  auto cfg = builtin_example(2);
  cfg.t_final = 0.2;
  cfg.seed = 8;
  const auto run = run_experiment(cfg);

  std::ostringstream out;
  emit_csv(run, out);
  const auto lines = split_lines(out.str());
  double sup = 0.0;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_csv(lines[r]);
    for (int i = 0; i < 3; ++i)
      sup = std::max(sup,
                     std::abs(std::stod(fields[static_cast<std::size_t>(3 + i)]) -
                              std::stod(fields[static_cast<std::size_t>(6 + i)])));
  }
  CHECK(std::abs(sup - run.metrics.sup_error) <= 1e-12);
}

TEST_CASE("emit_csv to file is byte-identical across reruns") {
  auto cfg = builtin_example(1);
  cfg.t_final = 0.1;
  cfg.seed = 9;
  std::string text[2];
  for (int pass = 0; pass < 2; ++pass) {
    const auto run = run_experiment(cfg);
    const std::string path = "harness_rerun.csv";
    emit_csv(run, path);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    text[pass] = buf.str();
  }
  CHECK(text[0] == text[1]);
  CHECK(!text[0].empty());
}

TEST_CASE("golden fixture for example 1") {
  // Regenerate with: wonham example --id 1 --seed 1 (t_final shortened to
  // 0.1 here to keep the fixture small).
  std::ifstream in(std::string(WONHAM_TEST_DATA_DIR) + "/golden_example1.csv",
                   std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();

  auto cfg = builtin_example(1);
  cfg.t_final = 0.1;
  cfg.seed = 1;
  const auto run = run_experiment(cfg);
  std::ostringstream out;
  emit_csv(run, out);
  CHECK(out.str() == buf.str());
}
