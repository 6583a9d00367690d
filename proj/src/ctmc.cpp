#include "wonham/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "wonham/rng.hpp"

namespace wonham {

namespace {
constexpr double kRowSumTol = 1e-12;
}

RateMatrix RateMatrix::validate(const Mat& q) {
  if (q.rows() != q.cols() || q.rows() == 0)
    throw ValidationError("RateMatrix: matrix must be square and nonempty");
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (!std::isfinite(q(i, j)))
        throw ValidationError("RateMatrix: non-finite entry");
      if (i != j && q(i, j) < 0.0)
        throw ValidationError("RateMatrix: negative off-diagonal entry at (" +
                              std::to_string(i) + "," + std::to_string(j) +
                              ")");
      row_sum += q(i, j);
    }
    if (std::abs(row_sum) > kRowSumTol)
      throw ValidationError("RateMatrix: row " + std::to_string(i) +
                            " sums to " + std::to_string(row_sum) +
                            ", expected 0");
    if (q(i, i) > 0.0)
      throw ValidationError("RateMatrix: positive diagonal entry at row " +
                            std::to_string(i));
  }
  return RateMatrix(q);
}

double RateMatrix::max_exit_rate() const {
  return q_.diagonal().cwiseAbs().maxCoeff();
}

CtmcModel::CtmcModel(std::vector<double> state_values, RateMatrix rate_matrix)
    : states(std::move(state_values)), rate(std::move(rate_matrix)) {
  if (static_cast<Eigen::Index>(states.size()) != rate.size())
    throw ValidationError("CtmcModel: state count does not match rate matrix");
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j)
      if (states[i] == states[j])
        throw ValidationError("CtmcModel: state values must be distinct");
}

ProbabilityVector stationary_distribution(const RateMatrix& q) {
  const Eigen::Index m = q.size();
  // Irreducibility <=> null space of Q^T is one-dimensional.
  Eigen::FullPivLU<Mat> lu(q.matrix().transpose());
  lu.setThreshold(1e-10);
  if (m - lu.rank() != 1)
    throw NumericalError(
        "stationary_distribution: chain is reducible or degenerate "
        "(null space dimension " +
        std::to_string(m - lu.rank()) + ")");
  Mat a(m + 1, m);
  a.topRows(m) = q.matrix().transpose();
  a.bottomRows(1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  b[m] = 1.0;
  Eigen::VectorXd pi = a.colPivHouseholderQr().solve(b);
  for (Eigen::Index i = 0; i < m; ++i)
    if (!(pi[i] > 0.0))
      throw NumericalError(
          "stationary_distribution: non-positive stationary mass at index " +
          std::to_string(i));
  const double residual =
      (pi.transpose() * q.matrix()).cwiseAbs().maxCoeff();
  if (residual > 1e-12)
    throw NumericalError("stationary_distribution: residual " +
                         std::to_string(residual) + " exceeds 1e-12");
  return ProbabilityVector(pi.transpose());
}

bool is_reversible(const RateMatrix& q, const ProbabilityVector& pi_inf,
                   double tol) {
  if (pi_inf.size() != q.size())
    throw ValidationError("is_reversible: dimension mismatch");
  for (Eigen::Index i = 0; i < pi_inf.size(); ++i)
    if (!(pi_inf[i] > 0.0))
      throw ValidationError("is_reversible: pi_inf must be strictly positive");
  double worst = 0.0;
  const Mat& qm = q.matrix();
  for (Eigen::Index i = 0; i < q.size(); ++i)
    for (Eigen::Index j = i + 1; j < q.size(); ++j)
      worst = std::max(worst,
                       std::abs(pi_inf[i] * qm(i, j) - pi_inf[j] * qm(j, i)));
  return worst <= tol;
}

Mat matrix_exponential(const Mat& a) {
  // Scale so the 1-norm is <= 0.5, sum the Taylor series to 1e-16, square
  // back up. Adequate for the small dense generators handled here.
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm1 * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  const Mat b = a * scale;
  Mat result = Mat::Identity(a.rows(), a.cols());
  Mat term = result;
  for (int n = 1; n <= 64; ++n) {
    term = term * b / static_cast<double>(n);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-16) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

ProbabilityVector propagate_prior_exact(const ProbabilityVector& p,
                                        const RateMatrix& q, double dt) {
  if (p.size() != q.size())
    throw ValidationError("propagate_prior_exact: dimension mismatch");
  if (dt < 0.0) throw ValidationError("propagate_prior_exact: negative dt");
  if (dt == 0.0) return p;
  return ProbabilityVector(p.entries() * matrix_exponential(dt * q.matrix()));
}

StatePath sample_path(const CtmcModel& model, const ProbabilityVector& initial,
                      double horizon, std::uint64_t seed) {
  if (initial.size() != model.rate.size())
    throw ValidationError("sample_path: dimension mismatch");
  if (!(horizon > 0.0)) throw ValidationError("sample_path: horizon must be > 0");

  auto rng = make_rng(seed, RngStream::chain);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  StatePath path;
  path.horizon = horizon;

  // Initial state from the given occupation vector.
  int state = 0;
  {
    double u = unif(rng);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < initial.size(); ++i) {
      acc += initial[i];
      if (u <= acc || i + 1 == initial.size()) {
        state = static_cast<int>(i);
        break;
      }
    }
  }
  path.visited.push_back(state);

  const Mat& q = model.rate.matrix();
  double t = 0.0;
  while (true) {
    const double rate = -q(state, state);
    if (rate <= 0.0) break;  // absorbing under Q==0 rows
    std::exponential_distribution<double> holding(rate);
    t += holding(rng);
    if (t > horizon) break;
    // Embedded jump chain: j != state with probability Q_sj / rate.
    double u = unif(rng) * rate;
    int next = state;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (j == state) continue;
      acc += q(state, j);
      if (u <= acc) {
        next = static_cast<int>(j);
        break;
      }
    }
    if (next == state) {
      // u landed in the round-off sliver past the last positive rate.
      for (Eigen::Index j = q.cols() - 1; j >= 0; --j)
        if (j != state && q(state, j) > 0.0) {
          next = static_cast<int>(j);
          break;
        }
    }
    path.jump_times.push_back(t);
    path.visited.push_back(next);
    state = next;
  }
  return path;
}

int path_state_at(const StatePath& path, double t) {
  if (t < 0.0 || t > path.horizon)
    throw ValidationError("path_state_at: time outside [0, horizon]");
  // Right-continuous: a jump at exactly t counts.
  const auto it =
      std::upper_bound(path.jump_times.begin(), path.jump_times.end(), t);
  auto idx = static_cast<std::size_t>(it - path.jump_times.begin());
  return path.visited[idx];
}

}  // namespace wonham
