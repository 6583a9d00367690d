#ifndef WONHAM_CTMC_HPP
#define WONHAM_CTMC_HPP

#include <cstdint>
#include <vector>

#include "wonham/simplex.hpp"

namespace wonham {

/// Transition-rate (generator) matrix: nonnegative off-diagonal entries,
/// zero row sums. The zero matrix is accepted (frozen chain).
class RateMatrix {
 public:
  static RateMatrix validate(const Mat& q);

  const Mat& matrix() const { return q_; }
  Eigen::Index size() const { return q_.rows(); }

  // max_i |Q_ii|, the fastest exit rate; governs the Euler stability bound.
  double max_exit_rate() const;

 private:
  explicit RateMatrix(Mat q) : q_(std::move(q)) {}
  Mat q_;
};

struct CtmcModel {
  CtmcModel(std::vector<double> state_values, RateMatrix rate_matrix);

  std::vector<double> states;  // a_1..a_m, pairwise distinct
  RateMatrix rate;
};

// Piecewise-constant realization of X(t): initial state plus one entry of
// `visited` per jump. Right-continuous at jump times.
struct StatePath {
  std::vector<double> jump_times;  // strictly increasing, in (0, horizon]
  std::vector<int> visited;        // size jump_times.size() + 1
  double horizon = 0.0;
};

// Unique stationary distribution of an irreducible chain, via the
// least-squares solve of [Q^T; 1^T] pi^T = [0; 1]. Throws on reducible or
// degenerate input.
ProbabilityVector stationary_distribution(const RateMatrix& q);

// Detailed balance check: max_{i,j} |pi_i Q_ij - pi_j Q_ji| <= tol.
bool is_reversible(const RateMatrix& q, const ProbabilityVector& pi_inf,
                   double tol);

// p exp(dt Q), exact prior propagation over dt.
ProbabilityVector propagate_prior_exact(const ProbabilityVector& p,
                                        const RateMatrix& q, double dt);

// Dense matrix exponential by scaling-and-squaring on a truncated series.
Mat matrix_exponential(const Mat& a);

// Gillespie construction: exponential holding times, embedded jump chain.
// Draws from the `chain` substream of the seed.
StatePath sample_path(const CtmcModel& model, const ProbabilityVector& initial,
                      double horizon, std::uint64_t seed);

int path_state_at(const StatePath& path, double t);

}  // namespace wonham

#endif
