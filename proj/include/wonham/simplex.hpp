#ifndef WONHAM_SIMPLEX_HPP
#define WONHAM_SIMPLEX_HPP

#include <Eigen/Dense>

#include "wonham/errors.hpp"

namespace wonham {

using Vec = Eigen::RowVectorXd;
using Mat = Eigen::MatrixXd;

// Tolerances for simplex membership. Entries slightly below zero from
// round-off (>= -kEntryTol) are clamped to zero; the sum must match 1
// within kSumTol.
inline constexpr double kEntryTol = 1e-15;
inline constexpr double kSumTol = 1e-12;

/// A point on the probability simplex. Immutable after construction.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(Vec entries);

  static ProbabilityVector uniform(Eigen::Index m);
  static ProbabilityVector unit(Eigen::Index m, Eigen::Index i);

  const Vec& entries() const { return entries_; }
  Eigen::Index size() const { return entries_.size(); }
  double operator[](Eigen::Index i) const { return entries_[i]; }

  bool operator==(const ProbabilityVector& other) const {
    return entries_ == other.entries_;
  }

 private:
  Vec entries_;
};

enum class MetricMode { inverse_weighted, direct_weighted };

// Weighted inner product on row vectors, weights given by a strictly
// positive probability vector (the stationary distribution in practice).
struct WeightedMetric {
  WeightedMetric(ProbabilityVector weights,
                 MetricMode mode = MetricMode::inverse_weighted);

  ProbabilityVector weights;
  MetricMode mode;
};

// KL divergence sum_i a_i log(a_i/b_i) with 0 log 0 = 0. Throws if alpha
// puts mass where beta has none.
double kl_divergence(const ProbabilityVector& alpha,
                     const ProbabilityVector& beta);

double weighted_inner(const Vec& p, const Vec& q, const WeightedMetric& metric);
double weighted_norm_sq(const Vec& p, const WeightedMetric& metric);

// Rescales a nonnegative vector to unit sum (KL projection onto the simplex).
ProbabilityVector normalize(const Vec& v);

}  // namespace wonham

#endif
