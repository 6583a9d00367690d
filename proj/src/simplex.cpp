#include "wonham/simplex.hpp"

#include <cmath>
#include <string>

namespace wonham {

ProbabilityVector::ProbabilityVector(Vec entries) : entries_(std::move(entries)) {
  if (entries_.size() == 0)
    throw ValidationError("ProbabilityVector: empty vector");
  for (Eigen::Index i = 0; i < entries_.size(); ++i) {
    double& e = entries_[i];
    if (!std::isfinite(e))
      throw ValidationError("ProbabilityVector: non-finite entry at index " +
                            std::to_string(i));
    if (e < 0.0) {
      if (e < -kEntryTol)
        throw ValidationError("ProbabilityVector: negative entry " +
                              std::to_string(e) + " at index " +
                              std::to_string(i));
      e = 0.0;  // round-off clamp
    }
  }
  const double sum = entries_.sum();
  if (std::abs(sum - 1.0) > kSumTol)
    throw ValidationError("ProbabilityVector: entries sum to " +
                          std::to_string(sum) + ", expected 1");
}

ProbabilityVector ProbabilityVector::uniform(Eigen::Index m) {
  return ProbabilityVector(Vec::Constant(m, 1.0 / static_cast<double>(m)));
}

ProbabilityVector ProbabilityVector::unit(Eigen::Index m, Eigen::Index i) {
  Vec v = Vec::Zero(m);
  v[i] = 1.0;
  return ProbabilityVector(std::move(v));
}

WeightedMetric::WeightedMetric(ProbabilityVector w, MetricMode m)
    : weights(std::move(w)), mode(m) {
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (weights[i] <= 0.0)
      throw ValidationError("WeightedMetric: weight " + std::to_string(i) +
                            " is not strictly positive");
}

double kl_divergence(const ProbabilityVector& alpha,
                     const ProbabilityVector& beta) {
  if (alpha.size() != beta.size())
    throw ValidationError("kl_divergence: dimension mismatch");
  double d = 0.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double a = alpha[i];
    if (a == 0.0) continue;
    const double b = beta[i];
    if (b == 0.0)
      throw ValidationError(
          "kl_divergence: absolute continuity violated at index " +
          std::to_string(i));
    d += a * std::log(a / b);
  }
  return d < 0.0 ? 0.0 : d;  // Gibbs; tiny negatives are round-off
}

double weighted_inner(const Vec& p, const Vec& q, const WeightedMetric& metric) {
  if (p.size() != q.size() || p.size() != metric.weights.size())
    throw ValidationError("weighted_inner: dimension mismatch");
  const Vec& w = metric.weights.entries();
  if (metric.mode == MetricMode::inverse_weighted)
    return (p.array() * q.array() / w.array()).sum();
  return (p.array() * q.array() * w.array()).sum();
}

double weighted_norm_sq(const Vec& p, const WeightedMetric& metric) {
  return weighted_inner(p, p, metric);
}

ProbabilityVector normalize(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] < 0.0)
      throw ValidationError("normalize: negative entry at index " +
                            std::to_string(i));
  const double sum = v.sum();
  if (!(sum > 0.0))
    throw ValidationError("normalize: input has no mass");
  return ProbabilityVector(v / sum);
}

}  // namespace wonham
