#ifndef WONHAM_PROXIMAL_HPP
#define WONHAM_PROXIMAL_HPP

#include <utility>

#include "wonham/reference.hpp"

namespace wonham {

// Per-step measurement cost c(i) = lambda (y - h(a_i))^2 / (2 sigma(t)^2).
struct CostVector {
  Vec c;
};

// How the one-step prior map is realized:
//   euler     p (I + lambda Q)          explicit, needs lambda max|Q_ii| < 1
//   resolvent p (I - lambda Q)^{-1}     exact minimizer of the weighted
//                                       quadratic proximal problem;
//                                       requires a reversible chain
//   expm      p exp(lambda Q)           exact semigroup baseline
enum class PriorMethod { euler, resolvent, expm };

CostVector cost_vector(double y, const ObservationModel& model, double t,
                       double lambda);

// Expected squared innovation under p, scaled by 1/(2 sigma^2): <c, p>/lambda.
double phi_plus(const ProbabilityVector& p, const CostVector& c, double lambda);

// Entropic proximal map: the unique minimizer of
//   D_KL(p || p_minus) + <c, p>  over the simplex,
// in closed form p_minus .* exp(-c) normalized. c is shifted by its
// minimum before exponentiation (normalization-invariant).
ProbabilityVector posterior_prox_step(const ProbabilityVector& p_minus,
                                      const CostVector& c);

ProbabilityVector prior_prox_step(const ProbabilityVector& p_plus_prev,
                                  const RateMatrix& q, double lambda,
                                  PriorMethod method,
                                  const WeightedMetric& metric);

// Dirichlet-form energy -1/2 <pQ, p>_w; nonnegative for reversible Q
// with metric weights equal to the stationary distribution.
double phi_minus(const ProbabilityVector& p, const RateMatrix& q,
                 const WeightedMetric& metric);

// Prior prox followed by posterior prox, one observation increment dz
// absorbed over [t, t + lambda].
std::pair<ProbabilityVector, ProbabilityVector> composite_step(
    const ProbabilityVector& p_plus_prev, const RateMatrix& q,
    const ObservationModel& model, double dz, double t, double lambda,
    PriorMethod method, const WeightedMetric& metric);

PosteriorTrajectory proximal_run(const ProbabilityVector& p0,
                                 const RateMatrix& q,
                                 const ObservationModel& model,
                                 const ObservationPath& obs, PriorMethod method,
                                 const WeightedMetric& metric);

// Independent verifier of the entropic prox: mirror-descent iteration with
// step halving, run to Lagrangian stationarity <= tol. Never calls
// posterior_prox_step.
ProbabilityVector numeric_prox_oracle_kl(const ProbabilityVector& p_minus,
                                         const CostVector& c, double tol);

// Independent verifier of the quadratic prox: projected gradient descent
// on the affine hull of the simplex. Never forms (I - lambda Q)^{-1}.
ProbabilityVector numeric_prox_oracle_quadratic(
    const ProbabilityVector& p_prev, const RateMatrix& q, double lambda,
    const WeightedMetric& metric, double tol);

}  // namespace wonham

#endif
