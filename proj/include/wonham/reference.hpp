#ifndef WONHAM_REFERENCE_HPP
#define WONHAM_REFERENCE_HPP

#include <vector>

#include "wonham/ctmc.hpp"
#include "wonham/observation.hpp"

namespace wonham {

enum class TrajectoryMethod { wonham_em, proximal, zero_dynamics_closed_form };

struct PosteriorTrajectory {
  std::vector<ProbabilityVector> probabilities;  // one per grid point
  TimeGrid grid;
  TrajectoryMethod method;
  // Largest negative mass clamped away in any step (EM only); zero when
  // the discretization stayed on the simplex.
  double max_clamp_deficit = 0.0;
};

// Predicted observation drift: sum_i h(a_i) p_i.
double h_hat(const ProbabilityVector& p, const ObservationModel& model);

// One explicit Euler-Maruyama step of the Wonham SDE. Negative entries
// produced by the raw step are clamped to zero and the vector
// renormalized; the clamped mass is reported through *clamp_deficit.
ProbabilityVector wonham_em_step(const ProbabilityVector& p,
                                 const RateMatrix& q,
                                 const ObservationModel& model, double dz,
                                 double t, double lambda,
                                 double* clamp_deficit = nullptr);

PosteriorTrajectory wonham_em_run(const ProbabilityVector& p0,
                                  const RateMatrix& q,
                                  const ObservationModel& model,
                                  const ObservationPath& obs);

// Exact posterior for a frozen chain (Q == 0): multiplicative update of p0
// by the discretized stochastic integrals, evaluated in log domain.
PosteriorTrajectory zero_dynamics_closed_form(const ProbabilityVector& p0,
                                              const ObservationModel& model,
                                              const ObservationPath& obs);

}  // namespace wonham

#endif
