#include "wonham/reference.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace wonham {

double h_hat(const ProbabilityVector& p, const ObservationModel& model) {
  if (p.size() != model.size())
    throw ValidationError("h_hat: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) s += model.h(i) * p[i];
  return s;
}

ProbabilityVector wonham_em_step(const ProbabilityVector& p,
                                 const RateMatrix& q,
                                 const ObservationModel& model, double dz,
                                 double t, double lambda,
                                 double* clamp_deficit) {
  if (p.size() != q.size() || p.size() != model.size())
    throw ValidationError("wonham_em_step: dimension mismatch");

  const double hh = h_hat(p, model);
  const double sigma = model.sigma(t);
  const double innovation = (dz - hh * lambda) / (sigma * sigma);
  Vec drift = p.entries() * q.matrix();

  Vec next(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    next[i] = p[i] + lambda * drift[i] + p[i] * (model.h(i) - hh) * innovation;

  double deficit = 0.0;
  for (Eigen::Index i = 0; i < next.size(); ++i)
    if (next[i] < 0.0) {
      deficit -= next[i];
      next[i] = 0.0;
    }
  if (clamp_deficit) *clamp_deficit = deficit;

  const double sum = next.sum();
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw NumericalError(
        "wonham_em_step: step collapsed (post-clamp sum " +
        std::to_string(sum) + ", deficit " + std::to_string(deficit) +
        ", dz " + std::to_string(dz) + "); lambda too coarse for this noise");
  return ProbabilityVector(next / sum);
}

PosteriorTrajectory wonham_em_run(const ProbabilityVector& p0,
                                  const RateMatrix& q,
                                  const ObservationModel& model,
                                  const ObservationPath& obs) {
  PosteriorTrajectory traj{{p0}, obs.grid, TrajectoryMethod::wonham_em};
  traj.probabilities.reserve(static_cast<std::size_t>(obs.grid.k_max) + 1);
  for (int k = 1; k <= obs.grid.k_max; ++k) {
    const double dz = obs.z[static_cast<std::size_t>(k)] -
                      obs.z[static_cast<std::size_t>(k) - 1];
    double deficit = 0.0;
    try {
      traj.probabilities.push_back(
          wonham_em_step(traj.probabilities.back(), q, model, dz,
                         obs.grid.time_at(k - 1), obs.grid.lambda, &deficit));
    } catch (const NumericalError& e) {
      throw NumericalError("wonham_em_run: step " + std::to_string(k) + ": " +
                           e.what());
    }
    traj.max_clamp_deficit = std::max(traj.max_clamp_deficit, deficit);
  }
  return traj;
}

PosteriorTrajectory zero_dynamics_closed_form(const ProbabilityVector& p0,
                                              const ObservationModel& model,
                                              const ObservationPath& obs) {
  if (p0.size() != model.size())
    throw ValidationError("zero_dynamics_closed_form: dimension mismatch");

  PosteriorTrajectory traj{
      {p0}, obs.grid, TrajectoryMethod::zero_dynamics_closed_form};
  traj.probabilities.reserve(static_cast<std::size_t>(obs.grid.k_max) + 1);

  // Running discretized integrals of dZ/sigma^2 and dt/sigma^2. The
  // state-independent part of the exponent cancels under normalization.
  double int_dz = 0.0;
  double int_dt = 0.0;
  Vec logw(p0.size());
  for (int k = 1; k <= obs.grid.k_max; ++k) {
    const double sigma = model.sigma(obs.grid.time_at(k - 1));
    const double s2 = sigma * sigma;
    int_dz += (obs.z[static_cast<std::size_t>(k)] -
               obs.z[static_cast<std::size_t>(k) - 1]) /
              s2;
    int_dt += obs.grid.lambda / s2;

    double max_exp = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p0.size(); ++i) {
      const double h = model.h(i);
      logw[i] = h * int_dz - 0.5 * h * h * int_dt;
      if (p0[i] > 0.0) max_exp = std::max(max_exp, logw[i]);
    }
    Vec w(p0.size());
    for (Eigen::Index i = 0; i < p0.size(); ++i)
      w[i] = p0[i] > 0.0 ? p0[i] * std::exp(logw[i] - max_exp) : 0.0;
    traj.probabilities.push_back(ProbabilityVector(w / w.sum()));
  }
  return traj;
}

}  // namespace wonham
