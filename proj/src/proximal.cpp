#include "wonham/proximal.hpp"

#include <cmath>
#include <string>

namespace wonham {

namespace {
constexpr double kReversibilityTol = 1e-9;
}

CostVector cost_vector(double y, const ObservationModel& model, double t,
                       double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("cost_vector: lambda must be > 0");
  const double sigma = model.sigma(t);
  const double scale = lambda / (2.0 * sigma * sigma);
  Vec c(model.size());
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    const double r = y - model.h(i);
    c[i] = scale * r * r;
  }
  return CostVector{std::move(c)};
}

double phi_plus(const ProbabilityVector& p, const CostVector& c,
                double lambda) {
  if (p.size() != c.c.size())
    throw ValidationError("phi_plus: dimension mismatch");
  return p.entries().dot(c.c) / lambda;
}

ProbabilityVector posterior_prox_step(const ProbabilityVector& p_minus,
                                      const CostVector& c) {
  if (p_minus.size() != c.c.size())
    throw ValidationError("posterior_prox_step: dimension mismatch");
  const double c_min = c.c.minCoeff();
  Vec w(p_minus.size());
  for (Eigen::Index i = 0; i < p_minus.size(); ++i)
    w[i] = p_minus[i] * std::exp(-(c.c[i] - c_min));
  return ProbabilityVector(w / w.sum());
}

ProbabilityVector prior_prox_step(const ProbabilityVector& p_plus_prev,
                                  const RateMatrix& q, double lambda,
                                  PriorMethod method,
                                  const WeightedMetric& metric) {
  if (p_plus_prev.size() != q.size())
    throw ValidationError("prior_prox_step: dimension mismatch");
  if (lambda < 0.0) throw ValidationError("prior_prox_step: negative lambda");

  switch (method) {
    case PriorMethod::euler: {
      if (lambda * q.max_exit_rate() >= 1.0)
        throw ValidationError(
            "prior_prox_step: euler needs lambda * max|Q_ii| < 1");
      return ProbabilityVector(p_plus_prev.entries() +
                               lambda * (p_plus_prev.entries() * q.matrix()));
    }
    case PriorMethod::resolvent: {
      if (lambda * q.max_exit_rate() >= 1.0)
        throw ValidationError(
            "prior_prox_step: resolvent needs lambda * max|Q_ii| < 1");
      if (!is_reversible(q, metric.weights, kReversibilityTol))
        throw ValidationError(
            "prior_prox_step: resolvent requires a reversible chain; use "
            "euler for non-reversible Q");
      const Mat a =
          (Mat::Identity(q.size(), q.size()) - lambda * q.matrix()).transpose();
      Eigen::PartialPivLU<Mat> lu(a);
      Eigen::VectorXd x = lu.solve(p_plus_prev.entries().transpose());
      const double residual =
          (a * x - p_plus_prev.entries().transpose()).cwiseAbs().maxCoeff();
      if (!x.allFinite() || residual > 1e-10)
        throw NumericalError(
            "prior_prox_step: singular or ill-conditioned (I - lambda Q)");
      return ProbabilityVector(x.transpose());
    }
    case PriorMethod::expm:
      return ProbabilityVector(p_plus_prev.entries() *
                               matrix_exponential(lambda * q.matrix()));
  }
  throw ValidationError("prior_prox_step: unknown method");
}

double phi_minus(const ProbabilityVector& p, const RateMatrix& q,
                 const WeightedMetric& metric) {
  if (p.size() != q.size())
    throw ValidationError("phi_minus: dimension mismatch");
  return -0.5 * weighted_inner(p.entries() * q.matrix(), p.entries(), metric);
}

std::pair<ProbabilityVector, ProbabilityVector> composite_step(
    const ProbabilityVector& p_plus_prev, const RateMatrix& q,
    const ObservationModel& model, double dz, double t, double lambda,
    PriorMethod method, const WeightedMetric& metric) {
  ProbabilityVector p_minus =
      prior_prox_step(p_plus_prev, q, lambda, method, metric);
  ProbabilityVector p_plus = posterior_prox_step(
      p_minus, cost_vector(dz / lambda, model, t, lambda));
  return {std::move(p_minus), std::move(p_plus)};
}

PosteriorTrajectory proximal_run(const ProbabilityVector& p0,
                                 const RateMatrix& q,
                                 const ObservationModel& model,
                                 const ObservationPath& obs, PriorMethod method,
                                 const WeightedMetric& metric) {
  PosteriorTrajectory traj{{p0}, obs.grid, TrajectoryMethod::proximal};
  traj.probabilities.reserve(static_cast<std::size_t>(obs.grid.k_max) + 1);
  for (int k = 1; k <= obs.grid.k_max; ++k) {
    const double dz = obs.z[static_cast<std::size_t>(k)] -
                      obs.z[static_cast<std::size_t>(k) - 1];
    try {
      traj.probabilities.push_back(
          composite_step(traj.probabilities.back(), q, model, dz,
                         obs.grid.time_at(k - 1), obs.grid.lambda, method,
                         metric)
              .second);
    } catch (const NumericalError& e) {
      throw NumericalError("proximal_run: step " + std::to_string(k) + ": " +
                           e.what());
    }
  }
  return traj;
}

ProbabilityVector numeric_prox_oracle_kl(const ProbabilityVector& p_minus,
                                         const CostVector& c, double tol) {
  const Eigen::Index m = p_minus.size();
  if (c.c.size() != m)
    throw ValidationError("numeric_prox_oracle_kl: dimension mismatch");

  // Work on the support of p_minus; zeros stay zero for any minimizer.
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < m; ++i)
    if (p_minus[i] > 0.0) support.push_back(i);

  Vec p = Vec::Zero(m);
  {
    double s = 0.0;
    for (Eigen::Index i : support) s += p_minus[i];
    for (Eigen::Index i : support) p[i] = p_minus[i] / s;
  }

  // Mirror (multiplicative) iteration with a fixed under-relaxed step; the
  // objective is 1-relatively-smooth in the entropy, so any eta < 1
  // contracts, no line search needed.
  const double eta = 0.7;
  Vec grad(m);
  for (int iter = 0; iter < 20000; ++iter) {
    double mu = 0.0;
    for (Eigen::Index i : support) {
      grad[i] = std::log(p[i] / p_minus[i]) + 1.0 + c.c[i];
      mu += p[i] * grad[i];
    }
    double stat = 0.0;
    for (Eigen::Index i : support)
      stat = std::max(stat, std::abs(grad[i] - mu));
    if (stat <= tol) return ProbabilityVector(p);

    double s = 0.0;
    for (Eigen::Index i : support) {
      p[i] *= std::exp(-eta * (grad[i] - mu));
      s += p[i];
    }
    for (Eigen::Index i : support) p[i] /= s;
  }
  throw NumericalError("numeric_prox_oracle_kl: no convergence to tol " +
                       std::to_string(tol));
}

ProbabilityVector numeric_prox_oracle_quadratic(
    const ProbabilityVector& p_prev, const RateMatrix& q, double lambda,
    const WeightedMetric& metric, double tol) {
  const Eigen::Index m = p_prev.size();
  if (q.size() != m || metric.weights.size() != m)
    throw ValidationError("numeric_prox_oracle_quadratic: dimension mismatch");

  // Diagonal weighting D^{+/-1} applied as a vector.
  Vec d(m);
  for (Eigen::Index i = 0; i < m; ++i)
    d[i] = metric.mode == MetricMode::inverse_weighted
               ? 1.0 / metric.weights[i]
               : metric.weights[i];

  const Mat& qm = q.matrix();
  const auto gradient = [&](const Vec& p) -> Vec {
    // grad = (p - p_prev) D - lambda/2 (pQ D + p D Q^T)
    const Vec diff = p - p_prev.entries();
    Vec g = diff.cwiseProduct(d) -
            0.5 * lambda *
                ((p * qm).cwiseProduct(d) + p.cwiseProduct(d) * qm.transpose());
    return g;
  };

  // Fixed-step projected gradient on the affine hull sum(p) = 1; the
  // objective is strongly convex there for lambda * max|Q_ii| < 1, so a
  // 1/L step converges linearly without a line search.
  const double lip =
      d.maxCoeff() * (1.0 + lambda * (q.max_exit_rate() + qm.cwiseAbs().maxCoeff()));
  const double step = 1.0 / lip;
  Vec p = p_prev.entries();
  for (int iter = 0; iter < 200000; ++iter) {
    Vec g = gradient(p);
    g.array() -= g.mean();  // project onto the affine hull
    if (g.cwiseAbs().maxCoeff() <= tol) {
      for (Eigen::Index i = 0; i < m; ++i)
        if (lambda > 0.0 && !(p[i] > 0.0))
          throw NumericalError(
              "numeric_prox_oracle_quadratic: minimizer not interior "
              "(lambda too large)");
      return ProbabilityVector(p);
    }
    p -= step * g;
  }
  throw NumericalError("numeric_prox_oracle_quadratic: no convergence to tol " +
                       std::to_string(tol));
}

}  // namespace wonham
