#include "wonham/observation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "wonham/rng.hpp"

namespace wonham {

SigmaSchedule::SigmaSchedule(double constant) : constant_(constant) {
  if (!(constant > 0.0))
    throw ValidationError("SigmaSchedule: sigma must be strictly positive");
}

SigmaSchedule::SigmaSchedule(std::vector<double> times,
                             std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() < 2 || times_.size() != values_.size())
    throw ValidationError("SigmaSchedule: table needs >= 2 aligned points");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (times_[i] <= times_[i - 1])
      throw ValidationError("SigmaSchedule: times must be strictly increasing");
  for (double v : values_)
    if (!(v > 0.0))
      throw ValidationError("SigmaSchedule: sigma must be strictly positive");
}

double SigmaSchedule::operator()(double t) const {
  if (times_.empty()) return constant_;
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto i = static_cast<std::size_t>(it - times_.begin());
  const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

ObservationModel::ObservationModel(std::vector<double> h_values,
                                   SigmaSchedule sigma, bool)
    : h_(std::move(h_values)), sigma_(std::move(sigma)) {
  if (h_.empty()) throw ValidationError("ObservationModel: empty h table");
}

ObservationModel::ObservationModel(std::vector<double> h_values,
                                   SigmaSchedule sigma)
    : ObservationModel(std::move(h_values), std::move(sigma), true) {
  for (std::size_t i = 0; i < h_.size(); ++i)
    for (std::size_t j = i + 1; j < h_.size(); ++j)
      if (h_[i] == h_[j])
        throw ValidationError(
            "ObservationModel: h must be injective (duplicate value at "
            "indices " +
            std::to_string(i) + ", " + std::to_string(j) + ")");
}

ObservationModel ObservationModel::unchecked(std::vector<double> h_values,
                                             SigmaSchedule sigma) {
  return ObservationModel(std::move(h_values), std::move(sigma), true);
}

TimeGrid::TimeGrid(double lambda_, int k_max_) : lambda(lambda_), k_max(k_max_) {
  if (!(lambda > 0.0)) throw ValidationError("TimeGrid: lambda must be > 0");
  if (k_max < 0) throw ValidationError("TimeGrid: k_max must be >= 0");
}

std::vector<double> brownian_grid(const TimeGrid& grid, std::uint64_t seed) {
  auto rng = make_rng(seed, RngStream::noise);
  std::normal_distribution<double> gauss(0.0, std::sqrt(grid.lambda));
  std::vector<double> w(static_cast<std::size_t>(grid.k_max) + 1, 0.0);
  for (std::size_t k = 1; k < w.size(); ++k) w[k] = w[k - 1] + gauss(rng);
  return w;
}

std::vector<double> refine_brownian(const std::vector<double>& coarse,
                                    const TimeGrid& coarse_grid, int factor,
                                    std::uint64_t seed) {
  if (factor < 1) throw ValidationError("refine_brownian: factor must be >= 1");
  if (coarse.size() != static_cast<std::size_t>(coarse_grid.k_max) + 1)
    throw ValidationError("refine_brownian: path/grid size mismatch");
  if (factor == 1) return coarse;

  auto rng = make_rng(seed, RngStream::bridge,
                      static_cast<std::uint64_t>(factor));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double dt = coarse_grid.lambda / factor;

  std::vector<double> fine;
  fine.reserve(static_cast<std::size_t>(coarse_grid.k_max) * factor + 1);
  fine.push_back(coarse.front());
  for (int k = 0; k < coarse_grid.k_max; ++k) {
    // Sequential bridge inside [t_k, t_{k+1}]: condition each interior
    // point on the previous fine point and the fixed right endpoint.
    double w = coarse[static_cast<std::size_t>(k)];
    const double w_end = coarse[static_cast<std::size_t>(k) + 1];
    for (int r = 1; r < factor; ++r) {
      const double remaining = (factor - r + 1) * dt;
      const double mean = w + (w_end - w) * dt / remaining;
      const double var = dt * (remaining - dt) / remaining;
      w = mean + std::sqrt(var) * gauss(rng);
      fine.push_back(w);
    }
    fine.push_back(w_end);
  }
  return fine;
}

ObservationPath observations_from_noise(const ObservationModel& model,
                                        const StatePath& path,
                                        const TimeGrid& grid,
                                        const std::vector<double>& wiener) {
  if (grid.end_time() > path.horizon + 1e-12)
    throw ValidationError("observations_from_noise: grid exceeds path horizon");
  if (wiener.size() != static_cast<std::size_t>(grid.k_max) + 1)
    throw ValidationError("observations_from_noise: noise/grid size mismatch");

  ObservationPath obs{std::vector<double>(wiener.size(), 0.0), grid};
  for (int r = 1; r <= grid.k_max; ++r) {
    const double t_prev = grid.time_at(r - 1);
    const int state = path_state_at(path, std::min(t_prev, path.horizon));
    const double drift = model.h(state) * grid.lambda;
    const double dw = wiener[static_cast<std::size_t>(r)] -
                      wiener[static_cast<std::size_t>(r) - 1];
    obs.z[static_cast<std::size_t>(r)] =
        obs.z[static_cast<std::size_t>(r) - 1] + drift +
        model.sigma(t_prev) * dw;
  }
  return obs;
}

ObservationPath simulate_observations(const ObservationModel& model,
                                      const StatePath& path,
                                      const TimeGrid& grid,
                                      std::uint64_t seed) {
  return observations_from_noise(model, path, grid, brownian_grid(grid, seed));
}

std::vector<double> increments(const ObservationPath& path) {
  std::vector<double> y(static_cast<std::size_t>(path.grid.k_max));
  for (std::size_t k = 0; k < y.size(); ++k)
    y[k] = (path.z[k + 1] - path.z[k]) / path.grid.lambda;
  return y;
}

}  // namespace wonham
