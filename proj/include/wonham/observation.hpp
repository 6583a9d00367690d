#ifndef WONHAM_OBSERVATION_HPP
#define WONHAM_OBSERVATION_HPP

#include <cstdint>
#include <vector>

#include "wonham/ctmc.hpp"
#include "wonham/simplex.hpp"

namespace wonham {

// Noise intensity sigma_V(t): either a constant or a tabulated schedule
// with linear interpolation (constant extrapolation outside the table).
class SigmaSchedule {
 public:
  explicit SigmaSchedule(double constant);
  SigmaSchedule(std::vector<double> times, std::vector<double> values);

  double operator()(double t) const;
  bool is_constant() const { return times_.empty(); }
  double constant_value() const { return constant_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

 private:
  double constant_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

// Sensing model: h(a_i) per state plus the noise intensity schedule.
class ObservationModel {
 public:
  ObservationModel(std::vector<double> h_values, SigmaSchedule sigma);

  // Skips the injectivity check. Exists so tests can exercise degenerate
  // sensing maps (constant h with m > 1).
  static ObservationModel unchecked(std::vector<double> h_values,
                                    SigmaSchedule sigma);

  const std::vector<double>& h() const { return h_; }
  double h(Eigen::Index i) const { return h_[static_cast<std::size_t>(i)]; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(h_.size()); }
  double sigma(double t) const { return sigma_(t); }
  const SigmaSchedule& sigma_schedule() const { return sigma_; }

 private:
  ObservationModel(std::vector<double> h_values, SigmaSchedule sigma, bool);
  std::vector<double> h_;
  SigmaSchedule sigma_;
};

// Uniform grid t_k = k * lambda, k = 0..k_max. A single-point grid
// (k_max = 0) represents a zero-horizon run.
struct TimeGrid {
  TimeGrid(double lambda, int k_max);

  double lambda;
  int k_max;

  double time_at(int k) const { return k * lambda; }
  double end_time() const { return k_max * lambda; }
};

struct ObservationPath {
  std::vector<double> z;  // Z_0..Z_{k_max}, Z_0 = 0
  TimeGrid grid;
};

// Standard Wiener path W(t_k) on the grid, from the `noise` substream.
std::vector<double> brownian_grid(const TimeGrid& grid, std::uint64_t seed);

// Brownian-bridge fill-in: keeps the coarse values and draws the interior
// points of each coarse interval, so coarse and refined grids share one
// continuous noise realization. factor = 1 returns the input unchanged.
std::vector<double> refine_brownian(const std::vector<double>& coarse,
                                    const TimeGrid& coarse_grid, int factor,
                                    std::uint64_t seed);

// Euler-Maruyama observation record driven by a given Wiener path:
// Z_r = Z_{r-1} + h(X(t_{r-1})) lambda + sigma(t_{r-1}) (W_r - W_{r-1}).
ObservationPath observations_from_noise(const ObservationModel& model,
                                        const StatePath& path,
                                        const TimeGrid& grid,
                                        const std::vector<double>& wiener);

// Convenience: draws the Wiener path from the seed's noise substream.
ObservationPath simulate_observations(const ObservationModel& model,
                                      const StatePath& path,
                                      const TimeGrid& grid,
                                      std::uint64_t seed);

// Scaled increments Y_{k-1} = (Z_k - Z_{k-1}) / lambda, k = 1..k_max.
std::vector<double> increments(const ObservationPath& path);

}  // namespace wonham

#endif
