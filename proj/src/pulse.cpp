#include "phd/pulse.hpp"

#include <cmath>
#include <stdexcept>

#include "phd/constants.hpp"

namespace phd {

void PulseConfig::validate() const {
  if (peak_field <= 0.0) throw std::invalid_argument("pulse: peak_field must be > 0");
  if (carrier_freq <= 0.0) throw std::invalid_argument("pulse: carrier_freq must be > 0");
  if (cycles < 1) throw std::invalid_argument("pulse: cycles must be >= 1");
}

double vector_potential(const PulseConfig& pulse, double t) {
  const double T = pulse.duration();
  if (t < 0.0 || t > T) return 0.0;
  const double env = std::sin(pulse.carrier_freq * t / (2.0 * pulse.cycles));
  return pulse.peak_field / pulse.carrier_freq * env * env *
         std::sin(pulse.carrier_freq * t + pulse.cep);
}

TimeGrid make_time_grid(const PulseConfig& pulse, double dt, int stride) {
  pulse.validate();
  if (dt <= 0.0) throw std::invalid_argument("time grid: dt must be > 0");
  if (stride < 1) throw std::invalid_argument("time grid: stride must be >= 1");
  const double T = pulse.duration();
  if (dt >= T) throw std::invalid_argument("time grid: dt >= pulse duration (degenerate grid)");

  TimeGrid grid;
  grid.dt = dt;
  grid.stride = stride;
  grid.n_steps = static_cast<long>(std::ceil(T / dt - 1e-12));
  const long n_obs = grid.n_steps / stride + 1;
  grid.obs_times.resize(n_obs);
  for (long k = 0; k < n_obs; ++k) grid.obs_times[k] = static_cast<double>(k) * stride * dt;
  return grid;
}

int suggest_stride(double dt, double omega_max, int samples) {
  if (omega_max <= 0.0) return 1;
  const double spacing = 2.0 * std::numbers::pi / (omega_max * samples);
  return std::max(1, static_cast<int>(spacing / dt));
}

std::pair<double, double> default_coupling(const PulseConfig& pulse) {
  pulse.validate();
  const double lambda = 2.0 * std::numbers::pi * kSpeedOfLight / pulse.carrier_freq;
  const double volume = std::pow(10.0 * lambda, 3);
  return {std::sqrt(2.0 * std::numbers::pi / volume), volume};
}

void EnsembleParams::validate() const {
  if (n_emitters < 1.0) throw std::invalid_argument("ensemble: N must be >= 1");
  if (g0 <= 0.0) throw std::invalid_argument("ensemble: g0 must be > 0");
}

EnsembleParams make_ensemble(const PulseConfig& pulse, double n_emitters) {
  auto [g0, volume] = default_coupling(pulse);
  EnsembleParams ens;
  ens.n_emitters = n_emitters;
  ens.g0 = g0;
  ens.volume = volume;
  ens.validate();
  return ens;
}

}  // namespace phd
