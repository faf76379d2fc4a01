#pragma once

#include <complex>
#include <numbers>
#include <utility>
#include <vector>

namespace phd {

// sin^2-envelope laser pulse, A_cl(t) = (F0/wL) sin^2(wL t / (2 Nc)) sin(wL t + cep)
struct PulseConfig {
  double peak_field = 0.053;    // F0 (a.u.)
  double carrier_freq = 0.057;  // omega_L (a.u.)
  int cycles = 8;               // Nc
  double cep = std::numbers::pi / 2;

  double duration() const { return 2.0 * std::numbers::pi * cycles / carrier_freq; }
  void validate() const;
};

// A_cl(t); zero outside [0, T]
double vector_potential(const PulseConfig& pulse, double t);

// fine propagation grid plus the decimated recording grid t_k = k*stride*dt
struct TimeGrid {
  double dt = 0.0;
  long n_steps = 0;
  int stride = 1;
  std::vector<double> obs_times;

  double obs_spacing() const { return dt * stride; }
  int n_obs() const { return static_cast<int>(obs_times.size()); }
};

TimeGrid make_time_grid(const PulseConfig& pulse, double dt, int stride);

// stride such that the recording spacing resolves omega_max with >= `samples` points per period
int suggest_stride(double dt, double omega_max, int samples = 8);

// quantization volume V = (10 lambda_L)^3 and g0 = sqrt(2 pi / V)
std::pair<double, double> default_coupling(const PulseConfig& pulse);

struct EnsembleParams {
  double n_emitters = 1.0;  // integer-valued
  double g0 = 0.0;
  double volume = 0.0;

  void validate() const;
};

EnsembleParams make_ensemble(const PulseConfig& pulse, double n_emitters);

// complex samples aligned with a recording grid
struct ComplexSeries {
  std::vector<double> times;
  std::vector<std::complex<double>> values;
};

}  // namespace phd
