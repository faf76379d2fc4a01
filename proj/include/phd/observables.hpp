#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "phd/dipole_table.hpp"
#include "phd/pulse.hpp"

namespace phd {

struct FrequencyGrid {
  std::vector<double> omegas;
  double omega_ref = 0.0;  // carrier frequency, for harmonic labelling

  // h*omega_ref for h = h_min, h_min + 1/per_harmonic, ..., h_max; the
  // fundamental is excluded by starting at h_min >= 2 by default
  static FrequencyGrid harmonics(double omega_ref, double h_min, double h_max,
                                 int per_harmonic = 1);
};

struct SpectrumPoint {
  double omega = 0.0;
  double s_coh = 0.0;
  double s_inc = 0.0;
  double s_total = 0.0;
};

struct SqueezingPoint {
  double omega = 0.0;
  double a_sym = 0.0;                     // symmetric double integral, >= 0
  std::complex<double> b_total{0.0, 0.0}; // unordered double integral +- commutator part
  double theta_star = 0.0;                // in [0, pi), convention arg(B)/2 - omega*T mod pi
  double min_variance = 0.25;
  double eta_db = 0.0;
  bool quantum_correction = true;
};

struct G2Point {
  double omega = 0.0;
  double d0 = 0.0, d2 = 0.0, d3 = 0.0, d2tilde = 0.0;
  std::complex<double> d4{0.0, 0.0};
  double g2 = 0.0;
  double n_mean = 0.0;
  double mandel_q = 0.0;
  bool defined = false;
};

// ---- per-frequency cores (N-independent; N sweeps reuse them) ----

struct SpectrumCore {
  double omega = 0.0;
  double coh_unit = 0.0;  // S_coh / [N(N-1)]
  double inc_unit = 0.0;  // S_inc / N
};

std::vector<SpectrumCore> spectrum_core(const TransitionDipoleTable& table,
                                        const FrequencyGrid& freqs);

struct SqueezingCore {
  double omega = 0.0;
  double a_sym = 0.0;
  std::complex<double> b_sym{0.0, 0.0};
  std::complex<double> b_comm{0.0, 0.0};  // nested commutator integral
  double t_end = 0.0;
};

SqueezingCore squeezing_core(const TransitionDipoleTable& table, double omega);

struct G2Coefficients {
  double omega = 0.0;
  double g0 = 0.0;
  double d0 = 0.0, d2 = 0.0, d3 = 0.0, d2tilde = 0.0;
  std::complex<double> d4{0.0, 0.0};
  double sqrt_d0 = 0.0, sqrt_d2tilde = 0.0;
  std::vector<int> states_used;
};

// m_trunc = 0 selects min(M, 64); states ranked by integrated row weight
G2Coefficients g2_coefficients(const TransitionDipoleTable& table, double omega, double g0,
                               int m_trunc = 0);
G2Point g2_assemble(const G2Coefficients& c, double n_emitters);

// ---- spec operations ----

std::vector<SpectrumPoint> spectrum(const TransitionDipoleTable& table, const FrequencyGrid& freqs,
                                    const EnsembleParams& ens);

SqueezingPoint quadrature_min_variance(const TransitionDipoleTable& table, double omega,
                                       const EnsembleParams& ens,
                                       bool include_quantum_correction);

// variance at a given quadrature angle (numerical-scan cross-check path)
double quadrature_variance(const SqueezingCore& core, const EnsembleParams& ens, double theta,
                           bool include_quantum_correction);

// theta-minimized variance from a precomputed core
double quadrature_variance_min(const SqueezingCore& core, const EnsembleParams& ens,
                               bool include_quantum_correction);

// Var_min - 1/4 evaluated without the cancellation against the vacuum term;
// exactly proportional to N by construction
double variance_excess(const SqueezingCore& core, const EnsembleParams& ens,
                       bool include_quantum_correction);

double squeezing_db(double min_variance);

G2Point g2(const TransitionDipoleTable& table, double omega, const EnsembleParams& ens,
           int m_trunc = 0);

double mandel_q(double g2_value, double n_mean);

double counting_expectation(const TransitionDipoleTable& table, double omega,
                            const EnsembleParams& ens);

// O(g0^2 N^3) correction to the counting operator: a mode-sum quadruple
// integral whose mode resolution and termination are not under control, so it
// is not evaluated; always returns nullopt.
std::optional<double> counting_correction_order4(const TransitionDipoleTable& table, double omega,
                                                 const EnsembleParams& ens);

// max over the grid of N g0 |p~(omega)|; the closed forms assume this << 1
double perturbative_parameter(const TransitionDipoleTable& table, const FrequencyGrid& freqs,
                              const EnsembleParams& ens);

}  // namespace phd
