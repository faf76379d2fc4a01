#pragma once

#include <Eigen/Dense>

#include "phd/emitter.hpp"

namespace phd {

// Resonantly driven two-level emitter with a closed-form propagator:
// levels (0, level_gap), U_sc(t) = exp(-i H0 t) exp(-i rabi_freq t sx / 2),
// emission operator scale * sx. Every matrix element is analytic, which makes
// this the reference emitter for the dipole engine and the exact-oracle runs.
class TwoLevelEmitter final : public EmitterModel {
 public:
  TwoLevelEmitter(double level_gap, double rabi_freq, double scale = 1.0);

  std::string kind() const override { return "two_level"; }
  Eigen::Index dimension() const override { return 2; }
  int state_count() const override { return 2; }
  const std::vector<double>& energies() const override { return energies_; }
  Eigen::MatrixXcd initial_states() const override { return Eigen::MatrixXcd::Identity(2, 2); }
  void advance_one(Eigen::Ref<Eigen::VectorXcd> state, double t, double dt) const override;
  Eigen::MatrixXcd emission_applied(const Eigen::MatrixXcd& states, double t) const override;

  Eigen::Matrix2cd propagator(double t) const;  // U_sc(t)
  Eigen::Matrix2cd heisenberg_emission(double t) const;  // Q_sc(t) = U^dag p U, closed form
  std::complex<double> dipole(int m, int n, double t) const;

  double level_gap() const { return level_gap_; }
  double rabi_freq() const { return rabi_freq_; }
  double scale() const { return scale_; }

 private:
  double level_gap_, rabi_freq_, scale_;
  std::vector<double> energies_;
};

}  // namespace phd
