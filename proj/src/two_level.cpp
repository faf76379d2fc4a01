#include "phd/two_level.hpp"

#include <cmath>

namespace phd {

namespace {
const std::complex<double> I(0.0, 1.0);
}

TwoLevelEmitter::TwoLevelEmitter(double level_gap, double rabi_freq, double scale)
    : level_gap_(level_gap), rabi_freq_(rabi_freq), scale_(scale), energies_{0.0, level_gap} {}

Eigen::Matrix2cd TwoLevelEmitter::propagator(double t) const {
  const double half = 0.5 * rabi_freq_ * t;
  Eigen::Matrix2cd rot;
  rot << std::cos(half), -I * std::sin(half), -I * std::sin(half), std::cos(half);
  Eigen::Matrix2cd free = Eigen::Matrix2cd::Zero();
  free(0, 0) = 1.0;
  free(1, 1) = std::exp(-I * level_gap_ * t);
  return free * rot;
}

Eigen::Matrix2cd TwoLevelEmitter::heisenberg_emission(double t) const {
  // cos(w0 t) sx + sin(w0 t) [cos(W t) sy - sin(W t) sz], times scale
  const double cw = std::cos(level_gap_ * t), sw = std::sin(level_gap_ * t);
  const double cr = std::cos(rabi_freq_ * t), sr = std::sin(rabi_freq_ * t);
  Eigen::Matrix2cd q;
  q(0, 0) = -sw * sr;
  q(1, 1) = sw * sr;
  q(0, 1) = cw - I * sw * cr;
  q(1, 0) = std::conj(q(0, 1));
  return scale_ * q;
}

std::complex<double> TwoLevelEmitter::dipole(int m, int n, double t) const {
  return heisenberg_emission(t)(m, n);
}

void TwoLevelEmitter::advance_one(Eigen::Ref<Eigen::VectorXcd> state, double t, double dt) const {
  state = (propagator(t + dt) * propagator(t).adjoint() * state).eval();
}

Eigen::MatrixXcd TwoLevelEmitter::emission_applied(const Eigen::MatrixXcd& states, double) const {
  Eigen::Matrix2cd sx;
  sx << 0.0, 1.0, 1.0, 0.0;
  return (scale_ * sx) * states;
}

}  // namespace phd
