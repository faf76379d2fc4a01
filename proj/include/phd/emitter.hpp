#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace phd {

// Contract every concrete emitter implements: field-free eigenpairs, a step
// propagator under the classical drive, and the emission-operator application.
// State columns are complex vectors in the model's own Hilbert space.
class EmitterModel {
 public:
  virtual ~EmitterModel() = default;

  virtual std::string kind() const = 0;
  virtual Eigen::Index dimension() const = 0;
  virtual int state_count() const = 0;
  virtual const std::vector<double>& energies() const = 0;

  // dimension() x state_count(), column m = |phi_m>
  virtual Eigen::MatrixXcd initial_states() const = 0;

  // advance one state from t to t + dt
  virtual void advance_one(Eigen::Ref<Eigen::VectorXcd> state, double t, double dt) const = 0;

  // advance all columns; default loops advance_one
  virtual void advance(Eigen::MatrixXcd& states, double t, double dt) const {
    for (Eigen::Index c = 0; c < states.cols(); ++c) advance_one(states.col(c), t, dt);
  }

  // emission operator applied to each column, drive evaluated at time t
  virtual Eigen::MatrixXcd emission_applied(const Eigen::MatrixXcd& states, double t) const = 0;
};

}  // namespace phd
