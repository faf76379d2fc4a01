#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "phd/two_level.hpp"

namespace phd {

struct ModeConfig {
  double omega = 1.2;
  int fock_cutoff = 8;  // occupations 0..fock_cutoff
};

// Joint emitter (x) truncated-Fock system evolving under V(t) = A(t).Q_sc(t)
// in the displaced rotating frame; all photonic modes start in vacuum.
struct JointConfig {
  double level_gap = 1.0;
  double rabi_freq = 0.2;
  double emission_scale = 1.0;
  double g0 = 1e-3;
  double duration = 100.0;
  double dt = 0.002;
  std::vector<ModeConfig> modes = {ModeConfig{}};
};

class JointSystem {
 public:
  explicit JointSystem(const JointConfig& cfg);

  Eigen::Index dimension() const { return dim_; }
  Eigen::VectorXcd vacuum_state() const;  // |phi_0> (x) |0...0>
  // coherent amplitude in the focus mode, emitter ground state
  Eigen::VectorXcd coherent_state(std::complex<double> alpha, int mode = 0) const;

  Eigen::MatrixXcd interaction(double t) const;  // V(t), Hermitian

  // midpoint-exponential stepping; norm preserved to roundoff
  Eigen::VectorXcd propagate(const Eigen::VectorXcd& initial) const;
  Eigen::VectorXcd propagate(const Eigen::VectorXcd& initial, double duration, double dt) const;

  struct Observables {
    double n_mean = 0.0;
    double min_variance = 0.25;
    double g2 = 0.0;
    bool g2_defined = false;
    double top_population = 0.0;  // occupation of the highest Fock level
    std::vector<double> variance_theta;
  };

  // direct operator expectations on a joint state, for one mode; quadrature
  // phases carry e^{-i omega t_end} from the rotating frame
  Observables observables(const Eigen::VectorXcd& state, int mode, double t_end,
                          int theta_points = 512) const;

  const JointConfig& config() const { return cfg_; }
  const TwoLevelEmitter& emitter() const { return emitter_; }

 private:
  JointConfig cfg_;
  TwoLevelEmitter emitter_;
  Eigen::Index dim_;
  std::vector<Eigen::MatrixXcd> lower_;  // annihilation operator per mode, joint space
};

struct ScalingPoint {
  double g0 = 0.0;
  double exact_value = 0.0;
  double phd_value = 0.0;
  double rel_err = 0.0;
};

// exact vs PHD photon number at the focus-mode frequency over a g0 list
std::vector<ScalingPoint> coupling_scan(const JointConfig& base, const std::vector<double>& g0s,
                                        int obs_grid_points = 20001);

// least-squares slope of log(rel_err) vs log(g0)
double fitted_slope(const std::vector<ScalingPoint>& points);

}  // namespace phd
