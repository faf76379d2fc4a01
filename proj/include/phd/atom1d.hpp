#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "phd/emitter.hpp"
#include "phd/pulse.hpp"

namespace phd {

struct SpatialGrid {
  double x_max = 400.0;
  int n_points = 8192;

  double dx() const { return 2.0 * x_max / (n_points - 1); }
  double x(int j) const { return -x_max + j * dx(); }
  void validate() const;
};

// U(x) = -1 / sqrt(x^2 + eps^2)
struct SoftCoreParams {
  double epsilon = 0.816;
};

// cos^alpha skirt over the outer width_fraction of the grid per edge
struct AbsorbingMask {
  double width_fraction = 0.1;
  double exponent = 0.125;
};

Eigen::VectorXd mask_profile(const SpatialGrid& grid, const AbsorbingMask& mask);

struct AtomEigenstates {
  std::vector<double> energies;
  Eigen::MatrixXd states;  // n_points x M, l2-normalized columns
};

// M lowest eigenpairs of H0 = -1/2 d2/dx2 + U(x), 3-point kinetic stencil.
// Sign convention: first interior antinode positive.
AtomEigenstates field_free_eigenstates(const SpatialGrid& grid, const SoftCoreParams& pot,
                                       int m_states);

// velocity-gauge Crank-Nicolson step, H(t) = p^2/2 + A_cl(t+dt/2) p + U(x);
// the per-step factorization is shared across states
class CrankNicolsonStepper {
 public:
  CrankNicolsonStepper(const SpatialGrid& grid, const SoftCoreParams& pot,
                       const PulseConfig& pulse);

  void prepare(double t, double dt);
  void apply(Eigen::Ref<Eigen::VectorXcd> psi) const;
  // several independent states per sweep; hides the recurrence latency
  void apply_block(std::complex<double>* const* states, int count) const;

 private:
  SpatialGrid grid_;
  PulseConfig pulse_;
  Eigen::VectorXd potential_;
  std::complex<double> rhs_up_, rhs_lo_, lhs_up_;
  Eigen::VectorXcd rhs_diag_, elim_, inv_denom_;
  mutable Eigen::MatrixXcd work_;
};

// one CN step (convenience wrapper building a fresh factorization)
void cn_step(Eigen::Ref<Eigen::VectorXcd> state, double t, double dt, const SpatialGrid& grid,
             const SoftCoreParams& pot, const PulseConfig& pulse);

void apply_mask(Eigen::Ref<Eigen::VectorXcd> state, const Eigen::VectorXd& mask);

// p = -i d/dx via central differences (Dirichlet ends)
Eigen::VectorXcd momentum_apply(const Eigen::Ref<const Eigen::VectorXcd>& state, double dx);

struct AtomOptions {
  SpatialGrid grid;
  SoftCoreParams potential;
  AbsorbingMask mask;
  bool mask_enabled = true;
  int m_states = 64;
};

class AtomEmitter final : public EmitterModel {
 public:
  AtomEmitter(const AtomOptions& opt, const PulseConfig& pulse);

  std::string kind() const override { return "atom1d"; }
  Eigen::Index dimension() const override { return opt_.grid.n_points; }
  int state_count() const override { return opt_.m_states; }
  const std::vector<double>& energies() const override { return eig_.energies; }
  Eigen::MatrixXcd initial_states() const override;
  void advance_one(Eigen::Ref<Eigen::VectorXcd> state, double t, double dt) const override;
  void advance(Eigen::MatrixXcd& states, double t, double dt) const override;
  Eigen::MatrixXcd emission_applied(const Eigen::MatrixXcd& states, double t) const override;

  const AtomOptions& options() const { return opt_; }
  const AtomEigenstates& eigenstates() const { return eig_; }

 private:
  AtomOptions opt_;
  PulseConfig pulse_;
  AtomEigenstates eig_;
  Eigen::VectorXd mask_;
  mutable CrankNicolsonStepper stepper_;
};

}  // namespace phd
