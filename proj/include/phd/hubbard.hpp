#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "phd/emitter.hpp"
#include "phd/pulse.hpp"

namespace phd {

struct HubbardParams {
  int sites = 8;
  double hopping = 0.0191;        // t0 (a.u.)
  double lattice_const = 7.5589;  // a (a.u.)
  double onsite_u = 12 * 0.0191;
  double neighbor_v = 4 * 0.0191;
  bool periodic = true;
  int n_up = 4;
  int n_dn = 4;

  void validate() const;
};

// occupation-number basis of the fixed (n_up, n_dn) sector; up bits ordered
// before down bits, sites ascending; lexicographic by up mask then dn mask
struct OccupationBasis {
  int sites = 0;
  std::vector<std::uint32_t> up_masks, dn_masks;
  std::unordered_map<std::uint32_t, int> up_index, dn_index;

  long dimension() const {
    return static_cast<long>(up_masks.size()) * static_cast<long>(dn_masks.size());
  }
  long index(std::uint32_t up, std::uint32_t dn) const {
    return static_cast<long>(up_index.at(up)) * static_cast<long>(dn_masks.size()) +
           dn_index.at(dn);
  }
  std::pair<std::uint32_t, std::uint32_t> state(long idx) const {
    const long nd = static_cast<long>(dn_masks.size());
    return {up_masks[idx / nd], dn_masks[idx % nd]};
  }
};

OccupationBasis build_basis(const HubbardParams& params);

// complex CSR operator over the basis
struct SparseOp {
  long rows = 0;
  std::vector<long> row_ptr;
  std::vector<int> cols;
  std::vector<std::complex<double>> vals;

  Eigen::VectorXcd apply(const Eigen::Ref<const Eigen::VectorXcd>& x) const;
  double hermiticity_residual() const;  // max |A_ij - conj(A_ji)|
};

// A-independent pieces: forward hops sum_i c^dag_i c_{i+1} (entries -t0*sign),
// backward hops, and the diagonal interaction
struct HoppingStructure {
  long dim = 0;
  std::vector<long> f_ptr;
  std::vector<int> f_col;
  std::vector<double> f_val;
  std::vector<long> b_ptr;
  std::vector<int> b_col;
  std::vector<double> b_val;
  Eigen::VectorXd diag;

  // y = [e^{i phase} F + e^{-i phase} B + diag] x
  void apply_hamiltonian(double phase, const Eigen::Ref<const Eigen::VectorXcd>& x,
                         Eigen::Ref<Eigen::VectorXcd> y) const;
  // y = i a [e^{i phase} F - e^{-i phase} B] x
  void apply_current(double phase, double lattice_const,
                     const Eigen::Ref<const Eigen::VectorXcd>& x,
                     Eigen::Ref<Eigen::VectorXcd> y) const;
};

HoppingStructure build_structure(const OccupationBasis& basis, const HubbardParams& params);

SparseOp build_hamiltonian(const OccupationBasis& basis, const HubbardParams& params,
                           double a_cl);
SparseOp current_operator(const OccupationBasis& basis, const HubbardParams& params, double a_cl);

struct HubbardEigenstates {
  std::vector<double> energies;
  Eigen::MatrixXd states;  // dimension x M
};

// M lowest eigenpairs of the field-free Hamiltonian (dense symmetric solve)
HubbardEigenstates eigenstates_hubbard(const OccupationBasis& basis, const HubbardParams& params,
                                       int m_states);

// state <- exp(-i dt H(A_cl(t+dt/2))) state in a Krylov subspace
void lanczos_step(Eigen::Ref<Eigen::VectorXcd> state, double t, double dt,
                  const HoppingStructure& structure, const HubbardParams& params,
                  const PulseConfig& pulse, int krylov_dim = 6);

// J(A) psi
Eigen::VectorXcd current_apply(const Eigen::Ref<const Eigen::VectorXcd>& state,
                               const HoppingStructure& structure, const HubbardParams& params,
                               double a_cl);

struct HubbardOptions {
  HubbardParams params;
  int m_states = 128;
  int krylov_dim = 6;
};

class HubbardEmitter final : public EmitterModel {
 public:
  HubbardEmitter(const HubbardOptions& opt, const PulseConfig& pulse);

  std::string kind() const override { return "hubbard"; }
  Eigen::Index dimension() const override { return basis_.dimension(); }
  int state_count() const override { return opt_.m_states; }
  const std::vector<double>& energies() const override { return eig_.energies; }
  Eigen::MatrixXcd initial_states() const override;
  void advance_one(Eigen::Ref<Eigen::VectorXcd> state, double t, double dt) const override;
  Eigen::MatrixXcd emission_applied(const Eigen::MatrixXcd& states, double t) const override;

  const OccupationBasis& basis() const { return basis_; }
  const HoppingStructure& structure() const { return structure_; }
  const HubbardOptions& options() const { return opt_; }

 private:
  HubbardOptions opt_;
  PulseConfig pulse_;
  OccupationBasis basis_;
  HoppingStructure structure_;
  HubbardEigenstates eig_;
};

}  // namespace phd
