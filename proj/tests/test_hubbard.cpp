#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "phd/hubbard.hpp"

using namespace phd;
using cplx = std::complex<double>;

namespace {

PulseConfig field_free_pulse() { return PulseConfig{1e-3, 0.1, 1}; }

Eigen::MatrixXcd dense_of(const SparseOp& op) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(op.rows, op.rows);
  for (long r = 0; r < op.rows; ++r)
    for (long p = op.row_ptr[r]; p < op.row_ptr[r + 1]; ++p) h(r, op.cols[p]) += op.vals[p];
  return h;
}

// exact exp(-i dt H(A_mid)) stepping; isolates the Krylov error
void dense_step(Eigen::VectorXcd& psi, const OccupationBasis& basis, const HubbardParams& params,
                const PulseConfig& pulse, double t, double dt) {
  const double a_mid = vector_potential(pulse, t + 0.5 * dt);
  const Eigen::MatrixXcd h = dense_of(build_hamiltonian(basis, params, a_mid));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(psi.size());
  for (Eigen::Index j = 0; j < psi.size(); ++j)
    phases[j] = std::exp(cplx(0.0, -dt * es.eigenvalues()[j]));
  psi = es.eigenvectors() * (phases.array() * (es.eigenvectors().adjoint() * psi).array()).matrix();
}

HubbardParams small_params(int sites, int n_up, int n_dn) {
  HubbardParams p;
  p.sites = sites;
  p.n_up = n_up;
  p.n_dn = n_dn;
  return p;
}

}  // namespace

TEST_CASE("basis dimensions") {
  CHECK(build_basis(small_params(8, 4, 4)).dimension() == 4900);
  CHECK(build_basis(small_params(2, 1, 1)).dimension() == 4);
  CHECK_THROWS(build_basis(small_params(8, 9, 0)));

  const auto basis = build_basis(small_params(4, 2, 2));
  for (long r = 0; r < basis.dimension(); ++r) {
    auto [up, dn] = basis.state(r);
    CHECK(basis.index(up, dn) == r);
  }
}

TEST_CASE("hubbard dimer against the analytic four-level solution") {
  HubbardParams p = small_params(2, 1, 1);
  p.periodic = false;
  p.neighbor_v = 0.0;
  p.onsite_u = 0.3;
  p.hopping = 0.05;
  const auto basis = build_basis(p);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_of(build_hamiltonian(basis, p, 0.0)));
  const double root = std::sqrt(p.onsite_u * p.onsite_u + 16.0 * p.hopping * p.hopping);
  std::vector<double> expect = {0.5 * (p.onsite_u - root), 0.0, p.onsite_u,
                                0.5 * (p.onsite_u + root)};
  std::sort(expect.begin(), expect.end());
  for (int j = 0; j < 4; ++j)
    CHECK(es.eigenvalues()[j] == doctest::Approx(expect[j]).epsilon(1e-12));

  const auto eig = eigenstates_hubbard(basis, p, 4);
  for (int j = 0; j < 4; ++j)
    CHECK(eig.energies[j] == doctest::Approx(expect[j]).epsilon(1e-12));
}

TEST_CASE("hamiltonian hermiticity with a live Peierls phase") {
  HubbardParams p = small_params(4, 2, 2);
  const auto basis = build_basis(p);
  const auto h = build_hamiltonian(basis, p, 0.37);
  CHECK(h.hermiticity_residual() < 1e-14);
  const auto j = current_operator(basis, p, 0.37);
  CHECK(j.hermiticity_residual() < 1e-14);
}

TEST_CASE("integer flux leaves the spectrum unchanged on the ring") {
  HubbardParams p = small_params(6, 3, 3);
  const auto basis = build_basis(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> a(dense_of(build_hamiltonian(basis, p, 0.0)));
  const double a_cl = 2.0 * std::numbers::pi / p.lattice_const;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> b(dense_of(build_hamiltonian(basis, p, a_cl)));
  for (Eigen::Index k = 0; k < a.eigenvalues().size(); ++k)
    CHECK(std::abs(a.eigenvalues()[k] - b.eigenvalues()[k]) < 1e-10);
}

TEST_CASE("spectrum is invariant under a basis permutation") {
  HubbardParams p = small_params(4, 2, 2);
  const auto basis = build_basis(p);
  const Eigen::MatrixXcd h = dense_of(build_hamiltonian(basis, p, 0.0));
  std::mt19937_64 rng(23);
  std::vector<int> perm(basis.dimension());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXcd hp(h.rows(), h.cols());
  for (long r = 0; r < h.rows(); ++r)
    for (long c = 0; c < h.cols(); ++c) hp(perm[r], perm[c]) = h(r, c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(h), eb(hp);
  for (Eigen::Index k = 0; k < ea.eigenvalues().size(); ++k)
    CHECK(std::abs(ea.eigenvalues()[k] - eb.eigenvalues()[k]) < 1e-10);
}

TEST_CASE("charge-density-wave ground state at U=12t0, V=4t0") {
  HubbardParams p = small_params(6, 3, 3);
  const auto basis = build_basis(p);
  const auto eig = eigenstates_hubbard(basis, p, 3);

  // neighbor density correlation below the uncorrelated value
  double corr = 0.0;
  for (long r = 0; r < basis.dimension(); ++r) {
    auto [up, dn] = basis.state(r);
    double acc = 0.0;
    for (int i = 0; i < p.sites; ++i) {
      const int ip = (i + 1) % p.sites;
      const double ni = (up >> i & 1u) + (dn >> i & 1u);
      const double nip = (up >> ip & 1u) + (dn >> ip & 1u);
      acc += ni * nip;
    }
    corr += eig.states(r, 0) * eig.states(r, 0) * acc / p.sites;
  }
  const double nbar = static_cast<double>(p.n_up + p.n_dn) / p.sites;
  CHECK(corr < nbar * nbar);

  // orthonormality
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b <= a; ++b)
      CHECK(std::abs(eig.states.col(a).dot(eig.states.col(b)) - (a == b ? 1.0 : 0.0)) < 1e-10);
}

TEST_CASE("lanczos step matches dense matrix-exponential propagation") {
  HubbardParams p = small_params(4, 2, 2);
  const PulseConfig pulse{0.05, 0.1, 2};
  const auto basis = build_basis(p);
  const auto structure = build_structure(basis, p);
  const auto eig = eigenstates_hubbard(basis, p, 1);

  Eigen::VectorXcd psi_krylov = eig.states.col(0).cast<cplx>();
  Eigen::VectorXcd psi_dense = psi_krylov;
  const double dt = 0.1;
  const int n_steps = 400;
  double worst_state = 0.0, worst_current = 0.0;
  for (int s = 0; s < n_steps; ++s) {
    const double t = s * dt;
    lanczos_step(psi_krylov, t, dt, structure, p, pulse, 6);
    dense_step(psi_dense, basis, p, pulse, t, dt);
    worst_state = std::max(worst_state, (psi_krylov - psi_dense).norm());
    const double a_cl = vector_potential(pulse, t + dt);
    const cplx jk = psi_krylov.dot(current_apply(psi_krylov, structure, p, a_cl));
    const cplx jd = psi_dense.dot(current_apply(psi_dense, structure, p, a_cl));
    worst_current = std::max(worst_current, std::abs(jk - jd));
  }
  CHECK(worst_state < 1e-8);
  CHECK(worst_current < 1e-7);
}

TEST_CASE("lanczos norm drift below 1e-9 over 1000 steps at dt=0.26") {
  HubbardParams p = small_params(4, 2, 2);  // paper couplings, smaller chain
  const PulseConfig pulse{0.0025, 0.00955, 10};
  const auto basis = build_basis(p);
  const auto structure = build_structure(basis, p);
  const auto eig = eigenstates_hubbard(basis, p, 4);

  Eigen::VectorXcd psi = (eig.states.col(0) + 0.3 * eig.states.col(3)).cast<cplx>().normalized();
  const double dt = 0.26;
  for (int s = 0; s < 1000; ++s) lanczos_step(psi, s * dt, dt, structure, p, pulse, 6);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-9);
}

TEST_CASE("field-free eigenstates accumulate the exact phase") {
  HubbardParams p = small_params(4, 2, 2);
  const PulseConfig pulse = field_free_pulse();
  const double t0 = 2.0 * pulse.duration();
  const auto basis = build_basis(p);
  const auto structure = build_structure(basis, p);
  const auto eig = eigenstates_hubbard(basis, p, 3);

  const double dt = 0.26;
  const int n_steps = 385;  // ~100 a.u.
  for (int m = 0; m < 3; ++m) {
    Eigen::VectorXcd psi = eig.states.col(m).cast<cplx>();
    for (int s = 0; s < n_steps; ++s) lanczos_step(psi, t0 + s * dt, dt, structure, p, pulse, 6);
    const cplx overlap = eig.states.col(m).cast<cplx>().dot(psi);
    const cplx expected = std::exp(cplx(0.0, -eig.energies[m] * n_steps * dt));
    CHECK(std::abs(overlap - expected) < 1e-8);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("current operator basics") {
  HubbardParams p = small_params(6, 3, 3);
  const auto basis = build_basis(p);
  const auto structure = build_structure(basis, p);
  const auto eig = eigenstates_hubbard(basis, p, 4);

  // reflection symmetry: no current in the field-free ground state
  const Eigen::VectorXcd gs = eig.states.col(0).cast<cplx>();
  CHECK(std::abs(gs.dot(current_apply(gs, structure, p, 0.0))) < 1e-12);

  // real eigenvector gauge at A=0: current matrix elements purely imaginary,
  // and Hermitian as a matrix
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n <= m; ++n) {
      const cplx jmn = eig.states.col(m).cast<cplx>().dot(
          current_apply(eig.states.col(n).cast<cplx>(), structure, p, 0.0));
      const cplx jnm = eig.states.col(n).cast<cplx>().dot(
          current_apply(eig.states.col(m).cast<cplx>(), structure, p, 0.0));
      CHECK(std::abs(jmn - std::conj(jnm)) < 1e-13);
      CHECK(std::abs(jmn.real()) < 1e-13);
    }
}

TEST_CASE("krylov breakdown falls back to the exact small subspace") {
  HubbardParams p = small_params(2, 1, 1);
  const PulseConfig pulse = field_free_pulse();
  const auto basis = build_basis(p);
  const auto structure = build_structure(basis, p);
  const auto eig = eigenstates_hubbard(basis, p, 1);

  Eigen::VectorXcd psi = eig.states.col(0).cast<cplx>();
  const double t0 = 2.0 * pulse.duration();
  lanczos_step(psi, t0, 0.26, structure, p, pulse, 6);  // subspace dim 1
  const cplx overlap = eig.states.col(0).cast<cplx>().dot(psi);
  CHECK(std::abs(overlap - std::exp(cplx(0.0, -eig.energies[0] * 0.26))) < 1e-13);
}
