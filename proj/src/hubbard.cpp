#include "phd/hubbard.hpp"

#include <lapacke.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace phd {

void HubbardParams::validate() const {
  if (sites < 2 || sites > 30) throw std::invalid_argument("hubbard: sites out of range");
  if (n_up < 0 || n_up > sites || n_dn < 0 || n_dn > sites)
    throw std::invalid_argument("hubbard: electron count outside 0..L");
  if (hopping <= 0.0) throw std::invalid_argument("hubbard: hopping must be > 0");
  if (lattice_const <= 0.0) throw std::invalid_argument("hubbard: lattice constant must be > 0");
}

namespace {

std::vector<std::uint32_t> masks_with_popcount(int sites, int count) {
  std::vector<std::uint32_t> out;
  const std::uint32_t top = 1u << sites;
  for (std::uint32_t m = 0; m < top; ++m)
    if (std::popcount(m) == count) out.push_back(m);
  return out;
}

// annihilate at site j then create at site i within one spin's mask;
// returns {new_mask, sign} or sign 0 when the move is blocked
struct HopResult {
  std::uint32_t mask;
  int sign;
};

HopResult hop(std::uint32_t mask, int create_at, int annihilate_at) {
  const std::uint32_t aj = 1u << annihilate_at;
  const std::uint32_t ai = 1u << create_at;
  if (!(mask & aj)) return {0, 0};
  int sign = std::popcount(mask & (aj - 1));
  std::uint32_t m2 = mask ^ aj;
  if (m2 & ai) return {0, 0};
  sign += std::popcount(m2 & (ai - 1));
  return {m2 | ai, (sign & 1) ? -1 : 1};
}

long binomial(int n, int k) {
  long r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

}  // namespace

OccupationBasis build_basis(const HubbardParams& params) {
  params.validate();
  const long dim = binomial(params.sites, params.n_up) * binomial(params.sites, params.n_dn);
  if (dim > 10'000'000) throw std::invalid_argument("hubbard: basis dimension exceeds 1e7");

  OccupationBasis basis;
  basis.sites = params.sites;
  basis.up_masks = masks_with_popcount(params.sites, params.n_up);
  basis.dn_masks = masks_with_popcount(params.sites, params.n_dn);
  for (int k = 0; k < static_cast<int>(basis.up_masks.size()); ++k)
    basis.up_index[basis.up_masks[k]] = k;
  for (int k = 0; k < static_cast<int>(basis.dn_masks.size()); ++k)
    basis.dn_index[basis.dn_masks[k]] = k;
  return basis;
}

Eigen::VectorXcd SparseOp::apply(const Eigen::Ref<const Eigen::VectorXcd>& x) const {
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(rows);
  for (long r = 0; r < rows; ++r) {
    std::complex<double> acc = 0.0;
    for (long p = row_ptr[r]; p < row_ptr[r + 1]; ++p) acc += vals[p] * x[cols[p]];
    y[r] = acc;
  }
  return y;
}

double SparseOp::hermiticity_residual() const {
  std::map<std::pair<long, long>, std::complex<double>> entries;
  for (long r = 0; r < rows; ++r)
    for (long p = row_ptr[r]; p < row_ptr[r + 1]; ++p) entries[{r, cols[p]}] += vals[p];
  double worst = 0.0;
  for (const auto& [ij, v] : entries) {
    auto it = entries.find({ij.second, ij.first});
    const std::complex<double> vt = (it == entries.end()) ? 0.0 : it->second;
    worst = std::max(worst, std::abs(v - std::conj(vt)));
  }
  return worst;
}

HoppingStructure build_structure(const OccupationBasis& basis, const HubbardParams& params) {
  params.validate();
  const long dim = basis.dimension();
  const int L = params.sites;
  const int n_bonds = params.periodic ? L : L - 1;

  HoppingStructure s;
  s.dim = dim;
  s.diag.resize(dim);
  s.f_ptr.assign(dim + 1, 0);
  s.b_ptr.assign(dim + 1, 0);

  std::vector<std::pair<int, double>> frow, brow;
  for (long r = 0; r < dim; ++r) {
    auto [up, dn] = basis.state(r);

    double d = 0.0;
    for (int i = 0; i < L; ++i) {
      const bool nu = up >> i & 1u, nd = dn >> i & 1u;
      if (nu && nd) d += params.onsite_u;
      const int ip = (i + 1) % L;
      if (i < n_bonds) {
        const double ni = static_cast<double>(nu) + static_cast<double>(nd);
        const double nip =
            static_cast<double>(up >> ip & 1u) + static_cast<double>(dn >> ip & 1u);
        d += params.neighbor_v * ni * nip;
      }
    }
    s.diag[r] = d;

    frow.clear();
    brow.clear();
    for (int b = 0; b < n_bonds; ++b) {
      const int i = b, ip = (b + 1) % L;
      // row r of c^dag_i c_{i+1}: source state = inverse move applied to r,
      // with matching sign (real matrix, adjoint pair)
      for (int spin = 0; spin < 2; ++spin) {
        const std::uint32_t mask = spin ? dn : up;
        if (auto h = hop(mask, ip, i); h.sign) {
          const long c = spin ? basis.index(up, h.mask) : basis.index(h.mask, dn);
          frow.emplace_back(static_cast<int>(c), -params.hopping * h.sign);
        }
        if (auto h = hop(mask, i, ip); h.sign) {
          const long c = spin ? basis.index(up, h.mask) : basis.index(h.mask, dn);
          brow.emplace_back(static_cast<int>(c), -params.hopping * h.sign);
        }
      }
    }
    s.f_ptr[r + 1] = static_cast<long>(frow.size());
    s.b_ptr[r + 1] = static_cast<long>(brow.size());
    for (auto& [c, v] : frow) {
      s.f_col.push_back(c);
      s.f_val.push_back(v);
    }
    for (auto& [c, v] : brow) {
      s.b_col.push_back(c);
      s.b_val.push_back(v);
    }
  }
  for (long r = 0; r < dim; ++r) {
    s.f_ptr[r + 1] += s.f_ptr[r];
    s.b_ptr[r + 1] += s.b_ptr[r];
  }
  return s;
}

void HoppingStructure::apply_hamiltonian(double phase, const Eigen::Ref<const Eigen::VectorXcd>& x,
                                         Eigen::Ref<Eigen::VectorXcd> y) const {
  const std::complex<double> ef(std::cos(phase), std::sin(phase));
  const std::complex<double> eb = std::conj(ef);
  for (long r = 0; r < dim; ++r) {
    std::complex<double> f = 0.0, b = 0.0;
    for (long p = f_ptr[r]; p < f_ptr[r + 1]; ++p) f += f_val[p] * x[f_col[p]];
    for (long p = b_ptr[r]; p < b_ptr[r + 1]; ++p) b += b_val[p] * x[b_col[p]];
    y[r] = ef * f + eb * b + diag[r] * x[r];
  }
}

void HoppingStructure::apply_current(double phase, double lattice_const,
                                     const Eigen::Ref<const Eigen::VectorXcd>& x,
                                     Eigen::Ref<Eigen::VectorXcd> y) const {
  const std::complex<double> ef(std::cos(phase), std::sin(phase));
  const std::complex<double> ia(0.0, lattice_const);
  const std::complex<double> cf = ia * ef;
  const std::complex<double> cb = -ia * std::conj(ef);
  for (long r = 0; r < dim; ++r) {
    std::complex<double> f = 0.0, b = 0.0;
    for (long p = f_ptr[r]; p < f_ptr[r + 1]; ++p) f += f_val[p] * x[f_col[p]];
    for (long p = b_ptr[r]; p < b_ptr[r + 1]; ++p) b += b_val[p] * x[b_col[p]];
    y[r] = cf * f + cb * b;
  }
}

namespace {

SparseOp assemble(const HoppingStructure& s, std::complex<double> wf, std::complex<double> wb,
                  bool with_diag) {
  SparseOp op;
  op.rows = s.dim;
  op.row_ptr.assign(s.dim + 1, 0);
  for (long r = 0; r < s.dim; ++r) {
    long n = (s.f_ptr[r + 1] - s.f_ptr[r]) + (s.b_ptr[r + 1] - s.b_ptr[r]);
    if (with_diag && s.diag[r] != 0.0) n += 1;
    op.row_ptr[r + 1] = op.row_ptr[r] + n;
  }
  op.cols.resize(op.row_ptr[s.dim]);
  op.vals.resize(op.row_ptr[s.dim]);
  for (long r = 0; r < s.dim; ++r) {
    long q = op.row_ptr[r];
    for (long p = s.f_ptr[r]; p < s.f_ptr[r + 1]; ++p, ++q) {
      op.cols[q] = s.f_col[p];
      op.vals[q] = wf * s.f_val[p];
    }
    for (long p = s.b_ptr[r]; p < s.b_ptr[r + 1]; ++p, ++q) {
      op.cols[q] = s.b_col[p];
      op.vals[q] = wb * s.b_val[p];
    }
    if (with_diag && s.diag[r] != 0.0) {
      op.cols[q] = static_cast<int>(r);
      op.vals[q] = s.diag[r];
    }
  }
  return op;
}

}  // namespace

SparseOp build_hamiltonian(const OccupationBasis& basis, const HubbardParams& params,
                           double a_cl) {
  const auto s = build_structure(basis, params);
  const double phase = params.lattice_const * a_cl;
  const std::complex<double> ef(std::cos(phase), std::sin(phase));
  return assemble(s, ef, std::conj(ef), true);
}

SparseOp current_operator(const OccupationBasis& basis, const HubbardParams& params, double a_cl) {
  const auto s = build_structure(basis, params);
  const double phase = params.lattice_const * a_cl;
  const std::complex<double> ef(std::cos(phase), std::sin(phase));
  const std::complex<double> ia(0.0, params.lattice_const);
  return assemble(s, ia * ef, -ia * std::conj(ef), false);
}

HubbardEigenstates eigenstates_hubbard(const OccupationBasis& basis, const HubbardParams& params,
                                       int m_states) {
  const long dim = basis.dimension();
  if (m_states < 1 || m_states > dim)
    throw std::invalid_argument("eigenstates_hubbard: M out of range");
  if (dim > 8192) throw std::invalid_argument("eigenstates_hubbard: dense solve beyond 8192 dim");

  const auto s = build_structure(basis, params);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (long r = 0; r < dim; ++r) {
    h(r, r) = s.diag[r];
    for (long p = s.f_ptr[r]; p < s.f_ptr[r + 1]; ++p) h(r, s.f_col[p]) += s.f_val[p];
    for (long p = s.b_ptr[r]; p < s.b_ptr[r + 1]; ++p) h(r, s.b_col[p]) += s.b_val[p];
  }

  const int n = static_cast<int>(dim);
  std::vector<double> w(n);
  Eigen::MatrixXd z(n, m_states);
  std::vector<lapack_int> isuppz(2 * std::max(1, m_states));
  lapack_int found = 0;
  lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, h.data(), n, 0.0, 0.0, 1, m_states, 0.0,
                     &found, w.data(), z.data(), n, isuppz.data());
  if (info != 0 || found != m_states)
    throw std::runtime_error("eigenstates_hubbard: dsyevr info=" + std::to_string(info) +
                             " found=" + std::to_string(found));

  HubbardEigenstates out;
  out.energies.assign(w.begin(), w.begin() + m_states);
  out.states = std::move(z);
  // reproducible sign: largest-magnitude component positive
  for (int c = 0; c < m_states; ++c) {
    Eigen::Index jmax = 0;
    out.states.col(c).cwiseAbs().maxCoeff(&jmax);
    if (out.states(jmax, c) < 0.0) out.states.col(c) = -out.states.col(c);
  }
  return out;
}

void lanczos_step(Eigen::Ref<Eigen::VectorXcd> state, double t, double dt,
                  const HoppingStructure& structure, const HubbardParams& params,
                  const PulseConfig& pulse, int krylov_dim) {
  if (krylov_dim < 2) throw std::invalid_argument("lanczos_step: krylov_dim must be >= 2");
  const long dim = structure.dim;
  const double phase = params.lattice_const * vector_potential(pulse, t + 0.5 * dt);

  const double nrm = state.norm();
  if (nrm == 0.0) return;

  Eigen::MatrixXcd v(dim, krylov_dim);
  Eigen::VectorXd alpha(krylov_dim), beta(krylov_dim);
  Eigen::VectorXcd w(dim);

  v.col(0) = state / nrm;
  int kdim = krylov_dim;
  const double breakdown = 1e-13 * (structure.diag.cwiseAbs().maxCoeff() + 4.0 * params.hopping);
  for (int j = 0; j < krylov_dim; ++j) {
    structure.apply_hamiltonian(phase, v.col(j), w);
    alpha[j] = std::real(v.col(j).dot(w));
    w -= alpha[j] * v.col(j);
    if (j > 0) w -= beta[j - 1] * v.col(j - 1);
    // full re-orthogonalization (subspace is tiny)
    for (int p = 0; p <= j; ++p) w -= v.col(p).dot(w) * v.col(p);
    if (j + 1 == krylov_dim) break;
    beta[j] = w.norm();
    if (beta[j] < breakdown) {
      kdim = j + 1;  // invariant subspace: small exponential is exact
      break;
    }
    v.col(j + 1) = w / beta[j];
  }

  Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(kdim, kdim);
  for (int j = 0; j < kdim; ++j) {
    tmat(j, j) = alpha[j];
    if (j + 1 < kdim) tmat(j, j + 1) = tmat(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tmat);
  Eigen::VectorXcd phases(kdim);
  for (int j = 0; j < kdim; ++j)
    phases[j] = std::exp(std::complex<double>(0.0, -dt * es.eigenvalues()[j]));
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(kdim);
  e1[0] = nrm;
  Eigen::VectorXcd y =
      es.eigenvectors().cast<std::complex<double>>() *
      (phases.array() * (es.eigenvectors().transpose().cast<std::complex<double>>() * e1).array())
          .matrix();
  state = v.leftCols(kdim) * y;
}

Eigen::VectorXcd current_apply(const Eigen::Ref<const Eigen::VectorXcd>& state,
                               const HoppingStructure& structure, const HubbardParams& params,
                               double a_cl) {
  Eigen::VectorXcd y(structure.dim);
  structure.apply_current(params.lattice_const * a_cl, params.lattice_const, state, y);
  return y;
}

HubbardEmitter::HubbardEmitter(const HubbardOptions& opt, const PulseConfig& pulse)
    : opt_(opt),
      pulse_(pulse),
      basis_(build_basis(opt.params)),
      structure_(build_structure(basis_, opt.params)),
      eig_(eigenstates_hubbard(basis_, opt.params, opt.m_states)) {}

Eigen::MatrixXcd HubbardEmitter::initial_states() const {
  return eig_.states.cast<std::complex<double>>();
}

void HubbardEmitter::advance_one(Eigen::Ref<Eigen::VectorXcd> state, double t, double dt) const {
  lanczos_step(state, t, dt, structure_, opt_.params, pulse_, opt_.krylov_dim);
}

Eigen::MatrixXcd HubbardEmitter::emission_applied(const Eigen::MatrixXcd& states, double t) const {
  const double phase = opt_.params.lattice_const * vector_potential(pulse_, t);
  Eigen::MatrixXcd out(states.rows(), states.cols());
  for (Eigen::Index c = 0; c < states.cols(); ++c)
    structure_.apply_current(phase, opt_.params.lattice_const, states.col(c), out.col(c));
  return out;
}

}  // namespace phd
