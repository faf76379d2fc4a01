#include "phd/atom1d.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace phd {

void SpatialGrid::validate() const {
  if (x_max <= 0.0) throw std::invalid_argument("spatial grid: x_max must be > 0");
  if (n_points < 3) throw std::invalid_argument("spatial grid: n_points must be >= 3");
}

Eigen::VectorXd mask_profile(const SpatialGrid& grid, const AbsorbingMask& mask) {
  grid.validate();
  const int n = grid.n_points;
  const int w = std::max(1, static_cast<int>(mask.width_fraction * n));
  Eigen::VectorXd m = Eigen::VectorXd::Ones(n);
  for (int j = 0; j < w; ++j) {
    const double s = static_cast<double>(w - j) / w;  // 1 at the edge, ->0 inward
    const double v = std::pow(std::cos(0.5 * std::numbers::pi * s), mask.exponent);
    m[j] = v;
    m[n - 1 - j] = v;
  }
  return m;
}

namespace {

Eigen::VectorXd soft_core_potential(const SpatialGrid& grid, const SoftCoreParams& pot) {
  Eigen::VectorXd u(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) {
    const double x = grid.x(j);
    u[j] = -1.0 / std::sqrt(x * x + pot.epsilon * pot.epsilon);
  }
  return u;
}

void fix_sign_convention(Eigen::Ref<Eigen::VectorXd> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  const double thresh = 0.01 * peak;
  for (int j = 1; j + 1 < v.size(); ++j) {
    const double a = std::abs(v[j]);
    if (a > thresh && a >= std::abs(v[j - 1]) && a >= std::abs(v[j + 1])) {
      if (v[j] < 0.0) v = -v;
      return;
    }
  }
  if (v[v.size() / 2] < 0.0) v = -v;
}

}  // namespace

AtomEigenstates field_free_eigenstates(const SpatialGrid& grid, const SoftCoreParams& pot,
                                       int m_states) {
  grid.validate();
  if (m_states < 1 || m_states > grid.n_points)
    throw std::invalid_argument("field_free_eigenstates: M out of range");

  const int n = grid.n_points;
  const double dx = grid.dx();
  Eigen::VectorXd diag = soft_core_potential(grid, pot).array() + 1.0 / (dx * dx);
  Eigen::VectorXd off = Eigen::VectorXd::Constant(n - 1, -0.5 / (dx * dx));

  std::vector<double> w(n);
  Eigen::MatrixXd z(n, m_states);
  std::vector<lapack_int> isuppz(2 * std::max(1, m_states));
  lapack_int found = 0;
  lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0,
                                   0.0, 1, m_states, 0.0, &found, w.data(), z.data(), n,
                                   isuppz.data());
  if (info != 0 || found != m_states) {
    // residual diagnostics for the states that did come back
    std::string msg = "field_free_eigenstates: dstevr info=" + std::to_string(info) +
                      " found=" + std::to_string(found);
    throw std::runtime_error(msg);
  }

  AtomEigenstates out;
  out.energies.assign(w.begin(), w.begin() + m_states);
  out.states = std::move(z);

  // re-orthonormalize (modified Gram-Schmidt) and fix signs
  for (int c = 0; c < m_states; ++c) {
    for (int p = 0; p < c; ++p)
      out.states.col(c) -= out.states.col(p).dot(out.states.col(c)) * out.states.col(p);
    out.states.col(c).normalize();
    fix_sign_convention(out.states.col(c));
  }
  return out;
}

namespace {
constexpr int kStateBlock = 8;
}

CrankNicolsonStepper::CrankNicolsonStepper(const SpatialGrid& grid, const SoftCoreParams& pot,
                                           const PulseConfig& pulse)
    : grid_(grid), pulse_(pulse), potential_(soft_core_potential(grid, pot)) {
  grid.validate();
  const int n = grid_.n_points;
  rhs_diag_.resize(n);
  elim_.resize(n);
  inv_denom_.resize(n);
  work_.resize(kStateBlock, n);
}

void CrankNicolsonStepper::prepare(double t, double dt) {
  const int n = grid_.n_points;
  const double dx = grid_.dx();
  const double a_mid = vector_potential(pulse_, t + 0.5 * dt);
  const std::complex<double> I(0.0, 1.0);
  const double theta = 0.5 * dt;

  // H tridiagonal: diag = 1/dx^2 + U, upper = -1/(2dx^2) - iA/(2dx), lower = conj(upper)
  const std::complex<double> h_up = -0.5 / (dx * dx) - I * a_mid / (2.0 * dx);
  const std::complex<double> h_lo = std::conj(h_up);

  rhs_up_ = -I * theta * h_up;
  rhs_lo_ = -I * theta * h_lo;
  lhs_up_ = I * theta * h_up;
  const std::complex<double> lhs_lo = I * theta * h_lo;

  for (int j = 0; j < n; ++j) rhs_diag_[j] = 1.0 - I * theta * (1.0 / (dx * dx) + potential_[j]);

  // Thomas forward elimination shared across states; manual reciprocal keeps
  // the loop free of library complex division
  auto inv = [](std::complex<double> z) {
    const double s = 1.0 / (z.real() * z.real() + z.imag() * z.imag());
    return std::complex<double>(z.real() * s, -z.imag() * s);
  };
  std::complex<double> denom = 1.0 + I * theta * (1.0 / (dx * dx) + potential_[0]);
  inv_denom_[0] = inv(denom);
  elim_[0] = 0.0;
  for (int j = 1; j < n; ++j) {
    elim_[j] = lhs_lo * inv_denom_[j - 1];
    denom = 1.0 + I * theta * (1.0 / (dx * dx) + potential_[j]) - elim_[j] * lhs_up_;
    inv_denom_[j] = inv(denom);
  }
}

void CrankNicolsonStepper::apply(Eigen::Ref<Eigen::VectorXcd> psi) const {
  std::complex<double>* p = psi.data();
  apply_block(&p, 1);
}

void CrankNicolsonStepper::apply_block(std::complex<double>* const* states, int count) const {
  if (count < 1 || count > kStateBlock)
    throw std::invalid_argument("apply_block: count must be in 1..8");
  const int n = grid_.n_points;
  std::complex<double>* r = work_.data();  // (kStateBlock x n), state index fastest
  const std::complex<double>* d = rhs_diag_.data();
  const std::complex<double>* e = elim_.data();
  const std::complex<double>* iv = inv_denom_.data();

  // fused right-hand side and forward elimination
  for (int c = 0; c < count; ++c) {
    const std::complex<double>* psi = states[c];
    r[c] = d[0] * psi[0] + rhs_up_ * psi[1];
  }
  for (int j = 1; j < n; ++j) {
    std::complex<double>* rj = r + static_cast<std::size_t>(kStateBlock) * j;
    const std::complex<double>* rp = rj - kStateBlock;
    for (int c = 0; c < count; ++c) {
      const std::complex<double>* psi = states[c];
      const std::complex<double> up = (j + 1 < n) ? rhs_up_ * psi[j + 1] : 0.0;
      rj[c] = d[j] * psi[j] + up + rhs_lo_ * psi[j - 1] - e[j] * rp[c];
    }
  }

  // back substitution
  for (int c = 0; c < count; ++c)
    states[c][n - 1] = r[static_cast<std::size_t>(kStateBlock) * (n - 1) + c] * iv[n - 1];
  for (int j = n - 2; j >= 0; --j) {
    const std::complex<double>* rj = r + static_cast<std::size_t>(kStateBlock) * j;
    for (int c = 0; c < count; ++c)
      states[c][j] = (rj[c] - lhs_up_ * states[c][j + 1]) * iv[j];
  }
}

void cn_step(Eigen::Ref<Eigen::VectorXcd> state, double t, double dt, const SpatialGrid& grid,
             const SoftCoreParams& pot, const PulseConfig& pulse) {
  CrankNicolsonStepper stepper(grid, pot, pulse);
  stepper.prepare(t, dt);
  stepper.apply(state);
}

void apply_mask(Eigen::Ref<Eigen::VectorXcd> state, const Eigen::VectorXd& mask) {
  state.array() *= mask.array();
}

Eigen::VectorXcd momentum_apply(const Eigen::Ref<const Eigen::VectorXcd>& state, double dx) {
  const Eigen::Index n = state.size();
  Eigen::VectorXcd out(n);
  const std::complex<double> c(0.0, -0.5 / dx);
  out[0] = c * state[1];
  for (Eigen::Index j = 1; j + 1 < n; ++j) out[j] = c * (state[j + 1] - state[j - 1]);
  out[n - 1] = c * (-state[n - 2]);
  return out;
}

AtomEmitter::AtomEmitter(const AtomOptions& opt, const PulseConfig& pulse)
    : opt_(opt),
      pulse_(pulse),
      eig_(field_free_eigenstates(opt.grid, opt.potential, opt.m_states)),
      mask_(mask_profile(opt.grid, opt.mask)),
      stepper_(opt.grid, opt.potential, pulse) {}

Eigen::MatrixXcd AtomEmitter::initial_states() const {
  return eig_.states.cast<std::complex<double>>();
}

void AtomEmitter::advance_one(Eigen::Ref<Eigen::VectorXcd> state, double t, double dt) const {
  stepper_.prepare(t, dt);
  stepper_.apply(state);
  if (opt_.mask_enabled) apply_mask(state, mask_);
}

void AtomEmitter::advance(Eigen::MatrixXcd& states, double t, double dt) const {
  stepper_.prepare(t, dt);
  const int m = static_cast<int>(states.cols());
  std::complex<double>* ptrs[8];
  for (int c0 = 0; c0 < m; c0 += 8) {
    const int nb = std::min(8, m - c0);
    for (int b = 0; b < nb; ++b) ptrs[b] = states.col(c0 + b).data();
    stepper_.apply_block(ptrs, nb);
  }
  if (opt_.mask_enabled) states.array().colwise() *= mask_.array();
}

Eigen::MatrixXcd AtomEmitter::emission_applied(const Eigen::MatrixXcd& states, double) const {
  Eigen::MatrixXcd out(states.rows(), states.cols());
  for (Eigen::Index c = 0; c < states.cols(); ++c)
    out.col(c) = momentum_apply(states.col(c), opt_.grid.dx());
  return out;
}

}  // namespace phd
