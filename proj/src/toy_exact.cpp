#include "phd/toy_exact.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "phd/dipole_table.hpp"
#include "phd/observables.hpp"

namespace phd {

namespace {
using cplx = std::complex<double>;
const cplx I(0.0, 1.0);
}  // namespace

JointSystem::JointSystem(const JointConfig& cfg)
    : cfg_(cfg), emitter_(cfg.level_gap, cfg.rabi_freq, cfg.emission_scale) {
  if (cfg.modes.empty()) throw std::invalid_argument("joint system: need at least one mode");
  for (const auto& m : cfg.modes)
    if (m.fock_cutoff < 2) throw std::invalid_argument("joint system: fock_cutoff must be >= 2");

  dim_ = 2;
  for (const auto& m : cfg.modes) dim_ *= (m.fock_cutoff + 1);

  // a_mode = I_2 (x) I ... (x) a (x) ... I, built by kron
  const auto kron = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(2, 2);
    for (std::size_t mj = 0; mj < cfg.modes.size(); ++mj) {
      const int nf = cfg.modes[mj].fock_cutoff + 1;
      if (mj == mi) {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(nf, nf);
        for (int n = 1; n < nf; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
        op = kron(op, a);
      } else {
        op = kron(op, Eigen::MatrixXcd::Identity(nf, nf));
      }
    }
    lower_.push_back(std::move(op));
  }
}

Eigen::VectorXcd JointSystem::vacuum_state() const {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim_);
  psi[0] = 1.0;
  return psi;
}

Eigen::VectorXcd JointSystem::coherent_state(cplx alpha, int mode) const {
  Eigen::VectorXcd psi = vacuum_state();
  // expand exp(alpha a^dag - conj(alpha) a)|0> truncated to the cutoff
  const Eigen::MatrixXcd d = alpha * lower_[mode].adjoint() - std::conj(alpha) * lower_[mode];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(I * d);  // i d is Hermitian
  Eigen::VectorXcd phases(dim_);
  for (Eigen::Index j = 0; j < dim_; ++j) phases[j] = std::exp(-I * es.eigenvalues()[j]);
  return es.eigenvectors() * (phases.array() * (es.eigenvectors().adjoint() * psi).array()).matrix();
}

Eigen::MatrixXcd JointSystem::interaction(double t) const {
  const Eigen::Matrix2cd q = emitter_.heisenberg_emission(t);
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(dim_, dim_);
  const Eigen::Index block = dim_ / 2;
  for (std::size_t mi = 0; mi < cfg_.modes.size(); ++mi) {
    const double w = cfg_.modes[mi].omega;
    const Eigen::MatrixXcd a_t = cfg_.g0 / std::sqrt(w) *
                                 (lower_[mi] * std::exp(-I * w * t) +
                                  lower_[mi].adjoint() * std::exp(I * w * t));
    // a_t is built on the full joint space but acts as identity on the
    // emitter factor; combine as q (x) photon part
    for (int e1 = 0; e1 < 2; ++e1)
      for (int e2 = 0; e2 < 2; ++e2)
        v.block(e1 * block, e2 * block, block, block) +=
            q(e1, e2) * a_t.block(0, 0, block, block);
  }
  return v;
}

Eigen::VectorXcd JointSystem::propagate(const Eigen::VectorXcd& initial) const {
  return propagate(initial, cfg_.duration, cfg_.dt);
}

Eigen::VectorXcd JointSystem::propagate(const Eigen::VectorXcd& initial, double duration,
                                        double dt) const {
  if (initial.size() != dim_) throw std::invalid_argument("propagate: state dimension mismatch");
  const long n_steps = static_cast<long>(std::ceil(duration / dt - 1e-12));
  Eigen::VectorXcd psi = initial;
  for (long s = 0; s < n_steps; ++s) {
    const double t_mid = s * dt + 0.5 * dt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(interaction(t_mid));
    Eigen::VectorXcd phases(dim_);
    for (Eigen::Index j = 0; j < dim_; ++j)
      phases[j] = std::exp(-I * dt * es.eigenvalues()[j]);
    psi = es.eigenvectors() * (phases.array() * (es.eigenvectors().adjoint() * psi).array()).matrix();
  }
  return psi;
}

JointSystem::Observables JointSystem::observables(const Eigen::VectorXcd& state, int mode,
                                                  double t_end, int theta_points) const {
  const Eigen::MatrixXcd& a = lower_[mode];
  const Eigen::VectorXcd a_psi = a * state;
  const Eigen::VectorXcd aa_psi = a * a_psi;

  Observables out;
  out.n_mean = a_psi.squaredNorm();
  const double g2_num = aa_psi.squaredNorm();
  if (out.n_mean > 0.0) {
    out.g2 = g2_num / (out.n_mean * out.n_mean);
    out.g2_defined = out.n_mean * out.n_mean > 1e-300;
  }

  // quadrature X(theta) = (a e^{-i(w t_end + theta)} + h.c.)/2
  const double w = cfg_.modes[mode].omega;
  const cplx a_mean = state.dot(a_psi);  // <a>
  const cplx aa_mean = state.dot(aa_psi);
  out.variance_theta.resize(theta_points);
  out.min_variance = 1e300;
  for (int j = 0; j < theta_points; ++j) {
    const double theta = std::numbers::pi * j / theta_points;
    const cplx ph = std::exp(-I * (w * t_end + theta));
    // <X^2> = 1/4 (ph^2 <aa> + conj^2 <a^dag a^dag> + 2<a^dag a> + 1)
    const double x_mean = std::real(ph * a_mean);
    const double x2_mean =
        0.25 * (2.0 * std::real(ph * ph * aa_mean) + 2.0 * out.n_mean + 1.0);
    const double var = x2_mean - x_mean * x_mean;
    out.variance_theta[j] = var;
    out.min_variance = std::min(out.min_variance, var);
  }

  // population in the top Fock level of the mode (cutoff-convergence monitor)
  const Eigen::MatrixXcd num_op = a.adjoint() * a;
  const int nf = cfg_.modes[mode].fock_cutoff;
  double top = 0.0;
  for (Eigen::Index j = 0; j < dim_; ++j) {
    if (std::abs(std::real(num_op(j, j)) - nf) < 0.5) top += std::norm(state[j]);
  }
  out.top_population = top;
  return out;
}

std::vector<ScalingPoint> coupling_scan(const JointConfig& base, const std::vector<double>& g0s,
                                        int obs_grid_points) {
  std::vector<ScalingPoint> out;
  const double omega = base.modes.at(0).omega;

  // PHD side: analytic two-level dipole table on a fine recording grid
  TwoLevelEmitter emitter(base.level_gap, base.rabi_freq, base.emission_scale);
  TransitionDipoleTable table;
  table.n_states = 2;
  table.initial_state = 0;
  table.mode = TableMode::full;
  table.energies = emitter.energies();
  table.obs_times.resize(obs_grid_points);
  table.data.resize(static_cast<std::size_t>(4) * obs_grid_points);
  const double h = base.duration / (obs_grid_points - 1);
  for (int k = 0; k < obs_grid_points; ++k) {
    const double t = k * h;
    table.obs_times[k] = t;
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n)
        table.data[static_cast<std::size_t>(4) * k + 2 * m + n] = emitter.dipole(m, n, t);
  }

  for (double g0 : g0s) {
    JointConfig cfg = base;
    cfg.g0 = g0;
    JointSystem system(cfg);
    const Eigen::VectorXcd final_state = system.propagate(system.vacuum_state());
    const auto exact = system.observables(final_state, 0, cfg.duration);

    EnsembleParams ens;
    ens.n_emitters = 1.0;
    ens.g0 = g0;
    ens.volume = 1.0;
    const double phd = counting_expectation(table, omega, ens);

    ScalingPoint p;
    p.g0 = g0;
    p.exact_value = exact.n_mean;
    p.phd_value = phd;
    p.rel_err = std::abs(phd - exact.n_mean) / std::max(exact.n_mean, 1e-300);
    out.push_back(p);
  }
  return out;
}

double fitted_slope(const std::vector<ScalingPoint>& points) {
  if (points.size() < 2) throw std::invalid_argument("fitted_slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& p : points) {
    const double x = std::log(p.g0), y = std::log(std::max(p.rel_err, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace phd
