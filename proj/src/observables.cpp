#include "phd/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "phd/constants.hpp"
#include "phd/nscaling.hpp"

namespace phd {

FrequencyGrid FrequencyGrid::harmonics(double omega_ref, double h_min, double h_max,
                                       int per_harmonic) {
  if (omega_ref <= 0.0 || per_harmonic < 1 || h_max < h_min)
    throw std::invalid_argument("FrequencyGrid::harmonics: bad arguments");
  FrequencyGrid grid;
  grid.omega_ref = omega_ref;
  const double step = 1.0 / per_harmonic;
  for (double h = h_min; h <= h_max + 1e-9; h += step) grid.omegas.push_back(h * omega_ref);
  return grid;
}

namespace {

using cplx = std::complex<double>;
constexpr cplx I(0.0, 1.0);

struct Quadrature {
  std::vector<double> w;
  double h = 0.0;
};

Quadrature trapezoid(const std::vector<double>& t) {
  if (t.size() < 2) throw std::invalid_argument("observables: need at least two obs times");
  Quadrature q;
  q.h = t[1] - t[0];
  q.w.assign(t.size(), q.h);
  q.w.front() = q.w.back() = 0.5 * q.h;
  return q;
}

// p_{i,m}(t_k) as an M x K array with the time index fastest
Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_series(
    const TransitionDipoleTable& table) {
  const int m_states = table.n_states, n_obs = table.n_obs();
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(m_states, n_obs);
  for (int k = 0; k < n_obs; ++k)
    for (int m = 0; m < m_states; ++m) rows(m, k) = table.row_at(m, k);
  return rows;
}

struct RowTransforms {
  Eigen::VectorXcd p_minus;  // ∫ e^{-i w t} p_{i,m}
  Eigen::VectorXcd p_plus;   // ∫ e^{+i w t} p_{i,m}
};

template <typename RowsT>
RowTransforms row_transforms(const RowsT& rows, const std::vector<double>& t,
                             const Quadrature& q, double omega) {
  const int m_states = static_cast<int>(rows.rows());
  const int n_obs = static_cast<int>(rows.cols());
  RowTransforms out;
  out.p_minus = Eigen::VectorXcd::Zero(m_states);
  out.p_plus = Eigen::VectorXcd::Zero(m_states);
  for (int k = 0; k < n_obs; ++k) {
    const cplx em = q.w[k] * std::exp(-I * omega * t[k]);
    const cplx ep = q.w[k] * std::exp(I * omega * t[k]);
    for (int m = 0; m < m_states; ++m) {
      out.p_minus[m] += em * rows(m, k);
      out.p_plus[m] += ep * rows(m, k);
    }
  }
  return out;
}

double spectral_prefactor(double omega) {
  const double c3 = kSpeedOfLight * kSpeedOfLight * kSpeedOfLight;
  const double pi2 = 2.0 * std::numbers::pi;
  return omega * omega / (pi2 * pi2 * c3);
}

}  // namespace

std::vector<SpectrumCore> spectrum_core(const TransitionDipoleTable& table,
                                        const FrequencyGrid& freqs) {
  if (freqs.omegas.empty()) throw std::invalid_argument("spectrum: empty frequency grid");
  const auto rows = row_series(table);
  const auto q = trapezoid(table.obs_times);

  std::vector<SpectrumCore> out;
  out.reserve(freqs.omegas.size());
  for (double omega : freqs.omegas) {
    if (omega <= 0.0) throw std::invalid_argument("spectrum: omega must be > 0");
    const auto tr = row_transforms(rows, table.obs_times, q, omega);
    SpectrumCore c;
    c.omega = omega;
    const double pref = spectral_prefactor(omega);
    c.coh_unit = pref * std::norm(tr.p_minus[table.initial_state]);
    c.inc_unit = pref * tr.p_minus.squaredNorm();
    out.push_back(c);
  }
  return out;
}

std::vector<SpectrumPoint> spectrum(const TransitionDipoleTable& table, const FrequencyGrid& freqs,
                                    const EnsembleParams& ens) {
  ens.validate();
  const double n = ens.n_emitters;
  std::vector<SpectrumPoint> out;
  for (const auto& c : spectrum_core(table, freqs)) {
    SpectrumPoint p;
    p.omega = c.omega;
    p.s_coh = n * (n - 1.0) * c.coh_unit;
    p.s_inc = n * c.inc_unit;
    p.s_total = p.s_coh + p.s_inc;
    out.push_back(p);
  }
  return out;
}

SqueezingCore squeezing_core(const TransitionDipoleTable& table, double omega) {
  if (omega <= 0.0) throw std::invalid_argument("squeezing_core: omega must be > 0");
  const auto rows = row_series(table);
  const auto q = trapezoid(table.obs_times);
  const auto& t = table.obs_times;
  const int n_obs = table.n_obs();
  const int i0 = table.initial_state;

  SqueezingCore core;
  core.omega = omega;
  core.t_end = t.back();

  const auto tr = row_transforms(rows, t, q, omega);
  for (int m = 0; m < table.n_states; ++m) {
    if (m == i0) continue;
    core.a_sym += std::norm(tr.p_minus[m]);
    core.b_sym += tr.p_plus[m] * std::conj(tr.p_minus[m]);
  }

  // nested commutator integral: per state, running prefix integrals of
  // e^{+iwt} p_{i,m} and e^{+iwt} p_{m,i}
  for (int m = 0; m < table.n_states; ++m) {
    if (m == i0) continue;
    cplx u = 0.0, w_pref = 0.0, acc = 0.0;
    cplx prev_f = 0.0, prev_g = 0.0;
    for (int k = 0; k < n_obs; ++k) {
      const cplx ep = std::exp(I * omega * t[k]);
      const cplx f = ep * rows(m, k);             // e^{iwt} p_{i,m}
      const cplx g = ep * std::conj(rows(m, k));  // e^{iwt} p_{m,i}
      if (k > 0) {
        u += 0.5 * q.h * (prev_f + f);
        w_pref += 0.5 * q.h * (prev_g + g);
      }
      acc += q.w[k] * ep * (std::conj(rows(m, k)) * u - rows(m, k) * w_pref);
      prev_f = f;
      prev_g = g;
    }
    core.b_comm += acc;
  }
  return core;
}

double quadrature_variance(const SqueezingCore& core, const EnsembleParams& ens, double theta,
                           bool include_quantum_correction) {
  ens.validate();
  const cplx b = include_quantum_correction ? core.b_sym - core.b_comm : core.b_sym;
  const cplx phase = std::exp(-2.0 * I * (core.omega * core.t_end + theta));
  return 0.25 + ens.g0 * ens.g0 * ens.n_emitters / (2.0 * core.omega) *
                    (core.a_sym - std::real(phase * b));
}

double quadrature_variance_min(const SqueezingCore& core, const EnsembleParams& ens,
                               bool include_quantum_correction) {
  return 0.25 + variance_excess(core, ens, include_quantum_correction);
}

double variance_excess(const SqueezingCore& core, const EnsembleParams& ens,
                       bool include_quantum_correction) {
  ens.validate();
  const cplx b = include_quantum_correction ? core.b_sym - core.b_comm : core.b_sym;
  return ens.g0 * ens.g0 * ens.n_emitters / (2.0 * core.omega) * (core.a_sym - std::abs(b));
}

SqueezingPoint quadrature_min_variance(const TransitionDipoleTable& table, double omega,
                                       const EnsembleParams& ens,
                                       bool include_quantum_correction) {
  const auto core = squeezing_core(table, omega);
  ens.validate();

  SqueezingPoint p;
  p.omega = omega;
  p.quantum_correction = include_quantum_correction;
  p.a_sym = core.a_sym;
  p.b_total = include_quantum_correction ? core.b_sym - core.b_comm : core.b_sym;
  p.min_variance = 0.25 + ens.g0 * ens.g0 * ens.n_emitters / (2.0 * omega) *
                              (core.a_sym - std::abs(p.b_total));
  const double pi = std::numbers::pi;
  p.theta_star = std::fmod(0.5 * std::arg(p.b_total) - omega * core.t_end, pi);
  if (p.theta_star < 0.0) p.theta_star += pi;
  p.eta_db = squeezing_db(p.min_variance);
  return p;
}

double squeezing_db(double min_variance) {
  if (min_variance <= 0.0) throw std::invalid_argument("squeezing_db: variance must be > 0");
  return -10.0 * std::log10(4.0 * min_variance);
}

G2Coefficients g2_coefficients(const TransitionDipoleTable& table, double omega, double g0,
                               int m_trunc) {
  if (table.mode != TableMode::full)
    throw std::invalid_argument("g2_coefficients: full table required");
  if (omega <= 0.0) throw std::invalid_argument("g2_coefficients: omega must be > 0");
  const int m_states = table.n_states, n_obs = table.n_obs();
  const int i0 = table.initial_state;
  const auto& t = table.obs_times;
  const auto q = trapezoid(t);
  const auto rows = row_series(table);

  // state subset ranked by integrated row weight, initial state always kept
  if (m_trunc <= 0) m_trunc = std::min(m_states, 64);
  m_trunc = std::min(m_trunc, m_states);
  std::vector<int> sel(m_states);
  std::iota(sel.begin(), sel.end(), 0);
  if (m_trunc < m_states) {
    std::vector<double> weight(m_states, 0.0);
    for (int m = 0; m < m_states; ++m)
      for (int k = 0; k < n_obs; ++k) weight[m] += q.w[k] * std::norm(rows(m, k));
    weight[i0] = std::numeric_limits<double>::infinity();
    std::stable_sort(sel.begin(), sel.end(),
                     [&](int a, int b) { return weight[a] > weight[b]; });
    sel.resize(m_trunc);
    std::sort(sel.begin(), sel.end());
  }
  const int n_sel = static_cast<int>(sel.size());
  std::vector<int> pos(m_states, -1);
  for (int s = 0; s < n_sel; ++s) pos[sel[s]] = s;
  const int i_sel = pos[i0];

  // prefix integrals F-_m(t) = ∫_0^t e^{-iws} p_{i,m}, F+_l(t) = ∫_0^t e^{+iws} p_{l,i}
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> fm(n_sel, n_obs),
      fp(n_sel, n_obs);
  for (int s = 0; s < n_sel; ++s) {
    const int m = sel[s];
    cplx accm = 0.0, accp = 0.0, prevm = 0.0, prevp = 0.0;
    for (int k = 0; k < n_obs; ++k) {
      const cplx em = std::exp(-I * omega * t[k]);
      const cplx vm = em * rows(m, k);
      const cplx vp = std::conj(em) * table.full_at(m, i0, k);
      if (k > 0) {
        accm += 0.5 * q.h * (prevm + vm);
        accp += 0.5 * q.h * (prevp + vp);
      }
      fm(s, k) = accm;
      fp(s, k) = accp;
      prevm = vm;
      prevp = vp;
    }
  }

  // G-_{m,n} = ∫ e^{-iwt} p_{m,n}(t) F-_m(t) dt ; G+_{n,l} = ∫ e^{+iwt} p_{n,l}(t) F+_l(t) dt
  // accumulated streaming over the time-major table
  Eigen::MatrixXcd gm = Eigen::MatrixXcd::Zero(n_sel, n_sel);
  Eigen::MatrixXcd gp = Eigen::MatrixXcd::Zero(n_sel, n_sel);
  for (int k = 0; k < n_obs; ++k) {
    const cplx em = q.w[k] * std::exp(-I * omega * t[k]);
    const cplx ep = std::conj(em);
    const cplx* block = table.data.data() + static_cast<std::size_t>(k) * m_states * m_states;
    for (int sm = 0; sm < n_sel; ++sm) {
      const cplx wm = em * fm(sm, k);
      const cplx* row_m = block + static_cast<std::size_t>(sel[sm]) * m_states;
      for (int sn = 0; sn < n_sel; ++sn) gm(sm, sn) += wm * row_m[sel[sn]];
    }
    for (int sn = 0; sn < n_sel; ++sn) {
      const cplx* row_n = block + static_cast<std::size_t>(sel[sn]) * m_states;
      for (int sl = 0; sl < n_sel; ++sl) gp(sn, sl) += ep * row_n[sel[sl]] * fp(sl, k);
    }
  }

  const auto tr = row_transforms(rows, t, q, omega);
  // ∫ e^{+iwt} p_{n,i}
  Eigen::VectorXcd qvec = Eigen::VectorXcd::Zero(n_sel);
  for (int s = 0; s < n_sel; ++s)
    for (int k = 0; k < n_obs; ++k)
      qvec[s] += q.w[k] * std::exp(I * omega * t[k]) * table.full_at(sel[s], i0, k);

  double sum2 = 0.0;
  for (int s = 0; s < n_sel; ++s) sum2 += std::norm(tr.p_minus[sel[s]]);
  const cplx p_i = tr.p_minus[i0];
  const cplx hord = gm.col(i_sel).sum();
  const Eigen::VectorXcd colsum = gm.colwise().sum().transpose();
  const Eigen::VectorXcd rowsum = gp.rowwise().sum();
  const cplx i4 = (colsum.array() * rowsum.array()).sum();  // sum_n colsum_n rowsum_n

  G2Coefficients c;
  c.omega = omega;
  c.g0 = g0;
  c.states_used = sel;
  const double pref = std::pow(g0, 4) / (omega * omega);
  c.d0 = pref * std::norm(p_i) * std::norm(p_i);
  c.d2tilde = pref * sum2 * sum2;
  c.d2 = 4.0 * pref * (sum2 * std::norm(p_i) + std::real(hord * qvec[i_sel] * qvec[i_sel]));
  const cplx jtrip = (colsum.array() * qvec.array()).sum();  // sum_n colsum_n qvec_n
  c.d3 = 2.0 * pref *
         (2.0 * std::norm(hord) + sum2 * sum2 + 4.0 * std::real(jtrip * qvec[i_sel]));
  c.d4 = 4.0 * pref * i4;
  if (std::norm(p_i) * std::norm(p_i) < -1e-12 || sum2 * sum2 < -1e-12)
    throw std::runtime_error("g2_coefficients: negative square base");
  c.sqrt_d0 = g0 * g0 / omega * std::norm(p_i);
  c.sqrt_d2tilde = g0 * g0 / omega * sum2;
  return c;
}

G2Point g2_assemble(const G2Coefficients& c, double n_emitters) {
  G2Point p;
  p.omega = c.omega;
  p.d0 = c.d0;
  p.d2 = c.d2;
  p.d3 = c.d3;
  p.d4 = c.d4;
  p.d2tilde = c.d2tilde;
  const double n = n_emitters;
  p.n_mean = n * (n - 1.0) * c.sqrt_d0 + n * c.sqrt_d2tilde;
  const double numerator = falling_factorial(n, 4) * c.d0 + falling_factorial(n, 3) * c.d2 +
                           falling_factorial(n, 2) * c.d3 + falling_factorial(n, 1) * c.d4.real();
  const double denominator = p.n_mean * p.n_mean;
  if (denominator <= 0.0) {
    p.defined = false;
    p.g2 = 0.0;
    p.mandel_q = 0.0;
    return p;
  }
  p.defined = true;
  p.g2 = numerator / denominator;
  p.mandel_q = mandel_q(p.g2, p.n_mean);
  return p;
}

G2Point g2(const TransitionDipoleTable& table, double omega, const EnsembleParams& ens,
           int m_trunc) {
  ens.validate();
  return g2_assemble(g2_coefficients(table, omega, ens.g0, m_trunc), ens.n_emitters);
}

double mandel_q(double g2_value, double n_mean) {
  if (n_mean < 0.0) throw std::invalid_argument("mandel_q: n_mean must be >= 0");
  return n_mean * (g2_value - 1.0);
}

double counting_expectation(const TransitionDipoleTable& table, double omega,
                            const EnsembleParams& ens) {
  if (omega <= 0.0) throw std::invalid_argument("counting_expectation: omega must be > 0");
  ens.validate();
  const auto rows = row_series(table);
  const auto q = trapezoid(table.obs_times);
  const auto tr = row_transforms(rows, table.obs_times, q, omega);
  const double n = ens.n_emitters;
  return ens.g0 * ens.g0 / omega *
         (n * tr.p_minus.squaredNorm() +
          n * (n - 1.0) * std::norm(tr.p_minus[table.initial_state]));
}

std::optional<double> counting_correction_order4(const TransitionDipoleTable&, double,
                                                 const EnsembleParams&) {
  return std::nullopt;
}

double perturbative_parameter(const TransitionDipoleTable& table, const FrequencyGrid& freqs,
                              const EnsembleParams& ens) {
  const auto rows = row_series(table);
  const auto q = trapezoid(table.obs_times);
  double worst = 0.0;
  for (double omega : freqs.omegas) {
    const auto tr = row_transforms(rows, table.obs_times, q, omega);
    worst = std::max(worst, tr.p_minus.cwiseAbs().maxCoeff());
  }
  return ens.n_emitters * ens.g0 * worst;
}

}  // namespace phd
