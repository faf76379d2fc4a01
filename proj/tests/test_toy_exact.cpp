#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "phd/observables.hpp"
#include "phd/toy_exact.hpp"

using namespace phd;
using cplx = std::complex<double>;

namespace {

JointConfig base_config() {
  JointConfig cfg;
  cfg.level_gap = 1.0;
  cfg.rabi_freq = 0.2;
  cfg.g0 = 3e-3;
  cfg.duration = 100.0;
  cfg.dt = 0.002;
  cfg.modes = {ModeConfig{1.2, 8}};
  return cfg;
}

TransitionDipoleTable analytic_table(const JointConfig& cfg, int n_obs) {
  TwoLevelEmitter emitter(cfg.level_gap, cfg.rabi_freq, cfg.emission_scale);
  TransitionDipoleTable t;
  t.n_states = 2;
  t.initial_state = 0;
  t.mode = TableMode::full;
  t.energies = emitter.energies();
  t.obs_times.resize(n_obs);
  t.data.resize(static_cast<std::size_t>(4) * n_obs);
  for (int k = 0; k < n_obs; ++k) {
    const double time = cfg.duration * k / (n_obs - 1);
    t.obs_times[k] = time;
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n)
        t.data[static_cast<std::size_t>(4) * k + 2 * m + n] = emitter.dipole(m, n, time);
  }
  return t;
}

}  // namespace

TEST_CASE("interaction operator is Hermitian and vanishes at g0 = 0") {
  JointConfig cfg = base_config();
  {
    JointSystem sys(cfg);
    for (double t : {0.0, 1.7, 42.0}) {
      const Eigen::MatrixXcd v = sys.interaction(t);
      CHECK((v - v.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  cfg.g0 = 0.0;
  JointSystem sys(cfg);
  CHECK(sys.interaction(3.0).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXcd psi = sys.propagate(sys.vacuum_state(), 10.0, 0.01);
  CHECK((psi - sys.vacuum_state()).norm() < 1e-14);
}

TEST_CASE("interaction matrix elements match a hand-computed layout") {
  JointConfig cfg = base_config();
  cfg.modes = {ModeConfig{1.3, 2}};  // emitter (x) three Fock levels
  JointSystem sys(cfg);
  TwoLevelEmitter emitter(cfg.level_gap, cfg.rabi_freq, cfg.emission_scale);

  const double t = 2.1, w = 1.3;
  const Eigen::MatrixXcd v = sys.interaction(t);
  const Eigen::Matrix2cd q = emitter.heisenberg_emission(t);
  const cplx ep = std::exp(cplx(0.0, w * t));
  const double pref = cfg.g0 / std::sqrt(w);

  // index = emitter level * 3 + photon number
  // co-rotating: <e=0,n=1| V |e=1,n=0> = q01 * pref * e^{+iwt} * sqrt(1)
  CHECK(std::abs(v(0 * 3 + 1, 1 * 3 + 0) - q(0, 1) * pref * ep) < 1e-14);
  // counter-rotating: <e=0,n=0| V |e=1,n=1> = q01 * pref * e^{-iwt} * sqrt(1)
  CHECK(std::abs(v(0 * 3 + 0, 1 * 3 + 1) - q(0, 1) * pref * std::conj(ep)) < 1e-14);
  // two-photon rung: <e=1,n=2| V |e=0,n=1> = q10 * pref * e^{+iwt} * sqrt(2)
  CHECK(std::abs(v(1 * 3 + 2, 0 * 3 + 1) - q(1, 0) * pref * ep * std::sqrt(2.0)) < 1e-14);
  // diagonal in the emitter: <e=0,n=1| V |e=0,n=0> = q00 * pref * e^{iwt}
  CHECK(std::abs(v(0 * 3 + 1, 0 * 3 + 0) - q(0, 0) * pref * ep) < 1e-14);
}

TEST_CASE("propagation conserves the norm and self-converges under dt halving") {
  JointConfig cfg = base_config();
  cfg.duration = 20.0;
  JointSystem sys(cfg);
  const Eigen::VectorXcd a = sys.propagate(sys.vacuum_state(), 20.0, 0.002);
  CHECK(std::abs(a.norm() - 1.0) < 1e-10);
  const Eigen::VectorXcd b = sys.propagate(sys.vacuum_state(), 20.0, 0.001);
  CHECK((a - b).norm() < 1e-9);
}

TEST_CASE("vacuum observables") {
  JointConfig cfg = base_config();
  JointSystem sys(cfg);
  const auto obs = sys.observables(sys.vacuum_state(), 0, cfg.duration);
  CHECK(obs.n_mean == 0.0);
  CHECK(!obs.g2_defined);
  for (double v : obs.variance_theta) CHECK(v == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("coherent state preparation gives Poissonian statistics") {
  JointConfig cfg = base_config();
  cfg.modes = {ModeConfig{1.2, 12}};
  JointSystem sys(cfg);
  const cplx alpha(0.25, 0.15);
  const Eigen::VectorXcd psi = sys.coherent_state(alpha);
  const auto obs = sys.observables(psi, 0, 0.0);
  CHECK(obs.n_mean == doctest::Approx(std::norm(alpha)).epsilon(1e-10));
  REQUIRE(obs.g2_defined);
  CHECK(obs.g2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(obs.min_variance == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("fock cutoff independence at the working coupling") {
  JointConfig cfg = base_config();
  cfg.duration = 50.0;
  JointConfig wider = cfg;
  wider.modes[0].fock_cutoff += 2;

  JointSystem sys_a(cfg), sys_b(wider);
  const auto obs_a = sys_a.observables(sys_a.propagate(sys_a.vacuum_state()), 0, cfg.duration);
  const auto obs_b = sys_b.observables(sys_b.propagate(sys_b.vacuum_state()), 0, cfg.duration);
  CHECK(obs_a.top_population < 1e-8);
  CHECK(std::abs(obs_a.n_mean - obs_b.n_mean) < 1e-8);
  CHECK(std::abs(obs_a.min_variance - obs_b.min_variance) < 1e-8);
  CHECK(std::abs(obs_a.g2 - obs_b.g2) < 1e-8);
}

TEST_CASE("closed forms converge to the exact oracle as g0 shrinks") {
  JointConfig cfg = base_config();
  const std::vector<double> g0s = {1e-3, 2e-3, 4e-3, 1e-2};
  const auto points = coupling_scan(cfg, g0s, 20001);

  REQUIRE(points.size() == 4);
  for (std::size_t j = 1; j < points.size(); ++j)
    CHECK(points[j].rel_err > points[j - 1].rel_err);  // shrinks as g0 -> 0
  CHECK(fitted_slope(points) >= 1.8);

  // error ratio between g0 and g0/2 runs is ~4 (second order)
  const double ratio = points[2].rel_err / points[1].rel_err;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("min-variance and g2 deviations also shrink with g0") {
  JointConfig cfg = base_config();
  const auto table = analytic_table(cfg, 20001);
  const double omega = cfg.modes[0].omega;
  const auto core = squeezing_core(table, omega);

  double prev_var_err = 1e300, prev_g2_err = 1e300;
  for (double g0 : {8e-3, 4e-3, 2e-3}) {
    JointConfig run = cfg;
    run.g0 = g0;
    JointSystem sys(run);
    const auto exact = sys.observables(sys.propagate(sys.vacuum_state()), 0, run.duration);

    EnsembleParams ens{1.0, g0, 1.0};
    const double phd_var = quadrature_variance_min(core, ens, true);
    const double var_err = std::abs(exact.min_variance - phd_var);
    CHECK(var_err < prev_var_err);
    prev_var_err = var_err;

    const auto gp = g2(table, omega, ens, 2);
    REQUIRE(gp.defined);
    const double g2_err = std::abs(exact.g2 - gp.g2);
    CHECK(g2_err < prev_g2_err);
    prev_g2_err = g2_err;
  }
}

TEST_CASE("a second mode leaves the first mode's observables unchanged at leading order") {
  JointConfig one = base_config();
  one.duration = 60.0;
  one.dt = 0.005;
  one.modes = {ModeConfig{1.2, 6}};
  JointConfig two = one;
  two.modes.push_back(ModeConfig{1.45, 6});

  double prev_rel = 1e300;
  for (double g0 : {6e-3, 3e-3}) {
    JointConfig a = one, b = two;
    a.g0 = b.g0 = g0;
    JointSystem sys_a(a), sys_b(b);
    const auto obs_a = sys_a.observables(sys_a.propagate(sys_a.vacuum_state()), 0, a.duration);
    const auto obs_b = sys_b.observables(sys_b.propagate(sys_b.vacuum_state()), 0, b.duration);
    const double rel = std::abs(obs_a.n_mean - obs_b.n_mean) / obs_a.n_mean;
    CHECK(rel < 0.05);
    CHECK(rel < prev_rel);  // the coupling between modes is higher order
    prev_rel = rel;
  }
}

TEST_CASE("fitted slope input validation") {
  CHECK_THROWS(fitted_slope({}));
  CHECK_THROWS(JointSystem(JointConfig{1.0, 0.2, 1.0, 1e-3, 10.0, 0.01, {}}));
  CHECK_THROWS(JointSystem(JointConfig{1.0, 0.2, 1.0, 1e-3, 10.0, 0.01, {ModeConfig{1.0, 1}}}));
}
