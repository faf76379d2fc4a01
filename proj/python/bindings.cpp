#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phd/atom1d.hpp"
#include "phd/dipole_table.hpp"
#include "phd/hubbard.hpp"
#include "phd/nscaling.hpp"
#include "phd/observables.hpp"
#include "phd/toy_exact.hpp"
#include "phd/two_level.hpp"

namespace py = pybind11;
using namespace phd;

namespace {

py::array_t<std::complex<double>> table_array(const TransitionDipoleTable& t) {
  if (t.mode == TableMode::full) {
    py::array_t<std::complex<double>> out({t.n_obs(), t.n_states, t.n_states});
    auto r = out.mutable_unchecked<3>();
    for (int k = 0; k < t.n_obs(); ++k)
      for (int m = 0; m < t.n_states; ++m)
        for (int n = 0; n < t.n_states; ++n) r(k, m, n) = t.full_at(m, n, k);
    return out;
  }
  py::array_t<std::complex<double>> out({t.n_obs(), t.n_states});
  auto r = out.mutable_unchecked<2>();
  for (int k = 0; k < t.n_obs(); ++k)
    for (int n = 0; n < t.n_states; ++n) r(k, n) = t.row_at(n, k);
  return out;
}

FrequencyGrid grid_of(const std::vector<double>& omegas) {
  FrequencyGrid g;
  g.omegas = omegas;
  return g;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "strong-field quantum-optical observables from transition-dipole tables";

  py::class_<PulseConfig>(m, "PulseConfig")
      .def(py::init<double, double, int, double>(), py::arg("peak_field"),
           py::arg("carrier_freq"), py::arg("cycles"), py::arg("cep") = std::numbers::pi / 2)
      .def_readwrite("peak_field", &PulseConfig::peak_field)
      .def_readwrite("carrier_freq", &PulseConfig::carrier_freq)
      .def_readwrite("cycles", &PulseConfig::cycles)
      .def_readwrite("cep", &PulseConfig::cep)
      .def("duration", &PulseConfig::duration);

  m.def("vector_potential", &vector_potential, py::arg("pulse"), py::arg("t"));
  m.def("default_coupling", &default_coupling, py::arg("pulse"),
        "returns (g0, quantization volume)");

  py::class_<TimeGrid>(m, "TimeGrid")
      .def_readonly("dt", &TimeGrid::dt)
      .def_readonly("n_steps", &TimeGrid::n_steps)
      .def_readonly("stride", &TimeGrid::stride)
      .def_readonly("obs_times", &TimeGrid::obs_times);
  m.def("make_time_grid", &make_time_grid, py::arg("pulse"), py::arg("dt"), py::arg("stride"));
  m.def("suggest_stride", &suggest_stride, py::arg("dt"), py::arg("omega_max"),
        py::arg("samples") = 8);

  py::class_<EnsembleParams>(m, "EnsembleParams")
      .def(py::init<double, double, double>(), py::arg("n_emitters"), py::arg("g0"),
           py::arg("volume") = 0.0)
      .def_readwrite("n_emitters", &EnsembleParams::n_emitters)
      .def_readwrite("g0", &EnsembleParams::g0);

  py::class_<EmitterModel>(m, "EmitterModel")
      .def("dimension", &EmitterModel::dimension)
      .def("state_count", &EmitterModel::state_count)
      .def("energies", &EmitterModel::energies)
      .def("kind", &EmitterModel::kind);

  py::class_<SpatialGrid>(m, "SpatialGrid")
      .def(py::init<double, int>(), py::arg("x_max"), py::arg("n_points"))
      .def_readwrite("x_max", &SpatialGrid::x_max)
      .def_readwrite("n_points", &SpatialGrid::n_points)
      .def("dx", &SpatialGrid::dx);

  py::class_<AtomOptions>(m, "AtomOptions")
      .def(py::init<>())
      .def_readwrite("grid", &AtomOptions::grid)
      .def_readwrite("mask_enabled", &AtomOptions::mask_enabled)
      .def_readwrite("m_states", &AtomOptions::m_states)
      .def_property(
          "epsilon", [](const AtomOptions& o) { return o.potential.epsilon; },
          [](AtomOptions& o, double v) { o.potential.epsilon = v; });

  py::class_<AtomEmitter, EmitterModel>(m, "AtomEmitter")
      .def(py::init<const AtomOptions&, const PulseConfig&>(), py::arg("options"),
           py::arg("pulse"));

  m.def(
      "field_free_eigenstates",
      [](const SpatialGrid& grid, double epsilon, int m_states) {
        const auto eig = field_free_eigenstates(grid, SoftCoreParams{epsilon}, m_states);
        return py::make_tuple(eig.energies, eig.states);
      },
      py::arg("grid"), py::arg("epsilon"), py::arg("m_states"));

  py::class_<HubbardParams>(m, "HubbardParams")
      .def(py::init<>())
      .def_readwrite("sites", &HubbardParams::sites)
      .def_readwrite("hopping", &HubbardParams::hopping)
      .def_readwrite("lattice_const", &HubbardParams::lattice_const)
      .def_readwrite("onsite_u", &HubbardParams::onsite_u)
      .def_readwrite("neighbor_v", &HubbardParams::neighbor_v)
      .def_readwrite("periodic", &HubbardParams::periodic)
      .def_readwrite("n_up", &HubbardParams::n_up)
      .def_readwrite("n_dn", &HubbardParams::n_dn);

  py::class_<HubbardOptions>(m, "HubbardOptions")
      .def(py::init<>())
      .def_readwrite("params", &HubbardOptions::params)
      .def_readwrite("m_states", &HubbardOptions::m_states)
      .def_readwrite("krylov_dim", &HubbardOptions::krylov_dim);

  py::class_<HubbardEmitter, EmitterModel>(m, "HubbardEmitter")
      .def(py::init<const HubbardOptions&, const PulseConfig&>(), py::arg("options"),
           py::arg("pulse"));

  py::class_<TwoLevelEmitter, EmitterModel>(m, "TwoLevelEmitter")
      .def(py::init<double, double, double>(), py::arg("level_gap"), py::arg("rabi_freq"),
           py::arg("scale") = 1.0)
      .def("dipole", &TwoLevelEmitter::dipole, py::arg("m"), py::arg("n"), py::arg("t"));

  py::class_<TransitionDipoleTable>(m, "TransitionDipoleTable")
      .def_readonly("n_states", &TransitionDipoleTable::n_states)
      .def_readonly("initial_state", &TransitionDipoleTable::initial_state)
      .def_readonly("obs_times", &TransitionDipoleTable::obs_times)
      .def_readonly("energies", &TransitionDipoleTable::energies)
      .def_readonly("absorbed_norm", &TransitionDipoleTable::absorbed_norm)
      .def_readonly("hermiticity_residual", &TransitionDipoleTable::hermiticity_residual)
      .def("array", &table_array, "entries as numpy array (K,M,M) or (K,M)");

  m.def(
      "compute_table",
      [](const EmitterModel& model, const TimeGrid& grid, bool full, int initial_state) {
        return compute_table(model, grid, {full ? TableMode::full : TableMode::row_only,
                                           initial_state});
      },
      py::arg("model"), py::arg("grid"), py::arg("full") = true, py::arg("initial_state") = 0);
  m.def("save_table", &save_table);
  m.def("load_table", &load_table);

  m.def(
      "spectrum",
      [](const TransitionDipoleTable& t, const std::vector<double>& omegas,
         const EnsembleParams& ens) {
        py::list out;
        for (const auto& p : spectrum(t, grid_of(omegas), ens))
          out.append(py::make_tuple(p.omega, p.s_coh, p.s_inc, p.s_total));
        return out;
      },
      py::arg("table"), py::arg("omegas"), py::arg("ensemble"),
      "per omega: (omega, S_coh, S_inc, S_total)");

  py::class_<SqueezingPoint>(m, "SqueezingPoint")
      .def_readonly("omega", &SqueezingPoint::omega)
      .def_readonly("a_sym", &SqueezingPoint::a_sym)
      .def_readonly("b_total", &SqueezingPoint::b_total)
      .def_readonly("theta_star", &SqueezingPoint::theta_star)
      .def_readonly("min_variance", &SqueezingPoint::min_variance)
      .def_readonly("eta_db", &SqueezingPoint::eta_db);
  m.def("quadrature_min_variance", &quadrature_min_variance, py::arg("table"), py::arg("omega"),
        py::arg("ensemble"), py::arg("include_quantum_correction") = true);
  m.def("squeezing_db", &squeezing_db);

  py::class_<G2Point>(m, "G2Point")
      .def_readonly("omega", &G2Point::omega)
      .def_readonly("g2", &G2Point::g2)
      .def_readonly("n_mean", &G2Point::n_mean)
      .def_readonly("mandel_q", &G2Point::mandel_q)
      .def_readonly("defined", &G2Point::defined)
      .def_readonly("d0", &G2Point::d0)
      .def_readonly("d2", &G2Point::d2)
      .def_readonly("d3", &G2Point::d3)
      .def_readonly("d4", &G2Point::d4)
      .def_readonly("d2tilde", &G2Point::d2tilde);
  m.def("g2", &g2, py::arg("table"), py::arg("omega"), py::arg("ensemble"),
        py::arg("m_trunc") = 0);
  m.def("mandel_q", &mandel_q, py::arg("g2"), py::arg("n_mean"));
  m.def("counting_expectation", &counting_expectation, py::arg("table"), py::arg("omega"),
        py::arg("ensemble"));

  m.def(
      "expand_moment",
      [](int k, double n) {
        py::list out;
        for (const auto& t : expand_moment(k, n))
          out.append(py::make_tuple(t.multiplicity, t.partition.classes));
        return out;
      },
      py::arg("k"), py::arg("n_emitters"), "list of (multiplicity, slot classes)");
  m.def(
      "evaluate_moment",
      [](int k, double n, const std::map<std::vector<int>, std::complex<double>>& moments) {
        return evaluate_moment(expand_moment(k, n), moments);
      },
      py::arg("k"), py::arg("n_emitters"), py::arg("moments"));

  py::class_<ScalingPoint>(m, "ScalingPoint")
      .def_readonly("g0", &ScalingPoint::g0)
      .def_readonly("exact_value", &ScalingPoint::exact_value)
      .def_readonly("phd_value", &ScalingPoint::phd_value)
      .def_readonly("rel_err", &ScalingPoint::rel_err);
  m.def(
      "coupling_scan",
      [](const std::vector<double>& g0s, double duration, double omega) {
        JointConfig cfg;
        cfg.duration = duration;
        cfg.modes = {ModeConfig{omega, 8}};
        return coupling_scan(cfg, g0s);
      },
      py::arg("g0_list"), py::arg("duration") = 100.0, py::arg("omega") = 1.2);
  m.def("fitted_slope", &fitted_slope);
}
