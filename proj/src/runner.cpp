#include "phd/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "phd/dipole_table.hpp"
#include "phd/observables.hpp"

namespace phd {

namespace {

using json = nlohmann::json;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string n_label(double n) {
  std::ostringstream os;
  os << static_cast<long long>(std::llround(n));
  return os.str();
}

json config_json(const RunConfig& c, double g0, double volume, const TimeGrid& grid) {
  json j;
  j["preset"] = c.preset;
  j["emitter"] = to_string(c.kind);
  j["pulse"] = {{"F0", c.pulse.peak_field},
                {"omegaL", c.pulse.carrier_freq},
                {"cycles", c.pulse.cycles},
                {"cep", c.pulse.cep},
                {"duration", c.pulse.duration()}};
  if (c.kind == EmitterKind::atom) {
    j["atom"] = {{"xMax", c.atom.grid.x_max},
                 {"nPoints", c.atom.grid.n_points},
                 {"epsilon", c.atom.potential.epsilon},
                 {"M", c.atom.m_states},
                 {"maskWidth", c.atom.mask.width_fraction},
                 {"maskExponent", c.atom.mask.exponent},
                 {"maskEnabled", c.atom.mask_enabled}};
  } else {
    const auto& hp = c.hubbard.params;
    j["hubbard"] = {{"L", hp.sites},        {"t0", hp.hopping},     {"a", hp.lattice_const},
                    {"U", hp.onsite_u},     {"V", hp.neighbor_v},   {"periodic", hp.periodic},
                    {"nUp", hp.n_up},       {"nDn", hp.n_dn},       {"M", c.hubbard.m_states},
                    {"krylovDim", c.hubbard.krylov_dim}};
  }
  j["time"] = {{"dt", grid.dt}, {"stride", grid.stride}, {"nSteps", grid.n_steps},
               {"obsSpacing", grid.obs_spacing()}, {"nObs", grid.n_obs()}};
  j["ensemble"] = {{"N", c.n_values}, {"g0", g0}, {"quantizationVolume", volume}};
  j["frequencies"] = {{"hMin", c.freq.h_min}, {"hMax", c.freq.h_max},
                      {"perHarmonic", c.freq.per_harmonic}};
  j["observables"] = {{"spectrum", c.want_spectrum},
                      {"squeezingFull", c.want_squeezing_full},
                      {"squeezingSemiclassical", c.want_squeezing_sc},
                      {"g2", c.want_g2},
                      {"g2States", c.g2_states},
                      {"initialState", c.initial_state}};
  j["conventions"] = {
      {"timeIntegrationEnd", "T (end of pulse)"},
      {"thetaStar", "arg(B)/2 - omega*T, reduced mod pi"},
      {"tableLayout", "time-major blocks, row-major M x M per block"}};
  return j;
}

TransitionDipoleTable truncate_states(const TransitionDipoleTable& t, int m_keep) {
  TransitionDipoleTable out;
  out.n_states = m_keep;
  out.initial_state = t.initial_state;
  out.mode = t.mode;
  out.energies.assign(t.energies.begin(), t.energies.begin() + m_keep);
  out.obs_times = t.obs_times;
  const int n_obs = t.n_obs();
  if (t.mode == TableMode::full) {
    out.data.resize(static_cast<std::size_t>(m_keep) * m_keep * n_obs);
    for (int k = 0; k < n_obs; ++k)
      for (int m = 0; m < m_keep; ++m)
        for (int n = 0; n < m_keep; ++n)
          out.data[(static_cast<std::size_t>(k) * m_keep + m) * m_keep + n] = t.full_at(m, n, k);
  } else {
    out.data.resize(static_cast<std::size_t>(m_keep) * n_obs);
    for (int k = 0; k < n_obs; ++k)
      for (int n = 0; n < m_keep; ++n)
        out.data[static_cast<std::size_t>(k) * m_keep + n] = t.row_at(n, k);
  }
  return out;
}

// table restricted to every second obs sample (spacing 2h Richardson check)
TransitionDipoleTable decimate(const TransitionDipoleTable& t) {
  TransitionDipoleTable out;
  out.n_states = t.n_states;
  out.initial_state = t.initial_state;
  out.mode = t.mode;
  out.energies = t.energies;
  const int n_obs = t.n_obs();
  const std::size_t block = t.mode == TableMode::full
                                ? static_cast<std::size_t>(t.n_states) * t.n_states
                                : static_cast<std::size_t>(t.n_states);
  for (int k = 0; k < n_obs; k += 2) {
    out.obs_times.push_back(t.obs_times[k]);
    out.data.insert(out.data.end(), t.data.begin() + block * k, t.data.begin() + block * (k + 1));
  }
  return out;
}

double rel_change(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace

RunArtifacts run(const RunConfig& config, std::ostream& log) {
  config.validate();
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);

  double g0 = config.g0;
  auto [g0_default, volume] = default_coupling(config.pulse);
  if (g0 <= 0.0) g0 = g0_default;

  const double omega_max = config.freq.h_max * config.pulse.carrier_freq;
  int stride = config.stride > 0 ? config.stride : suggest_stride(config.dt, omega_max, 8);
  const TimeGrid grid = make_time_grid(config.pulse, config.dt, stride);
  log << "phd-hhg run: emitter=" << to_string(config.kind) << " preset='" << config.preset
      << "' nSteps=" << grid.n_steps << " obs=" << grid.n_obs() << " spacing="
      << grid.obs_spacing() << "\n";

  const auto t_start = std::chrono::steady_clock::now();
  std::unique_ptr<EmitterModel> model;
  if (config.kind == EmitterKind::atom)
    model = std::make_unique<AtomEmitter>(config.atom, config.pulse);
  else
    model = std::make_unique<HubbardEmitter>(config.hubbard, config.pulse);
  const double t_eigensolve = seconds_since(t_start);
  log << "eigenstates ready: M=" << model->state_count() << " dim=" << model->dimension() << " ("
      << t_eigensolve << " s)\n";

  TableBuildOptions topt;
  topt.mode = config.want_g2 ? TableMode::full : TableMode::row_only;
  topt.initial_state = config.initial_state;
  const auto t_prop0 = std::chrono::steady_clock::now();
  TransitionDipoleTable table;
  try {
    table = compute_table(*model, grid, topt);
  } catch (const std::runtime_error& err) {
    throw NumericalError(err.what());
  }
  const double t_propagate = seconds_since(t_prop0);
  log << "dipole table built (" << t_propagate << " s), hermiticity residual "
      << table.hermiticity_residual << "\n";

  const FrequencyGrid freqs = FrequencyGrid::harmonics(
      config.pulse.carrier_freq, config.freq.h_min, config.freq.h_max, config.freq.per_harmonic);

  RunArtifacts artifacts;
  if (config.write_table) {
    artifacts.table_file = (fs::path(config.output_dir) / "dipole_table.bin").string();
    save_table(table, artifacts.table_file);
  }

  // N-independent per-frequency pass
  const auto t_obs0 = std::chrono::steady_clock::now();
  const int n_freq = static_cast<int>(freqs.omegas.size());
  std::vector<SqueezingCore> cores(n_freq);
  std::vector<G2Coefficients> g2c(n_freq);
  const std::vector<SpectrumCore> spec_unit = spectrum_core(table, freqs);
  for (int f = 0; f < n_freq; ++f) {
    if (config.want_squeezing_full || config.want_squeezing_sc)
      cores[f] = squeezing_core(table, freqs.omegas[f]);
    if (config.want_g2) g2c[f] = g2_coefficients(table, freqs.omegas[f], g0, config.g2_states);
  }
  const double t_observables = seconds_since(t_obs0);
  log << "frequency pass done (" << t_observables << " s)\n";

  // per-N files; N enters only through the closed-form scalings
  for (double n : config.n_values) {
    EnsembleParams ens{n, g0, volume};
    const fs::path path = fs::path(config.output_dir) / ("observables_N" + n_label(n) + ".csv");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("run: cannot write " + path.string());
    os.precision(15);
    os << "omega_over_omegaL,S_coh,S_inc,S_tot,eta_dB_full,eta_dB_sc,g2,mandelQ,flags\n";
    for (int f = 0; f < n_freq; ++f) {
      const double omega = freqs.omegas[f];
      const double nn1 = n * (n - 1.0);
      double s_coh = std::numeric_limits<double>::quiet_NaN();
      double s_inc = s_coh, s_tot = s_coh, eta_full = s_coh, eta_sc = s_coh, g2v = s_coh,
             mq = s_coh;
      std::string flags = "ok";
      if (config.want_spectrum) {
        s_coh = spec_unit[f].coh_unit * nn1;
        s_inc = spec_unit[f].inc_unit * n;
        s_tot = s_coh + s_inc;
      }
      if (config.want_squeezing_full) {
        const double v = quadrature_variance_min(cores[f], ens, true);
        eta_full = squeezing_db(v);
      }
      if (config.want_squeezing_sc) {
        const double v = quadrature_variance_min(cores[f], ens, false);
        eta_sc = squeezing_db(v);
      }
      if (config.want_g2) {
        const G2Point p = g2_assemble(g2c[f], n);
        if (p.defined) {
          g2v = p.g2;
          mq = p.mandel_q;
        } else {
          flags = "g2_undefined";
        }
      }
      os << omega / config.pulse.carrier_freq << "," << s_coh << "," << s_inc << "," << s_tot
         << "," << eta_full << "," << eta_sc << "," << g2v << "," << mq << "," << flags << "\n";
    }
    artifacts.observable_files.push_back(path.string());
    log << "wrote " << path.string() << "\n";
  }

  // diagnostics: perturbative inequality, M/2 convergence, stride Richardson
  json meta = config_json(config, g0, volume, grid);
  meta["timings"] = {{"eigensolve_s", t_eigensolve},
                     {"propagation_s", t_propagate},
                     {"frequencyPass_s", t_observables}};
  meta["diagnostics"]["hermiticityResidual"] = table.hermiticity_residual;
  double absorbed_max = 0.0;
  for (double a : table.absorbed_norm) absorbed_max = std::max(absorbed_max, a);
  meta["diagnostics"]["absorbedNormMax"] = absorbed_max;
  meta["diagnostics"]["absorbedNorm"] = table.absorbed_norm;

  for (double n : config.n_values) {
    EnsembleParams ens{n, g0, volume};
    const double pert = perturbative_parameter(table, freqs, ens);
    meta["diagnostics"]["perturbativeParameter"][n_label(n)] = pert;
    if (pert >= 0.1) {
      meta["diagnostics"]["perturbativeWarning"] = true;
      log << "warning: N g0 |p~(omega)| = " << pert << " >= 0.1 at N=" << n_label(n)
          << "; closed forms assume the perturbative regime\n";
    }
  }

  {
    const int m_half = std::max(2, table.n_states / 2);
    const auto half = truncate_states(table, m_half);
    const auto spec_half = spectrum_core(half, freqs);
    double worst_sinc = 0.0, worst_eta = 0.0;
    EnsembleParams ens{config.n_values.front(), g0, volume};
    for (int f = 0; f < n_freq; ++f) {
      worst_sinc = std::max(worst_sinc, rel_change(spec_half[f].inc_unit, spec_unit[f].inc_unit));
      if (config.want_squeezing_full) {
        const auto core_half = squeezing_core(half, freqs.omegas[f]);
        worst_eta = std::max(worst_eta, rel_change(quadrature_variance_min(core_half, ens, true),
                                                   quadrature_variance_min(cores[f], ens, true)));
      }
    }
    meta["convergence"]["statesHalved"] = {{"mHalf", m_half},
                                           {"maxRelChangeSinc", worst_sinc},
                                           {"maxRelChangeMinVariance", worst_eta}};
  }
  {
    const auto coarse = decimate(table);
    const auto spec_coarse = spectrum_core(coarse, freqs);
    double worst = 0.0;
    for (int f = 0; f < n_freq; ++f)
      worst = std::max(worst, rel_change(spec_coarse[f].inc_unit, spec_unit[f].inc_unit));
    meta["convergence"]["quadratureSpacingDoubled"] = {{"maxRelChangeSinc", worst}};
  }

  artifacts.metadata_file = (fs::path(config.output_dir) / "run_metadata.json").string();
  std::ofstream meta_os(artifacts.metadata_file);
  meta_os << meta.dump(2) << "\n";
  log << "wrote " << artifacts.metadata_file << "\n";
  return artifacts;
}

}  // namespace phd
