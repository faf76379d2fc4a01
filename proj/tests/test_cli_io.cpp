#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "phd/dipole_table.hpp"
#include "phd/runner.hpp"

using namespace phd;
namespace fs = std::filesystem;

namespace {

RunConfig parse_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

std::string micro_config(const std::string& outdir) {
  return "preset = desk-atom\n"
         "[pulse]\n"
         "F0 = 0.05\n"
         "omegaL = 0.3\n"
         "cycles = 2\n"
         "[atom]\n"
         "xMax = 60\n"
         "nPoints = 512\n"
         "M = 8\n"
         "[time]\n"
         "dt = 0.01\n"
         "[frequencies]\n"
         "hMin = 2\n"
         "hMax = 6\n"
         "perHarmonic = 2\n"
         "[ensemble]\n"
         "N = 1e4, 1e6, 1e8\n"
         "[output]\n"
         "directory = " +
         outdir +
         "\n"
         "writeTable = true\n";
}

struct Row {
  double h, s_coh, s_inc, s_tot, eta_full, eta_sc, g2, mandel;
  std::string flags;
};

std::vector<Row> read_csv(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::string line;
  std::getline(is, line);
  REQUIRE(line == "omega_over_omegaL,S_coh,S_inc,S_tot,eta_dB_full,eta_dB_sc,g2,mandelQ,flags");
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    std::stringstream ss(line);
    Row r;
    char c;
    ss >> r.h >> c >> r.s_coh >> c >> r.s_inc >> c >> r.s_tot >> c >> r.eta_full >> c >>
        r.eta_sc >> c >> r.g2 >> c >> r.mandel >> c;
    std::getline(ss, r.flags);
    rows.push_back(r);
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("presets pin the reference parameter sets") {
  const RunConfig desk = preset_config("desk-atom");
  CHECK(desk.kind == EmitterKind::atom);
  CHECK(desk.atom.grid.x_max == 400.0);
  CHECK(desk.atom.grid.n_points == 8192);
  CHECK(desk.atom.m_states == 64);
  CHECK(desk.pulse.cycles == 8);

  const RunConfig atom = preset_config("paper-atom");
  CHECK(atom.pulse.peak_field == 0.053);
  CHECK(atom.pulse.carrier_freq == 0.057);
  CHECK(atom.pulse.cycles == 20);
  CHECK(atom.atom.grid.x_max == 3000.0);
  CHECK(atom.atom.grid.n_points == 150000);
  CHECK(atom.atom.m_states == 250);
  CHECK(atom.atom.potential.epsilon == 0.816);
  CHECK(atom.dt == 0.02);

  const RunConfig hub = preset_config("paper-hubbard");
  CHECK(hub.kind == EmitterKind::hubbard);
  CHECK(hub.hubbard.params.sites == 8);
  CHECK(hub.hubbard.params.hopping == 0.0191);
  CHECK(hub.hubbard.params.lattice_const == 7.5589);
  CHECK(hub.hubbard.params.onsite_u == doctest::Approx(0.2292).epsilon(1e-12));
  CHECK(hub.hubbard.params.neighbor_v == doctest::Approx(4 * 0.0191).epsilon(1e-12));
  CHECK(hub.hubbard.params.n_up == 4);
  CHECK(hub.hubbard.params.n_dn == 4);
  CHECK(hub.hubbard.params.periodic);
  CHECK(hub.hubbard.m_states == 128);
  CHECK(hub.hubbard.krylov_dim == 6);
  CHECK(hub.dt == 0.26);
  CHECK(hub.pulse.peak_field == 0.0025);
  CHECK(hub.pulse.carrier_freq == 0.00955);
  CHECK(hub.pulse.cycles == 10);

  CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}

TEST_CASE("config parsing: overrides, lists, errors") {
  const RunConfig cfg = parse_text(
      "preset = paper-hubbard\n"
      "[ensemble]\n"
      "N = 10, 100\n"
      "g0 = 3e-9\n"
      "[observables]\n"
      "squeezing = full, semiclassical\n"
      "g2 = false\n");
  CHECK(cfg.n_values == std::vector<double>{10.0, 100.0});
  CHECK(cfg.g0 == 3e-9);
  CHECK(cfg.want_squeezing_full);
  CHECK(cfg.want_squeezing_sc);
  CHECK(!cfg.want_g2);

  CHECK_THROWS_AS(parse_text("preset = desk-atom\n[ensemble]\nN = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_text("preset = desk-atom\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_text("preset = desk-atom\n[bogus]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_text("preset = desk-atom\n[time]\ndt = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_text("[time]\ndt = 0.1\n"), ConfigError);  // missing emitter kind
  CHECK_THROWS_AS(parse_text("preset = desk-atom\n[frequencies]\nhMin = 1\n"), ConfigError);
  CHECK(parse_text("emitter = hubbard\n").kind == EmitterKind::hubbard);
}

TEST_CASE("micro batch run: artifacts, scalings, reproducibility") {
  const fs::path base = fs::temp_directory_path() / "phd_hhg_cli_test";
  fs::remove_all(base);
  const std::string out_a = (base / "a").string();
  const std::string out_b = (base / "b").string();

  std::ostringstream log;
  const RunConfig cfg_a = parse_text(micro_config(out_a));
  const auto art_a = run(cfg_a, log);
  const RunConfig cfg_b = parse_text(micro_config(out_b));
  const auto art_b = run(cfg_b, log);

  REQUIRE(art_a.observable_files.size() == 3);
  CHECK(fs::exists(art_a.metadata_file));
  CHECK(fs::exists(art_a.table_file));

  const auto rows_n4 = read_csv(art_a.observable_files[0]);
  const auto rows_n6 = read_csv(art_a.observable_files[1]);
  const auto rows_n8 = read_csv(art_a.observable_files[2]);
  REQUIRE(rows_n4.size() == 9);  // h = 2, 2.5, ..., 6
  CHECK(rows_n4.front().h == doctest::Approx(2.0));
  CHECK(rows_n4.back().h == doctest::Approx(6.0));

  for (std::size_t j = 0; j < rows_n4.size(); ++j) {
    // exact closed-form N-scalings survive the round trip through the files
    CHECK(rows_n6[j].s_inc / rows_n4[j].s_inc == doctest::Approx(100.0).epsilon(1e-10));
    CHECK(rows_n6[j].s_coh / rows_n4[j].s_coh ==
          doctest::Approx(1e6 * (1e6 - 1) / (1e4 * (1e4 - 1))).epsilon(1e-10));
    CHECK(rows_n4[j].s_tot == doctest::Approx(rows_n4[j].s_coh + rows_n4[j].s_inc));
    // the variance excess scales linearly in N: recover it from the dB values
    const double v4 = std::pow(10.0, -rows_n4[j].eta_full / 10.0) / 4.0 - 0.25;
    const double v6 = std::pow(10.0, -rows_n6[j].eta_full / 10.0) / 4.0 - 0.25;
    if (std::abs(v4) > 1e-13) CHECK(v6 / v4 == doctest::Approx(100.0).epsilon(1e-4));
    // g2 defined and finite here
    CHECK(rows_n4[j].flags == "ok");
    CHECK(std::isfinite(rows_n4[j].g2));
    // the Poissonian limit pulls g2 toward 1 as N grows
    CHECK(std::abs(rows_n8[j].g2 - 1.0) <= std::abs(rows_n4[j].g2 - 1.0) + 1e-12);
  }

  // bit-for-bit reproducibility of the observable files and the table
  for (int f = 0; f < 3; ++f)
    CHECK(slurp(art_a.observable_files[f]) == slurp(art_b.observable_files[f]));
  CHECK(slurp(art_a.table_file) == slurp(art_b.table_file));

  // metadata carries the diagnostics
  const auto meta = nlohmann::json::parse(slurp(art_a.metadata_file));
  CHECK(meta.contains("diagnostics"));
  CHECK(meta["diagnostics"].contains("perturbativeParameter"));
  CHECK(meta["diagnostics"].contains("hermiticityResidual"));
  CHECK(meta.contains("convergence"));
  CHECK(meta["convergence"].contains("statesHalved"));
  CHECK(meta["convergence"].contains("quadratureSpacingDoubled"));
  CHECK(meta["time"]["stride"].get<int>() >= 1);

  // saved table round-trips through the library loader
  const auto table = load_table(art_a.table_file);
  CHECK(table.n_states == 8);
  CHECK(table.mode == TableMode::full);

  fs::remove_all(base);
}

TEST_CASE("command line front end: exit codes") {
  if (!fs::exists("phd-hhg")) return;  // exercised when run from the build tree

  const fs::path base = fs::temp_directory_path() / "phd_hhg_cli_exit";
  fs::remove_all(base);
  fs::create_directories(base);

  // config error -> 2
  {
    std::ofstream os(base / "bad.cfg");
    os << "preset = desk-atom\n[ensemble]\nN = 0\n";
  }
  int rc = std::system(("./phd-hhg run " + (base / "bad.cfg").string() + " 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(rc) == 2);

  rc = std::system("./phd-hhg run /nonexistent.cfg 2>/dev/null");
  CHECK(WEXITSTATUS(rc) == 2);

  // unknown subcommand -> 2
  rc = std::system("./phd-hhg frobnicate 2>/dev/null");
  CHECK(WEXITSTATUS(rc) == 2);

  // nscale-test -> 0
  rc = std::system("./phd-hhg nscale-test > /dev/null");
  CHECK(WEXITSTATUS(rc) == 0);

  // a tiny run -> 0, then export-table round trip
  {
    std::ofstream os(base / "ok.cfg");
    os << micro_config((base / "out").string());
  }
  rc = std::system(("./phd-hhg run " + (base / "ok.cfg").string() + " > /dev/null").c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  rc = std::system(("./phd-hhg export-table " + (base / "out" / "dipole_table.bin").string() +
                    " --row 0,1 --output " + (base / "row.csv").string())
                       .c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  {
    std::ifstream is(base / "row.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,re,im");
  }
  rc = std::system(("./phd-hhg export-table " + (base / "out" / "dipole_table.bin").string() +
                    " --row 0,99 2>/dev/null")
                       .c_str());
  CHECK(WEXITSTATUS(rc) == 2);

  fs::remove_all(base);
}
