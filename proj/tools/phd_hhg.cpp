#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "phd/nscaling.hpp"
#include "phd/observables.hpp"
#include "phd/runner.hpp"
#include "phd/toy_exact.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int cmd_run(const std::string& config_path) {
  phd::RunConfig config;
  try {
    config = phd::parse_config_file(config_path);
  } catch (const phd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    phd::run(config, std::cout);
  } catch (const phd::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_toy_verify(const std::vector<double>& g0_list, const std::string& out_path) {
  phd::JointConfig base;  // two-level + one mode defaults
  std::vector<double> g0s = g0_list;
  if (g0s.empty()) g0s = {1e-3, 1.78e-3, 3.16e-3, 5.62e-3, 1e-2};

  const auto points = phd::coupling_scan(base, g0s);
  const double slope = phd::fitted_slope(points);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return kExitNumerical;
    }
    os = &file;
  }
  os->precision(12);
  *os << "g0,exact,phd,relErr\n";
  for (const auto& p : points)
    *os << p.g0 << "," << p.exact_value << "," << p.phd_value << "," << p.rel_err << "\n";
  std::cout << "log-log slope of relErr vs g0: " << slope << " (needs >= 1.8)\n";
  return slope >= 1.8 ? kExitOk : kExitNumerical;
}

int cmd_nscale_test() {
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double worst = 0.0;

  for (int k = 2; k <= 4; ++k) {
    for (int n = 2; n <= 5; ++n) {
      for (int draw = 0; draw < 100; ++draw) {
        // random single-emitter moments for every ordered slot tuple
        phd::MomentMap moments;
        const auto partitions = phd::slot_partitions(k);
        for (const auto& p : partitions)
          for (const auto& cls : p.classes)
            if (!moments.count(cls)) moments[cls] = {uni(rng), uni(rng)};

        const auto expansion = phd::expand_moment(k, n);
        const auto fast = phd::evaluate_moment(expansion, moments);

        // brute force over all n^k emitter assignments
        std::complex<double> brute = 0.0;
        std::vector<int> idx(k, 0);
        while (true) {
          std::complex<double> prod = 1.0;
          for (int e = 0; e < n; ++e) {
            std::vector<int> slots;
            for (int s = 0; s < k; ++s)
              if (idx[s] == e) slots.push_back(s);
            if (!slots.empty()) prod *= moments.at(slots);
          }
          brute += prod;
          int j = k - 1;
          while (j >= 0 && ++idx[j] == n) idx[j--] = 0;
          if (j < 0) break;
        }
        worst = std::max(worst, std::abs(fast - brute) / std::max(1.0, std::abs(brute)));
      }
    }
  }
  std::cout << "moment factorization vs direct enumeration, k=2..4, N=2..5, "
               "100 draws each: max rel deviation "
            << worst << "\n";
  return worst < 1e-12 ? kExitOk : kExitNumerical;
}

int cmd_export_table(const std::string& table_path, const std::string& row_spec,
                     const std::string& out_path) {
  int m = 0, n = 0;
  if (std::sscanf(row_spec.c_str(), "%d,%d", &m, &n) != 2) {
    std::cerr << "config error: --row expects m,n\n";
    return kExitConfig;
  }
  try {
    const auto table = phd::load_table(table_path);
    if (out_path.empty()) {
      phd::export_row_csv(table, m, n, std::cout);
    } else {
      std::ofstream os(out_path);
      if (!os) throw std::runtime_error("cannot write " + out_path);
      phd::export_row_csv(table, m, n, os);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strong-field quantum-optical observables from transition-dipole tables"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "execute a batch run from a config file");
  run_cmd->add_option("config", config_path, "config file")->required();

  std::vector<double> g0_list;
  std::string toy_out;
  auto* toy_cmd =
      app.add_subcommand("toy-verify", "exact few-mode oracle vs closed forms, g0 scaling table");
  toy_cmd->add_option("--g0-list", g0_list, "coupling values to scan")->delimiter(',');
  toy_cmd->add_option("--output", toy_out, "write the scaling table to a csv file");

  auto* nscale_cmd =
      app.add_subcommand("nscale-test", "verify the N-emitter moment factorization");

  std::string table_path, row_spec = "0,0", export_out;
  auto* export_cmd = app.add_subcommand("export-table", "dump one (m,n) dipole row as csv");
  export_cmd->add_option("table", table_path, "binary table file")->required();
  export_cmd->add_option("--row", row_spec, "row indices m,n");
  export_cmd->add_option("--output", export_out, "output csv (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (run_cmd->parsed()) return cmd_run(config_path);
  if (toy_cmd->parsed()) return cmd_toy_verify(g0_list, toy_out);
  if (nscale_cmd->parsed()) return cmd_nscale_test();
  if (export_cmd->parsed()) return cmd_export_table(table_path, row_spec, export_out);
  return kExitConfig;
}
