#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "phd/emitter.hpp"
#include "phd/pulse.hpp"

namespace phd {

enum class TableMode { full, row_only };

// p_{m,n}(t_k) over M propagated eigenstates and the recording grid; the one
// intermediate every observable is computed from. Stored time-major: block k
// holds the M x M matrix (row-major) or, in row mode, the M row entries
// p_{i,n}(t_k).
struct TransitionDipoleTable {
  int n_states = 0;
  int initial_state = 0;
  TableMode mode = TableMode::full;
  std::vector<double> energies;
  std::vector<double> obs_times;
  std::vector<std::complex<double>> data;
  std::vector<double> absorbed_norm;  // per state, 1 - |psi(T)|^2
  double hermiticity_residual = 0.0;  // sampled during assembly (full mode)

  int n_obs() const { return static_cast<int>(obs_times.size()); }
  double obs_spacing() const { return obs_times.size() > 1 ? obs_times[1] - obs_times[0] : 0.0; }

  std::complex<double> full_at(int m, int n, int k) const {
    return data[static_cast<std::size_t>(k) * n_states * n_states + static_cast<std::size_t>(m) * n_states + n];
  }
  // p_{i,n}(t_k), valid in both modes
  std::complex<double> row_at(int n, int k) const {
    return mode == TableMode::full ? full_at(initial_state, n, k)
                                   : data[static_cast<std::size_t>(k) * n_states + n];
  }
};

struct TableBuildOptions {
  TableMode mode = TableMode::full;
  int initial_state = 0;
};

TransitionDipoleTable compute_table(const EmitterModel& model, const TimeGrid& grid,
                                    const TableBuildOptions& opt = {});

// <p_sc(t)> = p_{i,i}(t)
ComplexSeries mean_dipole(const TransitionDipoleTable& table);

// <Dp(t_k1) Dp(t_k2)> = sum_{m != i} p_{i,m}(t_k1) p_{m,i}(t_k2)
std::complex<double> connected_correlation(const TransitionDipoleTable& table, int k1, int k2);

void save_table(const TransitionDipoleTable& table, const std::string& path);
TransitionDipoleTable load_table(const std::string& path);

// comma-separated (t, re, im) of one (m, n) row
void export_row_csv(const TransitionDipoleTable& table, int m, int n, std::ostream& os);

}  // namespace phd
