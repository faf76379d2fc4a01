#include "phd/dipole_table.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace phd {

namespace {

void check_finite(const Eigen::MatrixXcd& block, int k, int offset_m) {
  for (Eigen::Index m = 0; m < block.rows(); ++m)
    for (Eigen::Index n = 0; n < block.cols(); ++n) {
      const auto v = block(m, n);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::runtime_error("compute_table: non-finite entry at (m,n,k)=(" +
                                 std::to_string(m + offset_m) + "," + std::to_string(n) + "," +
                                 std::to_string(k) + ")");
    }
}

}  // namespace

TransitionDipoleTable compute_table(const EmitterModel& model, const TimeGrid& grid,
                                    const TableBuildOptions& opt) {
  const int m_states = model.state_count();
  const int n_obs = grid.n_obs();
  if (opt.initial_state < 0 || opt.initial_state >= m_states)
    throw std::invalid_argument("compute_table: initial state out of range");

  TransitionDipoleTable table;
  table.n_states = m_states;
  table.initial_state = opt.initial_state;
  table.mode = opt.mode;
  table.energies = model.energies();
  table.obs_times = grid.obs_times;
  const std::size_t block = opt.mode == TableMode::full
                                ? static_cast<std::size_t>(m_states) * m_states
                                : static_cast<std::size_t>(m_states);
  table.data.resize(block * n_obs);

  Eigen::MatrixXcd states = model.initial_states();

  const auto record = [&](int k, double t) {
    if (opt.mode == TableMode::full) {
      const Eigen::MatrixXcd applied = model.emission_applied(states, t);
      Eigen::MatrixXcd p = states.adjoint() * applied;  // p(m,n) = <psi_m|p_op psi_n>
      check_finite(p, k, 0);
      double res = 0.0;
      for (int m = 0; m < m_states; ++m)
        for (int n = 0; n < m; ++n)
          res = std::max(res, std::abs(p(m, n) - std::conj(p(n, m))));
      table.hermiticity_residual = std::max(table.hermiticity_residual, res);
      for (int m = 0; m < m_states; ++m)
        for (int n = 0; n < m_states; ++n) table.data[block * k + m * m_states + n] = p(m, n);
    } else {
      // one emission application: p_{i,n} = conj(<psi_n|p_op psi_i>)
      Eigen::MatrixXcd applied = model.emission_applied(states.col(opt.initial_state), t);
      Eigen::VectorXcd col = states.adjoint() * applied.col(0);
      check_finite(col, k, 0);
      for (int n = 0; n < m_states; ++n) table.data[block * k + n] = std::conj(col[n]);
    }
  };

  record(0, 0.0);
  int next_obs = 1;
  for (long s = 0; s < grid.n_steps; ++s) {
    const double t = s * grid.dt;
    model.advance(states, t, grid.dt);
    if ((s + 1) % grid.stride == 0 && next_obs < n_obs) {
      record(next_obs, grid.obs_times[next_obs]);
      ++next_obs;
    }
  }

  table.absorbed_norm.resize(m_states);
  for (int m = 0; m < m_states; ++m)
    table.absorbed_norm[m] = 1.0 - states.col(m).squaredNorm();
  return table;
}

ComplexSeries mean_dipole(const TransitionDipoleTable& table) {
  ComplexSeries out;
  out.times = table.obs_times;
  out.values.resize(table.obs_times.size());
  for (int k = 0; k < table.n_obs(); ++k) out.values[k] = table.row_at(table.initial_state, k);
  return out;
}

std::complex<double> connected_correlation(const TransitionDipoleTable& table, int k1, int k2) {
  std::complex<double> acc = 0.0;
  for (int m = 0; m < table.n_states; ++m) {
    if (m == table.initial_state) continue;
    acc += table.row_at(m, k1) * std::conj(table.row_at(m, k2));
  }
  return acc;
}

namespace {
constexpr char kMagic[8] = {'P', 'H', 'D', 'T', 'B', 'L', '0', '1'};
}

void save_table(const TransitionDipoleTable& table, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_table: cannot open " + path);
  os.write(kMagic, 8);
  const std::int64_t header[4] = {table.n_states, table.n_obs(), table.initial_state,
                                  table.mode == TableMode::full ? 0 : 1};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  os.write(reinterpret_cast<const char*>(table.energies.data()),
           static_cast<std::streamsize>(table.energies.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(table.obs_times.data()),
           static_cast<std::streamsize>(table.obs_times.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(table.data.data()),
           static_cast<std::streamsize>(table.data.size() * sizeof(std::complex<double>)));
  if (!os) throw std::runtime_error("save_table: write failed for " + path);
}

TransitionDipoleTable load_table(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_table: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("load_table: bad magic in " + path);
  std::int64_t header[4];
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  TransitionDipoleTable table;
  table.n_states = static_cast<int>(header[0]);
  table.initial_state = static_cast<int>(header[2]);
  table.mode = header[3] == 0 ? TableMode::full : TableMode::row_only;
  table.energies.resize(table.n_states);
  table.obs_times.resize(header[1]);
  is.read(reinterpret_cast<char*>(table.energies.data()),
          static_cast<std::streamsize>(table.energies.size() * sizeof(double)));
  is.read(reinterpret_cast<char*>(table.obs_times.data()),
          static_cast<std::streamsize>(table.obs_times.size() * sizeof(double)));
  const std::size_t block = table.mode == TableMode::full
                                ? static_cast<std::size_t>(table.n_states) * table.n_states
                                : static_cast<std::size_t>(table.n_states);
  table.data.resize(block * header[1]);
  is.read(reinterpret_cast<char*>(table.data.data()),
          static_cast<std::streamsize>(table.data.size() * sizeof(std::complex<double>)));
  if (!is) throw std::runtime_error("load_table: truncated file " + path);
  return table;
}

void export_row_csv(const TransitionDipoleTable& table, int m, int n, std::ostream& os) {
  if (n < 0 || n >= table.n_states || m < 0 || m >= table.n_states)
    throw std::invalid_argument("export_row_csv: indices out of range");
  if (table.mode == TableMode::row_only && m != table.initial_state)
    throw std::invalid_argument("export_row_csv: row-only table holds only the initial-state row");
  os << "t,re,im\n";
  os.precision(15);
  for (int k = 0; k < table.n_obs(); ++k) {
    const auto v = table.mode == TableMode::full ? table.full_at(m, n, k) : table.row_at(n, k);
    os << table.obs_times[k] << "," << v.real() << "," << v.imag() << "\n";
  }
}

}  // namespace phd
