#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "phd/atom1d.hpp"
#include "phd/hubbard.hpp"
#include "phd/pulse.hpp"

namespace phd {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EmitterKind { atom, hubbard };

struct FrequencySpec {
  double h_min = 2.0;
  double h_max = 33.0;
  int per_harmonic = 1;
};

struct RunConfig {
  std::string preset;  // desk-atom | paper-atom | paper-hubbard | desk-hubbard
  EmitterKind kind = EmitterKind::atom;
  PulseConfig pulse;
  AtomOptions atom;
  HubbardOptions hubbard;
  double dt = 0.04;
  int stride = 0;  // 0 = derived from the frequency grid (>= 8 samples per period)
  std::vector<double> n_values = {1e5, 1e6, 1e7};
  double g0 = 0.0;  // 0 = default coupling from the pulse
  int initial_state = 0;
  bool want_spectrum = true;
  bool want_squeezing_full = true;
  bool want_squeezing_sc = true;
  bool want_g2 = true;
  int g2_states = 0;  // 0 = min(M, 64)
  FrequencySpec freq;
  std::string output_dir = "out";
  bool write_table = false;

  void validate() const;
};

RunConfig preset_config(const std::string& name);

// key = value lines with [section] headers; '#' comments; numeric lists are
// comma separated; unknown sections or keys are rejected
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

std::string to_string(EmitterKind kind);

}  // namespace phd
