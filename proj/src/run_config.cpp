#include "phd/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace phd {

void RunConfig::validate() const {
  pulse.validate();
  if (dt <= 0.0) throw ConfigError("config: dt must be > 0");
  if (stride < 0) throw ConfigError("config: stride must be >= 0");
  if (n_values.empty()) throw ConfigError("config: at least one N required");
  for (double n : n_values) {
    if (n < 1.0) throw ConfigError("config: N must be >= 1");
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
      throw ConfigError("config: N must be integer-valued");
  }
  if (g0 < 0.0) throw ConfigError("config: g0 must be >= 0");
  if (freq.h_min < 1.0 + 1e-12) throw ConfigError("config: frequency grid must exclude the fundamental (hMin > 1)");
  if (freq.h_max < freq.h_min) throw ConfigError("config: hMax < hMin");
  if (freq.per_harmonic < 1) throw ConfigError("config: perHarmonic must be >= 1");
  if (kind == EmitterKind::atom) {
    if (atom.m_states < 1) throw ConfigError("config: atom M must be >= 1");
  } else {
    if (hubbard.m_states < 1) throw ConfigError("config: hubbard M must be >= 1");
  }
  if (output_dir.empty()) throw ConfigError("config: output directory required");
}

RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  cfg.preset = name;
  if (name == "desk-atom" || name == "desk") {
    cfg.kind = EmitterKind::atom;
    cfg.pulse = PulseConfig{0.053, 0.057, 8, std::numbers::pi / 2};
    cfg.atom.grid = SpatialGrid{400.0, 8192};
    cfg.atom.m_states = 64;
    cfg.dt = 0.04;
    cfg.freq = FrequencySpec{2.0, 33.0, 1};
    cfg.n_values = {1e5, 1e6, 1e7};
  } else if (name == "paper-atom") {
    cfg.kind = EmitterKind::atom;
    cfg.pulse = PulseConfig{0.053, 0.057, 20, std::numbers::pi / 2};
    cfg.atom.grid = SpatialGrid{3000.0, 150000};
    cfg.atom.m_states = 250;
    cfg.dt = 0.02;
    cfg.freq = FrequencySpec{2.0, 33.0, 1};
    cfg.n_values = {1e5, 1e6, 1e7};
  } else if (name == "paper-hubbard") {
    cfg.kind = EmitterKind::hubbard;
    cfg.pulse = PulseConfig{0.0025, 0.00955, 10, std::numbers::pi / 2};
    cfg.hubbard.params = HubbardParams{};  // L=8, t0=0.0191, a=7.5589, U=12t0, V=4t0, PBC, 4+4
    cfg.hubbard.m_states = 128;
    cfg.hubbard.krylov_dim = 6;
    cfg.dt = 0.26;
    cfg.freq = FrequencySpec{2.0, 30.0, 2};
    cfg.n_values = {1e3, 1e5, 1e7};
  } else if (name == "desk-hubbard") {
    cfg.kind = EmitterKind::hubbard;
    cfg.pulse = PulseConfig{0.0025, 0.00955, 6, std::numbers::pi / 2};
    cfg.hubbard.params = HubbardParams{};
    cfg.hubbard.params.sites = 6;
    cfg.hubbard.params.n_up = 3;
    cfg.hubbard.params.n_dn = 3;
    cfg.hubbard.m_states = 40;
    cfg.dt = 0.26;
    cfg.freq = FrequencySpec{2.0, 25.0, 2};
    cfg.n_values = {1e3, 1e5, 1e7};
  } else {
    throw ConfigError("config: unknown preset '" + name + "'");
  }
  return cfg;
}

namespace {

struct Entry {
  std::string section, key, value;
  int line;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(const Entry& e) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(e.value, &pos);
  } catch (...) {
    throw ConfigError("config line " + std::to_string(e.line) + ": bad number for " + e.key);
  }
  if (pos != e.value.size())
    throw ConfigError("config line " + std::to_string(e.line) + ": bad number for " + e.key);
  return v;
}

int parse_int(const Entry& e) {
  const double v = parse_double(e);
  if (std::abs(v - std::round(v)) > 1e-9)
    throw ConfigError("config line " + std::to_string(e.line) + ": integer required for " + e.key);
  return static_cast<int>(std::llround(v));
}

bool parse_bool(const Entry& e) {
  const std::string v = lower(e.value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config line " + std::to_string(e.line) + ": boolean required for " + e.key);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  std::vector<Entry> entries;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section");
      section = lower(trim(line.substr(1, line.size() - 2)));
      static const std::vector<std::string> known = {"pulse",    "atom",        "hubbard",
                                                     "time",     "ensemble",    "observables",
                                                     "frequencies", "output"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        throw ConfigError("config line " + std::to_string(line_no) + ": unknown section [" +
                          section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    Entry e;
    e.section = section;
    e.key = lower(trim(line.substr(0, eq)));
    e.value = trim(line.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty() || e.value.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    entries.push_back(std::move(e));
  }

  RunConfig cfg;
  bool preset_seen = false, emitter_seen = false;
  std::string emitter_value;
  for (const auto& e : entries) {
    if (e.section.empty() && e.key == "preset") {
      cfg = preset_config(e.value);
      preset_seen = true;
    }
    if (e.section.empty() && e.key == "emitter") emitter_value = lower(e.value);
  }
  if (!preset_seen) {
    if (emitter_value.empty())
      throw ConfigError("config: missing emitter kind (set 'preset' or 'emitter')");
    // defaults base for a custom run
    cfg = preset_config(emitter_value == "hubbard" ? "desk-hubbard" : "desk-atom");
    cfg.preset.clear();
  }

  for (const auto& e : entries) {
    const std::string& k = e.key;
    if (e.section.empty()) {
      if (k == "preset") continue;
      if (k == "emitter") {
        const std::string v = lower(e.value);
        if (v == "atom")
          cfg.kind = EmitterKind::atom;
        else if (v == "hubbard")
          cfg.kind = EmitterKind::hubbard;
        else
          throw ConfigError("config line " + std::to_string(e.line) + ": unknown emitter kind '" +
                            e.value + "'");
        emitter_seen = true;
      } else
        throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + k + "'");
    } else if (e.section == "pulse") {
      if (k == "f0") cfg.pulse.peak_field = parse_double(e);
      else if (k == "omegal") cfg.pulse.carrier_freq = parse_double(e);
      else if (k == "cycles" || k == "nc") cfg.pulse.cycles = parse_int(e);
      else if (k == "cep") cfg.pulse.cep = parse_double(e);
      else throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + k + "' in [pulse]");
    } else if (e.section == "atom") {
      if (k == "xmax") cfg.atom.grid.x_max = parse_double(e);
      else if (k == "npoints") cfg.atom.grid.n_points = parse_int(e);
      else if (k == "epsilon") cfg.atom.potential.epsilon = parse_double(e);
      else if (k == "m") cfg.atom.m_states = parse_int(e);
      else if (k == "maskwidth") cfg.atom.mask.width_fraction = parse_double(e);
      else if (k == "maskexponent") cfg.atom.mask.exponent = parse_double(e);
      else if (k == "maskenabled") cfg.atom.mask_enabled = parse_bool(e);
      else throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + k + "' in [atom]");
    } else if (e.section == "hubbard") {
      auto& hp = cfg.hubbard.params;
      if (k == "l" || k == "sites") hp.sites = parse_int(e);
      else if (k == "t0") hp.hopping = parse_double(e);
      else if (k == "a") hp.lattice_const = parse_double(e);
      else if (k == "u") hp.onsite_u = parse_double(e);
      else if (k == "v") hp.neighbor_v = parse_double(e);
      else if (k == "nup") hp.n_up = parse_int(e);
      else if (k == "ndn") hp.n_dn = parse_int(e);
      else if (k == "periodic") hp.periodic = parse_bool(e);
      else if (k == "m") cfg.hubbard.m_states = parse_int(e);
      else if (k == "krylovdim") cfg.hubbard.krylov_dim = parse_int(e);
      else throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + k + "' in [hubbard]");
    } else if (e.section == "time") {
      if (k == "dt") cfg.dt = parse_double(e);
      else if (k == "stride") cfg.stride = parse_int(e);
      else throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + k + "' in [time]");
    } else if (e.section == "ensemble") {
      if (k == "n") {
        cfg.n_values.clear();
        for (const auto& item : split_list(e.value)) {
          Entry sub{e.section, e.key, item, e.line};
          cfg.n_values.push_back(parse_double(sub));
        }
        if (cfg.n_values.empty())
          throw ConfigError("config line " + std::to_string(e.line) + ": empty N list");
      } else if (k == "g0") cfg.g0 = parse_double(e);
      else throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + k + "' in [ensemble]");
    } else if (e.section == "observables") {
      if (k == "spectrum") cfg.want_spectrum = parse_bool(e);
      else if (k == "squeezing") {
        cfg.want_squeezing_full = false;
        cfg.want_squeezing_sc = false;
        for (const auto& item : split_list(e.value)) {
          const std::string v = lower(item);
          if (v == "full") cfg.want_squeezing_full = true;
          else if (v == "semiclassical" || v == "sc") cfg.want_squeezing_sc = true;
          else if (v == "none") {}
          else throw ConfigError("config line " + std::to_string(e.line) + ": unknown squeezing mode '" + item + "'");
        }
      } else if (k == "g2") cfg.want_g2 = parse_bool(e);
      else if (k == "g2states") cfg.g2_states = parse_int(e);
      else if (k == "initialstate") cfg.initial_state = parse_int(e);
      else throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + k + "' in [observables]");
    } else if (e.section == "frequencies") {
      if (k == "hmin") cfg.freq.h_min = parse_double(e);
      else if (k == "hmax") cfg.freq.h_max = parse_double(e);
      else if (k == "perharmonic") cfg.freq.per_harmonic = parse_int(e);
      else throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + k + "' in [frequencies]");
    } else if (e.section == "output") {
      if (k == "directory") cfg.output_dir = e.value;
      else if (k == "writetable") cfg.write_table = parse_bool(e);
      else throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + k + "' in [output]");
    }
  }
  (void)emitter_seen;
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  return parse_config(in);
}

std::string to_string(EmitterKind kind) {
  return kind == EmitterKind::atom ? "atom" : "hubbard";
}

}  // namespace phd
