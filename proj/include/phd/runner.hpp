#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "phd/run_config.hpp"

namespace phd {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunArtifacts {
  std::vector<std::string> observable_files;  // one per N
  std::string metadata_file;
  std::string table_file;  // empty unless requested
};

// full batch pipeline: emitter build, dipole table, per-frequency observable
// pass, per-N scalings, deterministic output files plus a metadata document
RunArtifacts run(const RunConfig& config, std::ostream& log);

}  // namespace phd
