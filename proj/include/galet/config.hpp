#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "galet/linalg.hpp"
#include "galet/solver.hpp"

namespace galet {

// sweepable solver fields; single values are one-element lists
struct SolverSweep {
  std::vector<double> alpha{0.3};
  std::vector<double> beta{1.0};
  std::vector<double> rho{0.1};
  std::vector<int> n_inner{1};
  std::vector<int> t_inner{1};
  std::vector<int> k_outer{30};
  std::vector<WVariant> w_variant{WVariant::pl};
  std::vector<int> w_warm_start{0};  // 0/1
  std::optional<double> stop_tol;    // never swept
};

struct InitSpec {
  // explicit points: "x1 x2 ... ; y1 y2 ..."
  std::vector<std::pair<Vector, Vector>> points;
  // or a uniform box sampler over all coordinates
  bool use_box = false;
  double box_lo = -3.0;
  double box_hi = 3.0;
  int box_count = 0;
  std::uint64_t box_seed = 0;
  bool box_seed_set = false;  // unset falls back to the experiment seed
  bool zeros = false;         // single all-zeros point at problem dimensions
};

struct DiagnosticsSpec {
  bool record_b_k = false;
  bool approx_g_star = false;
  double lyapunov_c = 1.0;
  bool report_lyapunov = false;  // adds lyapunov start/end to the summary
};

struct OutputSpec {
  std::string dir = "out";
  std::string format = "csv";  // csv | json | both
};

struct ExperimentConfig {
  std::string problem_name = "example1";
  std::map<std::string, std::string> problem_params;
  SolverSweep solver;
  InitSpec init;
  DiagnosticsSpec diagnostics;
  OutputSpec output;
  std::uint64_t seed = 42;  // recorded in output headers; feeds defaults

  void validate() const;  // throws ConfigError (line 0 for file-level issues)
};

// INI-style grammar: [section] headers, key = value lines, '#' comments,
// blank lines ignored. Sections: problem, solver, init, diagnostics, output.
// Sweep lists are comma-separated. Throws ConfigError with the 1-based line.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace galet
