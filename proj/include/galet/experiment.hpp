#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "galet/config.hpp"
#include "galet/oracle.hpp"
#include "galet/solver.hpp"

namespace galet {

struct RunSpec {
  int run_index = 0;
  GaletConfig solver;
  int init_index = 0;
  Vector x0, y0;
};

// deterministic cross-product order: alpha, beta, rho, n_inner, t_inner,
// k_outer, w_variant, w_warm_start, then initial points innermost
std::vector<RunSpec> expand_runs(const ExperimentConfig& config, const BilevelOracle& oracle);

struct RunOutcome {
  int run_index = 0;
  bool diverged = false;
  std::string message;           // divergence detail when diverged
  std::string trace_path_csv;    // empty if format excludes csv
  std::string trace_path_json;
  RunResult result;              // trace kept for summarization
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;  // ordered by run_index
  std::string summary_path;
  int exit_code = 0;  // 0 ok, 2 all runs diverged, 3 some diverged
};

// executes all runs (up to `workers` in parallel), writes one trace file per
// run plus summary.json under config.output.dir
ExperimentResult run_experiment(const ExperimentConfig& config, int workers = 1);

// rebuild a summary from trace files on disk ("summarize" verb); returns the
// JSON text written to <dir>/summary.json
std::string summarize_dir(const std::string& dir);

// trace IO; meta lines are "# key=value" pairs, values printed with %.17g
void write_trace_csv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& meta,
                     const std::vector<TraceRecord>& trace);
void write_trace_json(std::ostream& os,
                      const std::vector<std::pair<std::string, std::string>>& meta,
                      const std::vector<TraceRecord>& trace, bool r_y_approx);

struct ParsedTrace {
  std::map<std::string, std::string> meta;
  std::vector<TraceRecord> rows;
};
ParsedTrace read_trace_csv(std::istream& is);

std::string format_double(double v);  // %.17g

}  // namespace galet
