#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "galet/config.hpp"
#include "galet/errors.hpp"
#include "galet/experiment.hpp"
#include "galet/metrics.hpp"
#include "galet/oracle.hpp"
#include "galet/problems.hpp"
#include "galet/rng.hpp"
#include "galet/verify.hpp"

namespace {

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int workers = 1;
  std::optional<std::string> format;
};

int do_run(const std::string& config_path, const CommonFlags& flags) {
  galet::ExperimentConfig config = galet::load_config(config_path);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.out) config.output.dir = *flags.out;
  if (flags.format) {
    config.output.format = *flags.format;
    config.validate();
  }

  const galet::ExperimentResult result = galet::run_experiment(config, flags.workers);
  int diverged = 0;
  for (const auto& run : result.runs) {
    if (run.diverged) {
      ++diverged;
      std::printf("run %d: DIVERGED (%s)\n", run.run_index, run.message.c_str());
    }
  }
  std::printf("%zu run(s), %d diverged; summary: %s\n", result.runs.size(), diverged,
              result.summary_path.c_str());
  return result.exit_code;
}

int do_summarize(const std::string& dir) {
  const std::string text = galet::summarize_dir(dir);
  std::fputs(text.c_str(), stdout);
  return 0;
}

std::vector<std::pair<galet::Vector, galet::Vector>> sample_points(const galet::BilevelOracle& p,
                                                                   int count,
                                                                   std::uint64_t seed) {
  // example1's natural domain is the [-3,3] box; generated problems are
  // exercised at gaussian points
  const bool box = p.name() == "example1";
  galet::SplitMix64 rng(seed);
  std::vector<std::pair<galet::Vector, galet::Vector>> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    galet::Vector x(p.dim_x()), y(p.dim_y());
    for (int j = 0; j < x.size(); ++j) x(j) = box ? rng.uniform(-3.0, 3.0) : rng.gaussian();
    for (int j = 0; j < y.size(); ++j) y(j) = box ? rng.uniform(-3.0, 3.0) : rng.gaussian();
    pts.emplace_back(std::move(x), std::move(y));
  }
  return pts;
}

int do_verify(const std::string& problem, std::uint64_t seed, int fd_points, int pl_points) {
  const auto oracle = galet::make_problem(problem, {});
  bool ok = true;

  const auto pts = sample_points(*oracle, fd_points, seed);
  const galet::FdReport fd = galet::fd_verify(*oracle, pts);
  std::printf("fd_verify (%d points): worst rel err %.3e (tol %.1e) -> %s\n", fd_points,
              fd.worst(), fd.rel_tol, fd.pass ? "pass" : "FAIL");
  std::printf("  grad_x_f %.3e  grad_y_f %.3e  grad_x_g %.3e  grad_y_g %.3e  hvp_yy %.3e  "
              "hvp_xy %.3e\n",
              fd.max_err_grad_x_f, fd.max_err_grad_y_f, fd.max_err_grad_x_g, fd.max_err_grad_y_g,
              fd.max_err_hvp_yy, fd.max_err_hvp_xy);
  ok = ok && fd.pass;

  const auto mu = oracle->constants().mu_g;
  if (!mu) {
    std::printf("pl check: skipped (mu_g unknown for '%s')\n", problem.c_str());
  } else {
    try {
      const auto pl_pts = sample_points(*oracle, pl_points, seed + 1);
      const galet::PlCheckReport pl = galet::check_pl_inequality(*oracle, *mu, pl_pts);
      std::printf("pl check (mu_g=%g, %d points): %s\n", *mu, pl_points,
                  pl.all_pass ? "pass" : "FAIL");
      ok = ok && pl.all_pass;
    } catch (const galet::UnsupportedDiagnostic& e) {
      std::printf("pl check: skipped (%s)\n", e.what());
    }
  }

  try {
    const auto probe_pts = sample_points(*oracle, std::min(fd_points, 20), seed + 2);
    const auto rows = galet::rank_probe(*oracle, probe_pts);
    int full = 0;
    bool consistent = true;
    for (const auto& r : rows) {
      if (r.rank_hessian == oracle->dim_y()) ++full;
      consistent = consistent && r.rank_augmented == r.rank_hessian;
    }
    std::printf("rank_probe (%zu points): %d full-rank, augmented==hessian rank at %s\n",
                rows.size(), full, consistent ? "all points" : "NOT all points");
  } catch (const galet::UnsupportedDiagnostic& e) {
    std::printf("rank_probe: skipped (%s)\n", e.what());
  }

  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GALET bilevel-optimization benchmark runner"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string config_path, dir, problem;
  std::uint64_t verify_seed = 42;
  int fd_points = 100;
  int pl_points = 10000;

  auto add_common = [&flags](CLI::App* cmd) {
    cmd->add_option("--seed", flags.seed, "experiment seed (feeds unpinned defaults)");
    cmd->add_option("--out", flags.out, "output directory override");
    cmd->add_option("--workers", flags.workers, "parallel runs")->check(CLI::PositiveNumber);
    cmd->add_option("--format", flags.format, "trace format: csv, json, or both");
  };

  CLI::App* run = app.add_subcommand("run", "execute the runs of a config file");
  run->add_option("config", config_path, "config file")->required();
  add_common(run);

  CLI::App* sweep = app.add_subcommand("sweep", "alias of run for sweep-style configs");
  sweep->add_option("config", config_path, "config file")->required();
  add_common(sweep);

  CLI::App* summarize = app.add_subcommand("summarize", "rebuild summary.json from a trace dir");
  summarize->add_option("dir", dir, "directory with run_*.csv traces")->required();

  CLI::App* verify = app.add_subcommand("verify", "fd_verify + PL check + rank probe");
  verify->add_option("problem", problem, "registry problem name")->required();
  verify->add_option("--seed", verify_seed, "sampling seed");
  verify->add_option("--points", fd_points, "fd_verify sample count")->check(CLI::PositiveNumber);
  verify->add_option("--pl-points", pl_points, "PL-check sample count")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed() || sweep->parsed()) return do_run(config_path, flags);
    if (summarize->parsed()) return do_summarize(dir);
    if (verify->parsed()) return do_verify(problem, verify_seed, fd_points, pl_points);
  } catch (const galet::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const galet::DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
