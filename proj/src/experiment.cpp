#include "galet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "galet/errors.hpp"
#include "galet/metrics.hpp"
#include "galet/problems.hpp"
#include "galet/rng.hpp"

namespace galet {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string format_vector(const Vector& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v(i));
  }
  return out;
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

std::vector<RunSpec> expand_runs(const ExperimentConfig& config, const BilevelOracle& oracle) {
  std::vector<std::pair<Vector, Vector>> inits = config.init.points;
  if (config.init.use_box) {
    SplitMix64 rng(config.init.box_seed);
    for (int i = 0; i < config.init.box_count; ++i) {
      Vector x(oracle.dim_x()), y(oracle.dim_y());
      for (int j = 0; j < x.size(); ++j) x(j) = rng.uniform(config.init.box_lo, config.init.box_hi);
      for (int j = 0; j < y.size(); ++j) y(j) = rng.uniform(config.init.box_lo, config.init.box_hi);
      inits.emplace_back(std::move(x), std::move(y));
    }
  } else if (config.init.zeros) {
    inits.emplace_back(Vector::Zero(oracle.dim_x()), Vector::Zero(oracle.dim_y()));
  } else if (inits.empty()) {
    // artifact defaults, example1 only
    Vector x1(1), y1(2), x2(1), y2(2);
    x1 << -3.0;
    y1 << 2.0, 1.0;
    x2 << 2.0;
    y2 << -2.0, -1.0;
    inits.emplace_back(x1, y1);
    inits.emplace_back(x2, y2);
  }
  for (const auto& [x0, y0] : inits)
    if (x0.size() != oracle.dim_x() || y0.size() != oracle.dim_y())
      throw std::invalid_argument("init point dimensions do not match problem '" + oracle.name() +
                                  "'");

  std::vector<RunSpec> runs;
  int idx = 0;
  for (double alpha : config.solver.alpha)
    for (double beta : config.solver.beta)
      for (double rho : config.solver.rho)
        for (int n_inner : config.solver.n_inner)
          for (int t_inner : config.solver.t_inner)
            for (int k_outer : config.solver.k_outer)
              for (WVariant variant : config.solver.w_variant)
                for (int warm : config.solver.w_warm_start)
                  for (std::size_t p = 0; p < inits.size(); ++p) {
                    RunSpec spec;
                    spec.run_index = idx++;
                    spec.solver.alpha = alpha;
                    spec.solver.beta = beta;
                    spec.solver.rho = rho;
                    spec.solver.n_inner = n_inner;
                    spec.solver.t_inner = t_inner;
                    spec.solver.k_outer = k_outer;
                    spec.solver.w_variant = variant;
                    spec.solver.w_warm_start = warm != 0;
                    spec.solver.stop_tol = config.solver.stop_tol;
                    spec.init_index = static_cast<int>(p);
                    spec.x0 = inits[p].first;
                    spec.y0 = inits[p].second;
                    runs.push_back(std::move(spec));
                  }
  return runs;
}

static const char* kCsvHeader =
    "k,r_x,r_w,r_y,dx_norm_sq,val_kkt_score,optimality_gap,b_k,wall_time_ms";

void write_trace_csv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& meta,
                     const std::vector<TraceRecord>& trace) {
  for (const auto& [key, value] : meta) os << "# " << key << "=" << value << "\n";
  os << kCsvHeader << "\n";
  for (const auto& r : trace) {
    os << r.k << ',' << format_double(r.r_x) << ',' << format_double(r.r_w) << ','
       << opt_cell(r.r_y) << ',' << opt_cell(r.dx_norm_sq) << ',' << opt_cell(r.val_kkt_score)
       << ',' << opt_cell(r.optimality_gap) << ',' << opt_cell(r.b_k) << ','
       << format_double(r.wall_time_ms) << "\n";
  }
}

void write_trace_json(std::ostream& os,
                      const std::vector<std::pair<std::string, std::string>>& meta,
                      const std::vector<TraceRecord>& trace, bool r_y_approx) {
  json doc;
  doc["schema_version"] = 1;
  json m = json::object();
  for (const auto& [key, value] : meta) m[key] = value;
  doc["meta"] = m;
  json rows = json::array();
  for (const auto& r : trace) {
    json row;
    row["k"] = r.k;
    row["r_x"] = r.r_x;
    row["r_w"] = r.r_w;
    row["r_y"] = r.r_y ? json(*r.r_y) : json(nullptr);
    if (r.r_y && r_y_approx) row["r_y_approx"] = true;
    row["dx_norm_sq"] = r.dx_norm_sq ? json(*r.dx_norm_sq) : json(nullptr);
    row["val_kkt_score"] = r.val_kkt_score ? json(*r.val_kkt_score) : json(nullptr);
    row["optimality_gap"] = r.optimality_gap ? json(*r.optimality_gap) : json(nullptr);
    row["b_k"] = r.b_k ? json(*r.b_k) : json(nullptr);
    row["wall_time_ms"] = r.wall_time_ms;
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << "\n";
}

ParsedTrace read_trace_csv(std::istream& is) {
  ParsedTrace out;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const std::size_t eq = line.find('=');
      if (eq != std::string::npos) out.meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw std::runtime_error("malformed trace: unexpected header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    while (cells.size() < 9) cells.emplace_back();
    TraceRecord r;
    r.k = std::stoi(cells[0]);
    r.r_x = std::stod(cells[1]);
    r.r_w = std::stod(cells[2]);
    auto opt = [](const std::string& s) {
      return s.empty() ? std::optional<double>() : std::optional<double>(std::stod(s));
    };
    r.r_y = opt(cells[3]);
    r.dx_norm_sq = opt(cells[4]);
    r.val_kkt_score = opt(cells[5]);
    r.optimality_gap = opt(cells[6]);
    r.b_k = opt(cells[7]);
    r.wall_time_ms = cells[8].empty() ? 0.0 : std::stod(cells[8]);
    out.rows.push_back(r);
  }
  return out;
}

namespace {

std::vector<std::pair<std::string, std::string>> run_meta(const ExperimentConfig& config,
                                                          const RunSpec& spec, bool r_y_approx,
                                                          const std::string& status,
                                                          const std::string& message,
                                                          const std::optional<double>& lyap_initial,
                                                          const std::optional<double>& lyap_final) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("schema_version", "1");
  meta.emplace_back("problem", config.problem_name);
  for (const auto& [key, value] : config.problem_params) meta.emplace_back("param." + key, value);
  meta.emplace_back("run_index", std::to_string(spec.run_index));
  meta.emplace_back("alpha", format_double(spec.solver.alpha));
  meta.emplace_back("beta", format_double(spec.solver.beta));
  meta.emplace_back("rho", format_double(spec.solver.rho));
  meta.emplace_back("n_inner", std::to_string(spec.solver.n_inner));
  meta.emplace_back("t_inner", std::to_string(spec.solver.t_inner));
  meta.emplace_back("k_outer", std::to_string(spec.solver.k_outer));
  meta.emplace_back("w_variant", to_string(spec.solver.w_variant));
  meta.emplace_back("w_warm_start", spec.solver.w_warm_start ? "1" : "0");
  if (spec.solver.stop_tol) meta.emplace_back("stop_tol", format_double(*spec.solver.stop_tol));
  meta.emplace_back("init_index", std::to_string(spec.init_index));
  meta.emplace_back("x0", format_vector(spec.x0));
  meta.emplace_back("y0", format_vector(spec.y0));
  meta.emplace_back("seed", std::to_string(config.seed));
  if (r_y_approx) meta.emplace_back("r_y_approx", "1");
  if (lyap_initial) meta.emplace_back("lyapunov_initial", format_double(*lyap_initial));
  if (lyap_final) meta.emplace_back("lyapunov_final", format_double(*lyap_final));
  meta.emplace_back("status", status);
  if (!message.empty()) meta.emplace_back("divergence", message);
  return meta;
}

std::string run_stem(int run_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%03d", run_index);
  return buf;
}

std::optional<double> try_lyapunov(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                                   double c) {
  try {
    return lyapunov_value(oracle, x, y, c);
  } catch (const UnsupportedDiagnostic&) {
    return std::nullopt;
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config_in, int workers) {
  ExperimentConfig config = config_in;
  config.validate();
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");

  // the experiment seed feeds defaults that were not pinned explicitly
  const auto param_names = problem_param_names(config.problem_name);
  const bool takes_seed =
      std::find(param_names.begin(), param_names.end(), "seed") != param_names.end();
  if (takes_seed && !config.problem_params.count("seed"))
    config.problem_params["seed"] = std::to_string(config.seed);
  if (config.init.use_box && !config.init.box_seed_set)
    config.init.box_seed = config.seed;

  const auto oracle = make_problem(config.problem_name, config.problem_params);
  const auto runs = expand_runs(config, *oracle);
  if (runs.empty()) throw ConfigError(0, "experiment expands to zero runs");

  fs::create_directories(config.output.dir);

  TraceOptions opts;
  opts.record_b_k = config.diagnostics.record_b_k;
  opts.approx_g_star = config.diagnostics.approx_g_star;

  const bool write_csv = config.output.format == "csv" || config.output.format == "both";
  const bool write_json = config.output.format == "json" || config.output.format == "both";

  ExperimentResult result;
  result.runs.resize(runs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      const RunSpec& spec = runs[i];
      RunOutcome out;
      out.run_index = spec.run_index;

      std::string status = "ok";
      std::optional<double> lyap0, lyap1;
      const bool has_g_star = static_cast<bool>(oracle->g_star(spec.x0));
      const bool r_y_approx = opts.approx_g_star && !has_g_star;
      try {
        if (config.diagnostics.report_lyapunov)
          lyap0 = try_lyapunov(*oracle, spec.x0, spec.y0, config.diagnostics.lyapunov_c);
        out.result = galet_run(*oracle, spec.x0, spec.y0, spec.solver, opts);
        if (config.diagnostics.report_lyapunov)
          lyap1 = try_lyapunov(*oracle, out.result.last.x, out.result.last.y,
                               config.diagnostics.lyapunov_c);
      } catch (const DivergenceError& e) {
        out.diverged = true;
        out.message = e.what();
        out.result.last = e.last;
        out.result.trace = e.trace;
        status = "diverged";
      }

      const auto meta =
          run_meta(config, spec, r_y_approx, status, out.message, lyap0, lyap1);
      const std::string stem = (fs::path(config.output.dir) / run_stem(spec.run_index)).string();
      if (write_csv) {
        std::ofstream os(stem + ".csv", std::ios::binary);
        write_trace_csv(os, meta, out.result.trace);
        out.trace_path_csv = stem + ".csv";
      }
      if (write_json) {
        std::ofstream os(stem + ".json", std::ios::binary);
        write_trace_json(os, meta, out.result.trace, r_y_approx);
        out.trace_path_json = stem + ".json";
      }
      result.runs[spec.run_index] = std::move(out);
    }
  };

  if (workers == 1 || runs.size() == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int n = static_cast<int>(
        std::min(static_cast<std::size_t>(workers), runs.size()));
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const std::size_t diverged =
      static_cast<std::size_t>(std::count_if(result.runs.begin(), result.runs.end(),
                                             [](const RunOutcome& r) { return r.diverged; }));
  result.exit_code = diverged == 0 ? 0 : (diverged == result.runs.size() ? 2 : 3);

  // the summary is always rebuilt from the csv traces on disk; json-only
  // output leaves no csv to summarize and therefore no summary.json
  if (write_csv) {
    summarize_dir(config.output.dir);
    result.summary_path = (fs::path(config.output.dir) / "summary.json").string();
  }
  return result;
}

namespace {

json rate_entry(const std::vector<TraceRecord>& rows,
                const std::function<std::optional<double>(const TraceRecord&)>& pick) {
  std::vector<std::pair<int, double>> series;
  for (const auto& r : rows) {
    const auto v = pick(r);
    if (!v) return json("unavailable");
    series.emplace_back(r.k, std::max(*v, 1e-300));
  }
  try {
    const RateFit fit = fit_rate(series);
    json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    j["k_min"] = fit.k_min;
    j["k_max"] = fit.k_max;
    return j;
  } catch (const std::invalid_argument&) {
    return json("insufficient data");
  }
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string summarize_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("summarize: no run_*.csv traces in '" + dir + "'");

  json doc;
  doc["schema_version"] = 1;
  json runs = json::array();
  struct Best {
    double gap = 0.0;
    double res = 0.0;
    int by_gap = -1;
    int by_res = -1;
  } best;

  for (const auto& path : files) {
    std::ifstream is(path);
    ParsedTrace trace;
    try {
      trace = read_trace_csv(is);
    } catch (const std::exception& e) {
      json bad;
      bad["trace"] = path.filename().string();
      bad["warning"] = std::string("skipped: ") + e.what();
      runs.push_back(std::move(bad));
      continue;
    }

    json entry;
    entry["trace"] = path.filename().string();
    json meta = json::object();
    for (const auto& [key, value] : trace.meta) meta[key] = value;
    entry["meta"] = meta;
    const bool diverged = trace.meta.count("status") && trace.meta.at("status") != "ok";
    entry["diverged"] = diverged;
    const int run_index =
        trace.meta.count("run_index") ? std::stoi(trace.meta.at("run_index")) : -1;
    entry["run_index"] = run_index;

    if (trace.rows.empty()) {
      entry["final"] = nullptr;
      entry["rate"] = "insufficient data";
    } else {
      const TraceRecord& last = trace.rows.back();
      json fin;
      fin["k"] = last.k;
      fin["r_x"] = last.r_x;
      fin["r_w"] = last.r_w;
      fin["r_y"] = opt_json(last.r_y);
      fin["optimality_gap"] = opt_json(last.optimality_gap);
      fin["val_kkt_score"] = opt_json(last.val_kkt_score);
      entry["final"] = fin;

      json rate;
      rate["r_x"] = rate_entry(trace.rows, [](const TraceRecord& r) {
        return std::optional<double>(r.r_x);
      });
      rate["r_w"] = rate_entry(trace.rows, [](const TraceRecord& r) {
        return std::optional<double>(r.r_w);
      });
      rate["r_y"] = rate_entry(trace.rows, [](const TraceRecord& r) { return r.r_y; });
      entry["rate"] = rate;

      if (!diverged) {
        const double max_res = std::max(last.r_x, std::max(last.r_w, last.r_y.value_or(0.0)));
        if (best.by_res < 0 || max_res < best.res) {
          best.res = max_res;
          best.by_res = run_index;
        }
        if (last.optimality_gap && (best.by_gap < 0 || *last.optimality_gap < best.gap)) {
          best.gap = *last.optimality_gap;
          best.by_gap = run_index;
        }
      }
    }
    runs.push_back(std::move(entry));
  }
  doc["runs"] = std::move(runs);
  json b;
  b["by_final_optimality_gap"] = best.by_gap >= 0 ? json(best.by_gap) : json(nullptr);
  b["by_final_max_residual"] = best.by_res >= 0 ? json(best.by_res) : json(nullptr);
  doc["best"] = std::move(b);

  const std::string text = doc.dump(2) + "\n";
  std::ofstream os(fs::path(dir) / "summary.json", std::ios::binary);
  os << text;
  return text;
}

}  // namespace galet
