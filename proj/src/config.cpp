#include "galet/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "galet/errors.hpp"
#include "galet/problems.hpp"

namespace galet {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream iss(s);
  while (std::getline(iss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& raw, int line, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != raw.size()) throw ConfigError(line, "bad number '" + raw + "' for " + key);
  return v;
}

long long parse_int(const std::string& raw, int line, const std::string& key) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(raw, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != raw.size()) throw ConfigError(line, "bad integer '" + raw + "' for " + key);
  return v;
}

bool parse_bool(const std::string& raw, int line, const std::string& key) {
  if (raw == "true" || raw == "1") return true;
  if (raw == "false" || raw == "0") return false;
  throw ConfigError(line, "bad boolean '" + raw + "' for " + key + " (use true/false)");
}

std::vector<double> parse_double_list(const std::string& raw, int line, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(raw)) out.push_back(parse_double(item, line, key));
  if (out.empty()) throw ConfigError(line, "empty value list for " + key);
  return out;
}

std::vector<int> parse_int_list(const std::string& raw, int line, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : split_list(raw))
    out.push_back(static_cast<int>(parse_int(item, line, key)));
  if (out.empty()) throw ConfigError(line, "empty value list for " + key);
  return out;
}

Vector parse_coords(const std::string& raw, int line) {
  const auto items = split_list(raw);
  if (items.empty()) throw ConfigError(line, "empty coordinate list in point");
  Vector v(static_cast<int>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i)
    v(static_cast<int>(i)) = parse_double(items[i], line, "point");
  return v;
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto names = problem_names();
  if (std::find(names.begin(), names.end(), problem_name) == names.end())
    throw ConfigError(0, "unknown problem '" + problem_name + "'");
  const auto check_nonempty = [](bool ok, const char* key) {
    if (!ok) throw ConfigError(0, std::string("empty sweep list for ") + key);
  };
  check_nonempty(!solver.alpha.empty(), "alpha");
  check_nonempty(!solver.beta.empty(), "beta");
  check_nonempty(!solver.rho.empty(), "rho");
  check_nonempty(!solver.n_inner.empty(), "n_inner");
  check_nonempty(!solver.t_inner.empty(), "t_inner");
  check_nonempty(!solver.k_outer.empty(), "k_outer");
  check_nonempty(!solver.w_variant.empty(), "w_variant");
  check_nonempty(!solver.w_warm_start.empty(), "w_warm_start");
  for (double a : solver.alpha)
    if (!(a > 0.0)) throw ConfigError(0, "alpha must be positive");
  for (double b : solver.beta)
    if (!(b > 0.0)) throw ConfigError(0, "beta must be positive");
  for (double r : solver.rho)
    if (!(r > 0.0)) throw ConfigError(0, "rho must be positive");
  for (int n : solver.n_inner)
    if (n < 1) throw ConfigError(0, "n_inner must be >= 1");
  for (int t : solver.t_inner)
    if (t < 1) throw ConfigError(0, "t_inner must be >= 1");
  for (int k : solver.k_outer)
    if (k < 0) throw ConfigError(0, "k_outer must be >= 0");
  if (solver.stop_tol && !(*solver.stop_tol > 0.0))
    throw ConfigError(0, "stop_tol must be positive");

  const int sources = (init.points.empty() ? 0 : 1) + (init.use_box ? 1 : 0) +
                      (init.zeros ? 1 : 0);
  if (sources > 1)
    throw ConfigError(0, "choose one init source: explicit points, box sampler, or zeros");
  if (init.use_box) {
    if (!(init.box_lo < init.box_hi)) throw ConfigError(0, "init box needs lo < hi");
    if (init.box_count < 1) throw ConfigError(0, "box_count must be >= 1");
  }
  if (sources == 0 && problem_name != "example1")
    throw ConfigError(0, "problem '" + problem_name + "' needs an [init] section");

  if (diagnostics.lyapunov_c < 0.0) throw ConfigError(0, "lyapunov_c must be nonnegative");
  if (output.format != "csv" && output.format != "json" && output.format != "both")
    throw ConfigError(0, "format must be csv, json, or both");
  if (output.dir.empty()) throw ConfigError(0, "output dir must not be empty");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;

  while (std::getline(is, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "problem" && section != "solver" && section != "init" &&
          section != "diagnostics" && section != "output")
        throw ConfigError(line, "unknown section [" + section + "]");
      continue;
    }

    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "empty key");
    if (section.empty()) throw ConfigError(line, "key '" + key + "' outside any section");

    if (section == "problem") {
      if (key == "name") {
        const auto names = problem_names();
        if (std::find(names.begin(), names.end(), value) == names.end())
          throw ConfigError(line, "unknown problem '" + value + "'");
        cfg.problem_name = value;
      } else {
        cfg.problem_params[key] = value;
      }
    } else if (section == "solver") {
      if (key == "alpha")
        cfg.solver.alpha = parse_double_list(value, line, key);
      else if (key == "beta")
        cfg.solver.beta = parse_double_list(value, line, key);
      else if (key == "rho")
        cfg.solver.rho = parse_double_list(value, line, key);
      else if (key == "n_inner")
        cfg.solver.n_inner = parse_int_list(value, line, key);
      else if (key == "t_inner")
        cfg.solver.t_inner = parse_int_list(value, line, key);
      else if (key == "k_outer")
        cfg.solver.k_outer = parse_int_list(value, line, key);
      else if (key == "w_variant") {
        cfg.solver.w_variant.clear();
        for (const auto& item : split_list(value)) {
          try {
            cfg.solver.w_variant.push_back(parse_w_variant(item));
          } catch (const std::invalid_argument& e) {
            throw ConfigError(line, e.what());
          }
        }
        if (cfg.solver.w_variant.empty()) throw ConfigError(line, "empty value list for " + key);
      } else if (key == "w_warm_start") {
        cfg.solver.w_warm_start.clear();
        for (const auto& item : split_list(value))
          cfg.solver.w_warm_start.push_back(parse_bool(item, line, key) ? 1 : 0);
        if (cfg.solver.w_warm_start.empty())
          throw ConfigError(line, "empty value list for " + key);
      } else if (key == "stop_tol") {
        cfg.solver.stop_tol = parse_double(value, line, key);
      } else {
        throw ConfigError(line, "unknown solver key '" + key + "'");
      }
    } else if (section == "init") {
      if (key == "point") {
        const std::size_t semi = value.find(';');
        if (semi == std::string::npos)
          throw ConfigError(line, "point needs 'x-coords ; y-coords'");
        cfg.init.points.emplace_back(parse_coords(value.substr(0, semi), line),
                                     parse_coords(value.substr(semi + 1), line));
      } else if (key == "box") {
        const auto bounds = parse_double_list(value, line, key);
        if (bounds.size() != 2) throw ConfigError(line, "box needs exactly 'lo, hi'");
        cfg.init.use_box = true;
        cfg.init.box_lo = bounds[0];
        cfg.init.box_hi = bounds[1];
        if (cfg.init.box_count == 0) cfg.init.box_count = 1;
      } else if (key == "box_count") {
        cfg.init.use_box = true;
        cfg.init.box_count = static_cast<int>(parse_int(value, line, key));
      } else if (key == "box_seed") {
        cfg.init.use_box = true;
        cfg.init.box_seed = static_cast<std::uint64_t>(parse_int(value, line, key));
        cfg.init.box_seed_set = true;
      } else if (key == "zeros") {
        cfg.init.zeros = parse_bool(value, line, key);
      } else {
        throw ConfigError(line, "unknown init key '" + key + "'");
      }
    } else if (section == "diagnostics") {
      if (key == "record_b_k")
        cfg.diagnostics.record_b_k = parse_bool(value, line, key);
      else if (key == "approx_g_star")
        cfg.diagnostics.approx_g_star = parse_bool(value, line, key);
      else if (key == "lyapunov_c")
        cfg.diagnostics.lyapunov_c = parse_double(value, line, key);
      else if (key == "report_lyapunov")
        cfg.diagnostics.report_lyapunov = parse_bool(value, line, key);
      else
        throw ConfigError(line, "unknown diagnostics key '" + key + "'");
    } else if (section == "output") {
      if (key == "dir")
        cfg.output.dir = value;
      else if (key == "format")
        cfg.output.format = value;
      else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(parse_int(value, line, key));
      else
        throw ConfigError(line, "unknown output key '" + key + "'");
    }
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace galet
