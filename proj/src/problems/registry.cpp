#include <cstddef>
#include <set>
#include <stdexcept>
#include <utility>

#include "galet/problems.hpp"

namespace galet {

namespace {

class ParamReader {
 public:
  ParamReader(std::string problem, const std::map<std::string, std::string>& params)
      : problem_(std::move(problem)), params_(params) {}

  long long integer(const std::string& key, long long fallback) {
    const std::string* raw = fetch(key);
    if (!raw) return fallback;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(*raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != raw->size()) bad_value(key, *raw);
    return v;
  }

  double real(const std::string& key, double fallback) {
    const std::string* raw = fetch(key);
    if (!raw) return fallback;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(*raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != raw->size()) bad_value(key, *raw);
    return v;
  }

  // every supplied key must have been consumed
  void finish() const {
    for (const auto& [key, value] : params_)
      if (!seen_.count(key))
        throw std::invalid_argument("problem " + problem_ + ": unknown parameter '" + key + "'");
  }

 private:
  const std::string* fetch(const std::string& key) {
    seen_.insert(key);
    auto it = params_.find(key);
    return it == params_.end() ? nullptr : &it->second;
  }

  [[noreturn]] void bad_value(const std::string& key, const std::string& raw) const {
    throw std::invalid_argument("problem " + problem_ + ": bad value '" + raw + "' for '" + key +
                                "'");
  }

  std::string problem_;
  const std::map<std::string, std::string>& params_;
  std::set<std::string> seen_;
};

}  // namespace

std::vector<std::string> problem_names() {
  return {"example1", "singular-lstsq", "sc-quad", "hyperclean-syn"};
}

std::vector<std::string> problem_param_names(const std::string& name) {
  if (name == "example1") return {};
  if (name == "singular-lstsq") return {"m_rows", "d_y", "d_x", "seed"};
  if (name == "sc-quad") return {"d_y", "d_x", "seed"};
  if (name == "hyperclean-syn") return {"n_tr", "n_val", "p", "p_c", "seed"};
  throw std::invalid_argument("unknown problem '" + name + "'");
}

std::unique_ptr<BilevelOracle> make_problem(const std::string& name,
                                            const std::map<std::string, std::string>& params) {
  ParamReader rd(name, params);
  if (name == "example1") {
    rd.finish();
    return std::make_unique<Example1Problem>();
  }
  if (name == "singular-lstsq") {
    const auto m = rd.integer("m_rows", 3);
    const auto d_y = rd.integer("d_y", 6);
    const auto d_x = rd.integer("d_x", 3);
    const auto seed = rd.integer("seed", 77);
    rd.finish();
    return std::make_unique<SingularLstsqProblem>(static_cast<int>(m), static_cast<int>(d_y),
                                                  static_cast<int>(d_x),
                                                  static_cast<std::uint64_t>(seed));
  }
  if (name == "sc-quad") {
    const auto d_y = rd.integer("d_y", 4);
    const auto d_x = rd.integer("d_x", 2);
    const auto seed = rd.integer("seed", 31);
    rd.finish();
    return std::make_unique<StronglyConvexQuadProblem>(StronglyConvexQuadProblem::random(
        static_cast<int>(d_y), static_cast<int>(d_x), static_cast<std::uint64_t>(seed)));
  }
  if (name == "hyperclean-syn") {
    const auto n_tr = rd.integer("n_tr", 100);
    const auto n_val = rd.integer("n_val", 500);
    const auto p = rd.integer("p", 10);
    const auto p_c = rd.real("p_c", 0.5);
    const auto seed = rd.integer("seed", 2024);
    rd.finish();
    return std::make_unique<SyntheticHypercleanProblem>(
        generate_hyperclean_data(static_cast<int>(n_tr), static_cast<int>(n_val),
                                 static_cast<int>(p), p_c, static_cast<std::uint64_t>(seed)));
  }
  throw std::invalid_argument("unknown problem '" + name + "'");
}

}  // namespace galet
