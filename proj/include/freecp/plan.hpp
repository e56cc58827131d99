#pragma once

// ExperimentPlan and its config file format.
//
//   # comment            ; comment
//   [plan]
//   flavor    = gue            (gue | ge)
//   k         = 4              (integer >= 2)
//   n_grid    = 200, 400, 800  (strictly ascending positive integers)
//   p_list    = 2, inf         (each > 1, or inf)
//   trials    = 10             (>= 1)
//   seed      = 12345          (unsigned 64-bit)
//   epsilon   = 0.5            (in (0, 1))
//   restarts  = 8              (>= 4)
//   max_iters = 200            (>= 1)
//   [tolerances]
//   ascent    = 1e-10          (any name, positive real)
//
// Keys are case-sensitive, one per line, each at most once. Whitespace around
// keys and values is ignored. Missing keys take the defaults below.

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "freecp/ensembles.hpp"
#include "freecp/errors.hpp"
#include "freecp/matrixkit.hpp"

namespace freecp {

inline std::map<std::string, double> default_tolerances() {
  return {{"ascent", 1e-10}, {"mc_bulk", 1.0}, {"mc_edge", 1.0}};
}

struct ExperimentPlan {
  EnsembleFlavor flavor = EnsembleFlavor::gue;
  int k = 4;
  std::vector<Eigen::Index> n_grid{200};
  std::vector<SchattenIndex> p_list{SchattenIndex::finite(2.0)};
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::map<std::string, double> tolerances = default_tolerances();
  double epsilon = 0.5;
  int restarts = 8;
  int max_iters = 200;

  void validate() const {
    if (k < 2) throw ValidationError("k", "must be at least 2, got " + std::to_string(k));
    if (n_grid.empty()) throw ValidationError("n_grid", "must not be empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] < 1) throw ValidationError("n_grid", "entries must be positive");
      if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ValidationError("n_grid", "must be strictly ascending");
    }
    if (p_list.empty()) throw ValidationError("p_list", "must not be empty");
    if (trials < 1) throw ValidationError("trials", "must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon", "must lie in (0, 1)");
    if (restarts < 4) throw ValidationError("restarts", "must be at least 4");
    if (max_iters < 1) throw ValidationError("max_iters", "must be at least 1");
    for (const auto& [name, v] : tolerances) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("tolerances." + name, "must be positive");
    }
  }

  double tolerance(const std::string& name) const {
    auto it = tolerances.find(name);
    if (it == tolerances.end()) throw ValidationError("tolerances." + name, "not set");
    return it->second;
  }

  friend bool operator==(const ExperimentPlan&, const ExperimentPlan&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

inline std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline long long parse_integer(const std::string& s, int line, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno != 0) throw ParseError(line, key + ": expected an integer, got '" + s + "'");
  return v;
}

inline std::uint64_t parse_unsigned(const std::string& s, int line, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  if (!s.empty() && s[0] == '-') throw ParseError(line, key + ": expected an unsigned integer");
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno != 0) throw ParseError(line, key + ": expected an unsigned integer, got '" + s + "'");
  return v;
}

inline double parse_real(const std::string& s, int line, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || errno != 0) throw ParseError(line, key + ": expected a number, got '" + s + "'");
  return v;
}

}  // namespace detail

/// Parses and validates a plan; defaults fill missing keys.
inline ExperimentPlan parse_plan(const std::string& text) {
  ExperimentPlan plan;
  plan.tolerances = default_tolerances();
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::set<std::string> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "unterminated section header");
      section = detail::trim(std::string_view(s).substr(1, s.size() - 2));
      if (section != "plan" && section != "tolerances") throw ParseError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key = value");
    const std::string key = detail::trim(std::string_view(s).substr(0, eq));
    const std::string value = detail::trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ParseError(line, "empty key");
    if (section.empty()) throw ParseError(line, "key '" + key + "' outside any section");
    if (!seen.insert(section + "." + key).second) throw ParseError(line, "duplicate key '" + key + "'");

    if (section == "tolerances") {
      plan.tolerances[key] = detail::parse_real(value, line, key);
      continue;
    }
    try {
      if (key == "flavor") {
        plan.flavor = parse_flavor(value);
      } else if (key == "k") {
        plan.k = static_cast<int>(detail::parse_integer(value, line, key));
      } else if (key == "n_grid") {
        plan.n_grid.clear();
        for (const auto& item : detail::split_list(value)) plan.n_grid.push_back(detail::parse_integer(item, line, key));
      } else if (key == "p_list") {
        plan.p_list.clear();
        for (const auto& item : detail::split_list(value)) plan.p_list.push_back(SchattenIndex::parse(item));
      } else if (key == "trials") {
        plan.trials = static_cast<int>(detail::parse_integer(value, line, key));
      } else if (key == "seed") {
        plan.master_seed = detail::parse_unsigned(value, line, key);
      } else if (key == "epsilon") {
        plan.epsilon = detail::parse_real(value, line, key);
      } else if (key == "restarts") {
        plan.restarts = static_cast<int>(detail::parse_integer(value, line, key));
      } else if (key == "max_iters") {
        plan.max_iters = static_cast<int>(detail::parse_integer(value, line, key));
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [plan]");
      }
    } catch (const DomainError& e) {
      throw ParseError(line, key + ": " + e.what());
    }
  }
  plan.validate();
  return plan;
}

inline ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read plan file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_plan(buf.str());
}

/// Canonical config text; parse_plan(echo_plan(p)) == p.
inline std::string echo_plan(const ExperimentPlan& plan) {
  std::ostringstream os;
  os << "[plan]\n";
  os << "flavor = " << to_string(plan.flavor) << "\n";
  os << "k = " << plan.k << "\n";
  os << "n_grid = ";
  for (std::size_t i = 0; i < plan.n_grid.size(); ++i) os << (i ? ", " : "") << plan.n_grid[i];
  os << "\np_list = ";
  for (std::size_t i = 0; i < plan.p_list.size(); ++i) {
    os << (i ? ", " : "")
       << (plan.p_list[i].is_infinite() ? std::string("inf") : detail::format_real(plan.p_list[i].p()));
  }
  os << "\ntrials = " << plan.trials << "\n";
  os << "seed = " << plan.master_seed << "\n";
  os << "epsilon = " << detail::format_real(plan.epsilon) << "\n";
  os << "restarts = " << plan.restarts << "\n";
  os << "max_iters = " << plan.max_iters << "\n";
  os << "[tolerances]\n";
  for (const auto& [name, v] : plan.tolerances) os << name << " = " << detail::format_real(v) << "\n";
  return os.str();
}

}  // namespace freecp
