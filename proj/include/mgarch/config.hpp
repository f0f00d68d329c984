#pragma once

// Model-configuration documents: INI-style sections with '#' comments.
// Sections: [mean], [variance], [correlation], [innovation], [optimizer],
// and [simulation] for generator runs. A commented example ships in
// configs/model.conf.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mgarch/data.hpp"
#include "mgarch/errors.hpp"
#include "mgarch/estimator.hpp"
#include "mgarch/simulate.hpp"

namespace mgarch {

class ConfigDoc {
 public:
  static ConfigDoc parse(std::istream& in, const std::string& name) {
    ConfigDoc doc;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          throw ParseError(name + ":" + std::to_string(lineno) +
                           ": unterminated section header");
        }
        section = detail::trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ParseError(name + ":" + std::to_string(lineno) +
                         ": expected key = value");
      }
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ParseError(name + ":" + std::to_string(lineno) + ": empty key");
      }
      doc.values_[section + "." + key] = value;
    }
    return doc;
  }

  static ConfigDoc parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    return parse(in, path);
  }

  bool has(const std::string& section, const std::string& key) const {
    return values_.count(section + "." + key) > 0;
  }

  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback = "") const {
    const auto it = values_.find(section + "." + key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_number(const std::string& section, const std::string& key,
                    double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get(section, key);
    try {
      std::size_t used = 0;
      const double v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      throw ParseError("config: cannot parse number '" + raw + "' for [" +
                       section + "] " + key);
    }
  }

  int get_int(const std::string& section, const std::string& key,
              int fallback) const {
    const double v = get_number(section, key, fallback);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
      throw ParseError("config: expected integer for [" + section + "] " +
                       key);
    }
    return i;
  }

  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get(section, key);
    if (raw == "true" || raw == "on" || raw == "yes" || raw == "1")
      return true;
    if (raw == "false" || raw == "off" || raw == "no" || raw == "0")
      return false;
    throw ParseError("config: expected boolean for [" + section + "] " + key);
  }

  std::vector<std::string> get_tokens(const std::string& section,
                                      const std::string& key) const {
    std::vector<std::string> out;
    std::istringstream ss(get(section, key));
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

struct MeanSpec {
  int p = 0;
  bool auto_order = false;
  int p_max = 6;
};

inline MeanSpec mean_spec_from_config(const ConfigDoc& doc) {
  MeanSpec spec;
  const std::string p = doc.get("mean", "p", "0");
  if (p == "auto") {
    spec.auto_order = true;
    spec.p_max = doc.get_int("mean", "p_max", 6);
  } else {
    spec.p = doc.get_int("mean", "p", 0);
    if (spec.p < 0) throw ParseError("config: [mean] p must be >= 0");
  }
  return spec;
}

namespace detail {

inline std::vector<int> parse_tie_labels(const ConfigDoc& doc,
                                         const std::string& key, int k) {
  if (!doc.has("variance", key) && !doc.has("correlation", key)) return {};
  const std::string section = doc.has("variance", key) ? "variance"
                                                       : "correlation";
  const auto tokens = doc.get_tokens(section, key);
  if (static_cast<int>(tokens.size()) != k) {
    throw ParseError("config: " + key + " needs one label per asset");
  }
  std::vector<int> labels;
  for (const auto& t : tokens) {
    try {
      labels.push_back(std::stoi(t));
    } catch (const std::exception&) {
      throw ParseError("config: bad tie label '" + t + "' in " + key);
    }
  }
  return labels;
}

}  // namespace detail

// Binds the [variance]/[correlation]/[innovation]/[optimizer] sections to a
// panel of k assets.
inline ModelSpec model_spec_from_config(const ConfigDoc& doc, int k) {
  ModelSpec spec;

  const auto lev = doc.get_tokens("variance", "leverage");
  if (!lev.empty() && !(lev.size() == 1 && lev[0] == "off")) {
    std::vector<std::string> tokens = lev;
    if (tokens.size() == 1) {
      tokens.assign(k, tokens[0]);
    }
    if (static_cast<int>(tokens.size()) != k) {
      throw ParseError("config: [variance] leverage needs one mode per asset");
    }
    spec.leverage.reserve(k);
    for (const auto& t : tokens) {
      if (t == "off") {
        spec.leverage.push_back(LeverageMode::off);
      } else if (t == "free") {
        spec.leverage.push_back(LeverageMode::free_);
      } else if (t == "igarch") {
        spec.leverage.push_back(LeverageMode::igarch);
      } else {
        throw ParseError("config: leverage mode must be off, free or igarch, "
                         "got '" + t + "'");
      }
    }
  }

  spec.ties.lambda0 = detail::parse_tie_labels(doc, "ties_lambda0", k);
  spec.ties.lambda1 = detail::parse_tie_labels(doc, "ties_lambda1", k);
  spec.ties.lambda2 = detail::parse_tie_labels(doc, "ties_lambda2", k);
  spec.ties.lambda3 = detail::parse_tie_labels(doc, "ties_lambda3", k);
  spec.ties.theta1 = detail::parse_tie_labels(doc, "ties_theta1", k);
  spec.ties.theta2 = detail::parse_tie_labels(doc, "ties_theta2", k);

  spec.no_dynamics = doc.get_bool("variance", "constant", false);
  spec.diagonal_theta = doc.get_bool("correlation", "diagonal_theta", false);
  spec.static_correlation = doc.get_bool("correlation", "static", false);
  spec.m = doc.get_int("correlation", "m", 0);
  if (spec.m < 0) throw ParseError("config: [correlation] m must be >= 0");

  const std::string dof = doc.get("innovation", "dof", "free");
  if (dof != "free") {
    spec.fixed_dof = doc.get_number("innovation", "dof", 0.0);
    if (!(spec.fixed_dof > 2.0)) {
      throw ParseError("config: fixed dof must exceed 2");
    }
  }

  spec.optim.max_iterations =
      doc.get_int("optimizer", "max_iterations", 2000);
  spec.optim.grad_tol = doc.get_number("optimizer", "gradient_tolerance",
                                       1e-5);
  spec.optim.rel_f_tol =
      doc.get_number("optimizer", "relative_tolerance", 1e-9);
  if (spec.optim.max_iterations < 1) {
    throw ParseError("config: max_iterations must be positive");
  }
  return spec;
}

// [simulation] section with explicit parameter values; validated before use.
inline SimulationConfig simulation_from_config(const ConfigDoc& doc,
                                               std::uint64_t seed) {
  SimulationConfig config;
  const std::string kind = doc.get("simulation", "kind", "proposed");
  if (kind == "proposed") {
    config.kind = ModelKind::proposed;
  } else if (kind == "dcc_t") {
    config.kind = ModelKind::dcc_t;
  } else if (kind == "dcc_e") {
    config.kind = ModelKind::dcc_e;
  } else {
    throw ParseError("config: unknown simulation kind '" + kind + "'");
  }

  const int k = doc.get_int("simulation", "k", 0);
  if (k < 1) throw ParseError("config: [simulation] k must be >= 1");
  config.T = doc.get_int("simulation", "T", 0);
  config.burn_in = doc.get_int("simulation", "burn_in", 500);
  config.seed = seed;

  auto vector_of = [&](const std::string& key,
                       bool required) -> Vector {
    const auto tokens = doc.get_tokens("simulation", key);
    if (tokens.empty()) {
      if (required) throw ParseError("config: [simulation] " + key +
                                     " is required");
      return Vector(0);
    }
    Vector v(k);
    if (tokens.size() == 1) {
      v.setConstant(std::stod(tokens[0]));
    } else if (static_cast<int>(tokens.size()) == k) {
      for (int i = 0; i < k; ++i) v(i) = std::stod(tokens[i]);
    } else {
      throw ParseError("config: [simulation] " + key +
                       " needs 1 or k values");
    }
    return v;
  };

  ModelParams& p = config.params;
  p.k = k;
  p.lambda0 = vector_of("lambda0", true);
  p.lambda1 = vector_of("lambda1", true);
  p.lambda2 = vector_of("lambda2", true);
  const Vector l3 = vector_of("lambda3", false);
  if (l3.size() > 0) {
    p.lambda3 = l3;
    p.leverage_mode.assign(k, LeverageMode::free_);
  }
  const auto t1 = doc.get_tokens("simulation", "theta1");
  const auto t2 = doc.get_tokens("simulation", "theta2");
  if (t1.size() > 1 || t2.size() > 1) {
    p.theta1 = vector_of("theta1", true);
    p.theta2 = vector_of("theta2", true);
  } else {
    p.theta1 = Vector::Constant(1, doc.get_number("simulation", "theta1", 0.0));
    p.theta2 = Vector::Constant(1, doc.get_number("simulation", "theta2", 0.0));
  }
  p.dof = doc.get_number("simulation", "dof", 8.0);
  p.m = doc.get_int("simulation", "m", 0);
  if (p.m == 0) p.m = default_psi_window(k);

  const auto rho = doc.get_tokens("simulation", "rbar");
  SymmetricMatrix rbar(k);
  for (int i = 0; i < k; ++i) rbar.set(i, i, 1.0);
  if (rho.size() == 1) {
    const double r = std::stod(rho[0]);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < i; ++j) rbar.set(i, j, r);
  } else if (static_cast<int>(rho.size()) == k * (k - 1) / 2) {
    int idx = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) rbar.set(i, j, std::stod(rho[idx++]));
  } else if (!rho.empty()) {
    throw ParseError("config: [simulation] rbar needs 1 or k(k-1)/2 values");
  }
  p.rbar = CorrelationMatrix(rbar);

  config.validate();
  return config;
}

}  // namespace mgarch
