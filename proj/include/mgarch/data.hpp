#pragma once

// Return-panel ingestion: CSV parsing, simple returns, multi-market calendar
// alignment and descriptive statistics.

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mgarch/errors.hpp"
#include "mgarch/matcore.hpp"
#include "mgarch/stats.hpp"

namespace mgarch {

namespace detail {

inline bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// ISO-8601 dates sort lexicographically; pure integer indices sort
// numerically.
inline bool time_less(const std::string& a, const std::string& b) {
  if (is_integer_token(a) && is_integer_token(b)) {
    return std::stoll(a) < std::stoll(b);
  }
  return a < b;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

// T x k panel of percentage returns with asset labels and an ordered time
// index. No missing cells; times strictly increasing.
struct ReturnPanel {
  std::vector<std::string> assets;
  std::vector<std::string> times;
  Matrix values;  // T x k

  int k() const { return static_cast<int>(values.cols()); }
  int T() const { return static_cast<int>(values.rows()); }
};

inline void validate_panel(const ReturnPanel& p) {
  if (p.values.rows() < 1 || p.values.cols() < 1) {
    throw InvalidParams("ReturnPanel: need T >= 1 and k >= 1");
  }
  if (static_cast<Eigen::Index>(p.assets.size()) != p.values.cols() ||
      static_cast<Eigen::Index>(p.times.size()) != p.values.rows()) {
    throw InvalidParams("ReturnPanel: label/shape mismatch");
  }
  for (std::size_t t = 1; t < p.times.size(); ++t) {
    if (!detail::time_less(p.times[t - 1], p.times[t])) {
      throw InvalidParams("ReturnPanel: time stamps not strictly increasing");
    }
  }
  if (!p.values.allFinite()) {
    throw InvalidParams("ReturnPanel: non-finite cell");
  }
}

inline ReturnPanel make_panel(std::vector<std::string> assets,
                              std::vector<std::string> times, Matrix values) {
  ReturnPanel p{std::move(assets), std::move(times), std::move(values)};
  validate_panel(p);
  return p;
}

// r_t = 100 * (P_t / P_{t-1} - 1); the output drops the first time stamp.
inline ReturnPanel simple_returns(const ReturnPanel& prices) {
  if (prices.T() < 2) {
    throw TooShort("simple_returns: need at least two price rows");
  }
  if (!(prices.values.array() > 0.0).all()) {
    throw NonPositivePrice("simple_returns: non-positive price");
  }
  const int t_out = prices.T() - 1;
  Matrix r(t_out, prices.k());
  for (int t = 0; t < t_out; ++t) {
    r.row(t) = 100.0 * (prices.values.row(t + 1).array() /
                            prices.values.row(t).array() -
                        1.0);
  }
  std::vector<std::string> times(prices.times.begin() + 1,
                                 prices.times.end());
  return make_panel(prices.assets, std::move(times), std::move(r));
}

// Inner join on time stamps; columns concatenated in input order. Drops any
// stamp that is not present in every panel.
inline ReturnPanel align_panels(const std::vector<ReturnPanel>& panels) {
  if (panels.empty()) throw InvalidParams("align_panels: no panels");
  std::unordered_set<std::string> common(panels[0].times.begin(),
                                         panels[0].times.end());
  for (std::size_t i = 1; i < panels.size(); ++i) {
    std::unordered_set<std::string> next;
    for (const auto& t : panels[i].times) {
      if (common.count(t)) next.insert(t);
    }
    common.swap(next);
  }
  if (common.empty()) {
    throw EmptyIntersection("align_panels: no common time stamps");
  }

  std::vector<std::string> times;
  for (const auto& t : panels[0].times) {
    if (common.count(t)) times.push_back(t);
  }

  int k_total = 0;
  for (const auto& p : panels) k_total += p.k();
  Matrix values(static_cast<int>(times.size()), k_total);
  std::vector<std::string> assets;
  int col = 0;
  for (const auto& p : panels) {
    std::unordered_map<std::string, int> row_of;
    for (int t = 0; t < p.T(); ++t) row_of[p.times[t]] = t;
    for (std::size_t t = 0; t < times.size(); ++t) {
      values.block(static_cast<int>(t), col, 1, p.k()) =
          p.values.row(row_of.at(times[t]));
    }
    assets.insert(assets.end(), p.assets.begin(), p.assets.end());
    col += p.k();
  }
  return make_panel(std::move(assets), std::move(times), std::move(values));
}

struct AssetStats {
  std::string asset;
  double mean;
  double sample_sd;
  double skewness;
  double excess_kurtosis;
  double min;
  double max;
  double q12;
  double q12_pvalue;
};

struct DescriptiveStats {
  std::vector<AssetStats> per_asset;
};

inline DescriptiveStats describe(const ReturnPanel& panel) {
  constexpr int kLbLag = 12;
  if (panel.T() < kLbLag + 1) {
    throw TooShort("describe: need T >= 13 for Q(12)");
  }
  DescriptiveStats out;
  for (int j = 0; j < panel.k(); ++j) {
    const Eigen::VectorXd col = panel.values.col(j);
    const MomentStats m = moment_stats(col);
    const LjungBoxResult lb = ljung_box(col, kLbLag);
    out.per_asset.push_back({panel.assets[j], m.mean, m.sample_sd, m.skewness,
                             m.excess_kurtosis, m.min, m.max, lb.statistic,
                             lb.p_value});
  }
  return out;
}

// CSV format: header row required; first column is an ISO-8601 date or an
// integer index, remaining columns numeric with '.' decimal separator.
// Empty cells are rejected unless drop_incomplete_rows is set, in which case
// the whole row is dropped (alignment mode).
inline ReturnPanel load_panel_csv(std::istream& in, const std::string& name,
                                  bool drop_incomplete_rows = false) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(name + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = detail::split_csv_line(line);
  if (header.size() < 2) {
    throw ParseError(name + ":1: header must have a time column and at least "
                            "one asset column");
  }
  std::vector<std::string> assets(header.begin() + 1, header.end());

  std::vector<std::string> times;
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(name + ":" + std::to_string(lineno) +
                       ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    bool incomplete = false;
    std::vector<double> row(assets.size());
    for (std::size_t j = 1; j < fields.size(); ++j) {
      if (fields[j].empty()) {
        if (drop_incomplete_rows) {
          incomplete = true;
          break;
        }
        throw ParseError(name + ":" + std::to_string(lineno) +
                         ": empty cell in column " + std::to_string(j + 1));
      }
      const std::string& tok = fields[j];
      double v = 0.0;
      const auto rc =
          std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (rc.ec != std::errc() || rc.ptr != tok.data() + tok.size()) {
        throw ParseError(name + ":" + std::to_string(lineno) +
                         ": cannot parse number '" + tok + "'");
      }
      row[j - 1] = v;
    }
    if (incomplete) continue;
    times.push_back(fields[0]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError(name + ": no data rows");
  }
  Matrix values(static_cast<int>(rows.size()),
                static_cast<int>(assets.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t j = 0; j < assets.size(); ++j) {
      values(static_cast<int>(t), static_cast<int>(j)) = rows[t][j];
    }
  }
  try {
    return make_panel(std::move(assets), std::move(times), std::move(values));
  } catch (const InvalidParams& e) {
    throw ParseError(name + ": " + e.what());
  }
}

inline ReturnPanel load_panel_csv(const std::string& path,
                                  bool drop_incomplete_rows = false) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  return load_panel_csv(in, path, drop_incomplete_rows);
}

inline void write_panel_csv(std::ostream& out, const ReturnPanel& panel,
                            const std::string& time_label = "time") {
  out << time_label;
  for (const auto& a : panel.assets) out << ',' << a;
  out << '\n';
  out.precision(17);
  for (int t = 0; t < panel.T(); ++t) {
    out << panel.times[t];
    for (int j = 0; j < panel.k(); ++j) out << ',' << panel.values(t, j);
    out << '\n';
  }
}

inline void write_panel_csv(const std::string& path, const ReturnPanel& panel,
                            const std::string& time_label = "time") {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  write_panel_csv(out, panel, time_label);
}

}  // namespace mgarch
