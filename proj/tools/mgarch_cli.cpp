// Command-line front end: describe, fit, diagnose, simulate, roll, compare.
// All tables are written as aligned text plus machine-readable JSON/CSV.
//
// Exit codes: 0 success; CLI11 usage errors keep their own nonzero codes;
// 2 = input/configuration parse errors; 3 = numeric failures.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mgarch/baselines.hpp"
#include "mgarch/config.hpp"
#include "mgarch/data.hpp"
#include "mgarch/diagnostics.hpp"
#include "mgarch/estimator.hpp"
#include "mgarch/meanmodel.hpp"
#include "mgarch/simulate.hpp"
#include "mgarch/volcore.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::vector<std::string> input;  // several files are joined on their
                                   // common time stamps
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 1;
  int threads = 0;
  bool prices = false;
  bool align = false;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw mgarch::ParseError(path.string() + ": cannot open");
  out << text;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw mgarch::ParseError(path.string() + ": cannot open");
  out << j.dump(2) << "\n";
}

std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      width[j] = std::max(width[j], row[j].size());
    }
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      os << std::left << std::setw(static_cast<int>(width[j]) + 2) << row[j];
    }
    os << "\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return os.str();
}

mgarch::ReturnPanel load_input(const CommonOpts& opts) {
  std::vector<mgarch::ReturnPanel> panels;
  for (const auto& path : opts.input) {
    panels.push_back(mgarch::load_panel_csv(path, opts.align));
  }
  mgarch::ReturnPanel panel =
      panels.size() == 1 ? panels[0] : mgarch::align_panels(panels);
  if (opts.prices) panel = mgarch::simple_returns(panel);
  return panel;
}

std::vector<std::string> pair_labels(const std::vector<std::string>& assets) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < assets.size(); ++i) {
    for (std::size_t j = i + 1; j < assets.size(); ++j) {
      labels.push_back(assets[i] + "|" + assets[j]);
    }
  }
  return labels;
}

// ---------------------------------------------------------------- describe

int run_describe(const CommonOpts& opts) {
  const mgarch::ReturnPanel panel = load_input(opts);
  const mgarch::DescriptiveStats stats = mgarch::describe(panel);

  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();
  for (const auto& s : stats.per_asset) {
    rows.push_back({s.asset, fixed(s.mean), fixed(s.sample_sd),
                    fixed(s.skewness), fixed(s.excess_kurtosis), fixed(s.min),
                    fixed(s.max), fixed(s.q12, 1), fixed(s.q12_pvalue, 3)});
    jrows.push_back({{"asset", s.asset},
                     {"mean", s.mean},
                     {"st_error", s.sample_sd},
                     {"skewness", s.skewness},
                     {"ex_kurtosis", s.excess_kurtosis},
                     {"minimum", s.min},
                     {"maximum", s.max},
                     {"q12", s.q12},
                     {"q12_pvalue", s.q12_pvalue}});
  }
  const std::vector<std::string> header = {
      "asset", "mean",    "st_error", "skewness", "ex_kurt",
      "min",   "max",     "Q(12)",    "p-value"};
  const std::string table = render_table(header, rows);
  std::cout << table;

  fs::create_directories(opts.out);
  write_text(fs::path(opts.out) / "describe.txt", table);
  write_json(fs::path(opts.out) / "describe.json", jrows);
  {
    std::ofstream csv(fs::path(opts.out) / "describe.csv");
    csv << "asset,mean,st_error,skewness,ex_kurtosis,minimum,maximum,q12,"
           "q12_pvalue\n";
    csv.precision(17);
    for (const auto& s : stats.per_asset) {
      csv << s.asset << ',' << s.mean << ',' << s.sample_sd << ','
          << s.skewness << ',' << s.excess_kurtosis << ',' << s.min << ','
          << s.max << ',' << s.q12 << ',' << s.q12_pvalue << "\n";
    }
  }
  return 0;
}

// --------------------------------------------------------------------- fit

struct MeanRemoval {
  mgarch::VarModel model;
  std::vector<std::string> times;  // aligned with the residual rows
  int order = 0;
};

MeanRemoval remove_mean(const mgarch::ReturnPanel& panel,
                        const mgarch::MeanSpec& mean) {
  MeanRemoval out;
  out.order = mean.auto_order
                  ? mgarch::select_var_order(panel.values, mean.p_max)
                  : mean.p;
  out.model = mgarch::fit_var(panel.values, out.order);
  out.times.assign(panel.times.begin() + out.order, panel.times.end());
  return out;
}

std::string render_fit_summary(const mgarch::FitResult& fit,
                               const std::vector<std::string>& assets,
                               int var_order) {
  const mgarch::ModelParams& p = fit.params;
  const mgarch::ParamMapping mapping(fit.spec, p.k, p.m, p.rbar);

  auto se_of = [&](int coord) -> std::string {
    if (coord < 0) return "";
    if (!fit.se_available) return "(n/a)";
    return "(" + fixed(fit.std_errors(coord)) + ")";
  };
  auto cell = [&](double est, int coord) {
    return fixed(est) + se_of(coord);
  };

  std::vector<std::string> header = {"asset", "lambda0", "lambda1",
                                     "lambda2"};
  if (p.leverage()) header.push_back("lambda3");
  std::vector<std::vector<std::string>> rows;
  const auto c0 = mapping.coordinate_of_family("lambda0");
  const auto c1 = fit.spec.no_dynamics
                      ? std::vector<int>(p.k, -1)
                      : mapping.coordinate_of_family("lambda1");
  const auto c2 = fit.spec.no_dynamics
                      ? std::vector<int>(p.k, -1)
                      : mapping.coordinate_of_family("lambda2");
  const auto c3 = p.leverage() ? mapping.coordinate_of_family("lambda3")
                               : std::vector<int>();
  for (int i = 0; i < p.k; ++i) {
    std::vector<std::string> row = {assets[i], cell(p.lambda0(i), c0[i]),
                                    cell(p.lambda1(i), c1[i]),
                                    cell(p.lambda2(i), c2[i])};
    if (p.leverage()) {
      if (p.leverage_mode[i] == mgarch::LeverageMode::igarch) {
        row.push_back(fixed(p.lambda3(i)) + " [igarch]");
      } else if (p.leverage_mode[i] == mgarch::LeverageMode::off) {
        row.push_back("0");
      } else {
        row.push_back(cell(p.lambda3(i), c3[i]));
      }
    }
    rows.push_back(row);
  }

  std::ostringstream os;
  os << "Parameter estimates (asymptotic standard errors in parentheses)\n";
  os << render_table(header, rows) << "\n";

  const auto& names = fit.param_names;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].rfind("lambda", 0) == 0) continue;
    os << names[i] << " = " << fixed(fit.estimates(i))
       << se_of(static_cast<int>(i)) << "\n";
  }
  os << "\n";
  os << "L_max = " << fixed(fit.lmax, 2) << "\n";
  os << "free parameters: " << fit.n_free << " (dynamics: "
     << fit.n_free_dynamics << ", dof: " << (fit.n_free - fit.n_free_dynamics)
     << ")\n";
  os << "psi window m = " << fit.m << ", likelihood from t = " << fit.t0
     << ", T = " << fit.T << "\n";
  os << "mean equation: VAR(" << var_order << ")\n";
  os << "converged: " << (fit.converged ? "yes" : "no") << " after "
     << fit.n_iterations << " iterations\n";
  for (const auto& w : fit.warnings) os << "warning: " << w << "\n";

  // equality-tie candidates: same family, estimates within one joint
  // standard error; suggested only, never applied automatically
  if (fit.se_available) {
    std::vector<std::string> hints;
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        const auto fam = names[i].substr(0, names[i].find('['));
        if (names[j].rfind(fam + "[", 0) != 0 ||
            names[i].find('[') == std::string::npos) {
          continue;
        }
        const double joint = std::sqrt(
            fit.std_errors(i) * fit.std_errors(i) +
            fit.std_errors(j) * fit.std_errors(j));
        if (std::abs(fit.estimates(i) - fit.estimates(j)) < joint) {
          hints.push_back("  " + names[i] + " ~ " + names[j] + " (diff " +
                          fixed(std::abs(fit.estimates(i) - fit.estimates(j))) +
                          " < joint se " + fixed(joint) + ")");
        }
      }
    }
    if (!hints.empty()) {
      os << "tie candidates (estimates within one joint standard error):\n";
      for (const auto& h : hints) os << h << "\n";
    }
  }
  return os.str();
}

int run_fit(const CommonOpts& opts) {
  const mgarch::ReturnPanel panel = load_input(opts);
  const mgarch::ConfigDoc doc = opts.config.empty()
                                    ? mgarch::ConfigDoc()
                                    : mgarch::ConfigDoc::parse_file(opts.config);
  const mgarch::MeanSpec mean = mgarch::mean_spec_from_config(doc);
  const mgarch::ModelSpec spec =
      mgarch::model_spec_from_config(doc, panel.k());

  const MeanRemoval removed = remove_mean(panel, mean);
  const mgarch::FitResult fit = mgarch::fit(spec, removed.model.residuals);

  const std::string summary =
      render_fit_summary(fit, panel.assets, removed.order);
  std::cout << summary;

  fs::create_directories(opts.out);
  write_text(fs::path(opts.out) / "fit_summary.txt", summary);

  json j;
  j["lmax"] = fit.lmax;
  j["converged"] = fit.converged;
  j["iterations"] = fit.n_iterations;
  j["n_free"] = fit.n_free;
  j["n_free_dynamics"] = fit.n_free_dynamics;
  j["m"] = fit.m;
  j["t0"] = fit.t0;
  j["T"] = fit.T;
  j["var_order"] = removed.order;
  j["warnings"] = fit.warnings;
  j["param_names"] = fit.param_names;
  j["estimates"] = std::vector<double>(
      fit.estimates.data(), fit.estimates.data() + fit.estimates.size());
  if (fit.se_available) {
    j["std_errors"] = std::vector<double>(
        fit.std_errors.data(),
        fit.std_errors.data() + fit.std_errors.size());
  }
  j["params"]["lambda0"] = std::vector<double>(
      fit.params.lambda0.data(), fit.params.lambda0.data() + fit.params.k);
  j["params"]["lambda1"] = std::vector<double>(
      fit.params.lambda1.data(), fit.params.lambda1.data() + fit.params.k);
  j["params"]["lambda2"] = std::vector<double>(
      fit.params.lambda2.data(), fit.params.lambda2.data() + fit.params.k);
  if (fit.params.leverage()) {
    j["params"]["lambda3"] = std::vector<double>(
        fit.params.lambda3.data(), fit.params.lambda3.data() + fit.params.k);
  }
  j["params"]["theta1"] = std::vector<double>(
      fit.params.theta1.data(),
      fit.params.theta1.data() + fit.params.theta1.size());
  j["params"]["theta2"] = std::vector<double>(
      fit.params.theta2.data(),
      fit.params.theta2.data() + fit.params.theta2.size());
  j["params"]["dof"] = fit.params.dof;
  write_json(fs::path(opts.out) / "fit_summary.json", j);

  // volatility, correlation and standardized-residual paths
  const mgarch::FilterRun run =
      mgarch::run_filter(fit.params, removed.model.residuals);
  const int t_len = static_cast<int>(removed.model.residuals.rows());

  mgarch::Matrix vol(t_len, fit.params.k);
  for (int t = 0; t < t_len; ++t) vol.row(t) = run.path.d[t].transpose();
  mgarch::write_panel_csv(
      (fs::path(opts.out) / "volatility.csv").string(),
      mgarch::make_panel(panel.assets, removed.times, vol));

  const auto pairs = pair_labels(panel.assets);
  if (!pairs.empty()) {
    mgarch::Matrix corr(t_len, static_cast<int>(pairs.size()));
    for (int t = 0; t < t_len; ++t) {
      int idx = 0;
      for (int i = 0; i < fit.params.k; ++i) {
        for (int jj = i + 1; jj < fit.params.k; ++jj) {
          corr(t, idx++) = run.path.r[t](i, jj);
        }
      }
    }
    mgarch::write_panel_csv(
        (fs::path(opts.out) / "correlation.csv").string(),
        mgarch::make_panel(pairs, removed.times, corr));
  }

  mgarch::write_panel_csv(
      (fs::path(opts.out) / "residuals_std.csv").string(),
      mgarch::make_panel(panel.assets, removed.times, fit.residuals_std));
  return 0;
}

// ---------------------------------------------------------------- diagnose

int run_diagnose(const CommonOpts& opts, std::vector<int> lags, int n_boot,
                 bool asymptotic) {
  const mgarch::ReturnPanel residuals = load_input(opts);
  if (lags.empty()) lags = {5, 10, 15};
  std::sort(lags.begin(), lags.end());

  mgarch::BootstrapCriticalValues crits;
  const mgarch::BootstrapCriticalValues* crits_ptr = nullptr;
  if (!asymptotic) {
    crits = mgarch::bootstrap_critical_values(residuals.values, lags, n_boot,
                                              opts.seed, opts.threads);
    crits_ptr = &crits;
  }
  const mgarch::AdequacyReport report =
      mgarch::adequacy_report(residuals.values, lags, crits_ptr);

  std::ostringstream os;
  os << "Portmanteau checks on standardized residuals "
     << "(statistic with asymptotic p-value in parentheses)\n";
  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();
  for (const auto& row : report.rows) {
    const std::string name = std::string(row.squares ? "squares" : "levels");
    rows.push_back({"Q(" + std::to_string(row.lag) + ")", name,
                    fixed(row.statistic, 2) + "(" + fixed(row.p_value, 2) +
                        ")",
                    row.significant_1 ? "yes" : "no",
                    row.significant_5 ? "yes" : "no",
                    row.significant_10 ? "yes" : "no"});
    jrows.push_back({{"lag", row.lag},
                     {"series", name},
                     {"statistic", row.statistic},
                     {"p_value", row.p_value},
                     {"significant_1", row.significant_1},
                     {"significant_5", row.significant_5},
                     {"significant_10", row.significant_10}});
  }
  os << render_table({"stat", "series", "Q(p)", "sig@1%", "sig@5%",
                      "sig@10%"},
                     rows);
  os << "\n";

  if (crits_ptr) {
    os << "Bootstrap critical values (" << n_boot << " replications, seed "
       << opts.seed << ")\n";
    std::vector<std::vector<std::string>> crows;
    for (std::size_t i = 0; i < lags.size(); ++i) {
      crows.push_back({"Q(" + std::to_string(lags[i]) + ")",
                       fixed(crits.levels[i].q1, 2),
                       fixed(crits.levels[i].q5, 2),
                       fixed(crits.levels[i].q10, 2),
                       fixed(crits.squares[i].q1, 2),
                       fixed(crits.squares[i].q5, 2),
                       fixed(crits.squares[i].q10, 2)});
    }
    os << render_table({"stat", "lvl 1%", "lvl 5%", "lvl 10%", "sq 1%",
                        "sq 5%", "sq 10%"},
                       crows);
    os << "\n";
  }

  // the decision rule: adequate unless something rejects at the 1% level
  os << "verdict: "
     << (report.adequate ? "adequate (nothing significant at the 1% level)"
                         : "inadequate (significant at the 1% level)")
     << "\n";

  const int aic_order =
      mgarch::select_var_order(residuals.values.array().square(), 6);
  os << "AIC-selected VAR order on squared residuals: " << aic_order << "\n";

  std::cout << os.str();
  fs::create_directories(opts.out);
  write_text(fs::path(opts.out) / "adequacy.txt", os.str());

  json j;
  j["rows"] = jrows;
  j["adequate"] = report.adequate;
  j["bootstrap"] = report.bootstrap;
  j["aic_var_order_squares"] = aic_order;
  if (crits_ptr) {
    json jc = json::array();
    for (std::size_t i = 0; i < lags.size(); ++i) {
      jc.push_back({{"lag", lags[i]},
                    {"levels", {{"q1", crits.levels[i].q1},
                                {"q5", crits.levels[i].q5},
                                {"q10", crits.levels[i].q10}}},
                    {"squares", {{"q1", crits.squares[i].q1},
                                 {"q5", crits.squares[i].q5},
                                 {"q10", crits.squares[i].q10}}}});
    }
    j["critical_values"] = jc;
    j["n_boot"] = n_boot;
    j["seed"] = opts.seed;

    std::ofstream csv(fs::path(opts.out) / "critical_values.csv");
    csv << "lag,series,q1,q5,q10\n";
    csv.precision(17);
    for (std::size_t i = 0; i < lags.size(); ++i) {
      csv << lags[i] << ",levels," << crits.levels[i].q1 << ','
          << crits.levels[i].q5 << ',' << crits.levels[i].q10 << "\n";
      csv << lags[i] << ",squares," << crits.squares[i].q1 << ','
          << crits.squares[i].q5 << ',' << crits.squares[i].q10 << "\n";
    }
  }
  write_json(fs::path(opts.out) / "adequacy.json", j);
  return 0;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const CommonOpts& opts) {
  const mgarch::ConfigDoc doc = mgarch::ConfigDoc::parse_file(opts.config);
  const mgarch::SimulationConfig config =
      mgarch::simulation_from_config(doc, opts.seed);
  const mgarch::SimulationResult sim = mgarch::simulate(config);
  fs::create_directories(opts.out);
  mgarch::write_panel_csv((fs::path(opts.out) / "panel.csv").string(),
                          sim.panel);
  std::cout << "wrote " << sim.panel.T() << " x " << sim.panel.k()
            << " panel to " << (fs::path(opts.out) / "panel.csv").string()
            << "\n";
  return 0;
}

// -------------------------------------------------------------------- roll

int run_roll(const CommonOpts& opts, int window) {
  const mgarch::ReturnPanel panel = load_input(opts);
  const auto path = mgarch::rolling_covariance(panel.values, window);
  const int n = static_cast<int>(path.size());
  const int k = panel.k();

  // stamp each window at its last row
  std::vector<std::string> times(panel.times.begin() + window - 1,
                                 panel.times.end());

  mgarch::Matrix vol(n, k);
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < k; ++i) vol(t, i) = std::sqrt(path[t](i, i));
  }
  fs::create_directories(opts.out);
  mgarch::write_panel_csv(
      (fs::path(opts.out) / "roll_volatility.csv").string(),
      mgarch::make_panel(panel.assets, times, vol));

  const auto pairs = pair_labels(panel.assets);
  if (!pairs.empty()) {
    mgarch::Matrix corr(n, static_cast<int>(pairs.size()));
    for (int t = 0; t < n; ++t) {
      int idx = 0;
      for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
          corr(t, idx++) =
              path[t](i, j) / std::sqrt(path[t](i, i) * path[t](j, j));
        }
      }
    }
    mgarch::write_panel_csv(
        (fs::path(opts.out) / "roll_correlation.csv").string(),
        mgarch::make_panel(pairs, times, corr));
  }
  std::cout << "wrote " << n << " rolling estimates (window " << window
            << ") to " << opts.out << "\n";
  return 0;
}

// ----------------------------------------------------------------- compare

void append_long_format(std::ostream& out, const mgarch::ReturnPanel& panel,
                        const std::string& prefix, const std::string& method,
                        const std::unordered_set<std::string>& keep) {
  for (int t = 0; t < panel.T(); ++t) {
    if (!keep.count(panel.times[t])) continue;
    for (int j = 0; j < panel.k(); ++j) {
      out << panel.times[t] << ',' << prefix << panel.assets[j] << ','
          << method << ',' << panel.values(t, j) << "\n";
    }
  }
}

int run_compare(const std::string& fit_dir, const std::string& roll_dir,
                const std::string& out_dir) {
  const mgarch::ReturnPanel fit_vol =
      mgarch::load_panel_csv(fit_dir + "/volatility.csv");
  const mgarch::ReturnPanel roll_vol =
      mgarch::load_panel_csv(roll_dir + "/roll_volatility.csv");

  std::unordered_set<std::string> keep(fit_vol.times.begin(),
                                       fit_vol.times.end());
  std::unordered_set<std::string> common;
  for (const auto& t : roll_vol.times) {
    if (keep.count(t)) common.insert(t);
  }
  if (common.empty()) {
    throw mgarch::EmptyIntersection("compare: no overlapping time stamps");
  }
  if (common.size() < keep.size() || common.size() < roll_vol.times.size()) {
    std::cerr << "warning: trimming to " << common.size()
              << " common time stamps\n";
  }

  fs::create_directories(out_dir);
  std::ofstream out(fs::path(out_dir) / "compare.csv");
  out.precision(17);
  out << "time,series,method,value\n";
  append_long_format(out, fit_vol, "sd:", "model", common);
  append_long_format(out, roll_vol, "sd:", "rolling", common);

  const fs::path fit_corr = fs::path(fit_dir) / "correlation.csv";
  const fs::path roll_corr = fs::path(roll_dir) / "roll_correlation.csv";
  if (fs::exists(fit_corr) && fs::exists(roll_corr)) {
    append_long_format(out, mgarch::load_panel_csv(fit_corr.string()),
                       "corr:", "model", common);
    append_long_format(out, mgarch::load_panel_csv(roll_corr.string()),
                       "corr:", "rolling", common);
  }
  std::cout << "wrote " << (fs::path(out_dir) / "compare.csv").string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parsimonious multivariate volatility modeling: joint "
               "dynamic-correlation GARCH estimation, baselines, "
               "simulation and diagnostics"};
  app.require_subcommand(1);

  CommonOpts opts;
  int window = 69;
  std::vector<int> lags;
  int n_boot = 10000;
  bool asymptotic = false;
  std::string fit_dir, roll_dir;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input) {
      cmd->add_option("--input", opts.input,
                      "input CSV file(s); several are joined on common "
                      "time stamps")
          ->required();
      cmd->add_flag("--prices", opts.prices,
                    "input holds prices; convert to simple returns");
      cmd->add_flag("--align", opts.align,
                    "drop rows with empty cells instead of rejecting them");
    }
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--threads", opts.threads,
                    "worker threads (0 = hardware)");
  };

  CLI::App* describe = app.add_subcommand(
      "describe", "descriptive statistics of a return panel");
  add_common(describe, true);

  CLI::App* fit = app.add_subcommand(
      "fit", "joint maximum-likelihood fit of the volatility model");
  add_common(fit, true);
  fit->add_option("--config", opts.config, "model configuration document");

  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "portmanteau adequacy checks on standardized residuals");
  add_common(diagnose, true);
  diagnose->add_option("--lags", lags, "portmanteau lags (default 5 10 15)")
      ->delimiter(',');
  diagnose->add_option("--nboot", n_boot, "bootstrap replications");
  diagnose->add_flag("--asymptotic", asymptotic,
                     "use chi-square critical values instead of bootstrap");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "generate a synthetic return panel");
  add_common(simulate, false);
  simulate->add_option("--config", opts.config, "simulation configuration")
      ->required();

  CLI::App* roll = app.add_subcommand(
      "roll", "rolling-window covariance and correlation estimates");
  add_common(roll, true);
  roll->add_option("--window", window, "window length (default 69)");

  CLI::App* compare = app.add_subcommand(
      "compare", "merge model and rolling paths into plot-ready long format");
  compare->add_option("--fit", fit_dir, "directory with fit outputs")
      ->required();
  compare->add_option("--roll", roll_dir, "directory with roll outputs")
      ->required();
  compare->add_option("--out", opts.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (describe->parsed()) return run_describe(opts);
    if (fit->parsed()) return run_fit(opts);
    if (diagnose->parsed()) {
      return run_diagnose(opts, lags, n_boot, asymptotic);
    }
    if (simulate->parsed()) return run_simulate(opts);
    if (roll->parsed()) return run_roll(opts, window);
    if (compare->parsed()) return run_compare(fit_dir, roll_dir, opts.out);
  } catch (const mgarch::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mgarch::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
