#pragma once

// Model-adequacy checking: portmanteau statistics on standardized residuals
// and their squares, with finite-sample critical values generated by an iid
// row bootstrap. Row-level resampling keeps the contemporaneous correlation
// and destroys the serial dependence, which is the null being tested.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mgarch/errors.hpp"
#include "mgarch/matcore.hpp"
#include "mgarch/meanmodel.hpp"
#include "mgarch/stats.hpp"

namespace mgarch {

struct CriticalCell {
  double q1 = 0.0;   // 1% upper tail
  double q5 = 0.0;   // 5%
  double q10 = 0.0;  // 10%
};

struct BootstrapCriticalValues {
  std::vector<int> lags;
  std::vector<CriticalCell> levels;   // parallel to lags
  std::vector<CriticalCell> squares;  // parallel to lags
  int n_boot = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Interpolated upper-tail quantile of a sorted sample.
inline double upper_quantile(const std::vector<double>& sorted, double tail) {
  const double pos = (1.0 - tail) * (static_cast<double>(sorted.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace detail

// For each replication, T rows are resampled iid with replacement and the
// portmanteau statistic is computed at each lag for the resampled series and
// its elementwise square. The random stream is partitioned per replication
// from the master seed, so results are independent of the thread schedule.
inline BootstrapCriticalValues bootstrap_critical_values(
    const Matrix& residuals_std, const std::vector<int>& lags, int n_boot,
    std::uint64_t seed, int threads = 0) {
  const int t_len = static_cast<int>(residuals_std.rows());
  if (lags.empty()) throw InvalidParams("bootstrap: no lags given");
  if (n_boot < 100) {
    throw TooFewReplications("bootstrap: need at least 100 replications");
  }
  const int max_lag = *std::max_element(lags.begin(), lags.end());
  if (t_len <= max_lag) throw TooShort("bootstrap: T must exceed max lag");

  const int n_lags = static_cast<int>(lags.size());
  // stats[rep] holds levels then squares, lag-major
  Matrix stats(n_boot, 2 * n_lags);

  auto run_block = [&](int first, int last) {
    Matrix sample(t_len, residuals_std.cols());
    for (int rep = first; rep < last; ++rep) {
      std::mt19937_64 rng(detail::splitmix64(seed ^ (0x9e37ull + rep)));
      std::uniform_int_distribution<int> pick(0, t_len - 1);
      for (int t = 0; t < t_len; ++t) {
        sample.row(t) = residuals_std.row(pick(rng));
      }
      const Matrix squared = sample.array().square();
      for (int li = 0; li < n_lags; ++li) {
        stats(rep, li) =
            multivariate_ljung_box(sample, lags[li]).statistic;
        stats(rep, n_lags + li) =
            multivariate_ljung_box(squared, lags[li]).statistic;
      }
    }
  };

  int n_threads = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, n_boot));
  if (n_threads == 1) {
    run_block(0, n_boot);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_boot + n_threads - 1) / n_threads;
    for (int i = 0; i < n_threads; ++i) {
      const int first = i * chunk;
      const int last = std::min(n_boot, first + chunk);
      if (first < last) pool.emplace_back(run_block, first, last);
    }
    for (auto& th : pool) th.join();
  }

  BootstrapCriticalValues out;
  out.lags = lags;
  out.n_boot = n_boot;
  out.seed = seed;
  for (int block = 0; block < 2; ++block) {
    for (int li = 0; li < n_lags; ++li) {
      std::vector<double> column(n_boot);
      for (int rep = 0; rep < n_boot; ++rep) {
        column[rep] = stats(rep, block * n_lags + li);
      }
      std::sort(column.begin(), column.end());
      CriticalCell cell{detail::upper_quantile(column, 0.01),
                        detail::upper_quantile(column, 0.05),
                        detail::upper_quantile(column, 0.10)};
      (block == 0 ? out.levels : out.squares).push_back(cell);
    }
  }
  return out;
}

struct AdequacyRow {
  int lag = 0;
  bool squares = false;      // statistic on the squared residuals
  double statistic = 0.0;
  double p_value = 1.0;      // asymptotic chi-square tail
  bool significant_1 = false;
  bool significant_5 = false;
  bool significant_10 = false;
};

struct AdequacyReport {
  std::vector<AdequacyRow> rows;
  bool adequate = false;  // no statistic significant at the 1% level
  bool bootstrap = false; // verdicts against bootstrap critical values
};

// Verdicts per lag for levels and squares. With critical values the
// comparison is against the bootstrap quantiles; otherwise against the
// asymptotic chi-square tails. The decision rule: the model is adequate
// when nothing is significant at the 1% level.
inline AdequacyReport adequacy_report(
    const Matrix& residuals_std, const std::vector<int>& lags,
    const BootstrapCriticalValues* crits = nullptr) {
  AdequacyReport report;
  report.bootstrap = crits != nullptr;
  if (crits && crits->lags != lags) {
    throw InvalidParams("adequacy_report: lag sets disagree");
  }
  const Matrix squared = residuals_std.array().square();
  for (std::size_t li = 0; li < lags.size(); ++li) {
    for (bool on_squares : {false, true}) {
      const Matrix& series = on_squares ? squared : residuals_std;
      const PortmanteauResult pr =
          multivariate_ljung_box(series, lags[li]);
      AdequacyRow row;
      row.lag = lags[li];
      row.squares = on_squares;
      row.statistic = pr.statistic;
      row.p_value = pr.p_value;
      if (crits) {
        const CriticalCell& cell =
            on_squares ? crits->squares[li] : crits->levels[li];
        row.significant_1 = pr.statistic > cell.q1;
        row.significant_5 = pr.statistic > cell.q5;
        row.significant_10 = pr.statistic > cell.q10;
      } else {
        row.significant_1 = pr.p_value < 0.01;
        row.significant_5 = pr.p_value < 0.05;
        row.significant_10 = pr.p_value < 0.10;
      }
      report.rows.push_back(row);
    }
  }
  report.adequate = std::none_of(
      report.rows.begin(), report.rows.end(),
      [](const AdequacyRow& r) { return r.significant_1; });
  return report;
}

}  // namespace mgarch
