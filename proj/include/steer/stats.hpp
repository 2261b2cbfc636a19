#pragma once

// Rank statistics: midranks, Mann-Whitney U, Wilcoxon signed-rank, Spearman.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "steer/error.hpp"

namespace steer::stats {

/// 1-based midranks (ties share the mean of their positions).
inline std::vector<double> midranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool exact = false;
};

namespace detail {

/// Two-sided p from an exact null distribution over integer-valued statistics
/// (`counts[s]` ways to obtain s, `total` outcomes): 2 * min tail, capped at 1.
inline double two_sided_p(const std::vector<double>& counts, double total, std::size_t observed) {
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (s <= observed) lower += counts[s];
    if (s >= observed) upper += counts[s];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

}  // namespace detail

inline constexpr std::size_t kExactMannWhitneyLimit = 50;

/// Two-sided Mann-Whitney U. The statistic is U for the first sample,
/// R1 - n1(n1+1)/2. For n1 + n2 <= 50 the p-value is exact: the rank-sum
/// distribution over all C(n, n1) assignments of the pooled midranks; larger
/// samples use the tie-corrected normal approximation with continuity
/// correction.
inline TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw Error(ErrorKind::insufficient_strata, "both samples must be non-empty");
  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();
  const std::size_t n = n1 + n2;
  std::vector<double> pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto ranks = midranks(pooled);
  double r1 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
  const double u1 = r1 - static_cast<double>(n1 * (n1 + 1)) / 2.0;

  TestResult res;
  res.statistic = u1;
  if (n <= kExactMannWhitneyLimit) {
    // Doubled midranks are integers; count subsets of size n1 by doubled rank sum.
    std::vector<std::size_t> r2(n);
    std::size_t max_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      r2[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
      max_sum += r2[i];
    }
    std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = std::min(i + 1, n1); k >= 1; --k) {
        for (std::size_t s = max_sum; s >= r2[i]; --s) ways[k][s] += ways[k - 1][s - r2[i]];
      }
    }
    double total = 0.0;
    for (double w : ways[n1]) total += w;
    const auto observed = static_cast<std::size_t>(std::llround(2.0 * r1));
    res.p_value = detail::two_sided_p(ways[n1], total, observed);
    res.exact = true;
    return res;
  }
  const double mean = static_cast<double>(n1 * n2) / 2.0;
  double tie_term = 0.0;
  {
    auto sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
  }
  const double nd = static_cast<double>(n);
  const double var = static_cast<double>(n1 * n2) / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
  if (var <= 0.0) {
    res.p_value = 1.0;
    return res;
  }
  const double z = (std::abs(u1 - mean) - 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::max(z, 0.0))));
  return res;
}

inline constexpr std::size_t kExactWilcoxonLimit = 25;
inline constexpr std::size_t kMinWilcoxonPairs = 6;

/// Paired two-sided Wilcoxon signed-rank test. Zero differences are dropped;
/// the statistic is W+ (sum of midranks of positive differences). Exact over
/// all 2^n sign assignments for n <= 25 non-zero differences, normal
/// approximation with tie correction above.
inline TestResult wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::invalid_argument, "paired samples differ in length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) throw Error(ErrorKind::degenerate_pairs, "all paired differences are zero");
  if (diffs.size() < kMinWilcoxonPairs) {
    throw Error(ErrorKind::invalid_argument, "need at least 6 non-zero differences");
  }
  std::vector<double> mags(diffs.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) mags[i] = std::abs(diffs[i]);
  const auto ranks = midranks(mags);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0) w_plus += ranks[i];
  }
  TestResult res;
  res.statistic = w_plus;
  const std::size_t n = diffs.size();
  if (n <= kExactWilcoxonLimit) {
    std::vector<std::size_t> r2(n);
    std::size_t max_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      r2[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
      max_sum += r2[i];
    }
    std::vector<double> ways(max_sum + 1, 0.0);
    ways[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t s = max_sum; s >= r2[i]; --s) ways[s] += ways[s - r2[i]];
    }
    const double total = std::ldexp(1.0, static_cast<int>(n));
    res.p_value = detail::two_sided_p(ways, total, static_cast<std::size_t>(std::llround(2.0 * w_plus)));
    res.exact = true;
    return res;
  }
  const double nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;
  double tie_term = 0.0;
  {
    auto sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
  }
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
  const double z = (std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::max(z, 0.0))));
  return res;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw Error(ErrorKind::invalid_argument, "pearson needs paired data");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nan("");
  return sab / std::sqrt(saa * sbb);
}

/// Spearman rho (Pearson on midranks). NaN when either side is constant.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(midranks(a), midranks(b));
}

}  // namespace steer::stats
