#pragma once

// Small-sample statistical machinery: exact and approximate Wilcoxon tests,
// one-way ANOVA, Tukey HSD, and the distribution functions behind their
// p-values. Exact Wilcoxon distributions are computed by counting (subset-sum
// tables), not simulation, so p-values are reproducible bit-for-bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "actocat/error.hpp"

namespace actocat {

enum class Alternative { two_sided, greater, less };
enum class TestMode { automatic, exact, approx };
enum class PMethod { exact, normal_approx, normal_approx_cc };

inline const char* to_string(PMethod m) {
  switch (m) {
    case PMethod::exact: return "exact";
    case PMethod::normal_approx: return "normal_approx";
    case PMethod::normal_approx_cc: return "normal_approx_cc";
  }
  return "?";
}

inline const char* to_string(Alternative a) {
  switch (a) {
    case Alternative::two_sided: return "two_sided";
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
  }
  return "?";
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  PMethod method = PMethod::exact;
  Alternative alternative = Alternative::two_sided;
  std::size_t n1 = 0;
  std::size_t n2 = 0;             // 0 for one-sample tests
  std::size_t zeros_dropped = 0;  // signed-rank only
  bool ties = false;
};

// ---------------------------------------------------------------------------
// distribution functions
// ---------------------------------------------------------------------------

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779399461;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz's method).
inline double beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw ParamError("reg_inc_beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(ln_front) * detail::beta_cf(x, a, b) / a;
  return 1.0 - std::exp(ln_front) * detail::beta_cf(1.0 - x, b, a) / b;
}

inline double student_t_cdf(double x, double df) {
  if (!(df > 0.0)) throw ParamError("student_t_cdf: df must be > 0");
  if (x == 0.0) return 0.5;
  const double ib = reg_inc_beta(df / (df + x * x), df / 2.0, 0.5);
  return x > 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

inline double f_cdf(double x, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw ParamError("f_cdf: df must be > 0");
  if (x <= 0.0) return 0.0;
  return reg_inc_beta(d1 * x / (d1 * x + d2), d1 / 2.0, d2 / 2.0);
}

// CDF of the range of k independent standard normals.
inline double normal_range_cdf(double r, int k) {
  if (k < 2) throw ParamError("normal_range_cdf: k must be >= 2");
  if (r <= 0.0) return 0.0;
  // F(r) = k * Int phi(u) * (Phi(u) - Phi(u - r))^(k-1) du; the integrand is
  // bounded by phi(u), so [-9, 9] carries all the mass we can resolve.
  constexpr int panels = 192;
  constexpr double lo = -9.0, hi = 9.0;
  const double h = (hi - lo) / panels;
  double sum = 0.0;
  auto f = [&](double u) {
    const double base = normal_cdf(u) - normal_cdf(u - r);
    return normal_pdf(u) * std::pow(base, k - 1);
  };
  for (int i = 0; i < panels; ++i) {
    const double a = lo + i * h;
    sum += f(a) + 4.0 * f(a + 0.5 * h) + f(a + h);
  }
  const double v = k * sum * h / 6.0;
  return std::min(1.0, std::max(0.0, v));
}

// CDF of the studentized range statistic with k groups and df error degrees
// of freedom, by integrating the scaled-chi density of the pooled standard
// deviation against the normal-range CDF.
inline double studentized_range_cdf(double q, int k, double df) {
  if (k < 2) throw ParamError("studentized_range_cdf: k must be >= 2");
  if (!(df >= 1.0)) throw ParamError("studentized_range_cdf: df must be >= 1");
  if (q <= 0.0) return 0.0;
  // s = sqrt(chi2_df / df): density 2 (df/2)^(df/2) s^(df-1) e^(-df s^2/2)
  //                                  / Gamma(df/2).
  const double ln_norm = std::log(2.0) + 0.5 * df * std::log(df / 2.0) -
                         std::lgamma(df / 2.0);
  auto s_pdf = [&](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp(ln_norm + (df - 1.0) * std::log(s) - df * s * s / 2.0);
  };
  const double spread = 14.0 / std::sqrt(2.0 * df);
  const double lo = std::max(0.0, 1.0 - spread);
  const double hi = 1.0 + spread;
  constexpr int panels = 160;
  const double h = (hi - lo) / panels;
  auto f = [&](double s) { return s_pdf(s) * normal_range_cdf(q * s, k); };
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = lo + i * h;
    sum += f(a) + 4.0 * f(a + 0.5 * h) + f(a + h);
  }
  const double v = sum * h / 6.0;
  return std::min(1.0, std::max(0.0, v));
}

// Quantile by bisection on the CDF above.
inline double studentized_range_quantile(double p, int k, double df) {
  if (!(p > 0.0 && p < 1.0))
    throw ParamError("studentized_range_quantile: p must be in (0, 1)");
  double lo = 0.0, hi = 8.0;
  while (studentized_range_cdf(hi, k, df) < p) {
    hi *= 2.0;
    if (hi > 1e6)
      throw NumericError("studentized_range_quantile: no bracket");
  }
  for (int it = 0; it < 80 && hi - lo > 1e-9 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (studentized_range_cdf(mid, k, df) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// ranking helpers
// ---------------------------------------------------------------------------

namespace detail {

struct RankInfo {
  std::vector<double> ranks;          // midranks, 1-based
  std::vector<std::size_t> tie_sizes; // sizes of tie groups (>= 2 only)
};

inline RankInfo midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  RankInfo out;
  out.ranks.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) out.ranks[order[m]] = rank;
    if (j > i) out.tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  return out;
}

inline double tie_term(const std::vector<std::size_t>& tie_sizes) {
  double t = 0.0;
  for (std::size_t s : tie_sizes) {
    const double d = static_cast<double>(s);
    t += d * d * d - d;
  }
  return t;
}

// Normal-approximation p for a statistic with the given null mean/sd.
inline double normal_tail_p(double stat, double mean, double sd,
                            Alternative alt, bool cc, PMethod& method_out) {
  method_out = cc ? PMethod::normal_approx_cc : PMethod::normal_approx;
  if (sd <= 0.0) return 1.0;
  auto upper = [&](double x) {
    const double corr = cc ? 0.5 : 0.0;
    return 1.0 - normal_cdf((x - mean - corr) / sd);
  };
  auto lower = [&](double x) {
    const double corr = cc ? 0.5 : 0.0;
    return normal_cdf((x - mean + corr) / sd);
  };
  switch (alt) {
    case Alternative::greater: return std::min(1.0, upper(stat));
    case Alternative::less: return std::min(1.0, lower(stat));
    case Alternative::two_sided: {
      if (stat == mean) return 1.0;
      const double p =
          stat > mean ? 2.0 * upper(stat) : 2.0 * lower(stat);
      return std::min(1.0, p);
    }
  }
  return 1.0;
}

// p from an exact discrete distribution given as integer counts over
// statistic values 0..N (indexed by value), total = sum of counts.
inline double exact_tail_p(const std::vector<double>& counts, double total,
                           long long w, Alternative alt) {
  auto p_le = [&] {
    double c = 0.0;
    for (long long i = 0; i <= w && i < static_cast<long long>(counts.size());
         ++i)
      c += counts[static_cast<std::size_t>(i)];
    return c / total;
  };
  auto p_ge = [&] {
    double c = 0.0;
    for (std::size_t i = static_cast<std::size_t>(std::max<long long>(w, 0));
         i < counts.size(); ++i)
      c += counts[i];
    return c / total;
  };
  switch (alt) {
    case Alternative::greater: return std::min(1.0, p_ge());
    case Alternative::less: return std::min(1.0, p_le());
    case Alternative::two_sided:
      return std::min(1.0, 2.0 * std::min(p_le(), p_ge()));
  }
  return 1.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank
// ---------------------------------------------------------------------------

// Exact null distribution of W+ for n tie-free pairs: counts[w] = number of
// sign assignments with positive-rank sum w (generating function product of
// (1 + x^i)). Exposed for the enumeration oracle in the tests.
inline std::vector<double> signed_rank_null_counts(std::size_t n) {
  const std::size_t m = n * (n + 1) / 2;
  std::vector<double> c(m + 1, 0.0);
  c[0] = 1.0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t w = m; w >= i; --w) c[w] += c[w - i];
  return c;
}

constexpr std::size_t kSignedRankExactLimit = 25;

// W = sum of ranks of positive differences of |x - y| (midranks for ties).
// Exact enumeration when n <= 25 and the |differences| are tie-free,
// otherwise a normal approximation with tie correction.
inline TestResult wilcoxon_signed_rank(
    std::span<const double> diffs,
    Alternative alt = Alternative::two_sided,
    TestMode mode = TestMode::automatic, bool continuity_correction = true) {
  std::vector<double> d;
  std::size_t zeros = 0;
  for (double v : diffs) {
    if (v == 0.0)
      ++zeros;  // Wilcoxon's original treatment: drop zero differences
    else
      d.push_back(v);
  }
  if (d.empty())
    throw DegenerateError("wilcoxon_signed_rank: all differences are zero");

  const std::size_t n = d.size();
  std::vector<double> absd(n);
  for (std::size_t i = 0; i < n; ++i) absd[i] = std::fabs(d[i]);
  const auto ri = detail::midranks(absd);
  double w = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (d[i] > 0.0) w += ri.ranks[i];

  TestResult res;
  res.statistic = w;
  res.alternative = alt;
  res.n1 = n;
  res.zeros_dropped = zeros;
  res.ties = !ri.tie_sizes.empty();

  const bool exact_ok = !res.ties && n <= kSignedRankExactLimit;
  if (mode == TestMode::exact && !exact_ok)
    throw ParamError("wilcoxon_signed_rank: exact mode needs tie-free |d| "
                     "and n <= 25");
  if (mode != TestMode::approx && exact_ok) {
    const auto counts = signed_rank_null_counts(n);
    const double total = std::ldexp(1.0, static_cast<int>(n));  // 2^n
    res.p_value = detail::exact_tail_p(counts, total,
                                       static_cast<long long>(w + 0.5), alt);
    res.method = PMethod::exact;
    return res;
  }
  const double dn = static_cast<double>(n);
  const double mean = dn * (dn + 1.0) / 4.0;
  const double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 -
                     detail::tie_term(ri.tie_sizes) / 48.0;
  res.p_value = detail::normal_tail_p(w, mean, std::sqrt(var), alt,
                                      continuity_correction, res.method);
  return res;
}

inline TestResult wilcoxon_signed_rank(
    std::span<const double> x, std::span<const double> y,
    Alternative alt = Alternative::two_sided,
    TestMode mode = TestMode::automatic, bool continuity_correction = true) {
  if (x.size() != y.size())
    throw ParamError("wilcoxon_signed_rank: length mismatch");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  return wilcoxon_signed_rank(d, alt, mode, continuity_correction);
}

// ---------------------------------------------------------------------------
// Wilcoxon rank-sum
// ---------------------------------------------------------------------------

// Exact null distribution of the rank sum of the first sample: counts[w] =
// number of n1-subsets of ranks {1..n} with sum w. Exposed for the oracle.
inline std::vector<std::vector<double>> rank_sum_null_counts(std::size_t n1,
                                                             std::size_t n) {
  const std::size_t m = n * (n + 1) / 2;
  std::vector<std::vector<double>> c(n1 + 1,
                                     std::vector<double>(m + 1, 0.0));
  c[0][0] = 1.0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = std::min(n1, i); j >= 1; --j)
      for (std::size_t w = m; w >= i; --w) c[j][w] += c[j - 1][w - i];
  return c;
}

constexpr std::size_t kRankSumExactLimit = 24;  // n1 + n2

// W = sum of pooled ranks of sample a. Exact when n1+n2 <= 24 and the pooled
// data are tie-free, else normal approximation with tie correction.
inline TestResult wilcoxon_rank_sum(
    std::span<const double> a, std::span<const double> b,
    Alternative alt = Alternative::two_sided,
    TestMode mode = TestMode::automatic, bool continuity_correction = true) {
  if (a.empty() || b.empty())
    throw ParamError("wilcoxon_rank_sum: empty group");
  const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ri = detail::midranks(pooled);
  double w = 0.0;
  for (std::size_t i = 0; i < n1; ++i) w += ri.ranks[i];

  TestResult res;
  res.statistic = w;
  res.alternative = alt;
  res.n1 = n1;
  res.n2 = n2;
  res.ties = !ri.tie_sizes.empty();

  const bool exact_ok = !res.ties && n <= kRankSumExactLimit;
  if (mode == TestMode::exact && !exact_ok)
    throw ParamError("wilcoxon_rank_sum: exact mode needs tie-free data and "
                     "n1 + n2 <= 24");
  if (mode != TestMode::approx && exact_ok) {
    const auto counts = rank_sum_null_counts(n1, n);
    // Counts are exact integers; their sum is C(n, n1).
    const double total =
        std::accumulate(counts[n1].begin(), counts[n1].end(), 0.0);
    res.p_value = detail::exact_tail_p(counts[n1], total,
                                       static_cast<long long>(w + 0.5), alt);
    res.method = PMethod::exact;
    return res;
  }
  const double d1 = static_cast<double>(n1), d2 = static_cast<double>(n2),
               dn = static_cast<double>(n);
  const double mean = d1 * (dn + 1.0) / 2.0;
  const double var =
      d1 * d2 / 12.0 *
      ((dn + 1.0) - detail::tie_term(ri.tie_sizes) / (dn * (dn - 1.0)));
  res.p_value = detail::normal_tail_p(w, mean, std::sqrt(var), alt,
                                      continuity_correction, res.method);
  return res;
}

// ---------------------------------------------------------------------------
// one-way ANOVA + Tukey HSD
// ---------------------------------------------------------------------------

struct AnovaTable {
  double ss_between = 0.0;
  double ss_within = 0.0;
  int df_between = 0;
  int df_within = 0;
  double f = 0.0;
  double p = 1.0;
};

inline AnovaTable one_way_anova(
    const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw ParamError("anova: need k >= 2 groups");
  std::size_t total_n = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw ParamError("anova: every group needs >= 2 values");
    total_n += g.size();
    grand_sum += std::accumulate(g.begin(), g.end(), 0.0);
  }
  const double grand_mean = grand_sum / static_cast<double>(total_n);

  AnovaTable t;
  for (const auto& g : groups) {
    const double m =
        std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    t.ss_between += static_cast<double>(g.size()) * (m - grand_mean) *
                    (m - grand_mean);
    for (double v : g) t.ss_within += (v - m) * (v - m);
  }
  t.df_between = static_cast<int>(groups.size()) - 1;
  t.df_within = static_cast<int>(total_n - groups.size());
  if (t.ss_within <= 0.0)
    throw DegenerateError("anova: zero within-group variance");
  t.f = (t.ss_between / t.df_between) / (t.ss_within / t.df_within);
  t.p = 1.0 - f_cdf(t.f, t.df_between, t.df_within);
  return t;
}

struct TukeyPair {
  std::size_t group_i = 0;
  std::size_t group_j = 0;
  double mean_diff = 0.0;  // mean_i - mean_j
  double q_stat = 0.0;
  double p_value = 1.0;
  bool significant = false;
};

struct TukeyResult {
  std::vector<TukeyPair> pairs;
  double q_critical = 0.0;
  double alpha = 0.05;
  int k = 0;
  int df_within = 0;
  double ms_within = 0.0;
};

// Tukey-Kramer all-pairs comparison on the ANOVA's pooled variance.
inline TukeyResult tukey_hsd(const std::vector<std::vector<double>>& groups,
                             double alpha = 0.05) {
  const AnovaTable t = one_way_anova(groups);
  TukeyResult out;
  out.alpha = alpha;
  out.k = static_cast<int>(groups.size());
  out.df_within = t.df_within;
  out.ms_within = t.ss_within / t.df_within;
  out.q_critical = studentized_range_quantile(1.0 - alpha, out.k,
                                              t.df_within);

  std::vector<double> means(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i)
    means[i] = std::accumulate(groups[i].begin(), groups[i].end(), 0.0) /
               static_cast<double>(groups[i].size());

  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      TukeyPair p;
      p.group_i = i;
      p.group_j = j;
      p.mean_diff = means[i] - means[j];
      const double se = std::sqrt(
          out.ms_within / 2.0 *
          (1.0 / static_cast<double>(groups[i].size()) +
           1.0 / static_cast<double>(groups[j].size())));
      p.q_stat = std::fabs(p.mean_diff) / se;
      p.p_value =
          1.0 - studentized_range_cdf(p.q_stat, out.k, t.df_within);
      p.significant = p.q_stat > out.q_critical;
      out.pairs.push_back(p);
    }
  }
  return out;
}

}  // namespace actocat
