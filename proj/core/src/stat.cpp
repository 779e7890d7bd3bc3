#include "nmfcheck/stat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nmfcheck {

double gkl_divergence_unchecked(std::span<const double> x, std::span<const double> xhat,
                                double epsilon_floor) {
  double d = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double xv = x[n];
    const double rate = xhat[n];
    if (xv == 0.0) {
      d += rate;
    } else {
      d += xv * std::log(xv / std::max(rate, epsilon_floor)) - xv + rate;
    }
  }
  return d;
}

double gkl_divergence(const CountMatrix& x, const RateMatrix& xhat, double epsilon_floor) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) {
    throw ShapeError("gkl_divergence: X is " + std::to_string(x.rows()) + "x" +
                     std::to_string(x.cols()) + " but X̂ is " + std::to_string(xhat.rows()) +
                     "x" + std::to_string(xhat.cols()));
  }
  // RateMatrix construction already rejects negative entries; this guards
  // default-constructed or re-tagged inputs.
  for (double v : xhat.entries()) {
    if (v < 0.0 || !std::isfinite(v)) throw DomainError("gkl_divergence: negative X̂ entry");
  }
  return gkl_divergence_unchecked(x.entries(), xhat.entries(), epsilon_floor);
}

double statistic_denominator(std::size_t rows, std::size_t cols, StatisticScale scale) {
  const double entries = static_cast<double>(rows * cols);
  return scale == StatisticScale::sqrt_entries ? std::sqrt(entries) : entries;
}

double normalized_statistic(const CountMatrix& x, const RateMatrix& xhat, StatisticScale scale,
                            double epsilon_floor) {
  return gkl_divergence(x, xhat, epsilon_floor) / statistic_denominator(x.rows(), x.cols(), scale);
}

double equal_tailed_pvalue(double reference, std::span<const double> samples) {
  if (samples.empty()) throw DomainError("equal_tailed_pvalue: no bootstrap samples");
  if (!std::isfinite(reference)) throw DomainError("equal_tailed_pvalue: non-finite reference");
  std::size_t lower = 0;
  for (double s : samples) {
    if (!std::isfinite(s)) throw DomainError("equal_tailed_pvalue: non-finite sample");
    if (s <= reference) ++lower;
  }
  const std::size_t upper = samples.size() - lower;
  return 2.0 * static_cast<double>(std::min(lower, upper)) / static_cast<double>(samples.size());
}

double double_bootstrap_pvalue(double first_level_pvalue,
                               std::span<const double> second_level_pvalues) {
  if (second_level_pvalues.empty()) {
    throw DomainError("double_bootstrap_pvalue: no second-level p-values");
  }
  std::size_t at_most = 0;
  for (double s : second_level_pvalues) {
    if (first_level_pvalue <= s) ++at_most;
  }
  const std::size_t above = second_level_pvalues.size() - at_most;
  return 2.0 * static_cast<double>(std::min(at_most, above)) /
         static_cast<double>(second_level_pvalues.size());
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr int kTerms = 100;
  if (lambda < 1.0) {
    // Theta-function form of the same distribution; the alternating series
    // converges far too slowly near zero.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= kTerms; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
      cdf += term;
      if (term < 1e-300) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  for (int k = 1; k <= kTerms; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double gap = 0.0;
  // Merge walk; each threshold consumes every tied value on both sides
  // before the CDFs are compared.
  while (i < sa.size() && j < sb.size()) {
    const double t = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= t) ++i;
    while (j < sb.size() && sb[j] <= t) ++j;
    gap = std::max(gap, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // Once one side is exhausted its CDF is 1 and the other only climbs
  // toward 1, so the gap cannot grow further.

  KsResult r;
  r.statistic = gap;
  r.n1 = sa.size();
  r.n2 = sb.size();
  const double effective = na * nb / (na + nb);
  r.p_value = kolmogorov_survival(std::sqrt(effective) * gap);
  return r;
}

double PpPlotData::max_deviation() const {
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, std::abs(p.empirical - p.theoretical));
  return worst;
}

PpPlotData pp_plot_points(std::span<const double> p_values, const KsResult& ks) {
  if (p_values.empty()) throw DomainError("pp_plot_points: no p-values");
  std::vector<double> sorted(p_values.begin(), p_values.end());
  for (double p : sorted) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("pp_plot_points: p-value " + std::to_string(p) + " outside [0, 1]");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  PpPlotData out;
  out.error_band = ks.statistic;
  const double n = static_cast<double>(sorted.size());
  out.points.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out.points.push_back({(static_cast<double>(i) + 0.5) / n, sorted[i]});
  }
  return out;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

}  // namespace nmfcheck
