#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nmfcheck/matrix.hpp"

namespace nmfcheck {

inline constexpr double kDefaultEpsilonFloor = 1e-9;

/// Generalized KL divergence D(X || X̂) = sum x log(x / x̂) - x + x̂ (natural
/// log). A zero count contributes exactly x̂; the x̂ inside the log is floored
/// at `epsilon_floor`.
double gkl_divergence(const CountMatrix& x, const RateMatrix& xhat,
                      double epsilon_floor = kDefaultEpsilonFloor);

/// Same as above on raw row-major buffers. No shape or sign checks.
double gkl_divergence_unchecked(std::span<const double> x, std::span<const double> xhat,
                                double epsilon_floor);

enum class StatisticScale {
  sqrt_entries,  // D / sqrt(rows * cols)
  entries,       // D / (rows * cols)
};

/// The bootstrap test statistic: GKL divided by sqrt(rows * cols) (or by the
/// entry count, under StatisticScale::entries).
double normalized_statistic(const CountMatrix& x, const RateMatrix& xhat,
                            StatisticScale scale = StatisticScale::sqrt_entries,
                            double epsilon_floor = kDefaultEpsilonFloor);

double statistic_denominator(std::size_t rows, std::size_t cols, StatisticScale scale);

/// 2 * min(#{s <= reference}, #{s > reference}) / n. Ties fall in the lower
/// tail, so every sample lands in exactly one tail.
double equal_tailed_pvalue(double reference, std::span<const double> samples);

/// Final double-bootstrap combination:
/// 2 * min(#{first <= s}, #{first > s}) / n over the second-level p-values s.
double double_bootstrap_pvalue(double first_level_pvalue,
                               std::span<const double> second_level_pvalues);

struct KsResult {
  double statistic = 0.0;  // T, the largest gap between empirical CDFs
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = P(K > lambda).
double kolmogorov_survival(double lambda);

/// Two-sample Kolmogorov-Smirnov test; p-value from the asymptotic
/// distribution at effective size n1 n2 / (n1 + n2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct PpPoint {
  double theoretical = 0.0;
  double empirical = 0.0;
};

struct PpPlotData {
  std::vector<PpPoint> points;
  double error_band = 0.0;  // half-width of the band around y = x

  double max_deviation() const;
  bool within_band() const { return max_deviation() <= error_band; }
};

/// Sorted p-values against uniform plotting positions (i - 0.5) / n, with the
/// KS statistic as error band.
PpPlotData pp_plot_points(std::span<const double> p_values, const KsResult& ks);

double mean(std::span<const double> values);

}  // namespace nmfcheck
