#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nmfcheck/matrix.hpp"
#include "nmfcheck/nmf.hpp"
#include "nmfcheck/parallel.hpp"
#include "nmfcheck/stat.hpp"

namespace nmfcheck {

struct DpbsConfig {
  std::size_t k = 0;
  std::size_t b1 = 25;
  std::size_t b2 = 25;
  NmfConfig nmf;
  std::uint64_t master_seed = 0;
  StatisticScale scale = StatisticScale::sqrt_entries;

  void validate() const;
};

/// Seed-path prefixes used under DpbsConfig::master_seed. They are part of
/// the reproducibility contract: changing them changes every golden value.
namespace seed_paths {
inline constexpr std::uint64_t kObservedFit = 0;      // {0}
inline constexpr std::uint64_t kFirstDraw = 1;        // {1, i}
inline constexpr std::uint64_t kFirstRefit = 2;       // {2, i}
inline constexpr std::uint64_t kSecondDraw = 3;       // {3, i, j}
inline constexpr std::uint64_t kSecondRefit = 4;      // {4, i, j}
// An all-zero Poisson draw is retried once on the draw path with this
// suffix appended, e.g. {1, i, 1}.
inline constexpr std::uint64_t kRetrySuffix = 1;
}  // namespace seed_paths

struct FirstLevelResult {
  double ell = 0.0;
  RateMatrix xhat;
  std::vector<double> ells;          // ℓ*_i
  std::vector<RateMatrix> replicate_xhats;  // X̂*_i, the second-level rates
  double rho_star = 0.0;
};

struct DpbsResult {
  double ell = 0.0;
  std::vector<double> first_level_ells;
  double rho_star = 0.0;
  std::vector<double> second_level_pvalues;            // ρ**_i
  std::vector<std::vector<double>> second_level_ells;  // ℓ**_ij, B1 rows of B2
  double rho = 0.0;
  DpbsConfig config;

  std::size_t factorizations() const {
    return 1 + config.b1 * (1 + config.b2);
  }
};

/// Observed fit plus the first bootstrap level: B1 Poisson replicates of X̂,
/// each refit at the same rank, and ρ* = equal_tailed_pvalue(ℓ, {ℓ*_i}).
FirstLevelResult first_level(const CountMatrix& x, const DpbsConfig& cfg,
                             Execution exec = Execution::serial());

/// Full double parametric bootstrap. Performs 1 + B1 (1 + B2)
/// factorizations; the result is bit-identical for any `exec`.
DpbsResult dpbs_test(const CountMatrix& x, const DpbsConfig& cfg,
                     Execution exec = Execution::serial());

}  // namespace nmfcheck
