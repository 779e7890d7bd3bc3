#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nmfcheck/dpbs.hpp"
#include "nmfcheck/random.hpp"
#include "nmfcheck/stat.hpp"

namespace nmfcheck {

/// Gamma-Poisson null world: W ~ Gamma(shape_w, scale_w) entrywise (V x k),
/// H ~ Gamma(shape_h, scale_h) entrywise (k x M), X ~ Pois(WH).
struct SimulationConfig {
  double shape_w = 10.0;
  double scale_w = 0.1;
  double shape_h = 1.0;
  double scale_h = 100.0;
  std::size_t rows = 10;
  std::size_t cols = 16;
  std::size_t k = 5;
  std::size_t n_replicates = 100;
  std::size_t ks_repetitions = 20;
  /// b1, b2, nmf settings and the master seed; dpbs.k is overwritten by k.
  DpbsConfig dpbs;

  void validate() const;
  DpbsConfig dpbs_for_replicate(std::uint64_t replicate_seed) const;
};

struct NullInstance {
  CountMatrix x;
  RateMatrix truth;
};

RateMatrix generate_truth_rates(const SimulationConfig& cfg, Stream& stream);
NullInstance generate_null_instance(const SimulationConfig& cfg, Stream& stream);

struct CalibrationReport {
  SimulationConfig config;
  std::vector<double> p_values;   // final ρ per replicate
  std::vector<double> ells;       // observed ℓ per replicate
  std::vector<double> rho_stars;  // ρ* per replicate
  std::vector<KsResult> ks_repetitions;
  KsResult ks;  // statistic and p-value averaged over ks_repetitions
  PpPlotData pp;
};

/// n_replicates fresh null worlds (W, H redrawn every time), DPBS on each,
/// then a two-sample KS test of the ρ values against as many uniform draws,
/// repeated ks_repetitions times and averaged.
CalibrationReport run_calibration(const SimulationConfig& cfg,
                                  Execution exec = Execution::serial());

/// Two-sample KS of `p_values` against fresh uniform samples, averaged.
/// Repetition q draws its uniforms from {seed, {2, q}}.
KsResult averaged_uniformity_ks(std::span<const double> p_values, std::size_t repetitions,
                                std::uint64_t seed, std::vector<KsResult>* each = nullptr);

struct ViolationRow {
  ViolationSpec spec;
  std::vector<double> p_values;
  std::vector<double> ells;
  double mean_p_value = 0.0;
  double mean_ell = 0.0;
};

struct ViolationReport {
  SimulationConfig config;
  std::vector<ViolationRow> rows;
};

/// For every replicate r a fresh truth rate X̂ = WH is drawn once and shared
/// by all specs; each spec samples X from it and runs DPBS. Replicate r uses
/// the same sampling stream and DPBS seed under every spec, so zip:0 and
/// poisson rows coincide exactly.
ViolationReport run_violation_suite(const SimulationConfig& cfg,
                                    std::span<const ViolationSpec> specs,
                                    Execution exec = Execution::serial());

std::vector<ViolationSpec> default_violation_specs();

/// Calibration shapes 10x16/k5, 23x23/k10, 92x23/k10 with 100 replicates.
std::vector<SimulationConfig> table1_left_presets(std::uint64_t seed);
/// Violation suite at 10x16/k5 with 25 replicates.
SimulationConfig table1_right_preset(std::uint64_t seed);

}  // namespace nmfcheck
