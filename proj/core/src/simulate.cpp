#include "nmfcheck/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nmfcheck/nmf.hpp"

namespace nmfcheck {
namespace {

// Paths under SimulationConfig::dpbs.master_seed.
constexpr std::uint64_t kCalibrationInstance = 0;  // {0, r}
constexpr std::uint64_t kCalibrationDpbs = 1;      // {1, r} -> child master seed
constexpr std::uint64_t kUniformDraws = 2;         // {2, q}
constexpr std::uint64_t kViolationTruth = 3;       // {3, r}
constexpr std::uint64_t kViolationDraw = 4;        // {4, r}
constexpr std::uint64_t kViolationDpbs = 5;        // {5, r} -> child master seed

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string("SimulationConfig: ") + name + " must be positive, got " +
                      std::to_string(v));
  }
}

}  // namespace

void SimulationConfig::validate() const {
  check_positive(shape_w, "shape_w");
  check_positive(scale_w, "scale_w");
  check_positive(shape_h, "shape_h");
  check_positive(scale_h, "scale_h");
  if (rows == 0 || cols == 0) throw ShapeError("SimulationConfig: dimensions must be positive");
  if (k < 1 || k > std::min(rows, cols)) {
    throw ShapeError("SimulationConfig: rank " + std::to_string(k) + " outside [1, " +
                     std::to_string(std::min(rows, cols)) + "]");
  }
  if (n_replicates < 1) throw DomainError("SimulationConfig: n_replicates must be >= 1");
  if (ks_repetitions < 1) throw DomainError("SimulationConfig: ks_repetitions must be >= 1");
  dpbs_for_replicate(0).validate();
}

DpbsConfig SimulationConfig::dpbs_for_replicate(std::uint64_t replicate_seed) const {
  DpbsConfig out = dpbs;
  out.k = k;
  out.master_seed = replicate_seed;
  return out;
}

RateMatrix generate_truth_rates(const SimulationConfig& cfg, Stream& stream) {
  const FactorMatrix w = sample_gamma_matrix(cfg.rows, cfg.k, cfg.shape_w, cfg.scale_w, stream);
  const FactorMatrix h = sample_gamma_matrix(cfg.k, cfg.cols, cfg.shape_h, cfg.scale_h, stream);
  return multiply(w, h);
}

NullInstance generate_null_instance(const SimulationConfig& cfg, Stream& stream) {
  cfg.validate();
  RateMatrix truth = generate_truth_rates(cfg, stream);
  CountMatrix x = sample_poisson_matrix(truth, stream);
  return {std::move(x), std::move(truth)};
}

KsResult averaged_uniformity_ks(std::span<const double> p_values, std::size_t repetitions,
                                std::uint64_t seed, std::vector<KsResult>* each) {
  if (repetitions < 1) throw DomainError("averaged_uniformity_ks: need at least one repetition");
  KsResult avg;
  avg.statistic = 0.0;
  avg.p_value = 0.0;
  std::vector<double> uniforms(p_values.size());
  for (std::size_t q = 0; q < repetitions; ++q) {
    Stream stream = derive_stream(SeedPath(seed, {kUniformDraws, q}));
    for (double& u : uniforms) u = stream.uniform();
    const KsResult r = ks_two_sample(p_values, uniforms);
    if (each) each->push_back(r);
    avg.statistic += r.statistic;
    avg.p_value += r.p_value;
    avg.n1 = r.n1;
    avg.n2 = r.n2;
  }
  avg.statistic /= static_cast<double>(repetitions);
  avg.p_value /= static_cast<double>(repetitions);
  return avg;
}

CalibrationReport run_calibration(const SimulationConfig& cfg, Execution exec) {
  cfg.validate();
  const std::uint64_t seed = cfg.dpbs.master_seed;
  const std::size_t n = cfg.n_replicates;

  CalibrationReport out;
  out.config = cfg;
  out.p_values.assign(n, 0.0);
  out.ells.assign(n, 0.0);
  out.rho_stars.assign(n, 0.0);

  parallel_for(n, exec, [&](std::size_t r) {
    Stream stream = derive_stream(SeedPath(seed, {kCalibrationInstance, r}));
    const NullInstance inst = generate_null_instance(cfg, stream);
    const DpbsConfig dcfg =
        cfg.dpbs_for_replicate(derive_seed(SeedPath(seed, {kCalibrationDpbs, r})));
    const DpbsResult res = dpbs_test(inst.x, dcfg);
    out.p_values[r] = res.rho;
    out.ells[r] = res.ell;
    out.rho_stars[r] = res.rho_star;
  });

  out.ks = averaged_uniformity_ks(out.p_values, cfg.ks_repetitions, seed, &out.ks_repetitions);
  out.pp = pp_plot_points(out.p_values, out.ks);
  return out;
}

ViolationReport run_violation_suite(const SimulationConfig& cfg,
                                    std::span<const ViolationSpec> specs, Execution exec) {
  cfg.validate();
  for (const auto& s : specs) s.validate();
  const std::uint64_t seed = cfg.dpbs.master_seed;
  const std::size_t n = cfg.n_replicates;

  ViolationReport out;
  out.config = cfg;
  out.rows.resize(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    out.rows[s].spec = specs[s];
    out.rows[s].p_values.assign(n, 0.0);
    out.rows[s].ells.assign(n, 0.0);
  }

  parallel_for(specs.size() * n, exec, [&](std::size_t job) {
    const std::size_t s = job / n;
    const std::size_t r = job % n;
    Stream truth_stream = derive_stream(SeedPath(seed, {kViolationTruth, r}));
    const RateMatrix truth = generate_truth_rates(cfg, truth_stream);
    Stream draw_stream = derive_stream(SeedPath(seed, {kViolationDraw, r}));
    const CountMatrix x = sample_violation_matrix(truth, specs[s], draw_stream);
    const DpbsConfig dcfg =
        cfg.dpbs_for_replicate(derive_seed(SeedPath(seed, {kViolationDpbs, r})));
    const DpbsResult res = dpbs_test(x, dcfg);
    out.rows[s].p_values[r] = res.rho;
    out.rows[s].ells[r] = res.ell;
  });

  for (auto& row : out.rows) {
    row.mean_p_value = mean(row.p_values);
    row.mean_ell = mean(row.ells);
  }
  return out;
}

std::vector<ViolationSpec> default_violation_specs() {
  return {ViolationSpec::poisson(), ViolationSpec::gamma(), ViolationSpec::normal(),
          ViolationSpec::zip(0.5)};
}

std::vector<SimulationConfig> table1_left_presets(std::uint64_t seed) {
  std::vector<SimulationConfig> out;
  const struct {
    std::size_t rows, cols, k;
  } shapes[] = {{10, 16, 5}, {23, 23, 10}, {92, 23, 10}};
  for (std::size_t n = 0; n < 3; ++n) {
    SimulationConfig cfg;
    cfg.rows = shapes[n].rows;
    cfg.cols = shapes[n].cols;
    cfg.k = shapes[n].k;
    cfg.n_replicates = 100;
    cfg.ks_repetitions = 20;
    // Each shape gets its own seed so presets can be run independently.
    cfg.dpbs.master_seed = derive_seed(SeedPath(seed, {n}));
    out.push_back(cfg);
  }
  return out;
}

SimulationConfig table1_right_preset(std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.rows = 10;
  cfg.cols = 16;
  cfg.k = 5;
  cfg.n_replicates = 25;
  cfg.dpbs.master_seed = seed;
  return cfg;
}

}  // namespace nmfcheck
