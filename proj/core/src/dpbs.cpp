#include "nmfcheck/dpbs.hpp"

#include <cmath>
#include <string>

namespace nmfcheck {
namespace {

struct Fit {
  double ell;
  RateMatrix xhat;
};

Fit fit_and_score(const CountMatrix& x, const DpbsConfig& cfg, const SeedPath& path) {
  Stream stream = derive_stream(path);
  const Factorization f = factorize(x, cfg.k, cfg.nmf, stream);
  RateMatrix xhat = reconstruct(f);
  const double ell = normalized_statistic(x, xhat, cfg.scale, cfg.nmf.epsilon_floor);
  return {ell, std::move(xhat)};
}

CountMatrix draw_replicate(const RateMatrix& rates, const SeedPath& path) {
  Stream stream = derive_stream(path);
  CountMatrix draw = sample_poisson_matrix(rates, stream);
  if (!draw.all_zero()) return draw;
  const SeedPath retry = path.child(seed_paths::kRetrySuffix);
  Stream retry_stream = derive_stream(retry);
  draw = sample_poisson_matrix(rates, retry_stream);
  if (draw.all_zero()) {
    throw DegenerateInputError("bootstrap draw " + path.to_string() +
                               " was all zero twice; fitted rates are too small");
  }
  return draw;
}

void check_finite(double ell, const std::string& what) {
  if (!std::isfinite(ell)) throw NumericalError("non-finite statistic for " + what);
}

}  // namespace

void DpbsConfig::validate() const {
  if (k < 1) throw DomainError("DpbsConfig: rank k must be at least 1");
  if (b1 < 1) throw DomainError("DpbsConfig: b1 must be at least 1");
  if (b2 < 1) throw DomainError("DpbsConfig: b2 must be at least 1");
  nmf.validate();
}

FirstLevelResult first_level(const CountMatrix& x, const DpbsConfig& cfg, Execution exec) {
  cfg.validate();
  const std::uint64_t seed = cfg.master_seed;

  FirstLevelResult out;
  Fit observed = fit_and_score(x, cfg, SeedPath(seed, {seed_paths::kObservedFit}));
  check_finite(observed.ell, "the observed matrix");
  out.ell = observed.ell;
  out.xhat = std::move(observed.xhat);

  out.ells.assign(cfg.b1, 0.0);
  out.replicate_xhats.assign(cfg.b1, RateMatrix{});
  parallel_for(cfg.b1, exec, [&](std::size_t i) {
    const CountMatrix draw = draw_replicate(out.xhat, SeedPath(seed, {seed_paths::kFirstDraw, i}));
    Fit fit = fit_and_score(draw, cfg, SeedPath(seed, {seed_paths::kFirstRefit, i}));
    check_finite(fit.ell, "first-level replicate " + std::to_string(i));
    out.ells[i] = fit.ell;
    out.replicate_xhats[i] = std::move(fit.xhat);
  });

  out.rho_star = equal_tailed_pvalue(out.ell, out.ells);
  return out;
}

DpbsResult dpbs_test(const CountMatrix& x, const DpbsConfig& cfg, Execution exec) {
  FirstLevelResult first = first_level(x, cfg, exec);
  const std::uint64_t seed = cfg.master_seed;
  const std::size_t b2 = cfg.b2;

  DpbsResult out;
  out.config = cfg;
  out.ell = first.ell;
  out.rho_star = first.rho_star;
  out.second_level_ells.assign(cfg.b1, std::vector<double>(b2, 0.0));

  // One job per (i, j) pair; each writes only its own slot.
  parallel_for(cfg.b1 * b2, exec, [&](std::size_t job) {
    const std::size_t i = job / b2;
    const std::size_t j = job % b2;
    const CountMatrix draw =
        draw_replicate(first.replicate_xhats[i], SeedPath(seed, {seed_paths::kSecondDraw, i, j}));
    const Fit fit = fit_and_score(draw, cfg, SeedPath(seed, {seed_paths::kSecondRefit, i, j}));
    check_finite(fit.ell, "second-level replicate (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
    out.second_level_ells[i][j] = fit.ell;
  });

  out.second_level_pvalues.reserve(cfg.b1);
  for (std::size_t i = 0; i < cfg.b1; ++i) {
    out.second_level_pvalues.push_back(
        equal_tailed_pvalue(first.ells[i], out.second_level_ells[i]));
  }
  out.first_level_ells = std::move(first.ells);
  out.rho = double_bootstrap_pvalue(out.rho_star, out.second_level_pvalues);
  return out;
}

}  // namespace nmfcheck
