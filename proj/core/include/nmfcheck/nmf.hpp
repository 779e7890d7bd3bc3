#pragma once

#include <cstddef>
#include <vector>

#include "nmfcheck/matrix.hpp"
#include "nmfcheck/random.hpp"
#include "nmfcheck/stat.hpp"

namespace nmfcheck {

struct NmfConfig {
  int max_iterations = 2000;
  double relative_tolerance = 1e-5;           // on the per-iteration objective decrease
  double epsilon_floor = kDefaultEpsilonFloor;  // denominators and log arguments
  int n_restarts = 1;                         // best final objective is kept

  void validate() const;
};

struct Factorization {
  FactorMatrix w;  // V x k
  FactorMatrix h;  // k x M
  std::size_t k = 0;
  /// GKL of the initial guess followed by the value after every iteration.
  std::vector<double> objective_trace;
  int iterations_run = 0;

  double final_objective() const { return objective_trace.back(); }
};

/// Rank-k NMF under generalized KL divergence using the Lee-Seung
/// multiplicative updates. The initial factors are uniform on (0, 1] drawn
/// from `stream`, rescaled so mean(WH) equals mean(X). Iteration stops once
/// the relative objective decrease drops below `relative_tolerance` or after
/// `max_iterations`.
///
/// Throws DegenerateInputError for an all-zero X and ShapeError for k outside
/// [1, min(V, M)].
Factorization factorize(const CountMatrix& x, std::size_t k, const NmfConfig& config,
                        Stream& stream);

/// X̂ = W H.
RateMatrix reconstruct(const Factorization& f);
RateMatrix multiply(const FactorMatrix& w, const FactorMatrix& h);

}  // namespace nmfcheck
