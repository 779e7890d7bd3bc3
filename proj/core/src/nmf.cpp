#include "nmfcheck/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nmfcheck {
namespace {

// Row-major scratch state for one factorization run.
struct Workspace {
  std::size_t rows, cols, k;
  std::vector<double> w;      // rows x k
  std::vector<double> h;      // k x cols
  std::vector<double> wh;     // rows x cols
  std::vector<double> ratio;  // rows x cols, X / max(WH, eps)
  std::vector<double> numer;  // k x cols
  std::vector<double> denom;  // k

  Workspace(std::size_t r, std::size_t c, std::size_t rank)
      : rows(r), cols(c), k(rank), w(r * rank), h(rank * c), wh(r * c), ratio(r * c),
        numer(rank * c), denom(rank) {}

  // Same accumulation order as multiply(), so reconstruct() reproduces wh.
  void update_product() {
    std::fill(wh.begin(), wh.end(), 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      double* __restrict out = &wh[i * cols];
      for (std::size_t c = 0; c < k; ++c) {
        const double wic = w[i * k + c];
        const double* __restrict hrow = &h[c * cols];
        for (std::size_t j = 0; j < cols; ++j) out[j] += wic * hrow[j];
      }
    }
  }

  void update_ratio(std::span<const double> x, double eps) {
    for (std::size_t n = 0; n < x.size(); ++n) ratio[n] = x[n] / std::max(wh[n], eps);
  }

  // Ratio pass fused with the GKL objective at the current WH; the terms
  // match gkl_divergence_unchecked exactly.
  double update_ratio_and_objective(std::span<const double> x, double eps) {
    double d = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double xv = x[n];
      const double rate = wh[n];
      const double r = xv / std::max(rate, eps);
      ratio[n] = r;
      d += xv == 0.0 ? rate : xv * std::log(r) - xv + rate;
    }
    return d;
  }

  // H <- H .* (W' R) ./ (W' 1)
  void update_h(double eps) {
    std::fill(denom.begin(), denom.end(), 0.0);
    std::fill(numer.begin(), numer.end(), 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      const double* __restrict rrow = &ratio[i * cols];
      for (std::size_t c = 0; c < k; ++c) {
        const double wic = w[i * k + c];
        denom[c] += wic;
        double* __restrict nrow = &numer[c * cols];
        for (std::size_t j = 0; j < cols; ++j) nrow[j] += wic * rrow[j];
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      const double d = std::max(denom[c], eps);
      double* __restrict hrow = &h[c * cols];
      const double* __restrict nrow = &numer[c * cols];
      for (std::size_t j = 0; j < cols; ++j) hrow[j] *= nrow[j] / d;
    }
  }

  // W <- W .* (R H') ./ (1 H')
  void update_w(double eps) {
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      const double* hrow = &h[c * cols];
      for (std::size_t j = 0; j < cols; ++j) s += hrow[j];
      denom[c] = std::max(s, eps);
    }
    for (std::size_t i = 0; i < rows; ++i) {
      const double* rrow = &ratio[i * cols];
      for (std::size_t c = 0; c < k; ++c) {
        w[i * k + c] *= dot(rrow, &h[c * cols], cols) / denom[c];
      }
    }
  }

  // Four independent partial sums keep the dependency chain short.
  static double dot(const double* __restrict a, const double* __restrict b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      s0 += a[j] * b[j];
      s1 += a[j + 1] * b[j + 1];
      s2 += a[j + 2] * b[j + 2];
      s3 += a[j + 3] * b[j + 3];
    }
    for (; j < n; ++j) s0 += a[j] * b[j];
    return (s0 + s1) + (s2 + s3);
  }
};

Factorization run_once(const CountMatrix& x, std::size_t k, const NmfConfig& config,
                       Stream& stream) {
  const std::size_t rows = x.rows();
  const std::size_t cols = x.cols();
  const double eps = config.epsilon_floor;
  const auto xs = x.entries();
  Workspace ws(rows, cols, k);

  for (double& v : ws.w) v = stream.uniform_positive();
  for (double& v : ws.h) v = stream.uniform_positive();
  ws.update_product();
  double wh_sum = 0.0;
  for (double v : ws.wh) wh_sum += v;
  const double scale = std::sqrt(x.sum() / wh_sum);
  for (double& v : ws.w) v *= scale;
  for (double& v : ws.h) v *= scale;
  ws.update_product();

  Factorization f;
  f.k = k;
  double objective = ws.update_ratio_and_objective(xs, eps);
  f.objective_trace.push_back(objective);

  for (int it = 0; it < config.max_iterations; ++it) {
    // ratio holds X / WH for the current factors here.
    ws.update_h(eps);
    ws.update_product();
    ws.update_ratio(xs, eps);
    ws.update_w(eps);
    ws.update_product();

    const double next = ws.update_ratio_and_objective(xs, eps);
    if (!std::isfinite(next)) {
      throw NumericalError("factorize: objective became non-finite at iteration " +
                           std::to_string(it + 1));
    }
    f.objective_trace.push_back(next);
    f.iterations_run = it + 1;
    const double relative = objective > 0.0 ? (objective - next) / objective : 0.0;
    objective = next;
    if (relative < config.relative_tolerance) break;
  }

  f.w = FactorMatrix(rows, k, std::move(ws.w));
  f.h = FactorMatrix(k, cols, std::move(ws.h));
  return f;
}

}  // namespace

void NmfConfig::validate() const {
  if (max_iterations < 1) throw DomainError("NmfConfig: max_iterations must be positive");
  if (!(relative_tolerance > 0.0)) {
    throw DomainError("NmfConfig: relative_tolerance must be positive");
  }
  if (!(epsilon_floor > 0.0)) throw DomainError("NmfConfig: epsilon_floor must be positive");
  if (n_restarts < 1) throw DomainError("NmfConfig: n_restarts must be positive");
}

Factorization factorize(const CountMatrix& x, std::size_t k, const NmfConfig& config,
                        Stream& stream) {
  config.validate();
  if (x.empty()) throw ShapeError("factorize: empty matrix");
  if (k < 1 || k > std::min(x.rows(), x.cols())) {
    throw ShapeError("factorize: rank " + std::to_string(k) + " outside [1, " +
                     std::to_string(std::min(x.rows(), x.cols())) + "] for a " +
                     std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " matrix");
  }
  if (x.all_zero()) {
    throw DegenerateInputError("factorize: matrix has no positive entry");
  }

  Factorization best = run_once(x, k, config, stream);
  for (int r = 1; r < config.n_restarts; ++r) {
    Factorization next = run_once(x, k, config, stream);
    if (next.final_objective() < best.final_objective()) best = std::move(next);
  }
  return best;
}

RateMatrix multiply(const FactorMatrix& w, const FactorMatrix& h) {
  if (w.cols() != h.rows()) {
    throw ShapeError("multiply: inner dimensions " + std::to_string(w.cols()) + " and " +
                     std::to_string(h.rows()) + " differ");
  }
  const std::size_t rows = w.rows();
  const std::size_t cols = h.cols();
  const std::size_t k = w.cols();
  std::vector<double> out(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      const double wic = w(i, c);
      for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] += wic * h(c, j);
    }
  }
  return RateMatrix(rows, cols, std::move(out));
}

RateMatrix reconstruct(const Factorization& f) { return multiply(f.w, f.h); }

}  // namespace nmfcheck
