#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "nmfcheck/matrix.hpp"

namespace nmfcheck {

/// Identifies one random stream: a master seed plus the replicate indices
/// that lead to it (e.g. {outer i, inner j}). The stream is a pure function
/// of both, so any replicate can be regenerated in isolation.
struct SeedPath {
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> path;

  SeedPath() = default;
  SeedPath(std::uint64_t seed, std::initializer_list<std::uint64_t> indices)
      : master_seed(seed), path(indices) {}
  SeedPath(std::uint64_t seed, std::vector<std::uint64_t> indices)
      : master_seed(seed), path(std::move(indices)) {}

  SeedPath child(std::uint64_t index) const;
  std::string to_string() const;

  friend bool operator==(const SeedPath&, const SeedPath&) = default;
};

/// Hashes a seed path down to a single 64-bit seed (SplitMix64 finalizer
/// chained over the path). Used both to seed streams and to hand child
/// master seeds to nested experiments.
std::uint64_t derive_seed(const SeedPath& seed_path);

/// Random stream owned by exactly one logical task. Wraps mt19937_64, whose
/// output sequence is fixed by the standard, and converts bits to doubles
/// by hand so results do not depend on the standard library's distributions.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed);

  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_positive();
  double standard_normal();

 private:
  std::mt19937_64 engine_;
};

Stream derive_stream(const SeedPath& seed_path);

double sample_poisson(double lambda, Stream& stream);
double sample_gamma(double shape, double scale, Stream& stream);
/// Normal(mean, sd) with negative draws replaced by exactly zero.
double sample_truncated_normal(double mean, double sd, Stream& stream);

/// Entrywise independent Poisson draws; row-major order of consumption.
CountMatrix sample_poisson_matrix(const RateMatrix& rates, Stream& stream);

/// Entrywise independent Gamma(shape, scale) draws.
FactorMatrix sample_gamma_matrix(std::size_t rows, std::size_t cols, double shape,
                                 double scale, Stream& stream);

enum class ViolationKind { poisson, gamma, normal, zip };

/// How a single rate x̂ is turned into the parameters of a two-parameter
/// violation distribution.
enum class ViolationParameters {
  /// Every parameter equals x̂: Gamma(shape = x̂, scale = x̂) and
  /// Normal(mean = x̂, sd = x̂). Over-dispersed relative to Poisson(x̂) by a
  /// factor of roughly x̂, which is what makes these families detectable.
  all_equal_rate,
  /// First two moments match Poisson(x̂): Gamma(shape = x̂, scale = 1) and
  /// Normal(mean = x̂, variance = x̂).
  moment_matched,
};

struct ViolationSpec {
  ViolationKind kind = ViolationKind::poisson;
  std::optional<double> zip_zero_prob;  // set iff kind == zip
  ViolationParameters parameters = ViolationParameters::all_equal_rate;

  static ViolationSpec poisson() { return {ViolationKind::poisson, std::nullopt}; }
  static ViolationSpec gamma(ViolationParameters p = ViolationParameters::all_equal_rate) {
    return {ViolationKind::gamma, std::nullopt, p};
  }
  static ViolationSpec normal(ViolationParameters p = ViolationParameters::all_equal_rate) {
    return {ViolationKind::normal, std::nullopt, p};
  }
  static ViolationSpec zip(double zero_prob) { return {ViolationKind::zip, zero_prob}; }

  /// Throws DomainError when zip_zero_prob is missing, out of [0, 1], or set
  /// on a non-zip kind.
  void validate() const;
  std::string name() const;

  friend bool operator==(const ViolationSpec&, const ViolationSpec&) = default;
};

std::string_view to_string(ViolationKind kind);
std::string_view to_string(ViolationParameters parameters);
/// Parses "poisson", "gamma", "normal", "zip" or "zip:<p>".
ViolationSpec parse_violation_spec(std::string_view text);

/// Entrywise independent draws from the distribution named by `spec`, each
/// parameterized by the matching rate. All outputs are non-negative.
CountMatrix sample_violation_matrix(const RateMatrix& rates, const ViolationSpec& spec,
                                    Stream& stream);

}  // namespace nmfcheck
