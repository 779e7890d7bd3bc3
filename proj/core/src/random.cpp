#include "nmfcheck/random.hpp"

#include "nmfcheck/matrix_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>

namespace nmfcheck {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// log(k!) without touching lgamma, which writes the global signgam.
double log_factorial(double k) {
  constexpr std::size_t kTable = 256;
  static const std::array<double, kTable> table = [] {
    std::array<double, kTable> t{};
    t[0] = 0.0;
    for (std::size_t i = 1; i < kTable; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (k < static_cast<double>(kTable)) return table[static_cast<std::size_t>(k)];
  const double n = k + 1.0;
  const double inv = 1.0 / n;
  const double inv2 = inv * inv;
  // Stirling series for log Gamma(n).
  return (n - 0.5) * std::log(n) - n + 0.5 * std::log(2.0 * std::numbers::pi) +
         inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0)));
}

void check_rate(double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw DomainError("Poisson rate must be finite and non-negative, got " +
                      std::to_string(lambda));
  }
}

// Inversion by sequential search; expected cost O(lambda).
double poisson_inversion(double lambda, Stream& stream) {
  const double u = stream.uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  double k = 0.0;
  // The cap only matters when rounding leaves cdf a hair below u.
  while (u > cdf && k < 1000.0) {
    k += 1.0;
    p *= lambda / k;
    cdf += p;
  }
  return k;
}

// Hörmann's transformed rejection with squeeze (PTRS), valid for lambda >= 10.
double poisson_ptrs(double lambda, Stream& stream) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = stream.uniform() - 0.5;
    const double v = stream.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - log_factorial(k)) {
      return k;
    }
  }
}

// Marsaglia & Tsang squeeze method for shape >= 1, unit scale.
double gamma_marsaglia_tsang(double shape, Stream& stream) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = stream.standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.uniform_positive();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

SeedPath SeedPath::child(std::uint64_t index) const {
  SeedPath next = *this;
  next.path.push_back(index);
  return next;
}

std::string SeedPath::to_string() const {
  std::string out = std::to_string(master_seed) + ":[";
  for (std::size_t n = 0; n < path.size(); ++n) {
    if (n) out += ',';
    out += std::to_string(path[n]);
  }
  out += ']';
  return out;
}

std::uint64_t derive_seed(const SeedPath& seed_path) {
  std::uint64_t h = splitmix64(seed_path.master_seed);
  for (std::uint64_t index : seed_path.path) {
    h = splitmix64(h ^ splitmix64(index ^ 0x5851f42d4c957f2dULL));
  }
  return splitmix64(h + seed_path.path.size());
}

Stream::Stream(std::uint64_t seed) : engine_(seed) {}

double Stream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Stream::uniform_positive() {
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double Stream::standard_normal() {
  // Box-Muller, one output per call so no hidden state crosses draws.
  const double r = std::sqrt(-2.0 * std::log(uniform_positive()));
  return r * std::cos(2.0 * std::numbers::pi * uniform());
}

Stream derive_stream(const SeedPath& seed_path) { return Stream(derive_seed(seed_path)); }

double sample_poisson(double lambda, Stream& stream) {
  check_rate(lambda);
  if (lambda == 0.0) return 0.0;
  if (lambda < 10.0) return poisson_inversion(lambda, stream);
  return poisson_ptrs(lambda, stream);
}

double sample_gamma(double shape, double scale, Stream& stream) {
  if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
    throw DomainError("Gamma parameters must be positive and finite, got shape=" +
                      std::to_string(shape) + " scale=" + std::to_string(scale));
  }
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a + 1) * U^(1/a).
    const double g = gamma_marsaglia_tsang(shape + 1.0, stream);
    return scale * g * std::pow(stream.uniform_positive(), 1.0 / shape);
  }
  return scale * gamma_marsaglia_tsang(shape, stream);
}

double sample_truncated_normal(double mean, double sd, Stream& stream) {
  if (!std::isfinite(mean) || !std::isfinite(sd) || sd < 0.0) {
    throw DomainError("Normal parameters must be finite with sd >= 0");
  }
  const double x = mean + sd * stream.standard_normal();
  return x < 0.0 ? 0.0 : x;
}

CountMatrix sample_poisson_matrix(const RateMatrix& rates, Stream& stream) {
  std::vector<double> out;
  out.reserve(rates.size());
  for (double lambda : rates.entries()) out.push_back(sample_poisson(lambda, stream));
  return CountMatrix(rates.rows(), rates.cols(), std::move(out));
}

FactorMatrix sample_gamma_matrix(std::size_t rows, std::size_t cols, double shape,
                                 double scale, Stream& stream) {
  std::vector<double> out;
  out.reserve(rows * cols);
  for (std::size_t n = 0; n < rows * cols; ++n) out.push_back(sample_gamma(shape, scale, stream));
  return FactorMatrix(rows, cols, std::move(out));
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::poisson: return "poisson";
    case ViolationKind::gamma: return "gamma";
    case ViolationKind::normal: return "normal";
    case ViolationKind::zip: return "zip";
  }
  return "unknown";
}

std::string_view to_string(ViolationParameters parameters) {
  switch (parameters) {
    case ViolationParameters::all_equal_rate: return "all_equal_rate";
    case ViolationParameters::moment_matched: return "moment_matched";
  }
  return "unknown";
}

void ViolationSpec::validate() const {
  if (kind == ViolationKind::zip) {
    if (!zip_zero_prob) throw DomainError("zip violation needs a zero probability");
    const double p = *zip_zero_prob;
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("zip zero probability must lie in [0, 1], got " + std::to_string(p));
    }
  } else if (zip_zero_prob) {
    throw DomainError("zero probability is only meaningful for zip violations");
  }
}

std::string ViolationSpec::name() const {
  std::string out(to_string(kind));
  if (kind == ViolationKind::zip && zip_zero_prob) out += ":" + format_number(*zip_zero_prob);
  return out;
}

ViolationSpec parse_violation_spec(std::string_view text) {
  if (text == "poisson") return ViolationSpec::poisson();
  if (text == "gamma") return ViolationSpec::gamma();
  if (text == "normal") return ViolationSpec::normal();
  if (text == "zip") return ViolationSpec::zip(0.5);
  if (text.starts_with("zip:")) {
    const auto digits = text.substr(4);
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
      throw DomainError("bad zip probability in '" + std::string(text) + "'");
    }
    auto spec = ViolationSpec::zip(p);
    spec.validate();
    return spec;
  }
  throw DomainError("unknown distribution '" + std::string(text) +
                    "' (expected poisson, gamma, normal, zip or zip:<p>)");
}

CountMatrix sample_violation_matrix(const RateMatrix& rates, const ViolationSpec& spec,
                                    Stream& stream) {
  spec.validate();
  const bool moment = spec.parameters == ViolationParameters::moment_matched;
  std::vector<double> out;
  out.reserve(rates.size());
  for (double rate : rates.entries()) {
    check_rate(rate);
    double x = 0.0;
    switch (spec.kind) {
      case ViolationKind::poisson:
        x = sample_poisson(rate, stream);
        break;
      case ViolationKind::gamma:
        // Gamma with zero shape is the point mass at zero.
        x = rate == 0.0 ? 0.0 : sample_gamma(rate, moment ? 1.0 : rate, stream);
        break;
      case ViolationKind::normal:
        x = sample_truncated_normal(rate, moment ? std::sqrt(rate) : rate, stream);
        break;
      case ViolationKind::zip: {
        const double p = *spec.zip_zero_prob;
        // p == 0 and p == 1 skip the Bernoulli draw so zip:0 consumes the
        // stream exactly like poisson.
        if (p == 0.0) {
          x = sample_poisson(rate, stream);
        } else if (p == 1.0) {
          x = 0.0;
        } else {
          const bool zero = stream.uniform() < p;
          const double k = sample_poisson(rate, stream);
          x = zero ? 0.0 : k;
        }
        break;
      }
    }
    out.push_back(x);
  }
  return CountMatrix(rates.rows(), rates.cols(), std::move(out));
}

}  // namespace nmfcheck
