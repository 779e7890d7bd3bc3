#include <doctest.h>

#include <cmath>
#include <vector>

#include "nmfcheck/parallel.hpp"
#include "nmfcheck/random.hpp"

using namespace nmfcheck;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <class Draw>
Moments moments(std::size_t n, Draw draw) {
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = draw();
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  return {mean, (s2 - n * mean * mean) / (n - 1)};
}

}  // namespace

TEST_CASE("same seed path gives the same stream") {
  Stream a = derive_stream(SeedPath(9, {3, 4}));
  Stream b = derive_stream(SeedPath(9, {3, 4}));
  for (int i = 0; i < 1000; ++i) REQUIRE(a() == b());
}

TEST_CASE("different paths give different streams") {
  Stream a = derive_stream(SeedPath(9, {0}));
  Stream b = derive_stream(SeedPath(9, {1}));
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a() == b();
  CHECK(equal == 0);
  CHECK(derive_seed(SeedPath(1, {})) != derive_seed(SeedPath(2, {})));
  CHECK(derive_seed(SeedPath(1, {0})) != derive_seed(SeedPath(1, {0, 0})));
  CHECK(derive_seed(SeedPath(1, {1, 2})) != derive_seed(SeedPath(1, {2, 1})));
  CHECK(SeedPath(1, {2}).child(3) == SeedPath(1, {2, 3}));
  CHECK(SeedPath(1, {2, 3}).to_string() == "1:[2,3]");
}

TEST_CASE("replicate grid draws are identical serially and in parallel") {
  const RateMatrix rates(3, 3, {0.5, 4, 9, 10, 50, 200, 0, 1, 1e4});
  constexpr std::size_t n = 64;
  auto run = [&](unsigned threads) {
    std::vector<CountMatrix> out(n);
    parallel_for(n, Execution{threads}, [&](std::size_t i) {
      Stream s = derive_stream(SeedPath(77, {i / 8, i % 8}));
      out[i] = sample_poisson_matrix(rates, s);
    });
    return out;
  };
  CHECK(run(1) == run(4));
}

TEST_CASE("uniforms stay in range") {
  Stream s(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    const double v = s.uniform_positive();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
  }
}

TEST_CASE("zero rates give zero counts") {
  Stream s(2);
  CHECK(sample_poisson_matrix(RateMatrix::zeros(3, 4), s).all_zero());
  CHECK(sample_poisson(0.0, s) == 0.0);
}

TEST_CASE("bad Poisson rates are domain errors") {
  Stream s(2);
  CHECK_THROWS_AS(sample_poisson(-1.0, s), DomainError);
  CHECK_THROWS_AS(sample_poisson(std::nan(""), s), DomainError);
  CHECK_THROWS_AS(sample_poisson(INFINITY, s), DomainError);
}

TEST_CASE("Poisson moments, lambda = 4, 3-sigma") {
  Stream s = derive_stream(SeedPath(40, {}));
  const std::size_t n = 100000;
  const auto mo = moments(n, [&] { return sample_poisson(4.0, s); });
  CHECK(std::abs(mo.mean - 4.0) <= 3.0 * std::sqrt(4.0 / n));
  // Var(s^2) ~ (mu4 - sigma^4) / n with mu4 = lambda (1 + 3 lambda).
  CHECK(std::abs(mo.var - 4.0) <= 3.0 * std::sqrt((4.0 + 2.0 * 16.0) / n));
}

TEST_CASE("Poisson moments across both sampler regimes, 4-sigma") {
  for (double lambda : {0.5, 4.0, 9.99, 10.0, 50.0, 1e4}) {
    CAPTURE(lambda);
    Stream s = derive_stream(SeedPath(5, {static_cast<std::uint64_t>(lambda * 100)}));
    const std::size_t n = 100000;
    const auto mo = moments(n, [&] { return sample_poisson(lambda, s); });
    CHECK(std::abs(mo.mean - lambda) <= 4.0 * std::sqrt(lambda / n));
    CHECK(std::abs(mo.var - lambda) <= 4.0 * std::sqrt((lambda + 2.0 * lambda * lambda) / n));
  }
}

TEST_CASE("Poisson pmf at small support points") {
  // Frequencies of k = 0..3 against e^-l l^k / k!, 4-sigma binomial bands.
  for (double lambda : {2.0, 12.0}) {
    Stream s = derive_stream(SeedPath(6, {static_cast<std::uint64_t>(lambda)}));
    const std::size_t n = 200000;
    std::vector<double> counts(40, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double k = sample_poisson(lambda, s);
      REQUIRE(k == std::floor(k));
      if (k < 40) counts[static_cast<std::size_t>(k)] += 1.0;
    }
    double pmf = std::exp(-lambda);
    for (std::size_t k = 0; k < 25; ++k) {
      if (k > 0) pmf *= lambda / k;
      const double sd = std::sqrt(pmf * (1 - pmf) / n);
      CAPTURE(lambda);
      CAPTURE(k);
      CHECK(std::abs(counts[k] / n - pmf) <= 4.0 * sd + 1e-6);
    }
  }
}

TEST_CASE("Gamma(1, s) is exponential with mean s") {
  Stream st = derive_stream(SeedPath(7, {}));
  const double s = 2.5;
  const std::size_t n = 100000;
  const auto mo = moments(n, [&] { return sample_gamma(1.0, s, st); });
  CHECK(std::abs(mo.mean - s) <= 3.0 * s / std::sqrt(n));
}

TEST_CASE("Gamma(10, 0.1) has mean 1") {
  Stream st = derive_stream(SeedPath(8, {}));
  const std::size_t n = 100000;
  const auto mo = moments(n, [&] { return sample_gamma(10.0, 0.1, st); });
  const double sd = std::sqrt(10.0 * 0.01);
  CHECK(std::abs(mo.mean - 1.0) <= 3.0 * sd / std::sqrt(n));
}

TEST_CASE("Gamma moments including the small-shape boost") {
  for (double shape : {0.05, 0.3, 0.999, 1.0, 3.7, 500.0}) {
    CAPTURE(shape);
    Stream st = derive_stream(SeedPath(9, {static_cast<std::uint64_t>(shape * 1000)}));
    const double scale = 2.0;
    const std::size_t n = 100000;
    const auto mo = moments(n, [&] {
      const double g = sample_gamma(shape, scale, st);
      REQUIRE(g >= 0.0);
      return g;
    });
    const double mean = shape * scale;
    const double var = shape * scale * scale;
    CHECK(std::abs(mo.mean - mean) <= 4.0 * std::sqrt(var / n));
    // Var(s^2) = (mu4 - sigma^4)/n, mu4 = 3 a (a + 2) scale^4 for Gamma.
    const double mu4 = 3.0 * shape * (shape + 2.0) * std::pow(scale, 4);
    CHECK(std::abs(mo.var - var) <= 4.0 * std::sqrt((mu4 - var * var) / n));
  }
}

TEST_CASE("Gamma rejects non-positive parameters") {
  Stream st(1);
  CHECK_THROWS_AS(sample_gamma(0.0, 1.0, st), DomainError);
  CHECK_THROWS_AS(sample_gamma(1.0, 0.0, st), DomainError);
  CHECK_THROWS_AS(sample_gamma(-1.0, 1.0, st), DomainError);
  CHECK_THROWS_AS(sample_gamma_matrix(2, 2, 1.0, -1.0, st), DomainError);
}

TEST_CASE("standard normal moments") {
  Stream st = derive_stream(SeedPath(10, {}));
  const std::size_t n = 100000;
  const auto mo = moments(n, [&] { return st.standard_normal(); });
  CHECK(std::abs(mo.mean) <= 4.0 / std::sqrt(n));
  CHECK(std::abs(mo.var - 1.0) <= 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("violation spec validation and parsing") {
  CHECK(parse_violation_spec("poisson") == ViolationSpec::poisson());
  CHECK(parse_violation_spec("gamma") == ViolationSpec::gamma());
  CHECK(parse_violation_spec("normal") == ViolationSpec::normal());
  CHECK(parse_violation_spec("zip") == ViolationSpec::zip(0.5));
  CHECK(parse_violation_spec("zip:0.25") == ViolationSpec::zip(0.25));
  CHECK(ViolationSpec::zip(0.25).name() == "zip:0.25");
  CHECK_THROWS_AS(parse_violation_spec("zip:1.5"), DomainError);
  CHECK_THROWS_AS(parse_violation_spec("zip:abc"), DomainError);
  CHECK_THROWS_AS(parse_violation_spec("cauchy"), DomainError);

  ViolationSpec bad{ViolationKind::zip, std::nullopt};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  ViolationSpec stray{ViolationKind::gamma, 0.5};
  CHECK_THROWS_AS(stray.validate(), DomainError);
}

TEST_CASE("zip with p = 1 is all zero; zip with p = 0 is exactly Poisson") {
  const RateMatrix rates(2, 3, {1, 5, 20, 100, 0, 3});
  Stream a(3);
  CHECK(sample_violation_matrix(rates, ViolationSpec::zip(1.0), a).all_zero());
  Stream b(4), c(4);
  CHECK(sample_violation_matrix(rates, ViolationSpec::zip(0.0), b) ==
        sample_violation_matrix(rates, ViolationSpec::poisson(), c));
}

TEST_CASE("violation draws are never negative") {
  std::vector<double> r(400);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.01 * static_cast<double>(i * i % 997);
  const RateMatrix rates(20, 20, r);
  for (auto params : {ViolationParameters::all_equal_rate, ViolationParameters::moment_matched}) {
    for (auto spec : {ViolationSpec::gamma(params), ViolationSpec::normal(params),
                      ViolationSpec::zip(0.3), ViolationSpec::poisson()}) {
      Stream s = derive_stream(SeedPath(12, {static_cast<std::uint64_t>(spec.kind)}));
      for (int rep = 0; rep < 20; ++rep) {
        const auto x = sample_violation_matrix(rates, spec, s);
        for (double v : x.entries()) REQUIRE(v >= 0.0);
      }
    }
  }
}

TEST_CASE("zip zero mass is p + (1 - p) e^-lambda") {
  const double p = 0.5, lambda = 4.0;
  const std::size_t n = 100000;
  const RateMatrix rates(1, n, std::vector<double>(n, lambda));
  Stream s = derive_stream(SeedPath(13, {}));
  const auto x = sample_violation_matrix(rates, ViolationSpec::zip(p), s);
  double zeros = 0.0;
  for (double v : x.entries()) zeros += v == 0.0;
  const double expect = p + (1 - p) * std::exp(-lambda);
  CHECK(std::abs(zeros / n - expect) <= 3.0 * std::sqrt(expect * (1 - expect) / n));
}

TEST_CASE("violation means follow their parameterization") {
  const std::size_t n = 100000;
  const double rate = 6.0;
  const RateMatrix rates(1, n, std::vector<double>(n, rate));
  auto sample_moments = [&](ViolationSpec spec, std::uint64_t seed) {
    Stream s(seed);
    const auto x = sample_violation_matrix(rates, spec, s);
    return moments(n, [&, k = std::size_t{0}]() mutable { return x.entries()[k++]; });
  };
  // Shape = scale = rate: mean rate^2, variance rate^3.
  const auto g = sample_moments(ViolationSpec::gamma(), 1);
  CHECK(std::abs(g.mean - rate * rate) <= 4.0 * std::sqrt(rate * rate * rate / n));
  // Shape = rate, scale = 1: mean = variance = rate.
  const auto gm = sample_moments(ViolationSpec::gamma(ViolationParameters::moment_matched), 2);
  CHECK(std::abs(gm.mean - rate) <= 4.0 * std::sqrt(rate / n));
  CHECK(std::abs(gm.var - rate) <= 0.05 * rate);
  // Normal(rate, sqrt(rate)) hardly ever truncates at rate 6.
  const auto nm = sample_moments(ViolationSpec::normal(ViolationParameters::moment_matched), 3);
  CHECK(std::abs(nm.mean - rate) <= 4.0 * std::sqrt(rate / n));
  // Normal(rate, rate) truncated at zero: E = mu Phi(1) + sigma phi(1) with mu = sigma.
  const auto nt = sample_moments(ViolationSpec::normal(), 4);
  const double phi1 = std::exp(-0.5) / std::sqrt(2.0 * M_PI);
  const double cdf1 = 0.5 * std::erfc(-1.0 / std::sqrt(2.0));
  CHECK(std::abs(nt.mean - rate * (cdf1 + phi1)) <= 4.0 * rate / std::sqrt(n));
}

TEST_CASE("2x2 Poisson draw regression") {
  const RateMatrix rates(2, 2, {0.5, 4.0, 20.0, 300.0});
  Stream s = derive_stream(SeedPath(2024, {1, 2}));
  const auto x = sample_poisson_matrix(rates, s);
  // Recorded from the serial implementation; changes here break every golden.
  CHECK(x == CountMatrix(2, 2, {2, 5, 18, 296}));
}
