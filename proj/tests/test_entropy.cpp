#include <doctest.h>

#include <cmath>
#include <random>

#include "tcm/entropy.hpp"
#include "tcm/errors.hpp"
#include "test_util.hpp"

using namespace tcm;
using testutil::random_grid;

TEST_CASE("quantize rounds half away from zero") {
  Grid g(1, 1, 6);
  g.values = {0.4f, -0.4f, 1.5f, -1.5f, 2.5f, -0.5f};
  Grid q = quantize(g);
  CHECK(q.values[0] == 0.0f);
  CHECK(q.values[1] == 0.0f);
  CHECK(q.values[2] == 2.0f);
  CHECK(q.values[3] == -2.0f);
  CHECK(q.values[4] == 3.0f);
  CHECK(q.values[5] == -1.0f);
}

TEST_CASE("quantize with mean codes integer offsets") {
  Grid y(1, 1, 1);
  y.values = {3.2f};
  Grid mu(1, 1, 1);
  mu.values = {0.7f};
  Grid q = quantize(y, mu);
  // round(3.2 - 0.7) + 0.7 = round(2.5) + 0.7 = 3.7
  CHECK(q.values[0] == doctest::Approx(3.7).epsilon(1e-6));
  const auto syms = quantize_offset_symbols(y, mu);
  CHECK(syms[0] == 3);
}

TEST_CASE("quantize rejects non-finite input") {
  Grid g(1, 1, 1);
  g.values = {std::numeric_limits<float>::quiet_NaN()};
  CHECK_THROWS_AS(quantize(g), NumericError);
}

TEST_CASE("laplace bin probability closed form at the mean") {
  // CDF(0.5) - CDF(-0.5) for Laplace(0,1) = 1 - e^-0.5
  const double want = 1.0 - std::exp(-0.5);
  CHECK(laplace_bin_probability(0, 0.0, 1.0) ==
        doctest::Approx(want).epsilon(1e-9));
  CHECK(laplace_bin_probability(5, 5.0, 1.0) ==
        doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("laplace bin probabilities are symmetric about the mean") {
  for (int k = 1; k <= 10; ++k) {
    CHECK(laplace_bin_probability(k, 0.0, 1.3) ==
          doctest::Approx(laplace_bin_probability(-k, 0.0, 1.3))
              .epsilon(1e-12));
  }
}

TEST_CASE("laplace bin masses sum to one over a wide range") {
  double sum = 0.0;
  for (int s = -30; s <= 30; ++s) sum += laplace_bin_mass(s, 0.0, 1.0);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("laplace probability clamps at the floor values") {
  // far tail falls below 2^-16 and gets clamped
  CHECK(laplace_bin_probability(40, 0.0, 1.0) == kMinProb);
  // scale below the floor behaves like the floor, not an error
  CHECK(laplace_bin_probability(0, 0.0, 0.01) ==
        doctest::Approx(laplace_bin_probability(0, 0.0, kScaleFloor)));
}

TEST_CASE("estimate_rate_bits closed forms") {
  // solve 1 - e^(-1/(2b)) = 0.5  =>  b = 1/(2 ln 2)
  const double b_half = 1.0 / (2.0 * std::log(2.0));
  Grid sym(1, 1, 1, 0.0f);
  EntropyParameters p;
  p.mean = Grid(1, 1, 1, 0.0f);
  p.scale = Grid(1, 1, 1, static_cast<float>(b_half));
  CHECK(estimate_rate_bits(sym, p) == doctest::Approx(1.0).epsilon(1e-6));

  // two independent symbols, p = 0.25 each -> 4 bits total
  const double b_quarter = -1.0 / (2.0 * std::log(0.75));
  Grid sym2(1, 1, 2, 0.0f);
  EntropyParameters p2;
  p2.mean = Grid(1, 1, 2, 0.0f);
  p2.scale = Grid(1, 1, 2, static_cast<float>(b_quarter));
  CHECK(estimate_rate_bits(sym2, p2) == doctest::Approx(4.0).epsilon(1e-5));
}

TEST_CASE("estimate_rate_bits matches an independent scalar oracle") {
  std::mt19937 rng(21);
  Grid latent = random_grid(rng, 8, 4, 4, -6.0f, 6.0f);
  EntropyParameters p;
  p.mean = random_grid(rng, 8, 4, 4, -1.0f, 1.0f);
  p.scale = random_grid(rng, 8, 4, 4, 0.2f, 2.5f);
  for (auto& s : p.scale.values) s = std::max(s, 0.11f);
  Grid q = quantize(latent, p.mean);

  double want = 0.0;
  for (size_t i = 0; i < q.values.size(); ++i) {
    const int sym = static_cast<int>(
        std::round(static_cast<double>(q.values[i]) - p.mean.values[i]));
    const double b = p.scale.values[i];
    auto cdf = [&](double x) {
      return x < 0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
    };
    const double prob = std::max(cdf(sym + 0.5) - cdf(sym - 0.5), kMinProb);
    want -= std::log2(prob);
  }
  const double got = estimate_rate_bits(q, p);
  CHECK(got == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("cdf table construction invariants") {
  CdfTable t = build_cdf_table(0.0, 1.0, -8, 8);
  t.validate();
  CHECK(t.cum.front() == 0);
  CHECK(t.cum.back() == kCdfTotal);
  for (size_t i = 1; i < t.cum.size(); ++i) CHECK(t.cum[i] > t.cum[i - 1]);
}

TEST_CASE("cdf table frequencies match analytic probabilities") {
  std::mt19937 rng(22);
  std::uniform_real_distribution<double> mu_d(-2.0, 2.0), b_d(0.2, 3.0);
  for (int iter = 0; iter < 50; ++iter) {
    const double mu = mu_d(rng), b = std::max(b_d(rng), kScaleFloor);
    // range wide enough that the folded tails stay below the tolerance
    const int s_min = static_cast<int>(std::floor(mu - 14 * b)) - 1;
    const int s_max = static_cast<int>(std::ceil(mu + 14 * b)) + 1;
    CdfTable t = build_cdf_table(mu, b, s_min, s_max);
    for (int s = s_min; s <= s_max; ++s) {
      const double got = static_cast<double>(t.freq(s)) / kCdfTotal;
      const double want = laplace_bin_mass(s, mu, b);
      CHECK(std::fabs(got - want) <= std::pow(2.0, -15));
    }
  }
}

TEST_CASE("cdf table handles the degenerate floor scale") {
  CdfTable t = build_cdf_table(0.0, kScaleFloor, -50, 50);
  t.validate();
  // sharply peaked but every bin still has mass
  CHECK(t.freq(0) > 60000);
  CHECK(t.freq(37) >= 1);
}

TEST_CASE("cdf table rejects impossible ranges") {
  CHECK_THROWS_AS(build_cdf_table(0.0, 1.0, 5, 5), ConfigError);
  CHECK_THROWS_AS(build_cdf_table(0.0, 1.0, -40000, 40000), ConfigError);
}

TEST_CASE("factorized prior gives identical tables per channel") {
  std::vector<float> loc = {0.0f, 0.5f, -0.3f};
  std::vector<float> scale = {1.0f, 0.8f, 1.7f};
  const auto tables = factorized_prior_tables(loc, scale, -12, 12);
  const auto again = factorized_prior_tables(loc, scale, -12, 12);
  REQUIRE(tables.size() == 3);
  for (size_t c = 0; c < 3; ++c) CHECK(tables[c].cum == again[c].cum);
}

TEST_CASE("compute_symbol_range widens by one and guards i16") {
  std::vector<int32_t> syms = {-3, 0, 7};
  int lo = 0, hi = 0;
  compute_symbol_range(syms, lo, hi);
  CHECK(lo == -4);
  CHECK(hi == 8);
  std::vector<int32_t> big = {40000};
  CHECK_THROWS_AS(compute_symbol_range(big, lo, hi), EncodeError);
}
