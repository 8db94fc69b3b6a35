#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "msssim_reference.hpp"
#include "tcm/errors.hpp"
#include "tcm/metrics.hpp"
#include "test_util.hpp"

using namespace tcm;
using testutil::random_grid;

TEST_CASE("psnr closed forms") {
  // identical frames -> infinity sentinel
  Grid a(3, 8, 8, 0.5f);
  CHECK(std::isinf(psnr(a, a)));

  // MSE 0.01 at peak 1 -> exactly 20 dB
  CHECK(std::fabs(psnr_from_mse(0.01, 1.0) - 20.0) < 1e-9);
  // MSE 1 at peak 255 -> 48.1308 dB
  CHECK(std::fabs(psnr_from_mse(1.0, 255.0) - 20.0 * std::log10(255.0)) <
        1e-9);
  CHECK(psnr_from_mse(1.0, 255.0) == doctest::Approx(48.1308).epsilon(1e-4));

  // frame-level: a diff of exactly 0.125 gives MSE 0.015625 exactly
  Grid b = a;
  for (auto& v : b.values) v += 0.125f;
  CHECK(mse(a, b) == 0.015625);
  CHECK(std::fabs(psnr(a, b) - 60.0 * std::log10(2.0)) < 1e-9);

  Grid d(3, 8, 9, 0.0f);
  CHECK_THROWS_AS(psnr(a, d), ConfigError);
}

TEST_CASE("psnr and ms_ssim are symmetric") {
  std::mt19937 rng(41);
  Grid a = random_grid(rng, 3, 32, 32, 0.0f, 1.0f);
  Grid b = random_grid(rng, 3, 32, 32, 0.0f, 1.0f);
  CHECK(psnr(a, b) == psnr(b, a));
  CHECK(ms_ssim(a, b) == ms_ssim(b, a));
}

TEST_CASE("ms_ssim of identical frames is exactly one") {
  std::mt19937 rng(42);
  Grid a = random_grid(rng, 3, 64, 64, 0.0f, 1.0f);
  CHECK(ms_ssim(a, a) == 1.0);
}

TEST_CASE("ms_ssim is below one for differing frames") {
  std::mt19937 rng(43);
  Grid a = random_grid(rng, 1, 48, 48, 0.0f, 1.0f);
  Grid b = a;
  b.values[100] += 0.25f;
  CHECK(ms_ssim(a, b) < 1.0);
}

TEST_CASE("ms_ssim matches the direct reference implementation") {
  std::mt19937 rng(44);
  for (int iter = 0; iter < 4; ++iter) {
    Grid a = random_grid(rng, 3, 96, 96, 0.0f, 1.0f);
    Grid b = a;
    std::uniform_real_distribution<float> noise(-0.1f, 0.1f);
    for (auto& v : b.values)
      v = std::clamp(v + noise(rng), 0.0f, 1.0f);
    const double got = ms_ssim(a, b);
    const double want = reference::ms_ssim(a, b);
    CHECK(got == doctest::Approx(want).epsilon(1e-4));
  }
}

TEST_CASE("ms_ssim rejects tiny images") {
  Grid a(1, 8, 8, 0.5f);
  CHECK_THROWS_AS(ms_ssim(a, a), EvalError);
}

TEST_CASE("rd_loss arithmetic") {
  // lambda 256, D = 0.01, rate 0.1 bpp over 1 pixel -> 2.56 + 0.1
  CHECK(rd_loss(0.01, 0.04, 0.06, 256.0, 1) ==
        doctest::Approx(2.66).epsilon(1e-12));
  CHECK(rd_loss(0.0, 0.0, 0.0, 1024.0, 100) == 0.0);
  // doubling lambda doubles the distortion term exactly
  const double base = rd_loss(0.02, 50.0, 70.0, 300.0, 1000);
  const double doubled = rd_loss(0.02, 50.0, 70.0, 600.0, 1000);
  CHECK(doubled - base == doctest::Approx(300.0 * 0.02).epsilon(1e-12));
  // monotone in each argument
  CHECK(rd_loss(0.03, 50.0, 70.0, 300.0, 1000) > base);
  CHECK(rd_loss(0.02, 51.0, 70.0, 300.0, 1000) > base);
  CHECK(rd_loss(0.02, 50.0, 71.0, 300.0, 1000) > base);
}

TEST_CASE("cascaded_loss is the mean over exactly T frames") {
  CHECK(cascaded_loss({1.0, 2.0, 3.0, 4.0}, 4) == doctest::Approx(2.5));
  CHECK(cascaded_loss({7.5}, 1) == 7.5);
  CHECK(cascaded_loss({3.0, 3.0, 3.0}, 3) == 3.0);
  CHECK_THROWS_AS(cascaded_loss({1.0, 2.0}, 4), ConfigError);
}

TEST_CASE("bpp arithmetic") {
  CHECK(bpp(8000, 100, 80, 1) == doctest::Approx(1.0));
  CHECK(bpp(0, 64, 64, 4) == 0.0);
  CHECK(bpp(1000, 10, 10, 2) == doctest::Approx(bpp(1000, 10, 10, 1) / 2));
}

namespace {
RdCurve synthetic_curve(double rate_factor) {
  // plausible PSNR-vs-rate shape
  RdCurve c;
  for (double r : {0.05, 0.1, 0.2, 0.4, 0.8})
    c.points.push_back({r * rate_factor, 30.0 + 8.0 * std::log2(r / 0.05)});
  return c;
}
}  // namespace

TEST_CASE("bd_rate closed forms") {
  const RdCurve anchor = synthetic_curve(1.0);
  CHECK(bd_rate(anchor, anchor) == 0.0);

  const RdCurve twice = synthetic_curve(2.0);
  CHECK(bd_rate(twice, anchor) == doctest::Approx(100.0).epsilon(1e-3));

  const RdCurve half = synthetic_curve(0.5);
  CHECK(bd_rate(half, anchor) == doctest::Approx(-50.0).epsilon(1e-3));
}

TEST_CASE("bd_rate anti-symmetry on closed-form curves") {
  const RdCurve anchor = synthetic_curve(1.0);
  const RdCurve test = synthetic_curve(1.35);
  const double fwd = bd_rate(test, anchor);
  const double bwd = bd_rate(anchor, test);
  CHECK(fwd == doctest::Approx(-bwd / (1.0 + bwd / 100.0)).epsilon(1e-3));
}

TEST_CASE("bd_rate validates its inputs") {
  RdCurve anchor = synthetic_curve(1.0);
  RdCurve three;
  three.points = {anchor.points[0], anchor.points[1], anchor.points[2]};
  CHECK_THROWS_AS(bd_rate(three, anchor), EvalError);

  RdCurve disjoint;
  for (double r : {0.05, 0.1, 0.2, 0.4})
    disjoint.points.push_back({r, 300.0 + r});
  CHECK_THROWS_AS(bd_rate(disjoint, anchor), EvalError);

  RdCurve unsorted = anchor;
  std::swap(unsorted.points[0], unsorted.points[1]);
  CHECK_THROWS_AS(bd_rate(unsorted, anchor), EvalError);
}

TEST_CASE("rd curve csv round trip") {
  const RdCurve c = synthetic_curve(1.0);
  const char* path = "rd_curve_test.csv";
  save_rd_curve_csv(c, path);
  const RdCurve back = load_rd_curve_csv(path);
  REQUIRE(back.points.size() == c.points.size());
  for (size_t i = 0; i < c.points.size(); ++i) {
    CHECK(back.points[i].rate == doctest::Approx(c.points[i].rate));
    CHECK(back.points[i].quality == doctest::Approx(c.points[i].quality));
  }
  std::remove(path);
}
