#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tcm/errors.hpp"
#include "tcm/kernels.hpp"
#include "test_util.hpp"

using namespace tcm;
using testutil::random_grid;
using testutil::randomize_conv;
using testutil::randomize_res;

TEST_CASE("conv2d identity 1x1 kernel") {
  std::mt19937 rng(1);
  Grid in = random_grid(rng, 3, 5, 7);
  ConvSpec s = make_conv(1, 3, 3, 1, Activation::none);
  for (int c = 0; c < 3; ++c) s.weights[c * 3 + c] = 1.0f;
  Grid out = conv2d(in, s);
  CHECK(bit_equal(out, in));
}

TEST_CASE("conv2d all-ones 3x3 on constant image") {
  Grid in(2, 6, 6, 0.5f);
  ConvSpec s = make_conv(3, 2, 1, 1, Activation::none);
  for (auto& w : s.weights) w = 1.0f;
  Grid out = conv2d(in, s);
  // interior pixel sums 9 taps over 2 channels
  CHECK(out.at(0, 3, 3) == doctest::Approx(9.0 * 0.5 * 2).epsilon(1e-6));
  // corner only sees 4 taps per channel
  CHECK(out.at(0, 0, 0) == doctest::Approx(4.0 * 0.5 * 2).epsilon(1e-6));
}

TEST_CASE("conv2d stride-2 shape") {
  std::mt19937 rng(2);
  Grid in = random_grid(rng, 4, 8, 8);
  ConvSpec s = make_conv(3, 4, 6, 2, Activation::none);
  Grid out = conv2d(in, s);
  CHECK(out.channels == 6);
  CHECK(out.height == 4);
  CHECK(out.width == 4);
  // odd dims round up
  Grid in2 = random_grid(rng, 4, 7, 5);
  Grid out2 = conv2d(in2, s);
  CHECK(out2.height == 4);
  CHECK(out2.width == 3);
}

TEST_CASE("conv2d matches brute-force oracle on random cases") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> ch(1, 9), sz(1, 17), kk(0, 2), st(1, 2);
  for (int iter = 0; iter < 40; ++iter) {
    const int kernel = 2 * kk(rng) + 1;
    const int cin = ch(rng), cout = ch(rng);
    const int h = sz(rng), w = sz(rng);
    const int stride = st(rng);
    const auto act = (iter % 2 == 0) ? Activation::leaky : Activation::none;
    ConvSpec s = make_conv(kernel, cin, cout, stride, act);
    randomize_conv(rng, s, 0.5f);
    Grid in = random_grid(rng, cin, h, w, -2.0f, 2.0f);
    Grid got = conv2d(in, s);
    Grid want = oracle::conv2d(in, s);
    CHECK(got.same_shape(want));
    CHECK(oracle::max_abs_diff(got, want) < 1e-5);
  }
}

TEST_CASE("conv2d is linear for activation none and zero bias") {
  std::mt19937 rng(4);
  ConvSpec s = make_conv(3, 3, 4, 1, Activation::none);
  randomize_conv(rng, s, 0.4f);
  for (auto& b : s.bias) b = 0.0f;
  Grid x = random_grid(rng, 3, 9, 9);
  Grid y = random_grid(rng, 3, 9, 9);
  const float a = 0.7f, b = -1.3f;
  Grid combo(3, 9, 9);
  for (size_t i = 0; i < combo.values.size(); ++i)
    combo.values[i] = a * x.values[i] + b * y.values[i];
  Grid lhs = conv2d(combo, s);
  Grid cx = conv2d(x, s), cy = conv2d(y, s);
  for (size_t i = 0; i < lhs.values.size(); ++i) {
    const double want = a * static_cast<double>(cx.values[i]) +
                        b * static_cast<double>(cy.values[i]);
    CHECK(lhs.values[i] == doctest::Approx(want).epsilon(1e-5));
  }
}

TEST_CASE("conv2d rejects bad configs") {
  Grid in(3, 4, 4, 0.0f);
  ConvSpec s = make_conv(3, 4, 2, 1, Activation::none);
  CHECK_THROWS_AS(conv2d(in, s), ConfigError);  // channel mismatch
  ConvSpec even = make_conv(3, 3, 2, 1, Activation::none);
  even.kernel = 2;
  CHECK_THROWS_AS(conv2d(in, even), ConfigError);
  ConvSpec stride3 = make_conv(3, 3, 2, 1, Activation::none);
  stride3.stride = 3;
  CHECK_THROWS_AS(conv2d(in, stride3), ConfigError);
}

TEST_CASE("pixel_shuffle_up 4x1x1 example") {
  Grid in(4, 1, 1);
  in.values = {1.0f, 2.0f, 3.0f, 4.0f};  // a b c d
  Grid out = pixel_shuffle_up(in);
  CHECK(out.channels == 1);
  CHECK(out.height == 2);
  CHECK(out.width == 2);
  CHECK(out.at(0, 0, 0) == 1.0f);
  CHECK(out.at(0, 0, 1) == 2.0f);
  CHECK(out.at(0, 1, 0) == 3.0f);
  CHECK(out.at(0, 1, 1) == 4.0f);
}

TEST_CASE("pixel_shuffle_up shape and value preservation") {
  std::mt19937 rng(5);
  Grid in = random_grid(rng, 8, 3, 5);
  Grid out = pixel_shuffle_up(in);
  CHECK(out.channels == 2);
  CHECK(out.height == 6);
  CHECK(out.width == 10);
  // bijection: sorted multisets match
  auto a = in.values, b = out.values;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK(bit_equal(out, oracle::pixel_shuffle_up(in)));

  Grid bad(6, 3, 5, 0.0f);
  CHECK_THROWS_AS(pixel_shuffle_up(bad), ConfigError);
}

TEST_CASE("bilinear_warp zero flow is the identity") {
  std::mt19937 rng(6);
  Grid src = random_grid(rng, 3, 8, 9);
  Grid flow(2, 8, 9, 0.0f);
  CHECK(bit_equal(bilinear_warp(src, flow), src));
}

TEST_CASE("bilinear_warp integer shift with edge clamp") {
  std::mt19937 rng(7);
  Grid src = random_grid(rng, 1, 4, 6);
  Grid flow(2, 4, 6, 0.0f);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x) flow.at(1, y, x) = 1.0f;  // dx = 1
  Grid out = bilinear_warp(src, flow);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x)
      CHECK(out.at(0, y, x) == doctest::Approx(src.at(0, y, x + 1)));
    CHECK(out.at(0, y, 5) == doctest::Approx(src.at(0, y, 5)));  // clamped
  }
}

TEST_CASE("bilinear_warp half-pixel flow averages neighbours") {
  std::mt19937 rng(8);
  Grid src = random_grid(rng, 1, 5, 5);
  Grid flow(2, 5, 5, 0.0f);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) flow.at(1, y, x) = 0.5f;
  Grid out = bilinear_warp(src, flow);
  const double want = 0.5 * (src.at(0, 2, 2) + src.at(0, 2, 3));
  CHECK(out.at(0, 2, 2) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("bilinear_warp keeps constants constant under any flow") {
  std::mt19937 rng(9);
  Grid src(4, 7, 7, 0.37f);
  Grid flow = random_grid(rng, 2, 7, 7, -20.0f, 20.0f);
  Grid out = bilinear_warp(src, flow);
  for (float v : out.values) CHECK(v == 0.37f);
}

TEST_CASE("bilinear_warp matches oracle on random flows") {
  std::mt19937 rng(10);
  for (int iter = 0; iter < 25; ++iter) {
    Grid src = random_grid(rng, 2, 6, 8, -3.0f, 3.0f);
    Grid flow = random_grid(rng, 2, 6, 8, -4.0f, 4.0f);
    Grid got = bilinear_warp(src, flow);
    CHECK(oracle::max_abs_diff(got, oracle::bilinear_warp(src, flow)) < 1e-5);
  }
  Grid src(1, 4, 4, 0.0f);
  Grid flow(2, 5, 4, 0.0f);
  CHECK_THROWS_AS(bilinear_warp(src, flow), ConfigError);
}

TEST_CASE("bilinear_downsample examples") {
  Grid in(1, 2, 2);
  in.values = {1.0f, 3.0f, 5.0f, 7.0f};
  Grid out = bilinear_downsample(in);
  CHECK(out.channels == 1);
  CHECK(out.height == 1);
  CHECK(out.width == 1);
  CHECK(out.values[0] == 4.0f);

  Grid constant(3, 8, 6, 0.25f);
  Grid dc = bilinear_downsample(constant);
  CHECK(dc.height == 4);
  CHECK(dc.width == 3);
  for (float v : dc.values) CHECK(v == 0.25f);

  Grid odd(1, 3, 4, 0.0f);
  CHECK_THROWS_AS(bilinear_downsample(odd), ConfigError);

  std::mt19937 rng(11);
  Grid r = random_grid(rng, 3, 10, 6);
  CHECK(oracle::max_abs_diff(bilinear_downsample(r),
                             oracle::bilinear_downsample(r)) < 1e-6);
}

TEST_CASE("residual_forward zero weights is the identity") {
  std::mt19937 rng(12);
  Grid in = random_grid(rng, 5, 6, 6);
  ResidualBlockSpec s = make_residual_block(5);
  Grid out = residual_forward(in, s);
  CHECK(bit_equal(out, in));
}

TEST_CASE("residual_forward equals manual composition") {
  std::mt19937 rng(13);
  for (int iter = 0; iter < 10; ++iter) {
    ResidualBlockSpec s = make_residual_block(4);
    randomize_res(rng, s);
    Grid in = random_grid(rng, 4, 7, 5);
    Grid got = residual_forward(in, s);
    CHECK(oracle::max_abs_diff(got, oracle::residual_forward(in, s)) < 1e-5);
  }
}

TEST_CASE("bottleneck block keeps shape and validates widths") {
  std::mt19937 rng(14);
  ResidualBlockSpec s = make_bottleneck_block(64, 32);
  randomize_res(rng, s, 0.05f);
  Grid in = random_grid(rng, 64, 8, 8);
  Grid out = residual_forward(in, s);
  CHECK(out.channels == 64);
  CHECK(out.height == 8);
  CHECK(out.width == 8);
  CHECK_THROWS_AS(make_bottleneck_block(16, 16), ConfigError);
  CHECK_THROWS_AS(make_bottleneck_block(16, 24), ConfigError);
}

TEST_CASE("kernels are deterministic across repeated runs") {
  std::mt19937 rng(15);
  ConvSpec s = make_conv(3, 6, 6, 1, Activation::leaky);
  randomize_conv(rng, s);
  Grid in = random_grid(rng, 6, 12, 12);
  CHECK(bit_equal(conv2d(in, s), conv2d(in, s)));
  Grid flow = random_grid(rng, 2, 12, 12, -3.0f, 3.0f);
  CHECK(bit_equal(bilinear_warp(in, flow), bilinear_warp(in, flow)));
}
