#include <doctest.h>

#include <cmath>
#include <random>

#include "tcm/entropy.hpp"
#include "tcm/errors.hpp"
#include "tcm/range_coder.hpp"

using namespace tcm;

namespace {

CdfTable uniform_table(int s_min, int s_max) {
  const int bins = s_max - s_min + 1;
  CdfTable t;
  t.s_min = s_min;
  t.s_max = s_max;
  t.cum.resize(bins + 1);
  for (int i = 0; i <= bins; ++i)
    t.cum[i] = static_cast<uint32_t>(
        (static_cast<uint64_t>(kCdfTotal) * i) / bins);
  t.validate();
  return t;
}

std::vector<int32_t> random_symbols(std::mt19937& rng, const CdfTable& t,
                                    size_t n) {
  std::uniform_int_distribution<int> d(t.s_min, t.s_max);
  std::vector<int32_t> s(n);
  for (auto& v : s) v = d(rng);
  return s;
}

}  // namespace

TEST_CASE("range coder round-trips random symbols over random tables") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> mu(-5.0, 5.0), b(0.11, 4.0);
  std::uniform_int_distribution<int> n_d(0, 4000);
  for (int iter = 0; iter < 20; ++iter) {
    CdfTable t = build_cdf_table(mu(rng), b(rng), -24, 24);
    const auto symbols = random_symbols(rng, t, n_d(rng));
    const Payload p = range_encode(symbols, t);
    CHECK(p.symbol_count == symbols.size());
    CHECK(range_decode(p, t) == symbols);
  }
}

TEST_CASE("range coder round-trips with per-symbol tables") {
  std::mt19937 rng(32);
  std::uniform_real_distribution<double> mu(-3.0, 3.0), b(0.11, 2.0);
  std::vector<CdfTable> tables;
  for (int i = 0; i < 100; ++i)
    tables.push_back(build_cdf_table(mu(rng), b(rng), -16, 16));
  std::vector<int32_t> symbols;
  std::uniform_int_distribution<int> d(-16, 16);
  for (int i = 0; i < 5000; ++i) symbols.push_back(d(rng));
  auto at = [&](size_t i) -> const CdfTable& { return tables[i % 100]; };
  const Payload p = range_encode_with(symbols, at);
  CHECK(range_decode_with(p, at) == symbols);
}

TEST_CASE("empty symbol sequence flushes to a tiny payload") {
  RangeEncoder enc;
  const Payload p = enc.finish();
  CHECK(p.symbol_count == 0);
  CHECK(p.bytes.size() <= 8);
}

TEST_CASE("uniform 256-symbol alphabet codes at 8 bits per symbol") {
  std::mt19937 rng(33);
  CdfTable t = uniform_table(0, 255);
  const auto symbols = random_symbols(rng, t, 1000);
  const Payload p = range_encode(symbols, t);
  CHECK(p.bytes.size() >= 1000 - 8);
  CHECK(p.bytes.size() <= 1000 + 8);
  CHECK(range_decode(p, t) == symbols);
}

TEST_CASE("payload bytes are deterministic across runs") {
  std::mt19937 rng(34);
  CdfTable t = build_cdf_table(0.3, 1.2, -20, 20);
  const auto symbols = random_symbols(rng, t, 2000);
  const Payload a = range_encode(symbols, t);
  const Payload b = range_encode(symbols, t);
  CHECK(a.bytes == b.bytes);
}

TEST_CASE("truncated payload raises a decode error") {
  std::mt19937 rng(35);
  CdfTable t = build_cdf_table(0.0, 0.8, -12, 12);
  const auto symbols = random_symbols(rng, t, 500);
  Payload p = range_encode(symbols, t);
  p.bytes.resize(p.bytes.size() / 2);
  CHECK_THROWS_AS(range_decode(p, t), DecodeError);
}

TEST_CASE("out-of-range symbol is an encode error") {
  CdfTable t = build_cdf_table(0.0, 1.0, -4, 4);
  RangeEncoder enc;
  CHECK_THROWS_AS(enc.encode(5, t), EncodeError);
}

TEST_CASE("payload length tracks the table-based estimate") {
  std::mt19937 rng(36);
  for (int iter = 0; iter < 8; ++iter) {
    std::uniform_real_distribution<double> b_d(0.11, 3.0);
    CdfTable t = build_cdf_table(0.0, b_d(rng), -20, 20);
    // draw symbols from the table's own distribution via inverse cdf
    std::uniform_int_distribution<uint32_t> u(0, kCdfTotal - 1);
    std::vector<int32_t> symbols;
    double est = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const uint32_t v = u(rng);
      const auto it = std::upper_bound(t.cum.begin(), t.cum.end(), v);
      const int sym = t.s_min + static_cast<int>(it - t.cum.begin()) - 1;
      symbols.push_back(sym);
      est += t.bits_for(sym);
    }
    est += kCoderFlushBits;
    const Payload p = range_encode(symbols, t);
    const double actual = 8.0 * static_cast<double>(p.bytes.size());
    CHECK(std::fabs(actual - est) <= std::max(0.01 * est, 256.0));
    CHECK(range_decode(p, t) == symbols);
  }
}
