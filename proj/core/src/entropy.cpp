#include "tcm/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tcm/errors.hpp"
#include "tcm/portable_math.hpp"

namespace tcm {

double laplace_cdf(double x, double scale) {
  if (x < 0.0) return 0.5 * portable_exp(x / scale);
  return 1.0 - 0.5 * portable_exp(-x / scale);
}

double laplace_bin_mass(int symbol, double mean, double scale) {
  const double b = std::max(scale, kScaleFloor);
  const double d = symbol - mean;
  return laplace_cdf(d + 0.5, b) - laplace_cdf(d - 0.5, b);
}

double laplace_bin_probability(int symbol, double mean, double scale) {
  return std::max(laplace_bin_mass(symbol, mean, scale), kMinProb);
}

Grid quantize(const Grid& latent) {
  check_finite(latent, "quantize input");
  Grid out = latent;
  for (float& v : out.values)
    v = static_cast<float>(round_half_away(v));
  return out;
}

Grid quantize(const Grid& latent, const Grid& mean) {
  if (!latent.same_shape(mean))
    throw ConfigError("quantize: mean shape must match latent");
  check_finite(latent, "quantize input");
  check_finite(mean, "quantize mean");
  Grid out = latent;
  for (size_t i = 0; i < out.values.size(); ++i) {
    const double m = mean.values[i];
    out.values[i] =
        static_cast<float>(round_half_away(latent.values[i] - m) + m);
  }
  return out;
}

std::vector<int32_t> quantize_symbols(const Grid& latent) {
  check_finite(latent, "quantize input");
  std::vector<int32_t> s(latent.values.size());
  for (size_t i = 0; i < s.size(); ++i)
    s[i] = static_cast<int32_t>(round_half_away(latent.values[i]));
  return s;
}

std::vector<int32_t> quantize_offset_symbols(const Grid& latent,
                                             const Grid& mean) {
  if (!latent.same_shape(mean))
    throw ConfigError("quantize: mean shape must match latent");
  check_finite(latent, "quantize input");
  std::vector<int32_t> s(latent.values.size());
  for (size_t i = 0; i < s.size(); ++i)
    s[i] = static_cast<int32_t>(
        round_half_away(static_cast<double>(latent.values[i]) -
                        static_cast<double>(mean.values[i])));
  return s;
}

Grid symbols_to_grid(const std::vector<int32_t>& symbols, int c, int h,
                     int w) {
  if (symbols.size() != static_cast<size_t>(c) * h * w)
    throw ConfigError("symbols_to_grid: count mismatch");
  Grid g(c, h, w);
  for (size_t i = 0; i < symbols.size(); ++i)
    g.values[i] = static_cast<float>(symbols[i]);
  return g;
}

Grid offsets_to_grid(const std::vector<int32_t>& symbols, const Grid& mean) {
  if (symbols.size() != mean.values.size())
    throw ConfigError("offsets_to_grid: count mismatch");
  Grid g(mean.channels, mean.height, mean.width);
  for (size_t i = 0; i < symbols.size(); ++i)
    g.values[i] = static_cast<float>(static_cast<double>(symbols[i]) +
                                     static_cast<double>(mean.values[i]));
  return g;
}

double estimate_rate_bits(const Grid& quantized,
                          const EntropyParameters& p) {
  if (!quantized.same_shape(p.mean) || !quantized.same_shape(p.scale))
    throw ConfigError("estimate_rate_bits: shape mismatch");
  double bits = 0.0;
  for (size_t i = 0; i < quantized.values.size(); ++i) {
    const int sym = static_cast<int>(round_half_away(
        static_cast<double>(quantized.values[i]) - p.mean.values[i]));
    const double prob =
        laplace_bin_probability(sym, 0.0, p.scale.values[i]);
    bits -= std::log2(prob);
  }
  return bits;
}

double CdfTable::bits_for(int symbol) const {
  return kCdfPrecisionBits - std::log2(static_cast<double>(freq(symbol)));
}

void CdfTable::validate() const {
  if (s_min > s_max) throw ConfigError("cdf table: empty symbol range");
  if (cum.size() != static_cast<size_t>(bin_count()) + 1)
    throw ConfigError("cdf table: size mismatch");
  if (cum.front() != 0 || cum.back() != kCdfTotal)
    throw ConfigError("cdf table: must span [0, 65536]");
  for (size_t i = 1; i < cum.size(); ++i)
    if (cum[i] <= cum[i - 1])
      throw ConfigError("cdf table: zero-frequency bin");
}

CdfTable build_cdf_table(double mean, double scale, int s_min, int s_max) {
  if (s_min >= s_max)
    throw ConfigError("build_cdf_table: need s_min < s_max");
  const int64_t bins = static_cast<int64_t>(s_max) - s_min + 1;
  if (bins > static_cast<int64_t>(kCdfTotal))
    throw ConfigError("build_cdf_table: range too wide for min bin 1");

  const double b = std::max(scale, kScaleFloor);
  std::vector<double> mass(bins);
  for (int64_t i = 0; i < bins; ++i)
    mass[i] = laplace_bin_mass(s_min + static_cast<int>(i), mean, b);
  // Out-of-range symbols are forbidden (the encoder widens its range
  // instead), so the tails belong to the end bins.
  mass.front() += laplace_cdf(s_min - mean - 0.5, b);
  mass.back() += 1.0 - laplace_cdf(s_max - mean + 0.5, b);

  // Largest-remainder integerization to a total of kCdfTotal with a
  // minimum of 1 per bin.
  std::vector<uint32_t> freq(bins);
  std::vector<double> remainder(bins);
  int64_t total = 0;
  for (int64_t i = 0; i < bins; ++i) {
    const double exact = mass[i] * kCdfTotal;
    double fl = std::floor(exact);
    if (fl < 1.0) fl = 1.0;
    if (fl > kCdfTotal) fl = kCdfTotal;
    freq[i] = static_cast<uint32_t>(fl);
    remainder[i] = exact - fl;
    total += freq[i];
  }
  std::vector<int> order(bins);
  std::iota(order.begin(), order.end(), 0);
  if (total < static_cast<int64_t>(kCdfTotal)) {
    std::sort(order.begin(), order.end(), [&](int a, int bb) {
      if (remainder[a] != remainder[bb]) return remainder[a] > remainder[bb];
      return a < bb;
    });
    int64_t leftover = kCdfTotal - total;
    for (size_t i = 0; leftover > 0; i = (i + 1) % order.size()) {
      ++freq[order[i]];
      --leftover;
    }
  } else if (total > static_cast<int64_t>(kCdfTotal)) {
    std::sort(order.begin(), order.end(), [&](int a, int bb) {
      if (freq[a] != freq[bb]) return freq[a] > freq[bb];
      return a < bb;
    });
    int64_t excess = total - kCdfTotal;
    while (excess > 0) {
      bool took = false;
      for (size_t i = 0; i < order.size() && excess > 0; ++i) {
        if (freq[order[i]] > 1) {
          --freq[order[i]];
          --excess;
          took = true;
        }
      }
      if (!took)
        throw ConfigError("build_cdf_table: cannot satisfy min bin 1");
    }
  }

  CdfTable t;
  t.s_min = s_min;
  t.s_max = s_max;
  t.cum.resize(bins + 1);
  t.cum[0] = 0;
  for (int64_t i = 0; i < bins; ++i) t.cum[i + 1] = t.cum[i] + freq[i];
  t.validate();
  return t;
}

std::vector<CdfTable> factorized_prior_tables(const std::vector<float>& loc,
                                              const std::vector<float>& scale,
                                              int s_min, int s_max) {
  if (loc.size() != scale.size())
    throw ConfigError("factorized prior: loc/scale size mismatch");
  std::vector<CdfTable> tables;
  tables.reserve(loc.size());
  for (size_t c = 0; c < loc.size(); ++c)
    tables.push_back(build_cdf_table(loc[c], scale[c], s_min, s_max));
  return tables;
}

EntropyParameters split_entropy_parameters(const Grid& params, int channels) {
  if (params.channels != 2 * channels)
    throw ConfigError("entropy parameter head must emit 2x latent channels");
  EntropyParameters ep;
  ep.mean = Grid(channels, params.height, params.width);
  ep.scale = Grid(channels, params.height, params.width);
  std::copy_n(params.values.begin(), ep.mean.size(), ep.mean.values.begin());
  for (size_t i = 0; i < ep.scale.size(); ++i)
    ep.scale.values[i] = static_cast<float>(std::max(
        static_cast<double>(params.values[ep.mean.size() + i]), kScaleFloor));
  return ep;
}

CdfTable element_table(const EntropyParameters& ep, size_t i, int s_min,
                       int s_max) {
  return build_cdf_table(ep.mean.values[i], ep.scale.values[i], s_min, s_max);
}

void compute_symbol_range(const std::vector<int32_t>& symbols, int& s_min,
                          int& s_max) {
  int lo = 0, hi = 0;
  if (!symbols.empty()) {
    const auto [a, b] = std::minmax_element(symbols.begin(), symbols.end());
    lo = *a;
    hi = *b;
  }
  s_min = lo - 1;
  s_max = hi + 1;
  if (s_min < INT16_MIN || s_max > INT16_MAX)
    throw EncodeError("symbol range exceeds 16-bit header field");
}

}  // namespace tcm
