#ifndef TCM_ENTROPY_HPP_
#define TCM_ENTROPY_HPP_

#include <cstdint>
#include <vector>

#include "tcm/grid.hpp"

namespace tcm {

inline constexpr double kScaleFloor = 0.11;
inline constexpr int kCdfPrecisionBits = 16;
inline constexpr uint32_t kCdfTotal = 1u << kCdfPrecisionBits;
inline constexpr double kMinProb = 1.0 / kCdfTotal;  // 2^-16
// A finished range-coder payload always carries 4 flush bytes.
inline constexpr double kCoderFlushBits = 32.0;

// Laplace(mu, b) parameters per latent element. Scales are already floored.
struct EntropyParameters {
  Grid mean;
  Grid scale;
};

// CDF of Laplace(0, b) at x.
double laplace_cdf(double x, double scale);

// Probability mass of the unit bin around `symbol` for Laplace(mean, scale),
// scale floored at kScaleFloor. No lower clamp.
double laplace_bin_mass(int symbol, double mean, double scale);

// Same, clamped below by kMinProb; this is the coding probability.
double laplace_bin_probability(int symbol, double mean, double scale);

// Element-wise round half away from zero. Throws NumericError on
// non-finite input.
Grid quantize(const Grid& latent);

// Mean-offset variant: round(y - mu) + mu. The coded symbols are the
// integer offsets; the returned grid holds the dequantized values.
Grid quantize(const Grid& latent, const Grid& mean);

// Integer symbols for the two quantization modes.
std::vector<int32_t> quantize_symbols(const Grid& latent);
std::vector<int32_t> quantize_offset_symbols(const Grid& latent,
                                             const Grid& mean);

// Dequantize offsets back to floats: value = symbol (+ mean).
Grid symbols_to_grid(const std::vector<int32_t>& symbols, int c, int h, int w);
Grid offsets_to_grid(const std::vector<int32_t>& symbols, const Grid& mean);

// Sum over elements of -log2 laplace_bin_probability(symbol_i, mu_i, b_i),
// where symbol_i - mu_i recovers the integer offset.
double estimate_rate_bits(const Grid& quantized, const EntropyParameters& p);

// Integer CDF over [s_min, s_max]: strictly increasing, cum[0] = 0,
// cum.back() = 65536, so every bin has frequency >= 1. Tail mass beyond the
// range is folded into the two end bins.
struct CdfTable {
  int s_min = 0;
  int s_max = 0;
  std::vector<uint32_t> cum;

  int bin_count() const { return s_max - s_min + 1; }
  bool contains(int symbol) const {
    return symbol >= s_min && symbol <= s_max;
  }
  uint32_t freq(int symbol) const {
    return cum[symbol - s_min + 1] - cum[symbol - s_min];
  }
  double bits_for(int symbol) const;
  void validate() const;
};

CdfTable build_cdf_table(double mean, double scale, int s_min, int s_max);

// One table per channel of a factorized prior, shared across positions.
std::vector<CdfTable> factorized_prior_tables(const std::vector<float>& loc,
                                              const std::vector<float>& scale,
                                              int s_min, int s_max);

// Splits a 2N-channel parameter tensor into floored (mean, scale) grids.
// Encoder and decoder must both build element tables from these grids so
// the two sides use byte-identical tables.
EntropyParameters split_entropy_parameters(const Grid& params, int channels);

CdfTable element_table(const EntropyParameters& ep, size_t i, int s_min,
                       int s_max);

// Per-tensor coding range [min-1, max+1]; the widened ends also hold the
// folded tail mass. Throws EncodeError past the 16-bit header fields.
void compute_symbol_range(const std::vector<int32_t>& symbols, int& s_min,
                          int& s_max);

}  // namespace tcm

#endif  // TCM_ENTROPY_HPP_
