#ifndef TCM_METRICS_HPP_
#define TCM_METRICS_HPP_

#include <string>
#include <vector>

#include "tcm/grid.hpp"

namespace tcm {

double mse(const Frame& a, const Frame& b);

// 10*log10(peak^2 / MSE); zero MSE maps to +infinity.
double psnr_from_mse(double mse_value, double peak = 1.0);

// MSE pooled over all channels and pixels, then psnr_from_mse.
double psnr(const Frame& a, const Frame& b, double peak = 1.0);

// Multi-scale SSIM, Gaussian window 11 / sigma 1.5, standard per-scale
// weights (0.0448, 0.2856, 0.3001, 0.2363, 0.1333). Inputs too small for
// five scales use as many scales as fit an 11-tap valid window, with the
// weights renormalized.
double ms_ssim(const Frame& a, const Frame& b);

// Eq-style RD cost: lambda * D + (rate_mv_bits + rate_ctx_bits) / pixels.
double rd_loss(double distortion, double rate_mv_bits, double rate_ctx_bits,
               double lambda, int64_t pixels);

// Arithmetic mean of exactly T per-frame losses.
double cascaded_loss(const std::vector<double>& per_frame, int T);

double bpp(uint64_t total_bits, int width, int height, int frames);

struct RdPoint {
  double rate = 0.0;     // bpp
  double quality = 0.0;  // PSNR dB or MS-SSIM
};
struct RdCurve {
  std::vector<RdPoint> points;  // sorted by strictly increasing rate
  void validate() const;
};

// Average percentage rate difference of `test` against `anchor` over the
// overlapping quality interval, from cubic fits of log10(rate) vs quality.
// Negative means the test curve saves bits.
double bd_rate(const RdCurve& test, const RdCurve& anchor);

RdCurve load_rd_curve_csv(const std::string& path);
void save_rd_curve_csv(const RdCurve& curve, const std::string& path);

}  // namespace tcm

#endif  // TCM_METRICS_HPP_
