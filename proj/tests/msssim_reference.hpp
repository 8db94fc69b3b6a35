#ifndef TCM_TESTS_MSSSIM_REFERENCE_HPP_
#define TCM_TESTS_MSSSIM_REFERENCE_HPP_

// Direct (non-separable) MS-SSIM used as the reference implementation in
// tests: full 11x11 weighted sums per window, straight from the formulas.

#include <cmath>
#include <vector>

#include "tcm/grid.hpp"

namespace tcm::reference {

inline double ms_ssim(const Frame& fa, const Frame& fb) {
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  constexpr double kC1 = 0.01 * 0.01, kC2 = 0.03 * 0.03;
  const double weights5[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

  double g[kWin][kWin];
  double gsum = 0.0;
  for (int i = 0; i < kWin; ++i)
    for (int j = 0; j < kWin; ++j) {
      const double dy = i - 5, dx = j - 5;
      g[i][j] = std::exp(-(dy * dy + dx * dx) / (2 * kSigma * kSigma));
      gsum += g[i][j];
    }
  for (auto& row : g)
    for (auto& v : row) v /= gsum;

  int scales = 0;
  const int min_dim = std::min(fa.height, fa.width);
  for (int s = 1; s <= 5; ++s)
    if (min_dim / (1 << (s - 1)) >= kWin) scales = s;
  double wsum = 0.0;
  for (int s = 0; s < scales; ++s) wsum += weights5[s];

  double channel_sum = 0.0;
  for (int c = 0; c < fa.channels; ++c) {
    std::vector<double> a(fa.plane_size()), b(fb.plane_size());
    for (size_t i = 0; i < a.size(); ++i) {
      a[i] = fa.channel(c)[i];
      b[i] = fb.channel(c)[i];
    }
    int h = fa.height, w = fa.width;
    double value = 1.0;
    for (int s = 0; s < scales; ++s) {
      double cs_sum = 0.0, ssim_sum = 0.0;
      int windows = 0;
      for (int y = 0; y + kWin <= h; ++y) {
        for (int x = 0; x + kWin <= w; ++x) {
          double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
          for (int i = 0; i < kWin; ++i)
            for (int j = 0; j < kWin; ++j) {
              const double va = a[(y + i) * w + x + j];
              const double vb = b[(y + i) * w + x + j];
              ma += g[i][j] * va;
              mb += g[i][j] * vb;
              saa += g[i][j] * va * va;
              sbb += g[i][j] * vb * vb;
              sab += g[i][j] * va * vb;
            }
          const double var_a = saa - ma * ma;
          const double var_b = sbb - mb * mb;
          const double cov = sab - ma * mb;
          const double cs = (2 * cov + kC2) / (var_a + var_b + kC2);
          const double lum = (2 * ma * mb + kC1) / (ma * ma + mb * mb + kC1);
          cs_sum += cs;
          ssim_sum += lum * cs;
          ++windows;
        }
      }
      const double weight = weights5[s] / wsum;
      if (s + 1 < scales) {
        value *= std::pow(std::max(cs_sum / windows, 0.0), weight);
        // 2x2 mean pool
        const int nh = h / 2, nw = w / 2;
        std::vector<double> na(static_cast<size_t>(nh) * nw);
        std::vector<double> nb(na.size());
        for (int y = 0; y < nh; ++y)
          for (int x = 0; x < nw; ++x) {
            na[y * nw + x] = 0.25 * (a[2 * y * w + 2 * x] +
                                     a[2 * y * w + 2 * x + 1] +
                                     a[(2 * y + 1) * w + 2 * x] +
                                     a[(2 * y + 1) * w + 2 * x + 1]);
            nb[y * nw + x] = 0.25 * (b[2 * y * w + 2 * x] +
                                     b[2 * y * w + 2 * x + 1] +
                                     b[(2 * y + 1) * w + 2 * x] +
                                     b[(2 * y + 1) * w + 2 * x + 1]);
          }
        a = std::move(na);
        b = std::move(nb);
        h = nh;
        w = nw;
      } else {
        value *= std::pow(std::max(ssim_sum / windows, 0.0), weight);
      }
    }
    channel_sum += value;
  }
  return channel_sum / fa.channels;
}

}  // namespace tcm::reference

#endif  // TCM_TESTS_MSSSIM_REFERENCE_HPP_
