#include "tcm/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tcm/errors.hpp"

namespace tcm {

double mse(const Frame& a, const Frame& b) {
  if (!a.same_shape(b)) throw ConfigError("mse: shape mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = static_cast<double>(a.values[i]) - b.values[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.values.size());
}

double psnr_from_mse(double mse_value, double peak) {
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse_value);
}

double psnr(const Frame& a, const Frame& b, double peak) {
  return psnr_from_mse(mse(a, b), peak);
}

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr std::array<double, 5> kScaleWeights = {0.0448, 0.2856, 0.3001,
                                                 0.2363, 0.1333};

std::array<double, kWin> gaussian_window() {
  std::array<double, kWin> g{};
  double sum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - (kWin - 1) / 2;
    g[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += g[i];
  }
  for (auto& v : g) v /= sum;
  return g;
}

// Valid-mode separable Gaussian filter; output is (h-10) x (w-10).
void gauss_filter(const std::vector<double>& img, int h, int w,
                  std::vector<double>& tmp, std::vector<double>& out) {
  static const std::array<double, kWin> g = gaussian_window();
  const int wv = w - kWin + 1, hv = h - kWin + 1;
  tmp.resize(static_cast<size_t>(h) * wv);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < wv; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWin; ++k) s += g[k] * img[y * w + x + k];
      tmp[y * wv + x] = s;
    }
  }
  out.resize(static_cast<size_t>(hv) * wv);
  for (int y = 0; y < hv; ++y) {
    for (int x = 0; x < wv; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWin; ++k) s += g[k] * tmp[(y + k) * wv + x];
      out[y * wv + x] = s;
    }
  }
}

std::vector<double> downsample2(const std::vector<double>& img, int h, int w) {
  const int oh = h / 2, ow = w / 2;
  std::vector<double> out(static_cast<size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      out[y * ow + x] = 0.25 * (img[(2 * y) * w + 2 * x] +
                                img[(2 * y) * w + 2 * x + 1] +
                                img[(2 * y + 1) * w + 2 * x] +
                                img[(2 * y + 1) * w + 2 * x + 1]);
  return out;
}

// Returns (mean cs, mean ssim) over valid windows of one scale.
std::pair<double, double> ssim_scale(const std::vector<double>& a,
                                     const std::vector<double>& b, int h,
                                     int w) {
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  std::vector<double> tmp, mu_a, mu_b, saa, sbb, sab;
  gauss_filter(a, h, w, tmp, mu_a);
  gauss_filter(b, h, w, tmp, mu_b);
  std::vector<double> prod(a.size());
  for (size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * a[i];
  gauss_filter(prod, h, w, tmp, saa);
  for (size_t i = 0; i < a.size(); ++i) prod[i] = b[i] * b[i];
  gauss_filter(prod, h, w, tmp, sbb);
  for (size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
  gauss_filter(prod, h, w, tmp, sab);

  double cs_sum = 0.0, ssim_sum = 0.0;
  for (size_t i = 0; i < mu_a.size(); ++i) {
    const double va = saa[i] - mu_a[i] * mu_a[i];
    const double vb = sbb[i] - mu_b[i] * mu_b[i];
    const double cov = sab[i] - mu_a[i] * mu_b[i];
    const double cs = (2.0 * cov + kC2) / (va + vb + kC2);
    const double lum =
        (2.0 * mu_a[i] * mu_b[i] + kC1) / (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1);
    cs_sum += cs;
    ssim_sum += lum * cs;
  }
  const double n = static_cast<double>(mu_a.size());
  return {cs_sum / n, ssim_sum / n};
}

}  // namespace

double ms_ssim(const Frame& a, const Frame& b) {
  if (!a.same_shape(b)) throw ConfigError("ms_ssim: shape mismatch");
  const int min_dim = std::min(a.height, a.width);
  int scales = 0;
  for (int s = 1; s <= 5; ++s) {
    if (min_dim / (1 << (s - 1)) >= kWin) scales = s;
  }
  if (scales == 0)
    throw EvalError("ms_ssim: images too small for an 11-tap window");
  double wsum = 0.0;
  for (int s = 0; s < scales; ++s) wsum += kScaleWeights[s];

  double channel_sum = 0.0;
  for (int c = 0; c < a.channels; ++c) {
    std::vector<double> pa(a.plane_size()), pb(b.plane_size());
    for (size_t i = 0; i < pa.size(); ++i) {
      pa[i] = a.channel(c)[i];
      pb[i] = b.channel(c)[i];
    }
    int h = a.height, w = a.width;
    double value = 1.0;
    for (int s = 0; s < scales; ++s) {
      auto [mcs, mssim] = ssim_scale(pa, pb, h, w);
      const double weight = kScaleWeights[s] / wsum;
      if (s + 1 < scales) {
        value *= std::pow(std::max(mcs, 0.0), weight);
        pa = downsample2(pa, h, w);
        pb = downsample2(pb, h, w);
        h /= 2;
        w /= 2;
      } else {
        value *= std::pow(std::max(mssim, 0.0), weight);
      }
    }
    channel_sum += value;
  }
  return channel_sum / a.channels;
}

double rd_loss(double distortion, double rate_mv_bits, double rate_ctx_bits,
               double lambda, int64_t pixels) {
  return lambda * distortion +
         (rate_mv_bits + rate_ctx_bits) / static_cast<double>(pixels);
}

double cascaded_loss(const std::vector<double>& per_frame, int T) {
  if (static_cast<int>(per_frame.size()) != T)
    throw ConfigError("cascaded_loss: expected exactly T per-frame losses");
  double sum = 0.0;
  for (double v : per_frame) sum += v;
  return sum / T;
}

double bpp(uint64_t total_bits, int width, int height, int frames) {
  if (width <= 0 || height <= 0 || frames <= 0)
    throw ConfigError("bpp: dims and frame count must be positive");
  return static_cast<double>(total_bits) /
         (static_cast<double>(width) * height * frames);
}

void RdCurve::validate() const {
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].rate <= 0.0)
      throw EvalError("rd curve: rates must be positive");
    if (i > 0 && points[i].rate <= points[i - 1].rate)
      throw EvalError("rd curve: rates must be strictly increasing");
  }
}

namespace {

// Least-squares cubic fit of y over centered x; returns coefficients of
// 1, t, t^2, t^3 with t = x - center.
std::array<double, 4> cubic_fit(const std::vector<double>& x,
                                const std::vector<double>& y,
                                double center) {
  std::array<double, 7> pw{};
  std::array<double, 4> rhs{};
  for (size_t i = 0; i < x.size(); ++i) {
    const double t = x[i] - center;
    double tp = 1.0;
    for (int p = 0; p < 7; ++p) {
      pw[p] += tp;
      if (p < 4) rhs[p] += tp * y[i];
      tp *= t;
    }
  }
  double m[4][5];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m[r][c] = pw[r + c];
    m[r][4] = rhs[r];
  }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) throw EvalError("bd_rate: singular fit");
    if (piv != col)
      for (int c = col; c < 5; ++c) std::swap(m[piv][c], m[col][c]);
    for (int r = col + 1; r < 4; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::array<double, 4> coef{};
  for (int r = 3; r >= 0; --r) {
    double v = m[r][4];
    for (int c = r + 1; c < 4; ++c) v -= m[r][c] * coef[c];
    coef[r] = v / m[r][r];
  }
  return coef;
}

// Definite integral of the cubic over [lo, hi] in original coordinates.
double cubic_integral(const std::array<double, 4>& coef, double center,
                      double lo, double hi) {
  auto anti = [&](double q) {
    const double t = q - center;
    return t * (coef[0] + t * (coef[1] / 2 + t * (coef[2] / 3 + t * coef[3] / 4)));
  };
  return anti(hi) - anti(lo);
}

}  // namespace

double bd_rate(const RdCurve& test, const RdCurve& anchor) {
  test.validate();
  anchor.validate();
  if (test.points.size() < 4 || anchor.points.size() < 4)
    throw EvalError("bd_rate: need at least 4 points per curve");

  auto extract = [](const RdCurve& c, std::vector<double>& q,
                    std::vector<double>& lr) {
    for (const auto& p : c.points) {
      q.push_back(p.quality);
      lr.push_back(std::log10(p.rate));
    }
  };
  std::vector<double> qt, lt, qa, la;
  extract(test, qt, lt);
  extract(anchor, qa, la);

  const double lo = std::max(*std::min_element(qt.begin(), qt.end()),
                             *std::min_element(qa.begin(), qa.end()));
  const double hi = std::min(*std::max_element(qt.begin(), qt.end()),
                             *std::max_element(qa.begin(), qa.end()));
  if (!(lo < hi)) throw EvalError("bd_rate: no quality overlap");

  const double ct = (lo + hi) / 2.0;
  const auto ft = cubic_fit(qt, lt, ct);
  const auto fa = cubic_fit(qa, la, ct);
  const double it = cubic_integral(ft, ct, lo, hi);
  const double ia = cubic_integral(fa, ct, lo, hi);
  const double delta = (it - ia) / (hi - lo);
  return (std::pow(10.0, delta) - 1.0) * 100.0;
}

RdCurve load_rd_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rd curve csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty rd curve csv");
  // tolerate trailing CR from windows-edited files
  while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
    line.pop_back();
  if (line != "rate,quality")
    throw FormatError("rd curve csv must start with header 'rate,quality'");
  RdCurve curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b))
      throw FormatError("bad rd curve row: " + line);
    curve.points.push_back({std::stod(a), std::stod(b)});
  }
  curve.validate();
  return curve;
}

void save_rd_curve_csv(const RdCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write rd curve csv: " + path);
  out << "rate,quality\n";
  for (const auto& p : curve.points)
    out << p.rate << "," << p.quality << "\n";
}

}  // namespace tcm
