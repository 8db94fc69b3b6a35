#include "tcm/motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tcm/entropy.hpp"
#include "tcm/errors.hpp"

namespace tcm {
namespace {

std::vector<float> to_luma(const Frame& f) {
  std::vector<float> luma(f.plane_size());
  for (size_t i = 0; i < luma.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < f.channels; ++c)
      s += f.values[c * f.plane_size() + i];
    luma[i] = static_cast<float>(s / f.channels);
  }
  return luma;
}

std::vector<float> downsample_plane(const std::vector<float>& in, int h,
                                    int w) {
  std::vector<float> out(static_cast<size_t>(h / 2) * (w / 2));
  for (int y = 0; y < h / 2; ++y)
    for (int x = 0; x < w / 2; ++x)
      out[y * (w / 2) + x] =
          0.25f * (in[(2 * y) * w + 2 * x] + in[(2 * y) * w + 2 * x + 1] +
                   in[(2 * y + 1) * w + 2 * x] +
                   in[(2 * y + 1) * w + 2 * x + 1]);
  return out;
}

inline float sample_clamped(const std::vector<float>& p, int h, int w, int y,
                            int x) {
  y = std::clamp(y, 0, h - 1);
  x = std::clamp(x, 0, w - 1);
  return p[y * w + x];
}

double block_sad(const std::vector<float>& cur, const std::vector<float>& ref,
                 int h, int w, int by, int bx, int block, int dy, int dx) {
  double sad = 0.0;
  for (int y = 0; y < block; ++y)
    for (int x = 0; x < block; ++x) {
      const float a = cur[(by + y) * w + bx + x];
      const float b = sample_clamped(ref, h, w, by + y + dy, bx + x + dx);
      sad += std::fabs(static_cast<double>(a) - b);
    }
  return sad;
}

}  // namespace

MotionField estimate_flow(const Frame& current, const Frame& reference,
                          const FlowConfig& config) {
  if (current.height != reference.height ||
      current.width != reference.width || current.channels != reference.channels)
    throw ConfigError("estimate_flow: frame dims must match");
  const int levels = config.pyramid_levels;
  const int block = config.block;
  const int radius = config.search_radius;
  const int align = (1 << (levels - 1)) * block;
  if (current.height % align != 0 || current.width % align != 0)
    throw ConfigError("estimate_flow: dims must be divisible by " +
                      std::to_string(align));

  std::vector<std::vector<float>> cur_pyr{to_luma(current)};
  std::vector<std::vector<float>> ref_pyr{to_luma(reference)};
  std::vector<int> hs{current.height}, ws{current.width};
  for (int l = 1; l < levels; ++l) {
    cur_pyr.push_back(downsample_plane(cur_pyr[l - 1], hs[l - 1], ws[l - 1]));
    ref_pyr.push_back(downsample_plane(ref_pyr[l - 1], hs[l - 1], ws[l - 1]));
    hs.push_back(hs[l - 1] / 2);
    ws.push_back(ws[l - 1] / 2);
  }

  // Per-level block vectors, coarse to fine. Each level doubles the parent
  // vector and refines within +-radius, clamped to the documented bound.
  std::vector<float> vy, vx;  // per block at current level
  for (int l = levels - 1; l >= 0; --l) {
    const int h = hs[l], w = ws[l];
    const int nby = h / block, nbx = w / block;
    const int bound = radius << (levels - 1 - l);
    std::vector<float> nvy(static_cast<size_t>(nby) * nbx);
    std::vector<float> nvx(nvy.size());
    for (int by = 0; by < nby; ++by) {
      for (int bx = 0; bx < nbx; ++bx) {
        int base_dy = 0, base_dx = 0;
        if (l < levels - 1) {
          const int pby = std::min(by / 2, hs[l + 1] / block - 1);
          const int pbx = std::min(bx / 2, ws[l + 1] / block - 1);
          base_dy = 2 * static_cast<int>(vy[pby * (ws[l + 1] / block) + pbx]);
          base_dx = 2 * static_cast<int>(vx[pby * (ws[l + 1] / block) + pbx]);
        }
        double best = std::numeric_limits<double>::max();
        int best_dy = 0, best_dx = 0;
        for (int dy = -radius; dy <= radius; ++dy) {
          for (int dx = -radius; dx <= radius; ++dx) {
            const int cdy = std::clamp(base_dy + dy, -bound, bound);
            const int cdx = std::clamp(base_dx + dx, -bound, bound);
            const double sad = block_sad(cur_pyr[l], ref_pyr[l], h, w,
                                         by * block, bx * block, block, cdy,
                                         cdx);
            if (sad < best) {
              best = sad;
              best_dy = cdy;
              best_dx = cdx;
            }
          }
        }
        nvy[by * nbx + bx] = static_cast<float>(best_dy);
        nvx[by * nbx + bx] = static_cast<float>(best_dx);
      }
    }
    vy = std::move(nvy);
    vx = std::move(nvx);
  }

  MotionField field(2, current.height, current.width);
  const int nbx = current.width / block;
  for (int y = 0; y < current.height; ++y)
    for (int x = 0; x < current.width; ++x) {
      const int b = (y / block) * nbx + (x / block);
      field.at(0, y, x) = vy[b];
      field.at(1, y, x) = vx[b];
    }
  return field;
}

namespace {

Grid mv_latent_params(const Grid& hyper_hat, const MvWeights& w) {
  Grid params = run_up_chain(hyper_hat, w.hyper_decoder_up.data(), 2);
  return conv2d(params, w.hyper_head);
}

}  // namespace

MvCoded mv_compress(const MotionField& flow, const MvWeights& w) {
  check_finite(flow, "mv_compress input flow");
  const Grid latent = run_conv_chain(flow, w.encoder.data(), 4);
  const Grid hyper = run_conv_chain(latent, w.hyper_encoder.data(), 2);

  MvCoded out;
  // hyper latent: plain rounding, factorized per-channel prior
  const std::vector<int32_t> hyper_syms = quantize_symbols(hyper);
  compute_symbol_range(hyper_syms, out.hyper.s_min, out.hyper.s_max);
  const auto htables = factorized_prior_tables(
      w.prior_loc, w.prior_scale, out.hyper.s_min, out.hyper.s_max);
  const size_t hplane = hyper.plane_size();
  double est = 0.0;
  {
    RangeEncoder enc;
    for (size_t i = 0; i < hyper_syms.size(); ++i) {
      const CdfTable& t = htables[i / hplane];
      est += t.bits_for(hyper_syms[i]);
      enc.encode(hyper_syms[i], t);
    }
    out.hyper.payload = enc.finish();
    est += kCoderFlushBits;
  }
  const Grid hyper_hat =
      symbols_to_grid(hyper_syms, hyper.channels, hyper.height, hyper.width);

  // Laplace parameters for the main latent come from the hyper decoder;
  // the mean only shapes the probabilities, quantization stays plain.
  const EntropyParameters ep = split_entropy_parameters(
      mv_latent_params(hyper_hat, w), w.latent_channels);

  const std::vector<int32_t> main_syms = quantize_symbols(latent);
  compute_symbol_range(main_syms, out.main.s_min, out.main.s_max);
  {
    RangeEncoder enc;
    for (size_t i = 0; i < main_syms.size(); ++i) {
      const CdfTable t = element_table(ep, i, out.main.s_min, out.main.s_max);
      est += t.bits_for(main_syms[i]);
      enc.encode(main_syms[i], t);
    }
    out.main.payload = enc.finish();
    est += kCoderFlushBits;
  }
  out.estimated_bits = est;

  const Grid latent_hat =
      symbols_to_grid(main_syms, latent.channels, latent.height, latent.width);
  Grid rec = run_up_chain(latent_hat, w.decoder_up.data(), 4);
  out.reconstructed = conv2d(rec, w.decoder_out);
  return out;
}

MotionField mv_decompress(const CodedPayload& main, const CodedPayload& hyper,
                          const MvWeights& w, int height, int width) {
  const int lh = height / 16, lw = width / 16;
  const int hh = height / 64, hw = width / 64;
  const size_t hyper_count =
      static_cast<size_t>(w.hyper_channels) * hh * hw;
  const size_t main_count = static_cast<size_t>(w.latent_channels) * lh * lw;

  const auto htables = factorized_prior_tables(w.prior_loc, w.prior_scale,
                                               hyper.s_min, hyper.s_max);
  const size_t hplane = static_cast<size_t>(hh) * hw;
  RangeDecoder hdec(hyper.payload);
  std::vector<int32_t> hyper_syms(hyper_count);
  for (size_t i = 0; i < hyper_count; ++i)
    hyper_syms[i] = hdec.decode(htables[i / hplane]);
  const Grid hyper_hat =
      symbols_to_grid(hyper_syms, w.hyper_channels, hh, hw);

  const EntropyParameters ep = split_entropy_parameters(
      mv_latent_params(hyper_hat, w), w.latent_channels);

  RangeDecoder dec(main.payload);
  std::vector<int32_t> main_syms(main_count);
  for (size_t i = 0; i < main_count; ++i) {
    const CdfTable t = element_table(ep, i, main.s_min, main.s_max);
    main_syms[i] = dec.decode(t);
  }
  const Grid latent_hat = symbols_to_grid(main_syms, w.latent_channels, lh, lw);
  Grid rec = run_up_chain(latent_hat, w.decoder_up.data(), 4);
  return conv2d(rec, w.decoder_out);
}

}  // namespace tcm
