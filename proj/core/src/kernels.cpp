#include "tcm/kernels.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "tcm/errors.hpp"

namespace tcm {
namespace {

// One output row of doubles per output-channel tile lives on the stack so
// the compiler can keep the fma chains in vector registers. Accumulation
// order per output element is fixed: in-channel, then ky, then kx.
constexpr int kOcTile = 4;
constexpr int kXBlock = 64;

double activate(double v, Activation act) {
  if (act == Activation::leaky && v < 0.0) return v * static_cast<double>(kLeakySlope);
  return v;
}

// Zero-pads input into scratch laid out (C, H+2p, W+2p).
void pad_input(const Grid& in, int p, std::vector<float>& pad) {
  const int hp = in.height + 2 * p, wp = in.width + 2 * p;
  pad.assign(static_cast<size_t>(in.channels) * hp * wp, 0.0f);
  for (int c = 0; c < in.channels; ++c) {
    for (int y = 0; y < in.height; ++y) {
      std::memcpy(&pad[(static_cast<size_t>(c) * hp + y + p) * wp + p],
                  &in.values[(static_cast<size_t>(c) * in.height + y) * in.width],
                  in.width * sizeof(float));
    }
  }
}

template <int OCT>
void conv_rows_stride1(const float* pad, int hp, int wp, int k,
                       const ConvSpec& spec, int oc0, Grid& out) {
  const int oh = out.height, ow = out.width;
  const int cin = spec.in_channels;
  for (int y = 0; y < oh; ++y) {
    for (int xb = 0; xb < ow; xb += kXBlock) {
      const int xn = (xb + kXBlock <= ow) ? kXBlock : ow - xb;
      double acc[OCT][kXBlock];
      for (int t = 0; t < OCT; ++t)
        for (int x = 0; x < kXBlock; ++x) acc[t][x] = 0.0;
      for (int ic = 0; ic < cin; ++ic) {
        for (int ky = 0; ky < k; ++ky) {
          const float* row =
              pad + (static_cast<size_t>(ic) * hp + y + ky) * wp + xb;
          for (int kx = 0; kx < k; ++kx) {
            double wv[OCT];
            for (int t = 0; t < OCT; ++t) {
              wv[t] = spec.weights[(((static_cast<size_t>(oc0 + t) * cin + ic) *
                                     k + ky) * k + kx)];
            }
            const float* r = row + kx;
            for (int x = 0; x < xn; ++x) {
              const double v = static_cast<double>(r[x]);
              for (int t = 0; t < OCT; ++t)
                acc[t][x] = std::fma(v, wv[t], acc[t][x]);
            }
          }
        }
      }
      for (int t = 0; t < OCT; ++t) {
        const double b = spec.bias[oc0 + t];
        float* orow = &out.values[(static_cast<size_t>(oc0 + t) * oh + y) * ow + xb];
        for (int x = 0; x < xn; ++x)
          orow[x] = static_cast<float>(activate(acc[t][x] + b, spec.activation));
      }
    }
  }
}

// Stride-2 path: strided input samples are packed contiguously per output
// row once, then reused across all output channels.
template <int OCT>
void conv_rows_stride2(const float* pad, int hp, int wp, int k,
                       const ConvSpec& spec, Grid& out,
                       std::vector<float>& packed) {
  const int oh = out.height, ow = out.width;
  const int cin = spec.in_channels;
  packed.resize(static_cast<size_t>(cin) * k * k * ow);
  for (int y = 0; y < oh; ++y) {
    float* p = packed.data();
    for (int ic = 0; ic < cin; ++ic) {
      for (int ky = 0; ky < k; ++ky) {
        const float* row =
            pad + (static_cast<size_t>(ic) * hp + 2 * y + ky) * wp;
        for (int kx = 0; kx < k; ++kx) {
          for (int x = 0; x < ow; ++x) p[x] = row[2 * x + kx];
          p += ow;
        }
      }
    }
    for (int oc0 = 0; oc0 < spec.out_channels; oc0 += OCT) {
      const int tn = (oc0 + OCT <= spec.out_channels) ? OCT
                                                      : spec.out_channels - oc0;
      for (int xb = 0; xb < ow; xb += kXBlock) {
        const int xn = (xb + kXBlock <= ow) ? kXBlock : ow - xb;
        double acc[OCT][kXBlock];
        for (int t = 0; t < OCT; ++t)
          for (int x = 0; x < kXBlock; ++x) acc[t][x] = 0.0;
        const float* prow = packed.data() + xb;
        for (int tap = 0; tap < cin * k * k; ++tap) {
          const float* r = prow + static_cast<size_t>(tap) * ow;
          double wv[OCT];
          for (int t = 0; t < OCT; ++t)
            wv[t] = (t < tn) ? spec.weights[static_cast<size_t>(oc0 + t) *
                                            cin * k * k + tap]
                             : 0.0;
          for (int x = 0; x < xn; ++x) {
            const double v = static_cast<double>(r[x]);
            for (int t = 0; t < OCT; ++t)
              acc[t][x] = std::fma(v, wv[t], acc[t][x]);
          }
        }
        for (int t = 0; t < tn; ++t) {
          const double b = spec.bias[oc0 + t];
          float* orow =
              &out.values[(static_cast<size_t>(oc0 + t) * oh + y) * ow + xb];
          for (int x = 0; x < xn; ++x)
            orow[x] =
                static_cast<float>(activate(acc[t][x] + b, spec.activation));
        }
      }
    }
  }
}

}  // namespace

void ConvSpec::validate() const {
  if (kernel <= 0 || kernel % 2 == 0)
    throw ConfigError("conv kernel size must be odd and positive, got " +
                      std::to_string(kernel));
  if (stride != 1 && stride != 2)
    throw ConfigError("conv stride must be 1 or 2, got " +
                      std::to_string(stride));
  if (in_channels <= 0 || out_channels <= 0)
    throw ConfigError("conv channel counts must be positive");
  if (weights.size() != weight_count())
    throw ConfigError("conv weight count mismatch");
  if (bias.size() != static_cast<size_t>(out_channels))
    throw ConfigError("conv bias count mismatch");
}

void ResidualBlockSpec::validate() const {
  conv1.validate();
  conv2.validate();
  if (conv1.kernel != 3 || conv2.kernel != 3 || conv1.stride != 1 ||
      conv2.stride != 1)
    throw ConfigError("residual block convs must be 3x3 stride 1");
  if (conv1.in_channels != conv2.out_channels)
    throw ConfigError("residual block must preserve channel count");
  if (conv2.in_channels != conv1.out_channels)
    throw ConfigError("residual block conv chain mismatch");
  if (conv1.out_channels > conv1.in_channels)
    throw ConfigError("residual block middle width must not exceed input");
}

ConvSpec make_conv(int kernel, int in_ch, int out_ch, int stride,
                   Activation act) {
  ConvSpec s;
  s.kernel = kernel;
  s.in_channels = in_ch;
  s.out_channels = out_ch;
  s.stride = stride;
  s.activation = act;
  s.weights.assign(s.weight_count(), 0.0f);
  s.bias.assign(out_ch, 0.0f);
  return s;
}

ResidualBlockSpec make_residual_block(int channels) {
  return ResidualBlockSpec{
      make_conv(3, channels, channels, 1, Activation::leaky),
      make_conv(3, channels, channels, 1, Activation::none)};
}

ResidualBlockSpec make_bottleneck_block(int channels, int mid_channels) {
  if (mid_channels >= channels)
    throw ConfigError("bottleneck middle width must be below input width");
  return ResidualBlockSpec{
      make_conv(3, channels, mid_channels, 1, Activation::leaky),
      make_conv(3, mid_channels, channels, 1, Activation::none)};
}

Grid conv2d(const Grid& input, const ConvSpec& spec) {
  spec.validate();
  if (input.channels != spec.in_channels)
    throw ConfigError("conv2d: input has " + std::to_string(input.channels) +
                      " channels, spec expects " +
                      std::to_string(spec.in_channels));
  const int p = (spec.kernel - 1) / 2;
  const int oh = (input.height + spec.stride - 1) / spec.stride;
  const int ow = (input.width + spec.stride - 1) / spec.stride;
  Grid out(spec.out_channels, oh, ow);

  static thread_local std::vector<float> pad;
  static thread_local std::vector<float> packed;
  pad_input(input, p, pad);
  const int hp = input.height + 2 * p, wp = input.width + 2 * p;

  if (spec.stride == 1) {
    int oc0 = 0;
    for (; oc0 + kOcTile <= spec.out_channels; oc0 += kOcTile)
      conv_rows_stride1<kOcTile>(pad.data(), hp, wp, spec.kernel, spec, oc0,
                                 out);
    for (; oc0 < spec.out_channels; ++oc0)
      conv_rows_stride1<1>(pad.data(), hp, wp, spec.kernel, spec, oc0, out);
  } else {
    conv_rows_stride2<kOcTile>(pad.data(), hp, wp, spec.kernel, spec, out,
                               packed);
  }
  return out;
}

Grid pixel_shuffle_up(const Grid& input) {
  if (input.channels % 4 != 0)
    throw ConfigError("pixel_shuffle_up: channels must be divisible by 4");
  Grid out(input.channels / 4, input.height * 2, input.width * 2);
  for (int c = 0; c < out.channels; ++c) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        const float* src = input.channel(c * 4 + dy * 2 + dx);
        for (int y = 0; y < input.height; ++y) {
          float* dst = out.channel(c) + (2 * y + dy) * out.width + dx;
          const float* s = src + y * input.width;
          for (int x = 0; x < input.width; ++x) dst[2 * x] = s[x];
        }
      }
    }
  }
  return out;
}

Grid bilinear_warp(const Grid& source, const MotionField& flow) {
  if (flow.channels != 2)
    throw ConfigError("bilinear_warp: flow must have 2 channels");
  if (flow.height != source.height || flow.width != source.width)
    throw ConfigError("bilinear_warp: flow dims must match source");
  const int h = source.height, w = source.width;
  Grid out(source.channels, h, w);
  const float* fy_plane = flow.channel(0);
  const float* fx_plane = flow.channel(1);
  for (int c = 0; c < source.channels; ++c) {
    const float* src = source.channel(c);
    float* dst = out.channel(c);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double sy = y + static_cast<double>(fy_plane[y * w + x]);
        double sx = x + static_cast<double>(fx_plane[y * w + x]);
        if (sy < 0.0) sy = 0.0;
        if (sy > h - 1) sy = h - 1;
        if (sx < 0.0) sx = 0.0;
        if (sx > w - 1) sx = w - 1;
        const int y0 = static_cast<int>(sy);
        const int x0 = static_cast<int>(sx);
        const int y1 = (y0 + 1 < h) ? y0 + 1 : y0;
        const int x1 = (x0 + 1 < w) ? x0 + 1 : x0;
        const double fy = sy - y0, fx = sx - x0;
        // Lerp form keeps constant images exactly constant.
        const double s00 = src[y0 * w + x0], s01 = src[y0 * w + x1];
        const double s10 = src[y1 * w + x0], s11 = src[y1 * w + x1];
        const double top = s00 + fx * (s01 - s00);
        const double bot = s10 + fx * (s11 - s10);
        dst[y * w + x] = static_cast<float>(top + fy * (bot - top));
      }
    }
  }
  return out;
}

Grid bilinear_downsample(const Grid& input) {
  if (input.height % 2 != 0 || input.width % 2 != 0)
    throw ConfigError("bilinear_downsample: dims must be even");
  Grid out(input.channels, input.height / 2, input.width / 2);
  for (int c = 0; c < input.channels; ++c) {
    const float* src = input.channel(c);
    float* dst = out.channel(c);
    for (int y = 0; y < out.height; ++y) {
      const float* r0 = src + (2 * y) * input.width;
      const float* r1 = src + (2 * y + 1) * input.width;
      for (int x = 0; x < out.width; ++x) {
        const double s = (static_cast<double>(r0[2 * x]) + r0[2 * x + 1] +
                          r1[2 * x] + r1[2 * x + 1]);
        dst[y * out.width + x] = static_cast<float>(s * 0.25);
      }
    }
  }
  return out;
}

Grid residual_forward(const Grid& input, const ResidualBlockSpec& spec) {
  spec.validate();
  if (input.channels != spec.conv1.in_channels)
    throw ConfigError("residual_forward: channel mismatch");
  Grid mid = conv2d(input, spec.conv1);
  Grid res = conv2d(mid, spec.conv2);
  for (size_t i = 0; i < res.values.size(); ++i)
    res.values[i] += input.values[i];
  return res;
}

Grid leaky_relu(const Grid& input) {
  Grid out = input;
  for (float& v : out.values)
    if (v < 0.0f) v *= kLeakySlope;
  return out;
}

Grid run_conv_chain(Grid x, const ConvSpec* specs, int count) {
  for (int i = 0; i < count; ++i) x = conv2d(x, specs[i]);
  return x;
}

Grid run_up_chain(Grid x, const ConvSpec* specs, int count) {
  for (int i = 0; i < count; ++i) x = pixel_shuffle_up(conv2d(x, specs[i]));
  return x;
}

}  // namespace tcm
