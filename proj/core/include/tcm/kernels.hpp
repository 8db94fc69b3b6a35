#ifndef TCM_KERNELS_HPP_
#define TCM_KERNELS_HPP_

#include <vector>

#include "tcm/grid.hpp"

namespace tcm {

enum class Activation { none, leaky };

inline constexpr float kLeakySlope = 0.01f;

// Odd square kernel, zero padding (k-1)/2, stride 1 or 2.
// Output spatial dims are ceil(in/stride). Accumulation is in double,
// one fixed order (in-channel, ky, kx) per output element.
struct ConvSpec {
  int kernel = 3;
  int in_channels = 0;
  int out_channels = 0;
  int stride = 1;
  std::vector<float> weights;  // out * in * k * k
  std::vector<float> bias;     // out
  Activation activation = Activation::none;

  size_t weight_count() const {
    return static_cast<size_t>(out_channels) * in_channels * kernel * kernel;
  }
  void validate() const;
};

// Two 3x3 stride-1 convs with a skip connection: out = x + c2(act(c1(x))).
// Plain block: c1 and c2 are N->N. Bottleneck block: c1 is N->M with M < N
// and c2 is M->N.
struct ResidualBlockSpec {
  ConvSpec conv1;  // activation leaky
  ConvSpec conv2;  // activation none
  void validate() const;
};

ConvSpec make_conv(int kernel, int in_ch, int out_ch, int stride,
                   Activation act);
ResidualBlockSpec make_residual_block(int channels);
ResidualBlockSpec make_bottleneck_block(int channels, int mid_channels);

Grid conv2d(const Grid& input, const ConvSpec& spec);

// Rearranges (4c, h, w) -> (c, 2h, 2w); value at (c, 2y+dy, 2x+dx) comes
// from input channel c*4 + dy*2 + dx at (y, x).
Grid pixel_shuffle_up(const Grid& input);

// out(c,y,x) = bilinear sample of source channel c at
// (y + flow[0](y,x), x + flow[1](y,x)); coordinates clamp to the edge.
Grid bilinear_warp(const Grid& source, const MotionField& flow);

// 2x2 block average; requires even dims.
Grid bilinear_downsample(const Grid& input);

Grid residual_forward(const Grid& input, const ResidualBlockSpec& spec);

Grid leaky_relu(const Grid& input);

// Chain helpers for the autoencoder stacks.
Grid run_conv_chain(Grid x, const ConvSpec* specs, int count);
// Each stage is conv then pixel shuffle (a subpixel upsampling layer).
Grid run_up_chain(Grid x, const ConvSpec* specs, int count);

}  // namespace tcm

#endif  // TCM_KERNELS_HPP_
