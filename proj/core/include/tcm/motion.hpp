#ifndef TCM_MOTION_HPP_
#define TCM_MOTION_HPP_

#include <array>
#include <vector>

#include "tcm/grid.hpp"
#include "tcm/kernels.hpp"
#include "tcm/range_coder.hpp"

namespace tcm {

struct FlowConfig {
  int search_radius = 4;
  int block = 8;
  int pyramid_levels = 3;
};

// Coarse-to-fine block matching under SAD on the luma plane. Every pixel
// receives its block's vector. Vectors are clamped to
// search_radius * 2^(pyramid_levels-1) per component. Encoder-side only;
// the rest of the pipeline accepts any finite field.
MotionField estimate_flow(const Frame& current, const Frame& reference,
                          const FlowConfig& config = {});

// MV autoencoder with a hyper prior: four stride-2 stages down to H/16,
// mirrored back up with subpixel upsampling. The hyper latent is coded
// with the per-channel factorized prior; the main latent uses plain
// rounding with Laplace parameters from the hyper decoder.
struct MvWeights {
  std::array<ConvSpec, 4> encoder;
  std::array<ConvSpec, 2> hyper_encoder;
  std::array<ConvSpec, 2> hyper_decoder_up;  // conv -> 4c, then shuffle
  ConvSpec hyper_head;                       // -> 2 * latent (mean, scale)
  std::array<ConvSpec, 4> decoder_up;
  ConvSpec decoder_out;  // -> 2 channels
  std::vector<float> prior_loc;    // per hyper channel
  std::vector<float> prior_scale;  // per hyper channel
  int latent_channels = 64;
  int hyper_channels = 64;
};

struct CodedPayload {
  Payload payload;
  int s_min = 0;
  int s_max = 0;
};

struct MvCoded {
  CodedPayload main;
  CodedPayload hyper;
  MotionField reconstructed;  // exactly what mv_decompress will produce
  double estimated_bits = 0.0;
};

MvCoded mv_compress(const MotionField& flow, const MvWeights& weights);

MotionField mv_decompress(const CodedPayload& main, const CodedPayload& hyper,
                          const MvWeights& weights, int height, int width);

}  // namespace tcm

#endif  // TCM_MOTION_HPP_
