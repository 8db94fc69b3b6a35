#ifndef TCM_WEIGHTS_HPP_
#define TCM_WEIGHTS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tcm/motion.hpp"
#include "tcm/temporal_context.hpp"

namespace tcm {

// Rate points: index 0..3 trains against MSE, 4..7 against 1 - MS-SSIM.
inline constexpr std::array<double, 8> kLambdaTable = {256, 512, 1024, 2048,
                                                       8,   16,  32,   64};

struct CodecConfig {
  int model_id = 0;
  int tcm_levels = 3;
  int tcm_contexts = 3;
  int context_channels = 64;
  int dpb_channels = 64;
  int latent_channels = 96;  // contextual/intra latent f_y
  int hyper_channels = 64;
  int mv_latent_channels = 64;
  int mv_hyper_channels = 64;

  void validate() const;
  double lambda() const { return kLambdaTable[model_id]; }
  bool msssim_oriented() const { return model_id >= 4; }
  TcmConfig tcm() const {
    return TcmConfig{tcm_levels, tcm_contexts, context_channels, dpb_channels};
  }
};

// Everything the codec needs at run time, assembled from a weight file.
struct CodecWeights {
  CodecConfig config;
  MvWeights mv;
  TcmWeights tcm;

  std::array<ConvSpec, 4> ctx_encoder;
  std::array<ConvSpec, 4> ctx_decoder_up;  // conv -> 4c then pixel shuffle
  std::array<ConvSpec, 2> ctx_hyper_encoder;
  std::array<ConvSpec, 2> ctx_hyper_decoder_up;
  ConvSpec ctx_hyper_head;  // -> latent_channels (the fused "hyper_out")
  std::vector<float> ctx_prior_loc, ctx_prior_scale;
  std::array<ConvSpec, 4> temporal_encoder;
  ConvSpec fusion1, fusion2, fusion_head;  // head -> 2 * latent_channels

  ConvSpec framegen_fuse;
  ResidualBlockSpec framegen_b1, framegen_b2;
  ConvSpec framegen_out;

  std::array<ConvSpec, 4> img_encoder;
  std::array<ConvSpec, 4> img_decoder_up;
  ConvSpec img_decoder_out;
  std::array<ConvSpec, 2> img_hyper_encoder;
  std::array<ConvSpec, 2> img_hyper_decoder_up;
  ConvSpec img_hyper_head;  // -> 2 * latent_channels
  std::vector<float> img_prior_loc, img_prior_scale;
};

// Zero-valued weights with every shape wired for the config.
CodecWeights make_architecture(const CodecConfig& config);

// Visits every tensor in a fixed, config-independent order.
void walk_tensors(CodecWeights& w,
                  const std::function<void(const std::string&, ConvSpec&)>& conv,
                  const std::function<void(const std::string&, std::vector<float>&)>& prior);

struct NamedTensor {
  std::string name;
  std::vector<uint32_t> shape;
  std::vector<float> data;
};

struct WeightFile {
  uint8_t version = 1;
  CodecConfig config;
  uint64_t seed = 0;
  std::vector<NamedTensor> tensors;
};

// Deterministic pseudo-random initialization: conv weights and biases
// uniform in +-sqrt(6/(fan_in+fan_out)); prior locations uniform in
// +-0.5, prior scales uniform in [0.5, 2]. Same seed and config give a
// byte-identical file.
WeightFile init_weights(uint64_t seed, const CodecConfig& config);

// Validates every tensor name and shape against the configured
// architecture; any mismatch is a FormatError.
CodecWeights assemble_weights(const WeightFile& file);

std::vector<uint8_t> serialize_weights(const WeightFile& file);
WeightFile parse_weights(const std::vector<uint8_t>& bytes);
void save_weights(const WeightFile& file, const std::string& path);
WeightFile load_weights(const std::string& path);

// FNV-1a over the serialized bytes; stored in bitstream headers.
uint64_t weight_digest(const WeightFile& file);

}  // namespace tcm

#endif  // TCM_WEIGHTS_HPP_
