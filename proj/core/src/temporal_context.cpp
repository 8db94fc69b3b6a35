#include "tcm/temporal_context.hpp"

#include <string>

#include "tcm/errors.hpp"

namespace tcm {

void TcmConfig::validate() const {
  if (levels < 1 || levels > 4)
    throw ConfigError("tcm levels must be in 1..4");
  if (emitted < 1 || emitted > levels)
    throw ConfigError("tcm emitted contexts must be in 1..levels");
  if (context_channels < 1 || dpb_channels < 2)
    throw ConfigError("tcm channel widths too small");
}

std::vector<MotionField> derive_multiscale_mv(const MotionField& flow,
                                              int levels) {
  if (flow.channels != 2)
    throw ConfigError("derive_multiscale_mv: flow must have 2 channels");
  const int div = 1 << (levels - 1);
  if (flow.height % div != 0 || flow.width % div != 0)
    throw ConfigError("derive_multiscale_mv: dims must divide by 2^(L-1)");
  std::vector<MotionField> out;
  out.reserve(levels);
  out.push_back(flow);
  for (int l = 1; l < levels; ++l) {
    Grid d = bilinear_downsample(out.back());
    for (float& v : d.values) v *= 0.5f;
    out.push_back(std::move(d));
  }
  return out;
}

TemporalContextSet mine_contexts(const Grid& prev_feature,
                                 const MotionField& decoded_flow,
                                 const TcmConfig& config,
                                 const TcmWeights& weights) {
  config.validate();
  if (prev_feature.height != decoded_flow.height ||
      prev_feature.width != decoded_flow.width)
    throw ConfigError("mine_contexts: feature and flow dims must match");
  if (prev_feature.channels != config.dpb_channels)
    throw ConfigError("mine_contexts: feature has " +
                      std::to_string(prev_feature.channels) +
                      " channels, config expects " +
                      std::to_string(config.dpb_channels));
  if (static_cast<int>(weights.level.size()) != config.levels ||
      static_cast<int>(weights.up.size()) != config.levels - 1)
    throw ConfigError("mine_contexts: weight level count mismatch");

  const int L = config.levels;
  TemporalContextSet set;
  set.level_mv = derive_multiscale_mv(decoded_flow, L);

  set.extracted.reserve(L);
  for (int l = 0; l < L; ++l) {
    const Grid& src = (l == 0) ? prev_feature : set.extracted[l - 1];
    Grid f = conv2d(src, weights.level[l].extract_conv);
    set.extracted.push_back(residual_forward(f, weights.level[l].extract_res));
  }

  set.warped.reserve(L);
  for (int l = 0; l < L; ++l)
    set.warped.push_back(bilinear_warp(set.extracted[l], set.level_mv[l]));

  // Top-down refinement. The deepest level has no deeper neighbour to
  // fuse, so its refine input is the warped feature itself.
  std::vector<Grid> contexts(L);
  set.fused.assign(L > 1 ? L - 1 : 0, Grid());
  for (int l = L - 1; l >= 0; --l) {
    Grid refine_in;
    if (l == L - 1) {
      refine_in = set.warped[l];
    } else {
      Grid up = pixel_shuffle_up(conv2d(set.warped[l + 1], weights.up[l].conv));
      up = residual_forward(up, weights.up[l].res);
      set.fused[l] = concat_channels(set.warped[l], up);
      refine_in = set.fused[l];
    }
    Grid residue = conv2d(refine_in, weights.level[l].refine_conv);
    residue = residual_forward(residue, weights.level[l].refine_res);
    contexts[l] = add_grids(set.warped[l], residue);
  }

  set.contexts.assign(contexts.begin(), contexts.begin() + config.emitted);
  return set;
}

Grid extract_intra_feature(const Frame& recon, const TcmWeights& weights) {
  Grid f = conv2d(recon, weights.intra_feature1);
  return conv2d(f, weights.intra_feature2);
}

DpbEntry dpb_update(const Frame& recon, const Grid& feature, DpbSource source,
                    int dpb_channels) {
  if (feature.channels != dpb_channels)
    throw ConfigError("dpb_update: feature has " +
                      std::to_string(feature.channels) +
                      " channels, expected " + std::to_string(dpb_channels));
  if (feature.height != recon.height || feature.width != recon.width)
    throw ConfigError("dpb_update: feature dims must equal frame dims");
  return DpbEntry{recon, feature, source};
}

}  // namespace tcm
