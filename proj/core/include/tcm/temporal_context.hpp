#ifndef TCM_TEMPORAL_CONTEXT_HPP_
#define TCM_TEMPORAL_CONTEXT_HPP_

#include <cstdint>
#include <vector>

#include "tcm/kernels.hpp"

namespace tcm {

struct TcmConfig {
  int levels = 3;            // L, hierarchy depth (1..4)
  int emitted = 3;           // m <= L, contexts handed to the codec
  int context_channels = 64; // width of every level
  int dpb_channels = 64;     // width of the propagated feature
  void validate() const;
};

// Weights for one hierarchy level: extraction (stride-2 conv + residual
// block; stride 1 at level 0) and refinement (conv + residual block).
// The deepest level's refine conv takes the warped feature alone; every
// other level refines the concatenation with the upsampled deeper level.
struct TcmLevelWeights {
  ConvSpec extract_conv;
  ResidualBlockSpec extract_res;
  ConvSpec refine_conv;
  ResidualBlockSpec refine_res;
};

// Subpixel layer (conv + pixel shuffle) and a residual block; lifts level
// l+1 features to level l resolution.
struct TcmUpsampleWeights {
  ConvSpec conv;
  ResidualBlockSpec res;
};

struct TcmWeights {
  std::vector<TcmLevelWeights> level;     // size L
  std::vector<TcmUpsampleWeights> up;     // size L-1
  ConvSpec intra_feature1;                // 3 -> context_channels
  ConvSpec intra_feature2;                // context_channels -> dpb_channels
};

// All intermediate buffers of one mining pass, kept for inspection.
struct TemporalContextSet {
  std::vector<Grid> contexts;         // the m emitted contexts, finest first
  std::vector<Grid> extracted;        // per level
  std::vector<Grid> warped;           // per level
  std::vector<Grid> fused;            // per level below the deepest
  std::vector<MotionField> level_mv;  // per level
};

enum class DpbSource : uint8_t { intra = 0, inter = 1 };

// The single-entry decoded picture buffer: previous reconstruction plus
// the feature propagated from before the frame generator's last conv.
struct DpbEntry {
  Frame frame;
  Grid feature;
  DpbSource source = DpbSource::intra;
};

// Level 0 is the field itself; each deeper level is the bilinear
// downsample of the previous one with both components divided by 2.
std::vector<MotionField> derive_multiscale_mv(const MotionField& flow,
                                              int levels);

// Extract multi-scale features from the propagated feature, warp each
// level with the matching-scale motion, fuse top-down through subpixel
// upsampling, and refine into the temporal contexts.
TemporalContextSet mine_contexts(const Grid& prev_feature,
                                 const MotionField& decoded_flow,
                                 const TcmConfig& config,
                                 const TcmWeights& weights);

// Feature for the DPB after an intra frame, from the reconstruction.
Grid extract_intra_feature(const Frame& recon, const TcmWeights& weights);

// Replaces the buffer content; feature channel count must match the
// previous entry (or the configured width for the first entry).
DpbEntry dpb_update(const Frame& recon, const Grid& feature, DpbSource source,
                    int dpb_channels);

}  // namespace tcm

#endif  // TCM_TEMPORAL_CONTEXT_HPP_
