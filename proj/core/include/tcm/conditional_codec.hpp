#ifndef TCM_CONDITIONAL_CODEC_HPP_
#define TCM_CONDITIONAL_CODEC_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "tcm/entropy.hpp"
#include "tcm/weights.hpp"

namespace tcm {

enum class FrameType : uint8_t { intra = 0, inter = 1 };

// One coded frame. Payload order is fixed: inter frames carry
// mv_main, mv_hyper, ctx_main, ctx_hyper; intra frames img_main, img_hyper.
struct FrameRecord {
  FrameType type = FrameType::intra;
  std::vector<CodedPayload> payloads;
  uint32_t recon_crc = 0;

  uint64_t payload_bytes() const;
  double payload_bits() const { return 8.0 * payload_bytes(); }
};

struct RdConfig {
  double lambda = 256.0;
  int cascade_T = 4;
};

struct InterCodingResult {
  FrameRecord record;
  Frame recon;       // exactly what the decoder reproduces
  Grid feature;      // F_t, tapped before the frame generator's last conv
  double estimated_bits = 0.0;   // table-based, includes coder flush
  double mv_estimated_bits = 0.0;
  TemporalContextSet contexts;   // stage buffers, for inspection
};

struct IntraCodingResult {
  FrameRecord record;
  Frame recon;
  double estimated_bits = 0.0;
};

// Progressively downsamples the emitted contexts, each joining at its
// matching scale, into the temporal prior f_c at latent resolution.
Grid temporal_context_encode(const TemporalContextSet& contexts,
                             const CodecWeights& w);

// Concatenates the temporal prior with the decoded hyper feature and
// produces the Laplace parameters for the contextual latent.
EntropyParameters fuse_priors(const Grid& f_c, const Grid& hyper_out,
                              const CodecWeights& w);

// Full inter-frame coding pass. Runs motion estimation and compression,
// context mining from the *reconstructed* motion, the contextual encoder,
// entropy coding, and the identical decode path the decoder will run.
InterCodingResult encode_inter_frame(const Frame& x, const DpbEntry& dpb,
                                     const CodecWeights& w);

std::pair<Frame, Grid> decode_inter_frame(const FrameRecord& record,
                                          const DpbEntry& dpb,
                                          const CodecWeights& w);

IntraCodingResult encode_intra_frame(const Frame& x, const CodecWeights& w);

Frame decode_intra_frame(const FrameRecord& record, const CodecWeights& w,
                         int height, int width);

uint32_t frame_crc(const Frame& f);

}  // namespace tcm

#endif  // TCM_CONDITIONAL_CODEC_HPP_
