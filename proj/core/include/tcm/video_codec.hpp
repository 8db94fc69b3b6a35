#ifndef TCM_VIDEO_CODEC_HPP_
#define TCM_VIDEO_CODEC_HPP_

#include <vector>

#include "tcm/container.hpp"
#include "tcm/video_io.hpp"

namespace tcm {

struct FrameReport {
  int index = 0;
  FrameType type = FrameType::intra;
  uint64_t payload_bytes = 0;
  double bits = 0.0;            // 8 * payload bytes
  double estimated_bits = 0.0;  // table-based estimate incl. coder flush
  double mv_bits = 0.0;         // actual bits of the two mv payloads
  double ctx_bits = 0.0;        // actual bits of the main+hyper payloads
  double mse = 0.0;
  double psnr = 0.0;
  double ms_ssim = 0.0;
  double distortion = 0.0;  // MSE or 1-MS-SSIM per the model family
  double loss = 0.0;        // lambda * distortion + bits/pixel
};

struct SequenceReport {
  uint64_t total_payload_bytes = 0;
  double total_bits = 0.0;
  double bpp = 0.0;
  double mean_psnr = 0.0;
  double mean_ms_ssim = 0.0;
  double cascaded_loss = 0.0;  // mean loss over the first cascade_frames
  int cascade_frames = 0;
};

struct EncodeResult {
  BitstreamContainer container;
  std::vector<FrameReport> frames;
  SequenceReport sequence;
  // Cropped reconstructions, for bit-exactness checks against the decoder.
  std::vector<Frame> reconstructions;
};

struct DecodeReport {
  int frames = 0;
  std::vector<uint64_t> frame_payload_bytes;
};

struct DecodeResult {
  RawVideo video;
  DecodeReport report;
  std::vector<Frame> reconstructions;  // cropped float frames
};

// Encodes `frame_limit` frames (0 = all) with the given intra period:
// frame 0 and every intra_period-th frame is intra, the rest are
// conditionally coded P frames. Frames are mirror-padded to multiples of
// 64 internally.
EncodeResult encode_video(const RawVideo& video, const WeightFile& weights,
                          int intra_period, int frame_limit = 0,
                          int cascade_T = 4);

// Rebuilds the encoder's reconstructions from the bitstream alone.
// Rejects a weight-digest mismatch before decoding anything; verifies the
// per-frame reconstruction CRC and reports the frame index on mismatch.
DecodeResult decode_video(const BitstreamContainer& container,
                          const WeightFile& weights);

}  // namespace tcm

#endif  // TCM_VIDEO_CODEC_HPP_
