#include "tcm/video_codec.hpp"

#include <cmath>
#include <string>

#include "tcm/errors.hpp"
#include "tcm/metrics.hpp"

namespace tcm {
namespace {

constexpr int kPadMultiple = 64;

double payload_bits_of(const FrameRecord& r, int first, int count) {
  double bits = 0.0;
  for (int i = first; i < first + count; ++i)
    bits += 8.0 * static_cast<double>(r.payloads[i].payload.bytes.size());
  return bits;
}

}  // namespace

EncodeResult encode_video(const RawVideo& video, const WeightFile& weights,
                          int intra_period, int frame_limit, int cascade_T) {
  if (intra_period < 1) throw ConfigError("intra_period must be >= 1");
  if (video.channels != 3)
    throw ConfigError("encoder expects 3-channel input frames");
  int frames = video.frame_count;
  if (frame_limit > 0 && frame_limit < frames) frames = frame_limit;
  if (frames < 1) throw ConfigError("nothing to encode");
  if (video.width > UINT16_MAX || video.height > UINT16_MAX ||
      frames > UINT16_MAX || intra_period > UINT16_MAX)
    throw ConfigError("dimensions overflow 16-bit header fields");

  const CodecWeights w = assemble_weights(weights);
  const double lambda = w.config.lambda();
  const bool msssim_d = w.config.msssim_oriented();
  const int64_t pixels = static_cast<int64_t>(video.width) * video.height;

  EncodeResult out;
  out.container.header.flags = 0;
  if (video.width % kPadMultiple != 0 || video.height % kPadMultiple != 0)
    out.container.header.flags |= kFlagPadded;
  out.container.header.width = static_cast<uint16_t>(video.width);
  out.container.header.height = static_cast<uint16_t>(video.height);
  out.container.header.frame_count = static_cast<uint16_t>(frames);
  out.container.header.intra_period = static_cast<uint16_t>(intra_period);
  out.container.header.model_id = static_cast<uint8_t>(w.config.model_id);
  out.container.header.tcm_levels = static_cast<uint8_t>(w.config.tcm_levels);
  out.container.header.tcm_contexts =
      static_cast<uint8_t>(w.config.tcm_contexts);
  out.container.header.dpb_channels =
      static_cast<uint8_t>(w.config.dpb_channels);
  out.container.header.weight_digest = weight_digest(weights);

  DpbEntry dpb;
  double psnr_sum = 0.0, msssim_sum = 0.0;
  for (int i = 0; i < frames; ++i) {
    const Frame original = video_frame(video, i);
    const Frame padded = pad_to_multiple(original, kPadMultiple);
    FrameReport rep;
    rep.index = i;
    Frame padded_recon;

    if (i % intra_period == 0) {
      IntraCodingResult coded = encode_intra_frame(padded, w);
      rep.type = FrameType::intra;
      rep.estimated_bits = coded.estimated_bits;
      rep.ctx_bits = payload_bits_of(coded.record, 0, 2);
      padded_recon = std::move(coded.recon);
      const Grid feature = extract_intra_feature(padded_recon, w.tcm);
      dpb = dpb_update(padded_recon, feature, DpbSource::intra,
                       w.config.dpb_channels);
      out.container.frames.push_back(std::move(coded.record));
    } else {
      InterCodingResult coded = encode_inter_frame(padded, dpb, w);
      rep.type = FrameType::inter;
      rep.estimated_bits = coded.estimated_bits;
      rep.mv_bits = payload_bits_of(coded.record, 0, 2);
      rep.ctx_bits = payload_bits_of(coded.record, 2, 2);
      padded_recon = std::move(coded.recon);
      dpb = dpb_update(padded_recon, coded.feature, DpbSource::inter,
                       w.config.dpb_channels);
      out.container.frames.push_back(std::move(coded.record));
    }

    const FrameRecord& rec = out.container.frames.back();
    rep.payload_bytes = rec.payload_bytes();
    rep.bits = rec.payload_bits();

    const Frame recon = crop_frame(padded_recon, video.height, video.width);
    rep.mse = mse(original, recon);
    rep.psnr = psnr(original, recon);
    rep.ms_ssim = ms_ssim(original, recon);
    rep.distortion = msssim_d ? 1.0 - rep.ms_ssim : rep.mse;
    rep.loss = rd_loss(rep.distortion, rep.mv_bits, rep.ctx_bits, lambda,
                       pixels);
    psnr_sum += rep.psnr;
    msssim_sum += rep.ms_ssim;
    out.sequence.total_payload_bytes += rep.payload_bytes;
    out.frames.push_back(rep);
    out.reconstructions.push_back(recon);
  }

  out.sequence.total_bits = 8.0 * out.sequence.total_payload_bytes;
  out.sequence.bpp =
      bpp(static_cast<uint64_t>(out.sequence.total_bits), video.width,
          video.height, frames);
  out.sequence.mean_psnr = psnr_sum / frames;
  out.sequence.mean_ms_ssim = msssim_sum / frames;
  out.sequence.cascade_frames = std::min(cascade_T, frames);
  std::vector<double> first_losses;
  for (int i = 0; i < out.sequence.cascade_frames; ++i)
    first_losses.push_back(out.frames[i].loss);
  out.sequence.cascaded_loss =
      cascaded_loss(first_losses, out.sequence.cascade_frames);
  return out;
}

DecodeResult decode_video(const BitstreamContainer& container,
                          const WeightFile& weights) {
  const uint64_t digest = weight_digest(weights);
  if (digest != container.header.weight_digest)
    throw FormatError("weight digest mismatch: bitstream was encoded with "
                      "different weights");
  const CodecWeights w = assemble_weights(weights);

  const int width = container.header.width;
  const int height = container.header.height;
  const int ph = (height + kPadMultiple - 1) / kPadMultiple * kPadMultiple;
  const int pw = (width + kPadMultiple - 1) / kPadMultiple * kPadMultiple;

  DecodeResult out;
  out.video.width = width;
  out.video.height = height;
  out.video.channels = 3;
  out.video.frame_count = container.header.frame_count;
  out.video.data.assign(out.video.frame_bytes() * out.video.frame_count, 0);

  DpbEntry dpb;
  for (int i = 0; i < container.header.frame_count; ++i) {
    const FrameRecord& rec = container.frames[i];
    Frame padded_recon;
    if (rec.type == FrameType::intra) {
      padded_recon = decode_intra_frame(rec, w, ph, pw);
      const Grid feature = extract_intra_feature(padded_recon, w.tcm);
      dpb = dpb_update(padded_recon, feature, DpbSource::intra,
                       w.config.dpb_channels);
    } else {
      if (i == 0) throw DecodeError("stream must start with an intra frame");
      auto [recon, feature] = decode_inter_frame(rec, dpb, w);
      padded_recon = std::move(recon);
      dpb = dpb_update(padded_recon, feature, DpbSource::inter,
                       w.config.dpb_channels);
    }
    if (frame_crc(padded_recon) != rec.recon_crc)
      throw DecodeError("reconstruction CRC mismatch at frame " +
                        std::to_string(i));
    const Frame recon = crop_frame(padded_recon, height, width);
    set_video_frame(out.video, i, recon);
    out.report.frame_payload_bytes.push_back(rec.payload_bytes());
    out.reconstructions.push_back(recon);
  }
  out.report.frames = container.header.frame_count;
  return out;
}

}  // namespace tcm
