#include "tcm/conditional_codec.hpp"

#include <algorithm>
#include <string>

#include "tcm/errors.hpp"
#include "tcm/motion.hpp"
#include "tcm/portable_math.hpp"
#include "tcm/range_coder.hpp"

namespace tcm {

uint64_t FrameRecord::payload_bytes() const {
  uint64_t n = 0;
  for (const auto& p : payloads) n += p.payload.bytes.size();
  return n;
}

uint32_t frame_crc(const Frame& f) {
  return crc32(f.values.data(), f.values.size() * sizeof(float));
}

namespace {

Grid clamp01(Grid g) {
  for (float& v : g.values) v = std::clamp(v, 0.0f, 1.0f);
  return g;
}

// Payload slots per frame type.
constexpr int kMvMain = 0, kMvHyper = 1, kCtxMain = 2, kCtxHyper = 3;
constexpr int kImgMain = 0, kImgHyper = 1;

struct CodedLatent {
  CodedPayload coded;
  std::vector<int32_t> symbols;
  double estimated_bits = 0.0;
};

// Codes a latent with the per-channel factorized prior (plain rounding).
CodedLatent code_factorized(const Grid& latent, const std::vector<float>& loc,
                            const std::vector<float>& scale) {
  CodedLatent out;
  out.symbols = quantize_symbols(latent);
  compute_symbol_range(out.symbols, out.coded.s_min, out.coded.s_max);
  const auto tables =
      factorized_prior_tables(loc, scale, out.coded.s_min, out.coded.s_max);
  const size_t plane = latent.plane_size();
  RangeEncoder enc;
  for (size_t i = 0; i < out.symbols.size(); ++i) {
    const CdfTable& t = tables[i / plane];
    out.estimated_bits += t.bits_for(out.symbols[i]);
    enc.encode(out.symbols[i], t);
  }
  out.coded.payload = enc.finish();
  out.estimated_bits += kCoderFlushBits;
  return out;
}

std::vector<int32_t> decode_factorized(const CodedPayload& coded,
                                       const std::vector<float>& loc,
                                       const std::vector<float>& scale,
                                       size_t plane, size_t count) {
  const auto tables = factorized_prior_tables(loc, scale, coded.s_min,
                                              coded.s_max);
  RangeDecoder dec(coded.payload);
  std::vector<int32_t> symbols(count);
  for (size_t i = 0; i < count; ++i) symbols[i] = dec.decode(tables[i / plane]);
  return symbols;
}

// Codes mean-offset symbols with per-element Laplace tables.
CodedLatent code_conditional(const Grid& latent, const EntropyParameters& ep) {
  CodedLatent out;
  out.symbols = quantize_offset_symbols(latent, ep.mean);
  compute_symbol_range(out.symbols, out.coded.s_min, out.coded.s_max);
  RangeEncoder enc;
  for (size_t i = 0; i < out.symbols.size(); ++i) {
    // Offsets follow Laplace(0, b): table means stay zero.
    const CdfTable t = build_cdf_table(0.0, ep.scale.values[i],
                                       out.coded.s_min, out.coded.s_max);
    out.estimated_bits += t.bits_for(out.symbols[i]);
    enc.encode(out.symbols[i], t);
  }
  out.coded.payload = enc.finish();
  out.estimated_bits += kCoderFlushBits;
  return out;
}

std::vector<int32_t> decode_conditional(const CodedPayload& coded,
                                        const EntropyParameters& ep) {
  RangeDecoder dec(coded.payload);
  std::vector<int32_t> symbols(ep.scale.values.size());
  for (size_t i = 0; i < symbols.size(); ++i) {
    const CdfTable t =
        build_cdf_table(0.0, ep.scale.values[i], coded.s_min, coded.s_max);
    symbols[i] = dec.decode(t);
  }
  return symbols;
}

// Contextual encoder: C^0 joins the frame at the input, deeper contexts
// join after the stage that reaches their scale.
Grid contextual_encode(const Frame& x, const TemporalContextSet& ctx,
                       const CodecWeights& w) {
  const int m = w.config.tcm_contexts;
  Grid h = concat_channels(x, ctx.contexts[0]);
  h = conv2d(h, w.ctx_encoder[0]);
  for (int stage = 1; stage < 4; ++stage) {
    if (m > stage) h = concat_channels(h, ctx.contexts[stage]);
    h = conv2d(h, w.ctx_encoder[stage]);
  }
  return h;
}

// Contextual decoder (mirror) and frame generator. Returns (recon, F_t).
std::pair<Frame, Grid> reconstruct_inter(const Grid& latent_hat,
                                         const TemporalContextSet& ctx,
                                         const CodecWeights& w) {
  const int m = w.config.tcm_contexts;
  Grid h = pixel_shuffle_up(conv2d(latent_hat, w.ctx_decoder_up[0]));
  for (int stage = 1; stage < 4; ++stage) {
    const int scale = 4 - stage;  // context level joining before this stage
    if (m > scale) h = concat_channels(h, ctx.contexts[scale]);
    h = pixel_shuffle_up(conv2d(h, w.ctx_decoder_up[stage]));
  }
  // h is F_hat at full resolution; re-fill the finest context once more.
  Grid g = concat_channels(h, ctx.contexts[0]);
  g = conv2d(g, w.framegen_fuse);
  g = residual_forward(g, w.framegen_b1);
  Grid feature = residual_forward(g, w.framegen_b2);
  Frame recon = clamp01(conv2d(feature, w.framegen_out));
  return {std::move(recon), std::move(feature)};
}

Grid ctx_hyper_out(const Grid& hyper_hat, const CodecWeights& w) {
  Grid h = run_up_chain(hyper_hat, w.ctx_hyper_decoder_up.data(), 2);
  return conv2d(h, w.ctx_hyper_head);
}

void check_coded_dims(const FrameRecord& record, FrameType type,
                      size_t expected_payloads) {
  if (record.type != type)
    throw DecodeError("frame record type mismatch");
  if (record.payloads.size() != expected_payloads)
    throw DecodeError("frame record has wrong payload count");
}

}  // namespace

Grid temporal_context_encode(const TemporalContextSet& ctx,
                             const CodecWeights& w) {
  const int m = w.config.tcm_contexts;
  if (static_cast<int>(ctx.contexts.size()) < m)
    throw ConfigError("temporal_context_encode: missing context levels");
  Grid h = conv2d(ctx.contexts[0], w.temporal_encoder[0]);
  for (int stage = 1; stage < 4; ++stage) {
    if (m > stage) h = concat_channels(h, ctx.contexts[stage]);
    h = conv2d(h, w.temporal_encoder[stage]);
  }
  return h;
}

EntropyParameters fuse_priors(const Grid& f_c, const Grid& hyper_out,
                              const CodecWeights& w) {
  if (f_c.height != hyper_out.height || f_c.width != hyper_out.width)
    throw ConfigError("fuse_priors: latent dims mismatch");
  Grid h = concat_channels(f_c, hyper_out);
  h = conv2d(h, w.fusion1);
  h = conv2d(h, w.fusion2);
  h = conv2d(h, w.fusion_head);
  return split_entropy_parameters(h, w.config.latent_channels);
}

InterCodingResult encode_inter_frame(const Frame& x, const DpbEntry& dpb,
                                     const CodecWeights& w) {
  if (x.height != dpb.frame.height || x.width != dpb.frame.width)
    throw ConfigError("encode_inter_frame: frame dims must match DPB");
  if (x.height % 64 != 0 || x.width % 64 != 0)
    throw ConfigError("encode_inter_frame: dims must be multiples of 64");

  InterCodingResult out;
  out.record.type = FrameType::inter;
  out.record.payloads.resize(4);

  // Motion: estimate against the previous reconstruction, compress, and
  // from here on use only the reconstructed field.
  const MotionField flow = estimate_flow(x, dpb.frame);
  MvCoded mv = mv_compress(flow, w.mv);
  out.record.payloads[kMvMain] = std::move(mv.main);
  out.record.payloads[kMvHyper] = std::move(mv.hyper);
  out.mv_estimated_bits = mv.estimated_bits;

  out.contexts = mine_contexts(dpb.feature, mv.reconstructed, w.config.tcm(),
                               w.tcm);

  const Grid latent = contextual_encode(x, out.contexts, w);
  const Grid hyper = run_conv_chain(latent, w.ctx_hyper_encoder.data(), 2);

  CodedLatent hyper_coded =
      code_factorized(hyper, w.ctx_prior_loc, w.ctx_prior_scale);
  out.record.payloads[kCtxHyper] = std::move(hyper_coded.coded);
  const Grid hyper_hat = symbols_to_grid(hyper_coded.symbols, hyper.channels,
                                         hyper.height, hyper.width);

  const Grid f_c = temporal_context_encode(out.contexts, w);
  const EntropyParameters ep = fuse_priors(f_c, ctx_hyper_out(hyper_hat, w), w);

  CodedLatent main_coded = code_conditional(latent, ep);
  out.record.payloads[kCtxMain] = std::move(main_coded.coded);
  const Grid latent_hat = offsets_to_grid(main_coded.symbols, ep.mean);

  auto [recon, feature] = reconstruct_inter(latent_hat, out.contexts, w);
  out.recon = std::move(recon);
  out.feature = std::move(feature);
  out.record.recon_crc = frame_crc(out.recon);
  out.estimated_bits =
      mv.estimated_bits + hyper_coded.estimated_bits + main_coded.estimated_bits;
  return out;
}

std::pair<Frame, Grid> decode_inter_frame(const FrameRecord& record,
                                          const DpbEntry& dpb,
                                          const CodecWeights& w) {
  check_coded_dims(record, FrameType::inter, 4);
  const int H = dpb.frame.height, W = dpb.frame.width;

  const MotionField flow_hat =
      mv_decompress(record.payloads[kMvMain], record.payloads[kMvHyper], w.mv,
                    H, W);
  const TemporalContextSet ctx =
      mine_contexts(dpb.feature, flow_hat, w.config.tcm(), w.tcm);

  const int hz = w.config.hyper_channels;
  const size_t hplane = static_cast<size_t>(H / 64) * (W / 64);
  const auto hyper_syms =
      decode_factorized(record.payloads[kCtxHyper], w.ctx_prior_loc,
                        w.ctx_prior_scale, hplane, hz * hplane);
  const Grid hyper_hat = symbols_to_grid(hyper_syms, hz, H / 64, W / 64);

  const Grid f_c = temporal_context_encode(ctx, w);
  const EntropyParameters ep = fuse_priors(f_c, ctx_hyper_out(hyper_hat, w), w);

  const auto main_syms = decode_conditional(record.payloads[kCtxMain], ep);
  const Grid latent_hat = offsets_to_grid(main_syms, ep.mean);
  return reconstruct_inter(latent_hat, ctx, w);
}

IntraCodingResult encode_intra_frame(const Frame& x, const CodecWeights& w) {
  if (x.height % 64 != 0 || x.width % 64 != 0)
    throw ConfigError("encode_intra_frame: dims must be multiples of 64");
  IntraCodingResult out;
  out.record.type = FrameType::intra;
  out.record.payloads.resize(2);

  const Grid latent = run_conv_chain(x, w.img_encoder.data(), 4);
  const Grid hyper = run_conv_chain(latent, w.img_hyper_encoder.data(), 2);

  CodedLatent hyper_coded =
      code_factorized(hyper, w.img_prior_loc, w.img_prior_scale);
  out.record.payloads[kImgHyper] = std::move(hyper_coded.coded);
  const Grid hyper_hat = symbols_to_grid(hyper_coded.symbols, hyper.channels,
                                         hyper.height, hyper.width);

  Grid params = run_up_chain(hyper_hat, w.img_hyper_decoder_up.data(), 2);
  params = conv2d(params, w.img_hyper_head);
  const EntropyParameters ep =
      split_entropy_parameters(params, w.config.latent_channels);

  CodedLatent main_coded = code_conditional(latent, ep);
  out.record.payloads[kImgMain] = std::move(main_coded.coded);
  const Grid latent_hat = offsets_to_grid(main_coded.symbols, ep.mean);

  Grid rec = run_up_chain(latent_hat, w.img_decoder_up.data(), 4);
  out.recon = clamp01(conv2d(rec, w.img_decoder_out));
  out.record.recon_crc = frame_crc(out.recon);
  out.estimated_bits =
      hyper_coded.estimated_bits + main_coded.estimated_bits;
  return out;
}

Frame decode_intra_frame(const FrameRecord& record, const CodecWeights& w,
                         int height, int width) {
  check_coded_dims(record, FrameType::intra, 2);
  const int hz = w.config.hyper_channels;
  const size_t hplane = static_cast<size_t>(height / 64) * (width / 64);
  const auto hyper_syms =
      decode_factorized(record.payloads[kImgHyper], w.img_prior_loc,
                        w.img_prior_scale, hplane, hz * hplane);
  const Grid hyper_hat =
      symbols_to_grid(hyper_syms, hz, height / 64, width / 64);

  Grid params = run_up_chain(hyper_hat, w.img_hyper_decoder_up.data(), 2);
  params = conv2d(params, w.img_hyper_head);
  const EntropyParameters ep =
      split_entropy_parameters(params, w.config.latent_channels);

  const auto main_syms = decode_conditional(record.payloads[kImgMain], ep);
  const Grid latent_hat = offsets_to_grid(main_syms, ep.mean);
  Grid rec = run_up_chain(latent_hat, w.img_decoder_up.data(), 4);
  return clamp01(conv2d(rec, w.img_decoder_out));
}

}  // namespace tcm
