#include "tcm/weights.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "tcm/errors.hpp"
#include "tcm/portable_math.hpp"

namespace tcm {

void CodecConfig::validate() const {
  if (model_id < 0 || model_id >= static_cast<int>(kLambdaTable.size()))
    throw ConfigError("model_id must be in 0..7");
  if (tcm_levels < 1 || tcm_levels > 4)
    throw ConfigError("tcm_levels must be in 1..4");
  if (tcm_contexts < 1 || tcm_contexts > tcm_levels)
    throw ConfigError("tcm_contexts must be in 1..tcm_levels");
  if (dpb_channels < 2 || dpb_channels > 255)
    throw ConfigError("dpb_channels must be in 2..255");
  if (context_channels < 4 || context_channels > 512 ||
      latent_channels < 4 || latent_channels > 512 || hyper_channels < 4 ||
      hyper_channels > 512 || mv_latent_channels < 4 ||
      mv_latent_channels > 512 || mv_hyper_channels < 4 ||
      mv_hyper_channels > 512)
    throw ConfigError("channel widths must be in 4..512");
}

CodecWeights make_architecture(const CodecConfig& config) {
  config.validate();
  const int cc = config.context_channels;
  const int dpb = config.dpb_channels;
  const int fy = config.latent_channels;
  const int hz = config.hyper_channels;
  const int mvl = config.mv_latent_channels;
  const int mvh = config.mv_hyper_channels;
  const int m = config.tcm_contexts;
  const int L = config.tcm_levels;
  const auto leaky = Activation::leaky;
  const auto none = Activation::none;

  CodecWeights w;
  w.config = config;

  // MV autoencoder: stride-2 taper down to H/16, mirrored back up.
  w.mv.latent_channels = mvl;
  w.mv.hyper_channels = mvh;
  w.mv.encoder = {make_conv(3, 2, 32, 2, leaky),
                  make_conv(3, 32, 48, 2, leaky),
                  make_conv(3, 48, 64, 2, leaky),
                  make_conv(3, 64, mvl, 2, none)};
  w.mv.hyper_encoder = {make_conv(3, mvl, mvh, 2, leaky),
                        make_conv(3, mvh, mvh, 2, none)};
  w.mv.hyper_decoder_up = {make_conv(3, mvh, 4 * mvh, 1, leaky),
                           make_conv(3, mvh, 4 * mvh, 1, leaky)};
  w.mv.hyper_head = make_conv(3, mvh, 2 * mvl, 1, none);
  w.mv.decoder_up = {make_conv(3, mvl, 4 * 64, 1, leaky),
                     make_conv(3, 64, 4 * 48, 1, leaky),
                     make_conv(3, 48, 4 * 32, 1, leaky),
                     make_conv(3, 32, 4 * 32, 1, leaky)};
  w.mv.decoder_out = make_conv(3, 32, 2, 1, none);
  w.mv.prior_loc.assign(mvh, 0.0f);
  w.mv.prior_scale.assign(mvh, 1.0f);

  // TCM hierarchy.
  w.tcm.level.resize(L);
  for (int l = 0; l < L; ++l) {
    auto& lev = w.tcm.level[l];
    lev.extract_conv = (l == 0) ? make_conv(3, dpb, cc, 1, leaky)
                                : make_conv(3, cc, cc, 2, leaky);
    lev.extract_res = make_residual_block(cc);
    const int refine_in = (l == L - 1) ? cc : 2 * cc;
    lev.refine_conv = make_conv(3, refine_in, cc, 1, leaky);
    lev.refine_res = make_residual_block(cc);
  }
  w.tcm.up.resize(L - 1);
  for (int l = 0; l < L - 1; ++l) {
    w.tcm.up[l].conv = make_conv(3, cc, 4 * cc, 1, leaky);
    w.tcm.up[l].res = make_residual_block(cc);
  }
  w.tcm.intra_feature1 = make_conv(3, 3, cc, 1, leaky);
  w.tcm.intra_feature2 = make_conv(3, cc, dpb, 1, none);

  // Contextual encoder-decoder; contexts join at their matching scales.
  auto ctx_at = [&](int level) { return level < m ? cc : 0; };
  w.ctx_encoder = {make_conv(3, 3 + ctx_at(0), cc, 2, leaky),
                   make_conv(3, cc + ctx_at(1), cc, 2, leaky),
                   make_conv(3, cc + ctx_at(2), cc, 2, leaky),
                   make_conv(3, cc + ctx_at(3), fy, 2, none)};
  w.ctx_decoder_up = {make_conv(3, fy, 4 * cc, 1, leaky),
                      make_conv(3, cc + ctx_at(3), 4 * cc, 1, leaky),
                      make_conv(3, cc + ctx_at(2), 4 * cc, 1, leaky),
                      make_conv(3, cc + ctx_at(1), 4 * cc, 1, leaky)};
  w.ctx_hyper_encoder = {make_conv(3, fy, hz, 2, leaky),
                         make_conv(3, hz, hz, 2, none)};
  w.ctx_hyper_decoder_up = {make_conv(3, hz, 4 * hz, 1, leaky),
                            make_conv(3, hz, 4 * hz, 1, leaky)};
  w.ctx_hyper_head = make_conv(3, hz, fy, 1, none);
  w.ctx_prior_loc.assign(hz, 0.0f);
  w.ctx_prior_scale.assign(hz, 1.0f);
  w.temporal_encoder = {make_conv(3, ctx_at(0), cc, 2, leaky),
                        make_conv(3, cc + ctx_at(1), cc, 2, leaky),
                        make_conv(3, cc + ctx_at(2), cc, 2, leaky),
                        make_conv(3, cc + ctx_at(3), cc, 2, none)};
  w.fusion1 = make_conv(3, cc + fy, 128, 1, leaky);
  w.fusion2 = make_conv(3, 128, 128, 1, leaky);
  w.fusion_head = make_conv(1, 128, 2 * fy, 1, none);

  // Frame generator; the feature before framegen_out is what the DPB keeps.
  w.framegen_fuse = make_conv(3, 2 * cc, dpb, 1, leaky);
  w.framegen_b1 = make_bottleneck_block(dpb, dpb / 2);
  w.framegen_b2 = make_bottleneck_block(dpb, dpb / 2);
  w.framegen_out = make_conv(3, dpb, 3, 1, none);

  // Intra codec: plain hyper-prior image autoencoder from the same parts.
  w.img_encoder = {make_conv(3, 3, cc, 2, leaky),
                   make_conv(3, cc, cc, 2, leaky),
                   make_conv(3, cc, cc, 2, leaky),
                   make_conv(3, cc, fy, 2, none)};
  w.img_decoder_up = {make_conv(3, fy, 4 * cc, 1, leaky),
                      make_conv(3, cc, 4 * cc, 1, leaky),
                      make_conv(3, cc, 4 * cc, 1, leaky),
                      make_conv(3, cc, 4 * cc, 1, leaky)};
  w.img_decoder_out = make_conv(3, cc, 3, 1, none);
  w.img_hyper_encoder = {make_conv(3, fy, hz, 2, leaky),
                         make_conv(3, hz, hz, 2, none)};
  w.img_hyper_decoder_up = {make_conv(3, hz, 4 * hz, 1, leaky),
                            make_conv(3, hz, 4 * hz, 1, leaky)};
  w.img_hyper_head = make_conv(3, hz, 2 * fy, 1, none);
  w.img_prior_loc.assign(hz, 0.0f);
  w.img_prior_scale.assign(hz, 1.0f);
  return w;
}

void walk_tensors(
    CodecWeights& w,
    const std::function<void(const std::string&, ConvSpec&)>& conv,
    const std::function<void(const std::string&, std::vector<float>&)>& prior) {
  auto res = [&](const std::string& name, ResidualBlockSpec& r) {
    conv(name + ".c1", r.conv1);
    conv(name + ".c2", r.conv2);
  };
  for (int i = 0; i < 4; ++i)
    conv("mv.enc." + std::to_string(i), w.mv.encoder[i]);
  for (int i = 0; i < 2; ++i)
    conv("mv.hyper.enc." + std::to_string(i), w.mv.hyper_encoder[i]);
  for (int i = 0; i < 2; ++i)
    conv("mv.hyper.dec." + std::to_string(i), w.mv.hyper_decoder_up[i]);
  conv("mv.hyper.head", w.mv.hyper_head);
  for (int i = 0; i < 4; ++i)
    conv("mv.dec." + std::to_string(i), w.mv.decoder_up[i]);
  conv("mv.dec.out", w.mv.decoder_out);
  prior("mv.prior.loc", w.mv.prior_loc);
  prior("mv.prior.scale", w.mv.prior_scale);

  for (size_t l = 0; l < w.tcm.level.size(); ++l) {
    const std::string base = "tcm.level" + std::to_string(l);
    conv(base + ".extract.conv", w.tcm.level[l].extract_conv);
    res(base + ".extract.res", w.tcm.level[l].extract_res);
    conv(base + ".refine.conv", w.tcm.level[l].refine_conv);
    res(base + ".refine.res", w.tcm.level[l].refine_res);
  }
  for (size_t l = 0; l < w.tcm.up.size(); ++l) {
    const std::string base = "tcm.up" + std::to_string(l);
    conv(base + ".conv", w.tcm.up[l].conv);
    res(base + ".res", w.tcm.up[l].res);
  }
  conv("tcm.ifeat.0", w.tcm.intra_feature1);
  conv("tcm.ifeat.1", w.tcm.intra_feature2);

  for (int i = 0; i < 4; ++i)
    conv("ctx.enc." + std::to_string(i), w.ctx_encoder[i]);
  for (int i = 0; i < 4; ++i)
    conv("ctx.dec." + std::to_string(i), w.ctx_decoder_up[i]);
  for (int i = 0; i < 2; ++i)
    conv("ctx.hyper.enc." + std::to_string(i), w.ctx_hyper_encoder[i]);
  for (int i = 0; i < 2; ++i)
    conv("ctx.hyper.dec." + std::to_string(i), w.ctx_hyper_decoder_up[i]);
  conv("ctx.hyper.head", w.ctx_hyper_head);
  prior("ctx.prior.loc", w.ctx_prior_loc);
  prior("ctx.prior.scale", w.ctx_prior_scale);
  for (int i = 0; i < 4; ++i)
    conv("ctx.temporal." + std::to_string(i), w.temporal_encoder[i]);
  conv("ctx.fusion.0", w.fusion1);
  conv("ctx.fusion.1", w.fusion2);
  conv("ctx.fusion.head", w.fusion_head);

  conv("fg.fuse", w.framegen_fuse);
  res("fg.b1", w.framegen_b1);
  res("fg.b2", w.framegen_b2);
  conv("fg.out", w.framegen_out);

  for (int i = 0; i < 4; ++i)
    conv("img.enc." + std::to_string(i), w.img_encoder[i]);
  for (int i = 0; i < 4; ++i)
    conv("img.dec." + std::to_string(i), w.img_decoder_up[i]);
  conv("img.dec.out", w.img_decoder_out);
  for (int i = 0; i < 2; ++i)
    conv("img.hyper.enc." + std::to_string(i), w.img_hyper_encoder[i]);
  for (int i = 0; i < 2; ++i)
    conv("img.hyper.dec." + std::to_string(i), w.img_hyper_decoder_up[i]);
  conv("img.hyper.head", w.img_hyper_head);
  prior("img.prior.loc", w.img_prior_loc);
  prior("img.prior.scale", w.img_prior_scale);
}

namespace {

class UniformSource {
 public:
  explicit UniformSource(uint64_t seed) : gen_(seed) {}
  // [0,1) from the top 53 bits; identical on every platform.
  double next() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  double range(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace

WeightFile init_weights(uint64_t seed, const CodecConfig& config) {
  CodecWeights arch = make_architecture(config);
  UniformSource rng(seed);
  WeightFile file;
  file.config = config;
  file.seed = seed;

  walk_tensors(
      arch,
      [&](const std::string& name, ConvSpec& c) {
        const double fan_in =
            static_cast<double>(c.in_channels) * c.kernel * c.kernel;
        const double fan_out =
            static_cast<double>(c.out_channels) * c.kernel * c.kernel;
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (auto& v : c.weights)
          v = static_cast<float>(rng.range(-bound, bound));
        for (auto& v : c.bias)
          v = static_cast<float>(rng.range(-bound, bound));
        file.tensors.push_back(
            {name + ".w",
             {static_cast<uint32_t>(c.out_channels),
              static_cast<uint32_t>(c.in_channels),
              static_cast<uint32_t>(c.kernel), static_cast<uint32_t>(c.kernel)},
             c.weights});
        file.tensors.push_back(
            {name + ".b", {static_cast<uint32_t>(c.out_channels)}, c.bias});
      },
      [&](const std::string& name, std::vector<float>& v) {
        const bool is_scale = name.find("scale") != std::string::npos;
        for (auto& x : v)
          x = static_cast<float>(is_scale ? rng.range(0.5, 2.0)
                                          : rng.range(-0.5, 0.5));
        file.tensors.push_back(
            {name, {static_cast<uint32_t>(v.size())}, v});
      });
  return file;
}

CodecWeights assemble_weights(const WeightFile& file) {
  CodecWeights w = make_architecture(file.config);
  size_t idx = 0;
  auto take = [&](const std::string& name,
                  const std::vector<uint32_t>& shape) -> const NamedTensor& {
    if (idx >= file.tensors.size())
      throw FormatError("weight file: missing tensor " + name);
    const NamedTensor& t = file.tensors[idx++];
    if (t.name != name)
      throw FormatError("weight file: expected tensor '" + name + "', found '" +
                        t.name + "'");
    if (t.shape != shape)
      throw FormatError("weight file: tensor '" + name + "' has wrong shape");
    size_t n = 1;
    for (uint32_t d : shape) n *= d;
    if (t.data.size() != n)
      throw FormatError("weight file: tensor '" + name + "' has wrong size");
    return t;
  };
  walk_tensors(
      w,
      [&](const std::string& name, ConvSpec& c) {
        c.weights = take(name + ".w",
                         {static_cast<uint32_t>(c.out_channels),
                          static_cast<uint32_t>(c.in_channels),
                          static_cast<uint32_t>(c.kernel),
                          static_cast<uint32_t>(c.kernel)})
                        .data;
        c.bias =
            take(name + ".b", {static_cast<uint32_t>(c.out_channels)}).data;
      },
      [&](const std::string& name, std::vector<float>& v) {
        v = take(name, {static_cast<uint32_t>(v.size())}).data;
      });
  if (idx != file.tensors.size())
    throw FormatError("weight file: unexpected extra tensors");
  return w;
}

namespace {

void put_u8(std::vector<uint8_t>& b, uint8_t v) { b.push_back(v); }
void put_u16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(v & 0xFF);
  b.push_back(v >> 8);
}
void put_u32(std::vector<uint8_t>& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}
void put_u64(std::vector<uint8_t>& b, uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}
void put_f32(std::vector<uint8_t>& b, float v) {
  uint32_t u;
  std::memcpy(&u, &v, 4);
  put_u32(b, u);
}

struct Reader {
  const std::vector<uint8_t>& b;
  size_t pos = 0;
  uint8_t u8() {
    if (pos + 1 > b.size()) throw FormatError("weight file truncated");
    return b[pos++];
  }
  uint16_t u16() {
    uint16_t v = u8();
    return static_cast<uint16_t>(v | (u8() << 8));
  }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(u8()) << (8 * i);
    return v;
  }
  uint64_t u64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(u8()) << (8 * i);
    return v;
  }
  float f32() {
    const uint32_t u = u32();
    float v;
    std::memcpy(&v, &u, 4);
    return v;
  }
};

constexpr char kWeightMagic[4] = {'T', 'C', 'M', 'W'};

}  // namespace

std::vector<uint8_t> serialize_weights(const WeightFile& file) {
  std::vector<uint8_t> b;
  b.insert(b.end(), kWeightMagic, kWeightMagic + 4);
  put_u8(b, file.version);
  put_u8(b, static_cast<uint8_t>(file.config.model_id));
  put_u8(b, static_cast<uint8_t>(file.config.tcm_levels));
  put_u8(b, static_cast<uint8_t>(file.config.tcm_contexts));
  put_u8(b, static_cast<uint8_t>(file.config.dpb_channels));
  put_u16(b, static_cast<uint16_t>(file.config.context_channels));
  put_u16(b, static_cast<uint16_t>(file.config.latent_channels));
  put_u16(b, static_cast<uint16_t>(file.config.hyper_channels));
  put_u16(b, static_cast<uint16_t>(file.config.mv_latent_channels));
  put_u16(b, static_cast<uint16_t>(file.config.mv_hyper_channels));
  put_u64(b, file.seed);
  put_u32(b, static_cast<uint32_t>(file.tensors.size()));
  for (const auto& t : file.tensors) {
    put_u16(b, static_cast<uint16_t>(t.name.size()));
    b.insert(b.end(), t.name.begin(), t.name.end());
    put_u8(b, static_cast<uint8_t>(t.shape.size()));
    for (uint32_t d : t.shape) put_u32(b, d);
    for (float v : t.data) put_f32(b, v);
  }
  return b;
}

WeightFile parse_weights(const std::vector<uint8_t>& bytes) {
  Reader r{bytes};
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::memcmp(magic, kWeightMagic, 4) != 0)
    throw FormatError("weight file: bad magic");
  WeightFile f;
  f.version = r.u8();
  if (f.version != 1) throw FormatError("weight file: unsupported version");
  f.config.model_id = r.u8();
  f.config.tcm_levels = r.u8();
  f.config.tcm_contexts = r.u8();
  f.config.dpb_channels = r.u8();
  f.config.context_channels = r.u16();
  f.config.latent_channels = r.u16();
  f.config.hyper_channels = r.u16();
  f.config.mv_latent_channels = r.u16();
  f.config.mv_hyper_channels = r.u16();
  f.seed = r.u64();
  f.config.validate();
  const uint32_t count = r.u32();
  f.tensors.resize(count);
  for (auto& t : f.tensors) {
    const uint16_t name_len = r.u16();
    t.name.resize(name_len);
    for (auto& c : t.name) c = static_cast<char>(r.u8());
    const uint8_t ndim = r.u8();
    t.shape.resize(ndim);
    size_t n = 1;
    for (auto& d : t.shape) {
      d = r.u32();
      n *= d;
    }
    if (n > (1u << 28)) throw FormatError("weight file: tensor too large");
    t.data.resize(n);
    for (auto& v : t.data) v = r.f32();
  }
  if (r.pos != bytes.size())
    throw FormatError("weight file: trailing bytes");
  return f;
}

void save_weights(const WeightFile& file, const std::string& path) {
  const auto bytes = serialize_weights(file);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write weight file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to weight file: " + path);
}

WeightFile load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weight file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return parse_weights(bytes);
}

uint64_t weight_digest(const WeightFile& file) {
  const auto bytes = serialize_weights(file);
  return fnv1a64(bytes.data(), bytes.size());
}

}  // namespace tcm
