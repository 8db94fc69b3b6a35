#include "tcm/container.hpp"

#include <cstring>
#include <fstream>

#include "tcm/errors.hpp"

namespace tcm {
namespace {

constexpr char kMagic[4] = {'T', 'C', 'M', 'C'};

void put_u8(std::vector<uint8_t>& b, uint8_t v) { b.push_back(v); }
void put_u16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(v & 0xFF);
  b.push_back(v >> 8);
}
void put_i16(std::vector<uint8_t>& b, int16_t v) {
  put_u16(b, static_cast<uint16_t>(v));
}
void put_u32(std::vector<uint8_t>& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}
void put_u64(std::vector<uint8_t>& b, uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}

struct Reader {
  const std::vector<uint8_t>& b;
  size_t pos = 0;
  uint8_t u8() {
    if (pos + 1 > b.size()) throw FormatError("container truncated");
    return b[pos++];
  }
  uint16_t u16() {
    const uint16_t lo = u8();
    return static_cast<uint16_t>(lo | (u8() << 8));
  }
  int16_t i16() { return static_cast<int16_t>(u16()); }
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
};

}  // namespace

std::vector<uint8_t> serialize_container(const BitstreamContainer& c) {
  if (c.frames.size() != c.header.frame_count)
    throw FormatError("container: frame count mismatch");
  std::vector<uint8_t> b;
  b.insert(b.end(), kMagic, kMagic + 4);
  put_u8(b, c.header.version);
  put_u8(b, c.header.flags);
  put_u16(b, c.header.width);
  put_u16(b, c.header.height);
  put_u16(b, c.header.frame_count);
  put_u16(b, c.header.intra_period);
  put_u8(b, c.header.model_id);
  put_u8(b, c.header.tcm_levels);
  put_u8(b, c.header.tcm_contexts);
  put_u8(b, c.header.dpb_channels);
  put_u64(b, c.header.weight_digest);
  for (const auto& f : c.frames) {
    put_u8(b, static_cast<uint8_t>(f.type));
    if (f.payloads.size() > 255)
      throw FormatError("container: too many payloads in one frame");
    put_u8(b, static_cast<uint8_t>(f.payloads.size()));
    for (const auto& p : f.payloads) {
      put_i16(b, static_cast<int16_t>(p.s_min));
      put_i16(b, static_cast<int16_t>(p.s_max));
      put_u32(b, static_cast<uint32_t>(p.payload.bytes.size()));
      b.insert(b.end(), p.payload.bytes.begin(), p.payload.bytes.end());
    }
    put_u32(b, f.recon_crc);
  }
  return b;
}

BitstreamContainer parse_container(const std::vector<uint8_t>& bytes) {
  Reader r{bytes};
  char magic[4];
  for (char& m : magic) m = static_cast<char>(r.u8());
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("container: bad magic");
  BitstreamContainer c;
  c.header.version = r.u8();
  if (c.header.version != 1)
    throw FormatError("container: unsupported version");
  c.header.flags = r.u8();
  c.header.width = r.u16();
  c.header.height = r.u16();
  c.header.frame_count = r.u16();
  c.header.intra_period = r.u16();
  c.header.model_id = r.u8();
  c.header.tcm_levels = r.u8();
  c.header.tcm_contexts = r.u8();
  c.header.dpb_channels = r.u8();
  c.header.weight_digest = r.u64();
  if (c.header.width == 0 || c.header.height == 0)
    throw FormatError("container: zero dimensions");
  c.frames.resize(c.header.frame_count);
  for (auto& f : c.frames) {
    const uint8_t type = r.u8();
    if (type > 1) throw FormatError("container: bad frame type");
    f.type = static_cast<FrameType>(type);
    f.payloads.resize(r.u8());
    for (auto& p : f.payloads) {
      p.s_min = r.i16();
      p.s_max = r.i16();
      if (p.s_min >= p.s_max)
        throw FormatError("container: bad symbol range");
      // Symbol counts are not stored; the decoder derives them from the
      // frame dims and model config.
      const uint32_t len = r.u32();
      if (r.pos + len > bytes.size())
        throw FormatError("container truncated inside payload");
      p.payload.bytes.assign(bytes.begin() + r.pos,
                             bytes.begin() + r.pos + len);
      r.pos += len;
    }
    f.recon_crc = r.u32();
  }
  if (r.pos != bytes.size())
    throw FormatError("container: trailing bytes after last frame");
  return c;
}

void save_container(const BitstreamContainer& c, const std::string& path) {
  const auto bytes = serialize_container(c);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write bitstream: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to bitstream: " + path);
}

BitstreamContainer load_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open bitstream: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return parse_container(bytes);
}

}  // namespace tcm
