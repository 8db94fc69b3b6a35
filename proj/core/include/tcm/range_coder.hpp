#ifndef TCM_RANGE_CODER_HPP_
#define TCM_RANGE_CODER_HPP_

#include <cstdint>
#include <vector>

#include "tcm/entropy.hpp"

namespace tcm {

struct Payload {
  std::vector<uint8_t> bytes;
  uint32_t symbol_count = 0;
};

// Carry-less 32-bit range coder with byte renormalization and 16-bit
// frequency precision. One session codes one payload; sessions are
// single-threaded, distinct sessions are independent.
class RangeEncoder {
 public:
  void encode(int symbol, const CdfTable& table);
  Payload finish();

 private:
  void renormalize();
  uint32_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t count_ = 0;
  std::vector<uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(const Payload& payload);
  int decode(const CdfTable& table);

 private:
  uint8_t next_byte();
  uint32_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
  const std::vector<uint8_t>& bytes_;
  size_t pos_ = 0;
};

// Whole-sequence helpers; TableAt maps symbol index -> table.
Payload range_encode(const std::vector<int32_t>& symbols,
                     const CdfTable& table);
std::vector<int32_t> range_decode(const Payload& payload,
                                  const CdfTable& table);

template <typename TableAt>
Payload range_encode_with(const std::vector<int32_t>& symbols,
                          TableAt&& table_at) {
  RangeEncoder enc;
  for (size_t i = 0; i < symbols.size(); ++i) enc.encode(symbols[i], table_at(i));
  return enc.finish();
}

template <typename TableAt>
std::vector<int32_t> range_decode_with(const Payload& payload,
                                       TableAt&& table_at) {
  RangeDecoder dec(payload);
  std::vector<int32_t> symbols(payload.symbol_count);
  for (size_t i = 0; i < symbols.size(); ++i) symbols[i] = dec.decode(table_at(i));
  return symbols;
}

}  // namespace tcm

#endif  // TCM_RANGE_CODER_HPP_
