#include "tcm/range_coder.hpp"

#include <algorithm>
#include <string>

#include "tcm/errors.hpp"

namespace tcm {
namespace {
constexpr uint32_t kTop = 1u << 24;
constexpr uint32_t kBottom = 1u << 16;
}  // namespace

void RangeEncoder::encode(int symbol, const CdfTable& table) {
  if (!table.contains(symbol))
    throw EncodeError("range encoder: symbol " + std::to_string(symbol) +
                      " outside table range [" + std::to_string(table.s_min) +
                      ", " + std::to_string(table.s_max) + "]");
  const int idx = symbol - table.s_min;
  const uint32_t cum = table.cum[idx];
  const uint32_t freq = table.cum[idx + 1] - cum;
  range_ >>= kCdfPrecisionBits;
  low_ += cum * range_;
  range_ *= freq;
  renormalize();
  ++count_;
}

void RangeEncoder::renormalize() {
  for (;;) {
    if ((low_ ^ (low_ + range_)) < kTop) {
      // top byte settled
    } else if (range_ < kBottom) {
      range_ = (0u - low_) & (kBottom - 1);
    } else {
      break;
    }
    out_.push_back(static_cast<uint8_t>(low_ >> 24));
    low_ <<= 8;
    range_ <<= 8;
  }
}

Payload RangeEncoder::finish() {
  for (int i = 0; i < 4; ++i) {
    out_.push_back(static_cast<uint8_t>(low_ >> 24));
    low_ <<= 8;
  }
  Payload p;
  p.bytes = std::move(out_);
  p.symbol_count = count_;
  out_.clear();
  low_ = 0;
  range_ = 0xFFFFFFFFu;
  count_ = 0;
  return p;
}

RangeDecoder::RangeDecoder(const Payload& payload) : bytes_(payload.bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

uint8_t RangeDecoder::next_byte() {
  if (pos_ >= bytes_.size())
    throw DecodeError("range decoder: truncated payload");
  return bytes_[pos_++];
}

int RangeDecoder::decode(const CdfTable& table) {
  range_ >>= kCdfPrecisionBits;
  uint32_t value = (code_ - low_) / range_;
  if (value >= kCdfTotal) value = kCdfTotal - 1;
  const auto it =
      std::upper_bound(table.cum.begin(), table.cum.end(), value);
  const int idx = static_cast<int>(it - table.cum.begin()) - 1;
  const uint32_t cum = table.cum[idx];
  const uint32_t freq = table.cum[idx + 1] - cum;
  low_ += cum * range_;
  range_ *= freq;
  for (;;) {
    if ((low_ ^ (low_ + range_)) < kTop) {
      // top byte settled
    } else if (range_ < kBottom) {
      range_ = (0u - low_) & (kBottom - 1);
    } else {
      break;
    }
    code_ = (code_ << 8) | next_byte();
    low_ <<= 8;
    range_ <<= 8;
  }
  return table.s_min + idx;
}

Payload range_encode(const std::vector<int32_t>& symbols,
                     const CdfTable& table) {
  return range_encode_with(symbols, [&](size_t) -> const CdfTable& {
    return table;
  });
}

std::vector<int32_t> range_decode(const Payload& payload,
                                  const CdfTable& table) {
  return range_decode_with(payload, [&](size_t) -> const CdfTable& {
    return table;
  });
}

}  // namespace tcm
