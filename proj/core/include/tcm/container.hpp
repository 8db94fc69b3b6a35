#ifndef TCM_CONTAINER_HPP_
#define TCM_CONTAINER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "tcm/conditional_codec.hpp"

namespace tcm {

// Little-endian bitstream container, magic "TCMC". Width/height are the
// source dims; frames are coded padded to multiples of 64 and cropped on
// decode.
inline constexpr uint8_t kFlagPadded = 0x01;

struct ContainerHeader {
  uint8_t version = 1;
  uint8_t flags = 0;
  uint16_t width = 0;
  uint16_t height = 0;
  uint16_t frame_count = 0;
  uint16_t intra_period = 0;
  uint8_t model_id = 0;
  uint8_t tcm_levels = 0;
  uint8_t tcm_contexts = 0;
  uint8_t dpb_channels = 0;
  uint64_t weight_digest = 0;
};

struct BitstreamContainer {
  ContainerHeader header;
  std::vector<FrameRecord> frames;
};

std::vector<uint8_t> serialize_container(const BitstreamContainer& c);

// Parses and validates; the byte stream must hold exactly
// header.frame_count records and nothing more.
BitstreamContainer parse_container(const std::vector<uint8_t>& bytes);

void save_container(const BitstreamContainer& c, const std::string& path);
BitstreamContainer load_container(const std::string& path);

}  // namespace tcm

#endif  // TCM_CONTAINER_HPP_
