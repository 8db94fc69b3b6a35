#ifndef TCM_VIDEO_IO_HPP_
#define TCM_VIDEO_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "tcm/grid.hpp"

namespace tcm {

// Headerless planar 8-bit video: per frame, each channel plane in full,
// frames concatenated. Values normalize to [0,1] on load.
struct RawVideo {
  int width = 0;
  int height = 0;
  int channels = 3;  // 3 = RGB, 1 = luma
  int frame_count = 0;
  std::vector<uint8_t> data;

  size_t frame_bytes() const {
    return static_cast<size_t>(width) * height * channels;
  }
};

// File size must equal width*height*channels*frames exactly.
RawVideo load_raw_video(const std::string& path, int width, int height,
                        int channels);
void save_raw_video(const RawVideo& video, const std::string& path);

Frame video_frame(const RawVideo& video, int index);
void set_video_frame(RawVideo& video, int index, const Frame& frame);

// Mirror padding on the right/bottom up to the next multiple; handles pads
// wider than the source by folding the reflection.
Frame pad_to_multiple(const Frame& frame, int multiple);
Frame crop_frame(const Frame& frame, int height, int width);

}  // namespace tcm

#endif  // TCM_VIDEO_IO_HPP_
