#include "tcm/video_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "tcm/errors.hpp"
#include "tcm/portable_math.hpp"

namespace tcm {

RawVideo load_raw_video(const std::string& path, int width, int height,
                        int channels) {
  if (width <= 0 || height <= 0 || (channels != 1 && channels != 3))
    throw ConfigError("raw video: bad dimensions or channel count");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open raw video: " + path);
  std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  RawVideo v;
  v.width = width;
  v.height = height;
  v.channels = channels;
  const size_t fb = v.frame_bytes();
  if (fb == 0 || data.size() % fb != 0 || data.empty())
    throw FormatError("raw video size " + std::to_string(data.size()) +
                      " is not a multiple of frame size " + std::to_string(fb));
  v.frame_count = static_cast<int>(data.size() / fb);
  v.data = std::move(data);
  return v;
}

void save_raw_video(const RawVideo& video, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write raw video: " + path);
  out.write(reinterpret_cast<const char*>(video.data.data()),
            static_cast<std::streamsize>(video.data.size()));
  if (!out) throw IoError("short write to raw video: " + path);
}

Frame video_frame(const RawVideo& video, int index) {
  if (index < 0 || index >= video.frame_count)
    throw ConfigError("video_frame: index out of range");
  Frame f(video.channels, video.height, video.width);
  const uint8_t* src = video.data.data() + video.frame_bytes() * index;
  for (size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = static_cast<float>(src[i]) / 255.0f;
  return f;
}

void set_video_frame(RawVideo& video, int index, const Frame& frame) {
  if (frame.channels != video.channels || frame.height != video.height ||
      frame.width != video.width)
    throw ConfigError("set_video_frame: shape mismatch");
  if (index < 0 || index >= video.frame_count)
    throw ConfigError("set_video_frame: index out of range");
  uint8_t* dst = video.data.data() + video.frame_bytes() * index;
  for (size_t i = 0; i < frame.values.size(); ++i) {
    double v = round_half_away(static_cast<double>(frame.values[i]) * 255.0);
    if (v < 0.0) v = 0.0;
    if (v > 255.0) v = 255.0;
    dst[i] = static_cast<uint8_t>(v);
  }
}

namespace {
// Folds an index into [0, n) by mirroring across the edges.
int mirror_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return (m < n) ? m : period - 1 - m;
}
}  // namespace

Frame pad_to_multiple(const Frame& frame, int multiple) {
  const int ph = (frame.height + multiple - 1) / multiple * multiple;
  const int pw = (frame.width + multiple - 1) / multiple * multiple;
  if (ph == frame.height && pw == frame.width) return frame;
  Frame out(frame.channels, ph, pw);
  for (int c = 0; c < frame.channels; ++c)
    for (int y = 0; y < ph; ++y) {
      const int sy = mirror_index(y, frame.height);
      for (int x = 0; x < pw; ++x)
        out.at(c, y, x) = frame.at(c, sy, mirror_index(x, frame.width));
    }
  return out;
}

Frame crop_frame(const Frame& frame, int height, int width) {
  if (height > frame.height || width > frame.width)
    throw ConfigError("crop_frame: target larger than source");
  if (height == frame.height && width == frame.width) return frame;
  Frame out(frame.channels, height, width);
  for (int c = 0; c < frame.channels; ++c)
    for (int y = 0; y < height; ++y)
      std::memcpy(out.channel(c) + static_cast<size_t>(y) * width,
                  frame.channel(c) + static_cast<size_t>(y) * frame.width,
                  static_cast<size_t>(width) * sizeof(float));
  return out;
}

}  // namespace tcm
