#ifndef TCM_GRID_HPP_
#define TCM_GRID_HPP_

#include <cstddef>
#include <vector>

namespace tcm {

// Dense CxHxW float tensor, channel-major then row-major. Every image,
// motion field, feature map and latent in the codec is one of these.
struct Grid {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> values;

  Grid() = default;
  Grid(int c, int h, int w, float fill = 0.0f);

  float& at(int c, int y, int x) {
    return values[(static_cast<size_t>(c) * height + y) * width + x];
  }
  float at(int c, int y, int x) const {
    return values[(static_cast<size_t>(c) * height + y) * width + x];
  }
  const float* channel(int c) const {
    return values.data() + static_cast<size_t>(c) * height * width;
  }
  float* channel(int c) {
    return values.data() + static_cast<size_t>(c) * height * width;
  }

  size_t size() const { return values.size(); }
  size_t plane_size() const {
    return static_cast<size_t>(height) * width;
  }
  bool same_shape(const Grid& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
};

// A frame is a 3-channel (RGB) or 1-channel grid in [0,1].
using Frame = Grid;
// A motion field is a 2-channel grid: channel 0 = dy, channel 1 = dx,
// in pixels at the field's own scale.
using MotionField = Grid;

// Stacks b's channels after a's. Spatial dims must match.
Grid concat_channels(const Grid& a, const Grid& b);

// Element-wise sum; shapes must match.
Grid add_grids(const Grid& a, const Grid& b);

// Throws NumericError naming `what` if any value is NaN/Inf.
void check_finite(const Grid& g, const char* what);

// Exact element-wise equality (shape and bits).
bool bit_equal(const Grid& a, const Grid& b);

}  // namespace tcm

#endif  // TCM_GRID_HPP_
