#include "tcm/grid.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "tcm/errors.hpp"

namespace tcm {

Grid::Grid(int c, int h, int w, float fill)
    : channels(c),
      height(h),
      width(w),
      values(static_cast<size_t>(c) * h * w, fill) {}

Grid concat_channels(const Grid& a, const Grid& b) {
  if (a.height != b.height || a.width != b.width) {
    throw ConfigError("concat_channels: spatial dims differ");
  }
  Grid out(a.channels + b.channels, a.height, a.width);
  std::memcpy(out.values.data(), a.values.data(),
              a.values.size() * sizeof(float));
  std::memcpy(out.values.data() + a.values.size(), b.values.data(),
              b.values.size() * sizeof(float));
  return out;
}

Grid add_grids(const Grid& a, const Grid& b) {
  if (!a.same_shape(b)) throw ConfigError("add_grids: shape mismatch");
  Grid out = a;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

void check_finite(const Grid& g, const char* what) {
  for (float v : g.values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value in ") + what);
    }
  }
}

bool bit_equal(const Grid& a, const Grid& b) {
  if (!a.same_shape(b)) return false;
  return std::memcmp(a.values.data(), b.values.data(),
                     a.values.size() * sizeof(float)) == 0;
}

}  // namespace tcm
