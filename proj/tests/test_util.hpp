#ifndef TCM_TESTS_TEST_UTIL_HPP_
#define TCM_TESTS_TEST_UTIL_HPP_

#include <random>

#include "tcm/kernels.hpp"

namespace tcm::testutil {

inline Grid random_grid(std::mt19937& rng, int c, int h, int w, float lo = -1.0f,
                        float hi = 1.0f) {
  std::uniform_real_distribution<float> d(lo, hi);
  Grid g(c, h, w);
  for (auto& v : g.values) v = d(rng);
  return g;
}

inline void randomize_conv(std::mt19937& rng, ConvSpec& s, float scale = 0.2f) {
  std::uniform_real_distribution<float> d(-scale, scale);
  for (auto& v : s.weights) v = d(rng);
  for (auto& v : s.bias) v = d(rng);
}

inline void randomize_res(std::mt19937& rng, ResidualBlockSpec& s,
                          float scale = 0.2f) {
  randomize_conv(rng, s.conv1, scale);
  randomize_conv(rng, s.conv2, scale);
}

}  // namespace tcm::testutil

#endif  // TCM_TESTS_TEST_UTIL_HPP_
