#ifndef TCM_PORTABLE_MATH_HPP_
#define TCM_PORTABLE_MATH_HPP_

#include <cstddef>
#include <cstdint>

namespace tcm {

// exp(x) from pinned IEEE arithmetic only (no libm), so entropy tables are
// byte-identical across platforms and libm versions. Relative error is
// within a few ulp, far inside the tolerances used by callers.
double portable_exp(double x);

// Round half away from zero, the quantizer tie rule.
double round_half_away(double x);

// FNV-1a 64-bit, used for weight-file digests.
uint64_t fnv1a64(const void* data, size_t n, uint64_t seed = 0xcbf29ce484222325ull);

// CRC-32 (IEEE 802.3 polynomial, reflected), used for per-frame
// reconstruction checksums.
uint32_t crc32(const void* data, size_t n, uint32_t crc = 0);

}  // namespace tcm

#endif  // TCM_PORTABLE_MATH_HPP_
