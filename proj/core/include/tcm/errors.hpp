#ifndef TCM_ERRORS_HPP_
#define TCM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace tcm {

// Bad layer/shape/config wiring detected before any coding happens.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values or other numeric contract violations.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller handed the entropy coder a symbol outside its table.
struct EncodeError : std::runtime_error {
  explicit EncodeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Truncated/corrupt payload, CRC mismatch, or desynchronized decode.
struct DecodeError : std::runtime_error {
  explicit DecodeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file: bad magic, version, digest, or size.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Metric evaluation impossible (e.g. no RD-curve quality overlap).
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tcm

#endif  // TCM_ERRORS_HPP_
