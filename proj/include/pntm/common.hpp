#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pntm {

enum class DType { f64, f32 };

inline const char* dtype_name(DType dt) { return dt == DType::f64 ? "f64" : "f32"; }

// Precision floor used for clamping scan coefficients and the approximate
// complex log. Chosen per storage precision.
inline double dtype_eps(DType dt) { return dt == DType::f64 ? 1e-12 : 1e-6; }

enum class errc {
  shape_mismatch,
  invalid_argument,
  domain,       // math domain violations (log of negative in strict mode, ...)
  numerical,    // non-finite values where the contract forbids them
  config,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(errc c, const std::string& msg) : std::runtime_error(msg), code(c) {}
  errc code;
};

[[noreturn]] inline void fail(errc c, const std::string& msg) { throw Error(c, msg); }

}  // namespace pntm
