// Compiled with -ffast-math (see src/CMakeLists.txt) so that gcc emits
// libmvec SIMD calls for the exp/log/sin/cos loops below. Keep this TU free
// of any logic that depends on IEEE special-value semantics at compile time;
// runtime behavior of the libmvec routines is verified by fast_specials_ok().

#include "pntm/detail/fastmath.hpp"

#include <cmath>
#include <limits>

namespace pntm::detail {

namespace {

template <class T>
__attribute__((noinline)) void raw_exp(T* dst, const T* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::exp(src[i]);
}
template <class T>
__attribute__((noinline)) void raw_log(T* dst, const T* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::log(src[i]);
}
template <class T>
__attribute__((noinline)) void raw_sin(T* dst, const T* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::sin(src[i]);
}
template <class T>
__attribute__((noinline)) void raw_cos(T* dst, const T* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::cos(src[i]);
}

template <class T>
bool fast_specials_ok() {
  const T inf = std::numeric_limits<T>::infinity();
  T in[4] = {-inf, T(0), T(1), T(-800)};
  T out[4];
  raw_exp(out, in, 4);
  if (!(out[0] == T(0) && out[1] == T(1) && out[3] == T(0))) return false;
  if (std::abs(out[2] - T(2.718281828459045)) > T(1e-6)) return false;
  T lin[4] = {T(0), T(1), T(2.718281828459045), T(10)};
  T lout[4];
  raw_log(lout, lin, 4);
  if (!(lout[0] == -inf && lout[1] == T(0))) return false;
  if (std::abs(lout[2] - T(1)) > T(1e-6)) return false;
  return true;
}

template <class T>
bool use_fast() {
  static const bool ok = fast_specials_ok<T>();
  return ok;
}

}  // namespace

void vexp(double* dst, const double* src, std::size_t n) {
  if (use_fast<double>()) { raw_exp(dst, src, n); return; }
  for (std::size_t i = 0; i < n; ++i) dst[i] = __builtin_exp(src[i]);
}
void vlog(double* dst, const double* src, std::size_t n) {
  if (use_fast<double>()) { raw_log(dst, src, n); return; }
  for (std::size_t i = 0; i < n; ++i) dst[i] = __builtin_log(src[i]);
}
void vsin(double* dst, const double* src, std::size_t n) {
  if (use_fast<double>()) { raw_sin(dst, src, n); return; }
  for (std::size_t i = 0; i < n; ++i) dst[i] = __builtin_sin(src[i]);
}
void vcos(double* dst, const double* src, std::size_t n) {
  if (use_fast<double>()) { raw_cos(dst, src, n); return; }
  for (std::size_t i = 0; i < n; ++i) dst[i] = __builtin_cos(src[i]);
}

void vexp(float* dst, const float* src, std::size_t n) {
  if (use_fast<float>()) { raw_exp(dst, src, n); return; }
  for (std::size_t i = 0; i < n; ++i) dst[i] = __builtin_expf(src[i]);
}
void vlog(float* dst, const float* src, std::size_t n) {
  if (use_fast<float>()) { raw_log(dst, src, n); return; }
  for (std::size_t i = 0; i < n; ++i) dst[i] = __builtin_logf(src[i]);
}
void vsin(float* dst, const float* src, std::size_t n) {
  if (use_fast<float>()) { raw_sin(dst, src, n); return; }
  for (std::size_t i = 0; i < n; ++i) dst[i] = __builtin_sinf(src[i]);
}
void vcos(float* dst, const float* src, std::size_t n) {
  if (use_fast<float>()) { raw_cos(dst, src, n); return; }
  for (std::size_t i = 0; i < n; ++i) dst[i] = __builtin_cosf(src[i]);
}

}  // namespace pntm::detail
