#pragma once

#include <cstddef>

// Bulk transcendental kernels. The implementation TU is compiled with
// -ffast-math so gcc lowers the loops to libmvec SIMD calls; a startup
// self-test falls back to scalar libm if the vector routines mishandle
// IEEE specials (exp(-inf), log(0), ...), which the scan kernels rely on.
namespace pntm::detail {

void vexp(double* dst, const double* src, std::size_t n);
void vlog(double* dst, const double* src, std::size_t n);
void vsin(double* dst, const double* src, std::size_t n);
void vcos(double* dst, const double* src, std::size_t n);

void vexp(float* dst, const float* src, std::size_t n);
void vlog(float* dst, const float* src, std::size_t n);
void vsin(float* dst, const float* src, std::size_t n);
void vcos(float* dst, const float* src, std::size_t n);

}  // namespace pntm::detail
