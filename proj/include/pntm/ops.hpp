#pragma once

#include <vector>

#include "pntm/tensor.hpp"

namespace pntm {

// Elementwise binary ops, numpy-style broadcasting (right-aligned, extents
// equal or 1). Gradients reduce back to each input's shape.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor add_scalar(const Tensor& a, double c);
Tensor mul_scalar(const Tensor& a, double c);
Tensor rsub_scalar(double c, const Tensor& a);  // c - a

// Elementwise unary
Tensor neg(const Tensor& a);
Tensor exp(const Tensor& a);
// log(0) = -inf; log of negative fails. strict mode fails for any x <= 0.
Tensor log(const Tensor& a, bool strict = false);
Tensor sqrt(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor gelu(const Tensor& a);  // tanh approximation
Tensor clamp(const Tensor& a, double lo, double hi);
// g(x) = x + 0.5 for x >= 0, sigmoid(x) otherwise: positive, unbounded above.
Tensor g_nonlin(const Tensor& a);
Tensor log_g_nonlin(const Tensor& a);  // log(g(x)), fused for the scans

// Linear algebra (2-D)
Tensor matmul(const Tensor& a, const Tensor& b);
// x [N,d] * W[k,d]^T -> [N,k]; the projection primitive used by all layers.
Tensor linear(const Tensor& x, const Tensor& w);
Tensor transpose(const Tensor& a);
Tensor swap_last_two(const Tensor& a);

// Shape
Tensor reshape(const Tensor& a, Shape s);
Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor slice(const Tensor& a, int axis, int64_t start, int64_t len);
Tensor roll_last(const Tensor& a, int64_t shift);  // circular, along the last axis

// Reductions
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);
Tensor sum_axis(const Tensor& a, int axis, bool keepdim = false);
Tensor softmax(const Tensor& a, int axis = -1);
Tensor logsumexp(const Tensor& a, int axis, bool keepdim = false);

// Prefix scans along an axis (blocked schedule, equal to the sequential scan)
Tensor cumsum(const Tensor& a, int axis);
Tensor cumlogsumexp(const Tensor& a, int axis);

// Indexing
Tensor gather_rows(const Tensor& table, const std::vector<int64_t>& idx);
// picks x[i, idx[i]] from a 2-D tensor -> [N]
Tensor take_index(const Tensor& x, const std::vector<int64_t>& idx);

// ---------------------------------------------------------------------------
// Complex pipeline. Complex data is packed as [..., 2, L]: a real block then
// an imaginary block per transform row, which keeps the transform axis
// contiguous and lets the generic scans run over packed values directly.
// ---------------------------------------------------------------------------

struct ComplexTensor {
  Tensor packed;  // [..., 2, L]

  Tensor re() const;
  Tensor im() const;
  int64_t length() const { return packed.dim(-1); }
  static ComplexTensor from_parts(const Tensor& re, const Tensor& im);
};

// Forward DFT of a real tensor over its last axis.
ComplexTensor fft(const Tensor& x);

struct IfftResult {
  Tensor real;               // [..., L]
  double max_imag_residue;   // max |imag| discarded by the real projection
};

// Inverse DFT (1/L convention: ifft(fft(x)).real == x).
IfftResult ifft(const ComplexTensor& z);

ComplexTensor complex_mul(const ComplexTensor& a, const ComplexTensor& b);
// Principal-branch log of z + eps*sign(z) (log(eps) at z = 0); finite output.
ComplexTensor complex_approx_log(const ComplexTensor& z, double eps);
ComplexTensor complex_exp(const ComplexTensor& z);
ComplexTensor complex_cumsum(const ComplexTensor& z, int axis);

}  // namespace pntm
