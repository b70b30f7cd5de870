#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>

#include "pntm/common.hpp"
#include "pntm/detail/fastmath.hpp"
#include "pntm/tensor.hpp"

namespace pntm::detail {

constexpr int kMaxRank = 8;

// ---------------------------------------------------------------------------
// Broadcasting (numpy rules: right-aligned, extents equal or 1)
// ---------------------------------------------------------------------------

struct BcastPlan {
  Shape out_shape;
  int nd = 0;
  int64_t out_numel = 1;
  int64_t inner = 1;  // extent of the last output dim
  std::array<int64_t, kMaxRank> odim{}, astr{}, bstr{};
  bool same_shape = false;
};

inline BcastPlan make_bcast(const Shape& a, const Shape& b) {
  BcastPlan p;
  if (a == b) {
    p.out_shape = a;
    p.same_shape = true;
    p.out_numel = shape_numel(a);
    return p;
  }
  int ra = static_cast<int>(a.size()), rb = static_cast<int>(b.size());
  int nd = std::max(ra, rb);
  if (nd > kMaxRank) fail(errc::shape_mismatch, "rank too large for broadcast");
  p.nd = nd;
  p.out_shape.resize(static_cast<size_t>(nd));
  std::array<int64_t, kMaxRank> adim{}, bdim{};
  for (int i = 0; i < nd; ++i) {
    int64_t da = i < nd - ra ? 1 : a[static_cast<size_t>(i - (nd - ra))];
    int64_t db = i < nd - rb ? 1 : b[static_cast<size_t>(i - (nd - rb))];
    if (da != db && da != 1 && db != 1)
      fail(errc::shape_mismatch, "cannot broadcast " + shape_str(a) + " with " + shape_str(b));
    adim[static_cast<size_t>(i)] = da;
    bdim[static_cast<size_t>(i)] = db;
    p.odim[static_cast<size_t>(i)] = std::max(da, db);
    p.out_shape[static_cast<size_t>(i)] = p.odim[static_cast<size_t>(i)];
  }
  int64_t sa = 1, sb = 1;
  for (int i = nd - 1; i >= 0; --i) {
    p.astr[static_cast<size_t>(i)] = adim[static_cast<size_t>(i)] == 1 ? 0 : sa;
    p.bstr[static_cast<size_t>(i)] = bdim[static_cast<size_t>(i)] == 1 ? 0 : sb;
    sa *= adim[static_cast<size_t>(i)];
    sb *= bdim[static_cast<size_t>(i)];
  }
  p.out_numel = shape_numel(p.out_shape);
  p.inner = p.odim[static_cast<size_t>(nd - 1)];
  return p;
}

template <class T, class F>
void bcast_apply(const BcastPlan& p, const T* a, const T* b, T* o, F f) {
  if (p.same_shape) {
    for (int64_t i = 0; i < p.out_numel; ++i) o[i] = f(a[i], b[i]);
    return;
  }
  const int nd = p.nd;
  const int64_t inner = p.inner;
  const int64_t rows = p.out_numel / inner;
  const int64_t ia = p.astr[static_cast<size_t>(nd - 1)];
  const int64_t ib = p.bstr[static_cast<size_t>(nd - 1)];
  std::array<int64_t, kMaxRank> idx{};
  int64_t offa = 0, offb = 0;
  for (int64_t r = 0; r < rows; ++r) {
    const T* pa = a + offa;
    const T* pb = b + offb;
    T* po = o + r * inner;
    if (ia == 1 && ib == 1) {
      for (int64_t i = 0; i < inner; ++i) po[i] = f(pa[i], pb[i]);
    } else if (ia == 1 && ib == 0) {
      const T vb = *pb;
      for (int64_t i = 0; i < inner; ++i) po[i] = f(pa[i], vb);
    } else if (ia == 0 && ib == 1) {
      const T va = *pa;
      for (int64_t i = 0; i < inner; ++i) po[i] = f(va, pb[i]);
    } else {
      const T v = f(*pa, *pb);
      for (int64_t i = 0; i < inner; ++i) po[i] = v;
    }
    // advance multi-index over the leading dims
    for (int d = nd - 2; d >= 0; --d) {
      offa += p.astr[static_cast<size_t>(d)];
      offb += p.bstr[static_cast<size_t>(d)];
      if (++idx[static_cast<size_t>(d)] < p.odim[static_cast<size_t>(d)]) break;
      offa -= p.astr[static_cast<size_t>(d)] * p.odim[static_cast<size_t>(d)];
      offb -= p.bstr[static_cast<size_t>(d)] * p.odim[static_cast<size_t>(d)];
      idx[static_cast<size_t>(d)] = 0;
    }
  }
}

// ---------------------------------------------------------------------------
// Axis decomposition: shape -> (outer, n, inner) around one axis
// ---------------------------------------------------------------------------

struct AxisSplit {
  int64_t outer = 1, n = 1, inner = 1;
  int axis = 0;
};

inline AxisSplit split_axis(const Shape& s, int axis) {
  int r = static_cast<int>(s.size());
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r) fail(errc::invalid_argument, "axis out of range");
  AxisSplit a;
  a.axis = axis;
  for (int i = 0; i < axis; ++i) a.outer *= s[static_cast<size_t>(i)];
  a.n = s[static_cast<size_t>(axis)];
  for (int i = axis + 1; i < r; ++i) a.inner *= s[static_cast<size_t>(i)];
  return a;
}

template <class T>
void reduce_sum(const T* x, T* o, const AxisSplit& a) {
  for (int64_t u = 0; u < a.outer; ++u) {
    const T* xu = x + u * a.n * a.inner;
    T* ou = o + u * a.inner;
    std::fill(ou, ou + a.inner, T(0));
    for (int64_t j = 0; j < a.n; ++j) {
      const T* xj = xu + j * a.inner;
      for (int64_t i = 0; i < a.inner; ++i) ou[i] += xj[i];
    }
  }
}

template <class T>
void reduce_max(const T* x, T* o, const AxisSplit& a) {
  for (int64_t u = 0; u < a.outer; ++u) {
    const T* xu = x + u * a.n * a.inner;
    T* ou = o + u * a.inner;
    for (int64_t i = 0; i < a.inner; ++i) ou[i] = xu[i];
    for (int64_t j = 1; j < a.n; ++j) {
      const T* xj = xu + j * a.inner;
      for (int64_t i = 0; i < a.inner; ++i) ou[i] = std::max(ou[i], xj[i]);
    }
  }
}

// o[u,j,i] = g[u,i]
template <class T>
void broadcast_along_axis(const T* g, T* o, const AxisSplit& a) {
  for (int64_t u = 0; u < a.outer; ++u) {
    const T* gu = g + u * a.inner;
    T* ou = o + u * a.n * a.inner;
    for (int64_t j = 0; j < a.n; ++j) std::memcpy(ou + j * a.inner, gu, sizeof(T) * a.inner);
  }
}

// ---------------------------------------------------------------------------
// softmax / logsumexp along an axis (max-shifted)
// ---------------------------------------------------------------------------

template <class T>
void softmax_kernel(const T* x, T* y, const AxisSplit& a) {
  std::vector<T> m(static_cast<size_t>(a.inner)), s(static_cast<size_t>(a.inner));
  for (int64_t u = 0; u < a.outer; ++u) {
    const T* xu = x + u * a.n * a.inner;
    T* yu = y + u * a.n * a.inner;
    for (int64_t i = 0; i < a.inner; ++i) m[static_cast<size_t>(i)] = xu[i];
    for (int64_t j = 1; j < a.n; ++j)
      for (int64_t i = 0; i < a.inner; ++i)
        m[static_cast<size_t>(i)] = std::max(m[static_cast<size_t>(i)], xu[j * a.inner + i]);
    std::fill(s.begin(), s.end(), T(0));
    for (int64_t j = 0; j < a.n; ++j) {
      const T* xj = xu + j * a.inner;
      T* yj = yu + j * a.inner;
      for (int64_t i = 0; i < a.inner; ++i) yj[i] = xj[i] - m[static_cast<size_t>(i)];
      vexp(yj, yj, static_cast<size_t>(a.inner));
      for (int64_t i = 0; i < a.inner; ++i) s[static_cast<size_t>(i)] += yj[i];
    }
    for (int64_t j = 0; j < a.n; ++j) {
      T* yj = yu + j * a.inner;
      for (int64_t i = 0; i < a.inner; ++i) yj[i] /= s[static_cast<size_t>(i)];
    }
  }
}

template <class T>
void logsumexp_kernel(const T* x, T* o, const AxisSplit& a) {
  const T ninf = -std::numeric_limits<T>::infinity();
  std::vector<T> m(static_cast<size_t>(a.inner)), s(static_cast<size_t>(a.inner)),
      t(static_cast<size_t>(a.inner));
  for (int64_t u = 0; u < a.outer; ++u) {
    const T* xu = x + u * a.n * a.inner;
    T* ou = o + u * a.inner;
    for (int64_t i = 0; i < a.inner; ++i) m[static_cast<size_t>(i)] = xu[i];
    for (int64_t j = 1; j < a.n; ++j)
      for (int64_t i = 0; i < a.inner; ++i)
        m[static_cast<size_t>(i)] = std::max(m[static_cast<size_t>(i)], xu[j * a.inner + i]);
    std::fill(s.begin(), s.end(), T(0));
    for (int64_t j = 0; j < a.n; ++j) {
      const T* xj = xu + j * a.inner;
      for (int64_t i = 0; i < a.inner; ++i) {
        T mi = m[static_cast<size_t>(i)];
        t[static_cast<size_t>(i)] = mi == ninf ? ninf : xj[i] - mi;
      }
      vexp(t.data(), t.data(), static_cast<size_t>(a.inner));
      for (int64_t i = 0; i < a.inner; ++i)
        s[static_cast<size_t>(i)] += m[static_cast<size_t>(i)] == ninf ? T(0) : t[static_cast<size_t>(i)];
    }
    for (int64_t i = 0; i < a.inner; ++i) {
      T mi = m[static_cast<size_t>(i)];
      ou[i] = mi == ninf ? ninf : mi + std::log(s[static_cast<size_t>(i)]);
    }
  }
}

}  // namespace pntm::detail
