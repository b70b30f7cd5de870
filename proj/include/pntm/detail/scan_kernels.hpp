#pragma once

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "pntm/detail/fastmath.hpp"
#include "pntm/detail/kernels.hpp"

// Prefix scans over one axis, scheduled as a blocked two-pass: chunk-local
// sequential scans, a Blelloch tree over the chunk totals, then a propagate
// pass. The result equals the plain sequential scan up to rounding because
// the combine operators are associative. `g_scan_rounds` records the number
// of bulk-synchronous rounds of the last scan (2 passes + tree depth), which
// grows logarithmically with the chunk count.
namespace pntm::detail {

inline thread_local int g_scan_rounds = 0;

inline int64_t scan_chunk_count(int64_t n) {
  if (n < 64) return 1;
  return 16;
}

// Exclusive Blelloch prefix over c values per lane, in place.
// vals layout: [chunks][lanes]; identity = id, combine = f (associative).
template <class T, class F>
int blelloch_exclusive(T* vals, int64_t chunks, int64_t lanes, T id, F f) {
  int rounds = 0;
  // up-sweep
  for (int64_t d = 1; d < chunks; d *= 2) {
    for (int64_t k = 2 * d - 1; k < chunks; k += 2 * d) {
      T* dst = vals + k * lanes;
      const T* src = vals + (k - d) * lanes;
      for (int64_t i = 0; i < lanes; ++i) dst[i] = f(src[i], dst[i]);
    }
    ++rounds;
  }
  // clear the root
  {
    T* last = vals + (chunks - 1) * lanes;
    for (int64_t i = 0; i < lanes; ++i) last[i] = id;
  }
  // down-sweep (chunk counts are powers of two by construction)
  for (int64_t d = chunks / 2; d >= 1; d /= 2) {
    for (int64_t k = 2 * d - 1; k < chunks; k += 2 * d) {
      T* right = vals + k * lanes;
      T* left = vals + (k - d) * lanes;
      for (int64_t i = 0; i < lanes; ++i) {
        T t = left[i];
        left[i] = right[i];
        right[i] = f(t, right[i]);
      }
    }
    ++rounds;
  }
  return rounds;
}

// ---------------------------------------------------------------------------
// cumsum
// ---------------------------------------------------------------------------

template <class T>
void cumsum_kernel(const T* x, T* o, const AxisSplit& a) {
  const int64_t chunks = scan_chunk_count(a.n);
  int rounds = 0;
  if (chunks == 1) {
    for (int64_t u = 0; u < a.outer; ++u) {
      const T* xu = x + u * a.n * a.inner;
      T* ou = o + u * a.n * a.inner;
      std::memcpy(ou, xu, sizeof(T) * a.inner);
      for (int64_t j = 1; j < a.n; ++j)
        for (int64_t i = 0; i < a.inner; ++i)
          ou[j * a.inner + i] = ou[(j - 1) * a.inner + i] + xu[j * a.inner + i];
    }
    g_scan_rounds = 1;
    return;
  }
  const int64_t step = (a.n + chunks - 1) / chunks;
  std::vector<T> totals(static_cast<size_t>(chunks * a.inner));
  for (int64_t u = 0; u < a.outer; ++u) {
    const T* xu = x + u * a.n * a.inner;
    T* ou = o + u * a.n * a.inner;
    // pass 1: chunk-local inclusive scans + chunk totals
    for (int64_t c = 0; c < chunks; ++c) {
      int64_t lo = c * step, hi = std::min(a.n, lo + step);
      if (lo >= hi) {
        std::fill(totals.begin() + c * a.inner, totals.begin() + (c + 1) * a.inner, T(0));
        continue;
      }
      std::memcpy(ou + lo * a.inner, xu + lo * a.inner, sizeof(T) * a.inner);
      for (int64_t j = lo + 1; j < hi; ++j)
        for (int64_t i = 0; i < a.inner; ++i)
          ou[j * a.inner + i] = ou[(j - 1) * a.inner + i] + xu[j * a.inner + i];
      std::memcpy(totals.data() + c * a.inner, ou + (hi - 1) * a.inner, sizeof(T) * a.inner);
    }
    // pass 2: exclusive prefix of chunk totals
    int tree = blelloch_exclusive(totals.data(), chunks, a.inner, T(0),
                                  [](T p, T q) { return p + q; });
    // pass 3: propagate
    for (int64_t c = 1; c < chunks; ++c) {
      int64_t lo = c * step, hi = std::min(a.n, lo + step);
      const T* off = totals.data() + c * a.inner;
      for (int64_t j = lo; j < hi; ++j)
        for (int64_t i = 0; i < a.inner; ++i) ou[j * a.inner + i] += off[i];
    }
    rounds = 2 + tree;
  }
  g_scan_rounds = rounds;
}

// gx[j] = sum_{t >= j} g[t]  (adjoint of inclusive cumsum)
template <class T>
void reverse_cumsum_kernel(const T* g, T* o, const AxisSplit& a) {
  for (int64_t u = 0; u < a.outer; ++u) {
    const T* gu = g + u * a.n * a.inner;
    T* ou = o + u * a.n * a.inner;
    std::memcpy(ou + (a.n - 1) * a.inner, gu + (a.n - 1) * a.inner, sizeof(T) * a.inner);
    for (int64_t j = a.n - 2; j >= 0; --j)
      for (int64_t i = 0; i < a.inner; ++i)
        ou[j * a.inner + i] = ou[(j + 1) * a.inner + i] + gu[j * a.inner + i];
  }
}

// ---------------------------------------------------------------------------
// cumulative log-sum-exp (running-max renormalization)
// ---------------------------------------------------------------------------

template <class T>
inline T lse2(T p, T q) {
  const T ninf = -std::numeric_limits<T>::infinity();
  T m = std::max(p, q);
  if (m == ninf) return ninf;
  return m + std::log(std::exp(p - m) + std::exp(q - m));
}

template <class T>
void cumlogsumexp_chunk(const T* x, T* o, int64_t lo, int64_t hi, int64_t inner, T* m, T* s,
                        T* t1, T* t2) {
  const T ninf = -std::numeric_limits<T>::infinity();
  for (int64_t i = 0; i < inner; ++i) {
    m[i] = ninf;
    s[i] = T(0);
  }
  for (int64_t j = lo; j < hi; ++j) {
    const T* xj = x + j * inner;
    T* oj = o + j * inner;
    for (int64_t i = 0; i < inner; ++i) {
      T mn = std::max(m[i], xj[i]);
      t1[i] = mn == ninf ? ninf : m[i] - mn;   // renormalize accumulator
      t2[i] = mn == ninf ? ninf : xj[i] - mn;  // new term
      m[i] = mn;
    }
    vexp(t1, t1, static_cast<size_t>(inner));
    vexp(t2, t2, static_cast<size_t>(inner));
    for (int64_t i = 0; i < inner; ++i) s[i] = (m[i] == ninf) ? T(0) : s[i] * t1[i] + t2[i];
    for (int64_t i = 0; i < inner; ++i) t1[i] = s[i];
    vlog(t1, t1, static_cast<size_t>(inner));
    for (int64_t i = 0; i < inner; ++i) oj[i] = m[i] == ninf ? ninf : m[i] + t1[i];
  }
}

template <class T>
void cumlogsumexp_kernel(const T* x, T* o, const AxisSplit& a) {
  const T ninf = -std::numeric_limits<T>::infinity();
  const int64_t chunks = scan_chunk_count(a.n);
  const int64_t step = (a.n + chunks - 1) / chunks;
  std::vector<T> m(static_cast<size_t>(a.inner)), s(static_cast<size_t>(a.inner)),
      t1(static_cast<size_t>(a.inner)), t2(static_cast<size_t>(a.inner));
  std::vector<T> totals(static_cast<size_t>(chunks * a.inner));
  int rounds = 1;
  for (int64_t u = 0; u < a.outer; ++u) {
    const T* xu = x + u * a.n * a.inner;
    T* ou = o + u * a.n * a.inner;
    if (chunks == 1) {
      cumlogsumexp_chunk(xu, ou, 0, a.n, a.inner, m.data(), s.data(), t1.data(), t2.data());
      continue;
    }
    for (int64_t c = 0; c < chunks; ++c) {
      int64_t lo = c * step, hi = std::min(a.n, lo + step);
      if (lo >= hi) {
        std::fill(totals.begin() + c * a.inner, totals.begin() + (c + 1) * a.inner, ninf);
        continue;
      }
      cumlogsumexp_chunk(xu, ou, lo, hi, a.inner, m.data(), s.data(), t1.data(), t2.data());
      std::memcpy(totals.data() + c * a.inner, ou + (hi - 1) * a.inner, sizeof(T) * a.inner);
    }
    int tree =
        blelloch_exclusive(totals.data(), chunks, a.inner, ninf, [](T p, T q) { return lse2(p, q); });
    for (int64_t c = 1; c < chunks; ++c) {
      int64_t lo = c * step, hi = std::min(a.n, lo + step);
      const T* off = totals.data() + c * a.inner;
      for (int64_t j = lo; j < hi; ++j) {
        T* oj = ou + j * a.inner;
        for (int64_t i = 0; i < a.inner; ++i) oj[i] = lse2(off[i], oj[i]);
      }
    }
    rounds = 2 + tree;
  }
  g_scan_rounds = rounds;
}

// Adjoint: gx[j] = exp(x[j]) * sum_{t>=j} g[t] * exp(-out[t]), evaluated with
// a running scaled accumulator so no intermediate overflows even when -out
// grows large. Per lane: S = s * exp(mu); gx[j] = s * exp(x[j] + mu).
template <class T>
void cumlogsumexp_backward_kernel(const T* x, const T* out, const T* g, T* gx,
                                  const AxisSplit& a) {
  const T ninf = -std::numeric_limits<T>::infinity();
  std::vector<T> mu(static_cast<size_t>(a.inner)), s(static_cast<size_t>(a.inner));
  for (int64_t u = 0; u < a.outer; ++u) {
    const T* xu = x + u * a.n * a.inner;
    const T* ou = out + u * a.n * a.inner;
    const T* gu = g + u * a.n * a.inner;
    T* ru = gx + u * a.n * a.inner;
    std::fill(mu.begin(), mu.end(), ninf);
    std::fill(s.begin(), s.end(), T(0));
    for (int64_t j = a.n - 1; j >= 0; --j) {
      const T* oj = ou + j * a.inner;
      const T* gj = gu + j * a.inner;
      const T* xj = xu + j * a.inner;
      T* rj = ru + j * a.inner;
      for (int64_t i = 0; i < a.inner; ++i) {
        if (oj[i] != ninf) {
          T nm = std::max(mu[static_cast<size_t>(i)], -oj[i]);
          if (nm != mu[static_cast<size_t>(i)]) {
            s[static_cast<size_t>(i)] *= std::exp(mu[static_cast<size_t>(i)] - nm);
            mu[static_cast<size_t>(i)] = nm;
          }
          s[static_cast<size_t>(i)] += gj[i] * std::exp(-oj[i] - nm);
        }
        rj[i] = (xj[i] == ninf || mu[static_cast<size_t>(i)] == ninf)
                    ? T(0)
                    : s[static_cast<size_t>(i)] * std::exp(xj[i] + mu[static_cast<size_t>(i)]);
      }
    }
  }
}

}  // namespace pntm::detail
