#include "pntm/detail/fft_kernels.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include "pntm/common.hpp"

namespace pntm::detail {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

bool is_pow2(int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

int64_t next_pow2(int64_t n) {
  int64_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2, twiddles for the forward (-1) direction; the inverse
// direction conjugates at use.
struct Radix2 {
  int64_t n = 0;
  std::vector<int32_t> bitrev;
  std::vector<double> wre, wim;  // w^k = exp(-2*pi*i*k/n), k < n/2

  explicit Radix2(int64_t len) : n(len) {
    bitrev.resize(static_cast<size_t>(n));
    int lg = 0;
    while ((int64_t(1) << lg) < n) ++lg;
    for (int64_t i = 0; i < n; ++i) {
      int64_t r = 0;
      for (int b = 0; b < lg; ++b)
        if (i & (int64_t(1) << b)) r |= int64_t(1) << (lg - 1 - b);
      bitrev[static_cast<size_t>(i)] = static_cast<int32_t>(r);
    }
    wre.resize(static_cast<size_t>(n / 2));
    wim.resize(static_cast<size_t>(n / 2));
    for (int64_t k = 0; k < n / 2; ++k) {
      double a = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
      wre[static_cast<size_t>(k)] = std::cos(a);
      wim[static_cast<size_t>(k)] = std::sin(a);
    }
  }

  void run(double* re, double* im, int sign) const {
    if (n == 1) return;
    for (int64_t i = 0; i < n; ++i) {
      int64_t j = bitrev[static_cast<size_t>(i)];
      if (j > i) {
        std::swap(re[i], re[j]);
        std::swap(im[i], im[j]);
      }
    }
    for (int64_t len = 2; len <= n; len <<= 1) {
      int64_t half = len >> 1;
      int64_t stride = n / len;
      for (int64_t base = 0; base < n; base += len) {
        for (int64_t k = 0; k < half; ++k) {
          double tw_re = wre[static_cast<size_t>(k * stride)];
          double tw_im = wim[static_cast<size_t>(k * stride)];
          if (sign > 0) tw_im = -tw_im;
          int64_t i0 = base + k, i1 = base + k + half;
          double xr = re[i1] * tw_re - im[i1] * tw_im;
          double xi = re[i1] * tw_im + im[i1] * tw_re;
          re[i1] = re[i0] - xr;
          im[i1] = im[i0] - xi;
          re[i0] += xr;
          im[i0] += xi;
        }
      }
    }
  }
};

}  // namespace

struct FftPlan {
  int64_t n = 0;
  std::unique_ptr<Radix2> radix;  // set when n is a power of two

  // Bluestein machinery for general n (padded length m = next_pow2(2n-1)).
  int64_t m = 0;
  std::unique_ptr<Radix2> pad_radix;
  std::vector<double> chirp_re, chirp_im;    // exp(-i*pi*k^2/n), k < n
  std::vector<double> filt_re, filt_im;      // forward FFT of the chirp filter
};

std::shared_ptr<const FftPlan> fft_plan(int64_t n) {
  if (n < 1) fail(errc::invalid_argument, "fft length must be >= 1");
  static std::mutex mu;
  static std::map<int64_t, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  auto plan = std::make_shared<FftPlan>();
  plan->n = n;
  if (is_pow2(n)) {
    plan->radix = std::make_unique<Radix2>(n);
  } else {
    plan->m = next_pow2(2 * n - 1);
    plan->pad_radix = std::make_unique<Radix2>(plan->m);
    plan->chirp_re.resize(static_cast<size_t>(n));
    plan->chirp_im.resize(static_cast<size_t>(n));
    // k^2 mod 2n keeps the angle argument exact for large k
    for (int64_t k = 0; k < n; ++k) {
      int64_t q = (k * k) % (2 * n);
      double a = -kPi * static_cast<double>(q) / static_cast<double>(n);
      plan->chirp_re[static_cast<size_t>(k)] = std::cos(a);
      plan->chirp_im[static_cast<size_t>(k)] = std::sin(a);
    }
    plan->filt_re.assign(static_cast<size_t>(plan->m), 0.0);
    plan->filt_im.assign(static_cast<size_t>(plan->m), 0.0);
    // filter b[k] = conj(chirp[k]) at offsets 0 and m - k
    plan->filt_re[0] = plan->chirp_re[0];
    plan->filt_im[0] = -plan->chirp_im[0];
    for (int64_t k = 1; k < n; ++k) {
      plan->filt_re[static_cast<size_t>(k)] = plan->chirp_re[static_cast<size_t>(k)];
      plan->filt_im[static_cast<size_t>(k)] = -plan->chirp_im[static_cast<size_t>(k)];
      plan->filt_re[static_cast<size_t>(plan->m - k)] = plan->chirp_re[static_cast<size_t>(k)];
      plan->filt_im[static_cast<size_t>(plan->m - k)] = -plan->chirp_im[static_cast<size_t>(k)];
    }
    plan->pad_radix->run(plan->filt_re.data(), plan->filt_im.data(), -1);
  }
  cache.emplace(n, plan);
  return plan;
}

void fft_execute(const FftPlan& plan, double* re, double* im, int sign) {
  const int64_t n = plan.n;
  if (plan.radix) {
    plan.radix->run(re, im, sign);
    return;
  }
  // Bluestein: x*chirp, convolve with filter, multiply by chirp again.
  // For sign=+1 run the conjugate transform via conjugation sandwiches.
  const int64_t m = plan.m;
  std::vector<double> are(static_cast<size_t>(m), 0.0), aim(static_cast<size_t>(m), 0.0);
  for (int64_t k = 0; k < n; ++k) {
    double xr = re[k], xi = sign > 0 ? -im[k] : im[k];
    double cr = plan.chirp_re[static_cast<size_t>(k)], ci = plan.chirp_im[static_cast<size_t>(k)];
    are[static_cast<size_t>(k)] = xr * cr - xi * ci;
    aim[static_cast<size_t>(k)] = xr * ci + xi * cr;
  }
  plan.pad_radix->run(are.data(), aim.data(), -1);
  for (int64_t k = 0; k < m; ++k) {
    double fr = plan.filt_re[static_cast<size_t>(k)], fi = plan.filt_im[static_cast<size_t>(k)];
    double xr = are[static_cast<size_t>(k)], xi = aim[static_cast<size_t>(k)];
    are[static_cast<size_t>(k)] = xr * fr - xi * fi;
    aim[static_cast<size_t>(k)] = xr * fi + xi * fr;
  }
  plan.pad_radix->run(are.data(), aim.data(), +1);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (int64_t k = 0; k < n; ++k) {
    double cr = plan.chirp_re[static_cast<size_t>(k)], ci = plan.chirp_im[static_cast<size_t>(k)];
    double xr = are[static_cast<size_t>(k)] * inv_m, xi = aim[static_cast<size_t>(k)] * inv_m;
    double yr = xr * cr - xi * ci;
    double yi = xr * ci + xi * cr;
    re[k] = yr;
    im[k] = sign > 0 ? -yi : yi;
  }
}

void fft_batch(const FftPlan& plan, double* packed, int64_t batch, int sign) {
  const int64_t n = plan.n;
#pragma omp parallel for schedule(static) if (batch > 4)
  for (int64_t b = 0; b < batch; ++b) {
    double* re = packed + b * 2 * n;
    double* im = re + n;
    fft_execute(plan, re, im, sign);
  }
}

}  // namespace pntm::detail
