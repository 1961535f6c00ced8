#pragma once

// Mode-wise and point-wise loops used by every spectral operator.
//
// Two implementations with identical signatures live side by side:
// `serial` is the straightforward reference kept for testing, `omp` is the
// OpenMP version the library calls (re-exported as `kernels::par`). Reductions
// in `omp` sum fixed-size blocks in a fixed order, so results do not depend on
// the thread count.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace magzak {

using cplx = std::complex<double>;

namespace kernels {

inline constexpr std::size_t kReductionBlock = 2048;

namespace serial {

template <class Symbol>
void apply_symbol(std::span<const double> k2, std::span<cplx> f, Symbol&& symbol) {
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= symbol(k2[i]);
}

template <class Weight>
double weighted_norm2(std::span<const double> k2, std::span<const cplx> f, Weight&& weight) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += weight(k2[i]) * std::norm(f[i]);
  return sum;
}

inline void multiply(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

// out = a + alpha * b
inline void axpy(std::span<const cplx> a, cplx alpha, std::span<const cplx> b, std::span<cplx> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + alpha * b[i];
}

inline void cross(std::span<const cplx> u0, std::span<const cplx> u1, std::span<const cplx> u2,
                  std::span<const cplx> v0, std::span<const cplx> v1, std::span<const cplx> v2,
                  std::span<cplx> w0, std::span<cplx> w1, std::span<cplx> w2) {
  for (std::size_t i = 0; i < w0.size(); ++i) {
    const cplx a0 = u1[i] * v2[i] - u2[i] * v1[i];
    const cplx a1 = u2[i] * v0[i] - u0[i] * v2[i];
    const cplx a2 = u0[i] * v1[i] - u1[i] * v0[i];
    w0[i] = a0;
    w1[i] = a1;
    w2[i] = a2;
  }
}

inline void apply_mask(std::span<cplx> f, std::span<const std::uint8_t> keep) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!keep[i]) f[i] = 0.0;
}

// sum_i |f_i|^p, or max_i |f_i| when p is infinite.
inline double sum_abs_pow(std::span<const cplx> f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  for (const auto& v : f) sum += std::pow(std::abs(v), p);
  return sum;
}

}  // namespace serial

namespace omp {

template <class Symbol>
void apply_symbol(std::span<const double> k2, std::span<cplx> f, Symbol&& symbol) {
  const auto n = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) f[i] *= symbol(k2[i]);
}

template <class Weight>
double weighted_norm2(std::span<const double> k2, std::span<const cplx> f, Weight&& weight) {
  const std::size_t nblocks = (f.size() + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(nblocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(f.size(), lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += weight(k2[i]) * std::norm(f[i]);
    partial[b] = s;
  }
  double sum = 0.0;
  for (double s : partial) sum += s;
  return sum;
}

inline void multiply(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

inline void axpy(std::span<const cplx> a, cplx alpha, std::span<const cplx> b, std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a[i] + alpha * b[i];
}

inline void cross(std::span<const cplx> u0, std::span<const cplx> u1, std::span<const cplx> u2,
                  std::span<const cplx> v0, std::span<const cplx> v1, std::span<const cplx> v2,
                  std::span<cplx> w0, std::span<cplx> w1, std::span<cplx> w2) {
  const auto n = static_cast<std::ptrdiff_t>(w0.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const cplx a0 = u1[i] * v2[i] - u2[i] * v1[i];
    const cplx a1 = u2[i] * v0[i] - u0[i] * v2[i];
    const cplx a2 = u0[i] * v1[i] - u1[i] * v0[i];
    w0[i] = a0;
    w1[i] = a1;
    w2[i] = a2;
  }
}

inline void apply_mask(std::span<cplx> f, std::span<const std::uint8_t> keep) {
  const auto n = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    if (!keep[i]) f[i] = 0.0;
}

inline double sum_abs_pow(std::span<const cplx> f, double p) {
  const std::size_t nblocks = (f.size() + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(nblocks, 0.0);
  const bool inf = std::isinf(p);
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(f.size(), lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double a = std::abs(f[i]);
      s = inf ? std::max(s, a) : s + std::pow(a, p);
    }
    partial[b] = s;
  }
  double sum = 0.0;
  for (double s : partial) sum = inf ? std::max(sum, s) : sum + s;
  return sum;
}

}  // namespace omp

namespace par = omp;

}  // namespace kernels
}  // namespace magzak
