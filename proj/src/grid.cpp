#include "magzak/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "magzak/error.hpp"

namespace magzak {

namespace {

// The FFTW planner is not thread-safe; execution of existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr std::array<int, 3> kAllComponents{0, 1, 2};
constexpr std::array<int, 2> kPlaneComponents{0, 1};
constexpr std::array<int, 1> kNormalComponent{2};

}  // namespace

struct TorusGrid::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  fftw_plan forward_inplace = nullptr;
  fftw_plan backward_inplace = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    for (auto p : {forward, backward, forward_inplace, backward_inplace})
      if (p) fftw_destroy_plan(p);
  }
};

TorusGrid::TorusGrid(int dim, int points, double period)
    : dim_(dim), points_(points), period_(period) {
  if (dim != 2 && dim != 3)
    throw Error(Errc::DomainError, "grid dimension must be 2 or 3, got " + std::to_string(dim));
  if (points < 4 || (points & (points - 1)) != 0)
    throw Error(Errc::DomainError, "points per axis must be a power of two >= 4, got " +
                                       std::to_string(points));
  if (!(period > 0.0) || !std::isfinite(period))
    throw Error(Errc::DomainError, "period must be positive and finite");

  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(points);
  dk_ = 2.0 * std::numbers::pi / period;
  volume_ = std::pow(period, dim);

  k2_.resize(size_);
  for (auto& kv : kvec_) kv.assign(size_, 0.0);
  mask_.resize(size_);
  nyquist_.resize(size_);

  // Two-thirds rule: keep |m_j| <= N/3 on every axis.
  const double cutoff = (2.0 / 3.0) * (points / 2);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto m = mode_index(i);
    double k2 = 0.0;
    bool keep = true;
    bool nyq = false;
    for (int a = 0; a < dim; ++a) {
      const double ka = dk_ * m[a];
      kvec_[a][i] = ka;
      k2 += ka * ka;
      if (std::abs(m[a]) > cutoff) keep = false;
      if (m[a] == -points / 2) nyq = true;
    }
    k2_[i] = k2;
    mask_[i] = keep && !nyq;
    nyquist_[i] = nyq;
  }

  plans_ = std::make_unique<Plans>();
  std::array<int, 3> n{points, points, points};
  std::lock_guard lock(planner_mutex());
  auto* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size_));
  auto* b = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size_));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_dft(dim, n.data(), a, b, FFTW_FORWARD, flags);
  plans_->backward = fftw_plan_dft(dim, n.data(), a, b, FFTW_BACKWARD, flags);
  plans_->forward_inplace = fftw_plan_dft(dim, n.data(), a, a, FFTW_FORWARD, flags);
  plans_->backward_inplace = fftw_plan_dft(dim, n.data(), a, a, FFTW_BACKWARD, flags);
  fftw_free(a);
  fftw_free(b);
}

TorusGrid::~TorusGrid() = default;

std::array<int, 3> TorusGrid::mode_index(std::size_t i) const {
  std::array<int, 3> m{0, 0, 0};
  const auto n = static_cast<std::size_t>(points_);
  for (int a = dim_ - 1; a >= 0; --a) {
    const int j = static_cast<int>(i % n);
    i /= n;
    m[a] = j < points_ / 2 ? j : j - points_;
  }
  return m;
}

std::size_t TorusGrid::index_of(const std::array<int, 3>& m) const {
  std::size_t i = 0;
  for (int a = 0; a < dim_; ++a) {
    int j = m[a] % points_;
    if (j < 0) j += points_;
    i = i * static_cast<std::size_t>(points_) + static_cast<std::size_t>(j);
  }
  return i;
}

std::array<double, 3> TorusGrid::point(std::size_t i) const {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const auto n = static_cast<std::size_t>(points_);
  const double h = period_ / points_;
  for (int a = dim_ - 1; a >= 0; --a) {
    x[a] = h * static_cast<double>(i % n);
    i /= n;
  }
  return x;
}

std::span<const int> TorusGrid::e_components() const {
  if (dim_ == 2) return kPlaneComponents;
  return kAllComponents;
}

std::span<const int> TorusGrid::b_components() const {
  if (dim_ == 2) return kNormalComponent;
  return kAllComponents;
}

void TorusGrid::to_physical(std::span<const cplx> coef, std::span<cplx> out) const {
  if (coef.size() != size_ || out.size() != size_)
    throw Error(Errc::GridMismatch, "field size does not match grid");
  auto* in = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(coef.data()));
  auto* o = reinterpret_cast<fftw_complex*>(out.data());
  if (static_cast<const void*>(coef.data()) == static_cast<const void*>(out.data()))
    fftw_execute_dft(plans_->backward_inplace, o, o);
  else
    fftw_execute_dft(plans_->backward, in, o);
}

void TorusGrid::to_spectral(std::span<const cplx> values, std::span<cplx> out) const {
  if (values.size() != size_ || out.size() != size_)
    throw Error(Errc::GridMismatch, "field size does not match grid");
  auto* in = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(values.data()));
  auto* o = reinterpret_cast<fftw_complex*>(out.data());
  if (static_cast<const void*>(values.data()) == static_cast<const void*>(out.data()))
    fftw_execute_dft(plans_->forward_inplace, o, o);
  else
    fftw_execute_dft(plans_->forward, in, o);
  const double scale = 1.0 / static_cast<double>(size_);
  kernels::par::apply_symbol(k2_, out, [scale](double) { return scale; });
}

Field TorusGrid::to_physical(const Field& coef) const {
  Field out(size_);
  to_physical(coef, out);
  return out;
}

Field TorusGrid::to_spectral(const Field& values) const {
  Field out(size_);
  to_spectral(values, out);
  return out;
}

GridPtr make_grid(int dim, int points, double period) {
  return std::make_shared<const TorusGrid>(dim, points, period);
}

}  // namespace magzak
