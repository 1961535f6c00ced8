#pragma once

#include <array>
#include <functional>
#include <string_view>

#include "magzak/grid.hpp"

namespace magzak::spectral {

using Wavevector = std::array<double, 3>;
using Mat3 = std::array<std::array<cplx, 3>, 3>;

enum class ZeroModePolicy {
  value,  // use the stored zero-mode value
  zero,   // force the k = 0 coefficient to 0
  limit,  // evaluate the symbol itself at k = 0
};

// A Fourier symbol applied mode-wise, either scalar or 3x3 matrix valued.
struct MultiplierSpec {
  enum class Kind { scalar, matrix3 };

  Kind kind = Kind::scalar;
  std::function<cplx(const Wavevector&)> scalar;
  std::function<Mat3(const Wavevector&)> matrix;
  ZeroModePolicy zero_mode = ZeroModePolicy::limit;
  cplx zero_value{0.0, 0.0};

  cplx scalar_at(const Wavevector& k) const;
  Mat3 matrix_at(const Wavevector& k) const;
};

// |k|^s (homogeneous) or (1 + |k|^2)^{s/2}. Homogeneous symbols with s != 0
// vanish at k = 0.
MultiplierSpec lambda_multiplier(double s, bool homogeneous);
// 1 / (1 + eps^2 |k|^4)
MultiplierSpec smoother_multiplier(double epsilon);
// Symbol of A E = -grad(div E) + alpha curl curl E, i.e. (1 - alpha) k k^T + alpha |k|^2 I.
MultiplierSpec operator_a_multiplier(double alpha);

Field apply(const TorusGrid& grid, const MultiplierSpec& spec, const Field& f);
VectorField apply(const TorusGrid& grid, const MultiplierSpec& spec, const VectorField& f);

void require_finite(std::span<const cplx> f, std::string_view what);
bool has_zero_mean(std::span<const cplx> f, double rel_tol = 1e-12);
void require_zero_mean(std::span<const cplx> f, std::string_view what);

Field apply_lambda(const TorusGrid& grid, const Field& f, double s, bool homogeneous);
VectorField grad_div(const TorusGrid& grid, const VectorField& e);
VectorField curl_curl(const TorusGrid& grid, const VectorField& e);

Field apply_smoother(const TorusGrid& grid, const Field& f, double epsilon);
VectorField apply_smoother(const TorusGrid& grid, const VectorField& f, double epsilon);
void smooth_inplace(const TorusGrid& grid, std::span<cplx> f, double epsilon);

Field dealias(const TorusGrid& grid, const Field& f);
void dealias_inplace(const TorusGrid& grid, std::span<cplx> f);

}  // namespace magzak::spectral
