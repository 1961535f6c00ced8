#include "magzak/spectral.hpp"

#include <cmath>
#include <string>

#include "magzak/error.hpp"

namespace magzak::spectral {

namespace {

bool is_origin(const Wavevector& k) { return k[0] == 0.0 && k[1] == 0.0 && k[2] == 0.0; }

Wavevector wavevector(const TorusGrid& grid, std::size_t i) {
  Wavevector k{0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim(); ++a) k[a] = grid.k(a)[i];
  return k;
}

void require_size(const TorusGrid& grid, std::span<const cplx> f) {
  if (f.size() != grid.size())
    throw Error(Errc::GridMismatch, "field has " + std::to_string(f.size()) +
                                        " modes, grid has " + std::to_string(grid.size()));
}

}  // namespace

cplx MultiplierSpec::scalar_at(const Wavevector& k) const {
  if (is_origin(k)) {
    if (zero_mode == ZeroModePolicy::zero) return 0.0;
    if (zero_mode == ZeroModePolicy::value) return zero_value;
  }
  return scalar(k);
}

Mat3 MultiplierSpec::matrix_at(const Wavevector& k) const {
  if (is_origin(k) && zero_mode != ZeroModePolicy::limit) {
    Mat3 m{};
    if (zero_mode == ZeroModePolicy::value)
      for (int a = 0; a < 3; ++a) m[a][a] = zero_value;
    return m;
  }
  return matrix(k);
}

MultiplierSpec lambda_multiplier(double s, bool homogeneous) {
  MultiplierSpec spec;
  spec.kind = MultiplierSpec::Kind::scalar;
  if (homogeneous) {
    spec.scalar = [s](const Wavevector& k) {
      const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
      return cplx(std::pow(k2, 0.5 * s), 0.0);
    };
    if (s == 0.0) {
      spec.zero_mode = ZeroModePolicy::value;
      spec.zero_value = 1.0;
    } else {
      spec.zero_mode = ZeroModePolicy::zero;
    }
  } else {
    spec.scalar = [s](const Wavevector& k) {
      const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
      return cplx(std::pow(1.0 + k2, 0.5 * s), 0.0);
    };
    spec.zero_mode = ZeroModePolicy::limit;
  }
  return spec;
}

MultiplierSpec smoother_multiplier(double epsilon) {
  MultiplierSpec spec;
  spec.kind = MultiplierSpec::Kind::scalar;
  spec.scalar = [epsilon](const Wavevector& k) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    return cplx(1.0 / (1.0 + epsilon * epsilon * k2 * k2), 0.0);
  };
  return spec;
}

MultiplierSpec operator_a_multiplier(double alpha) {
  MultiplierSpec spec;
  spec.kind = MultiplierSpec::Kind::matrix3;
  spec.matrix = [alpha](const Wavevector& k) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    Mat3 m{};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        m[a][b] = (1.0 - alpha) * k[a] * k[b] + (a == b ? alpha * k2 : 0.0);
    return m;
  };
  return spec;
}

Field apply(const TorusGrid& grid, const MultiplierSpec& spec, const Field& f) {
  require_size(grid, f);
  if (spec.kind != MultiplierSpec::Kind::scalar)
    throw Error(Errc::DomainError, "matrix multiplier applied to a scalar field");
  Field out(f.size());
  const auto n = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = spec.scalar_at(wavevector(grid, static_cast<std::size_t>(i))) * f[i];
  return out;
}

VectorField apply(const TorusGrid& grid, const MultiplierSpec& spec, const VectorField& f) {
  if (spec.kind == MultiplierSpec::Kind::scalar)
    return {{apply(grid, spec, f[0]), apply(grid, spec, f[1]), apply(grid, spec, f[2])}};
  for (const auto& c : f.c) require_size(grid, c);
  VectorField out = grid.zero_vector();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Mat3 m = spec.matrix_at(wavevector(grid, static_cast<std::size_t>(i)));
    for (int a = 0; a < 3; ++a) {
      cplx s = 0.0;
      for (int b = 0; b < 3; ++b) s += m[a][b] * f[b][i];
      out[a][i] = s;
    }
  }
  return out;
}

void require_finite(std::span<const cplx> f, std::string_view what) {
  for (const auto& v : f)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(Errc::NonFinite, std::string(what) + " has a non-finite coefficient");
}

bool has_zero_mean(std::span<const cplx> f, double rel_tol) {
  if (f.empty()) return true;
  double norm2 = 0.0;
  for (const auto& v : f) norm2 += std::norm(v);
  return std::abs(f[0]) <= rel_tol * std::sqrt(norm2);
}

void require_zero_mean(std::span<const cplx> f, std::string_view what) {
  if (!has_zero_mean(f))
    throw Error(Errc::NonZeroMean, std::string(what) + " must have zero mean (k = 0 coefficient " +
                                       fmt(std::abs(f[0])) + ")");
}

Field apply_lambda(const TorusGrid& grid, const Field& f, double s, bool homogeneous) {
  require_size(grid, f);
  require_finite(f, "apply_lambda input");
  if (s < 0.0 && homogeneous) require_zero_mean(f, "apply_lambda input");
  Field out = f;
  if (s == 0.0) return out;
  if (homogeneous) {
    kernels::par::apply_symbol(grid.k2(), out, [s](double k2) {
      return k2 == 0.0 ? 0.0 : std::pow(k2, 0.5 * s);
    });
  } else {
    kernels::par::apply_symbol(grid.k2(), out,
                               [s](double k2) { return std::pow(1.0 + k2, 0.5 * s); });
  }
  return out;
}

VectorField grad_div(const TorusGrid& grid, const VectorField& e) {
  for (const auto& c : e.c) {
    require_size(grid, c);
    require_finite(c, "grad_div input");
  }
  VectorField out = grid.zero_vector();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  const int d = grid.dim();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    cplx kdot = 0.0;
    for (int a = 0; a < d; ++a) kdot += grid.k(a)[i] * e[a][i];
    for (int a = 0; a < d; ++a) out[a][i] = -grid.k(a)[i] * kdot;
  }
  return out;
}

VectorField curl_curl(const TorusGrid& grid, const VectorField& e) {
  for (const auto& c : e.c) {
    require_size(grid, c);
    require_finite(c, "curl_curl input");
  }
  VectorField out = grid.zero_vector();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  const int d = grid.dim();
  const auto k2 = grid.k2();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    cplx kdot = 0.0;
    for (int a = 0; a < d; ++a) kdot += grid.k(a)[i] * e[a][i];
    for (int a = 0; a < 3; ++a) {
      const double ka = a < d ? grid.k(a)[i] : 0.0;
      out[a][i] = k2[i] * e[a][i] - ka * kdot;
    }
  }
  return out;
}

void smooth_inplace(const TorusGrid& grid, std::span<cplx> f, double epsilon) {
  if (epsilon == 0.0) return;
  const double e2 = epsilon * epsilon;
  kernels::par::apply_symbol(grid.k2(), f, [e2](double k2) { return 1.0 / (1.0 + e2 * k2 * k2); });
}

Field apply_smoother(const TorusGrid& grid, const Field& f, double epsilon) {
  require_size(grid, f);
  require_finite(f, "apply_smoother input");
  if (!(epsilon >= 0.0)) throw Error(Errc::DomainError, "smoother strength must be >= 0");
  Field out = f;
  smooth_inplace(grid, out, epsilon);
  return out;
}

VectorField apply_smoother(const TorusGrid& grid, const VectorField& f, double epsilon) {
  return {{apply_smoother(grid, f[0], epsilon), apply_smoother(grid, f[1], epsilon),
           apply_smoother(grid, f[2], epsilon)}};
}

void dealias_inplace(const TorusGrid& grid, std::span<cplx> f) {
  require_size(grid, f);
  kernels::par::apply_mask(f, grid.dealias_mask());
}

Field dealias(const TorusGrid& grid, const Field& f) {
  Field out = f;
  dealias_inplace(grid, out);
  return out;
}

}  // namespace magzak::spectral
