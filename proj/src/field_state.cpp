#include "magzak/field_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "magzak/error.hpp"
#include "magzak/spectral.hpp"

namespace magzak {

void Params::validate(int dim) const {
  if (!(alpha >= 1.0)) throw Error(Errc::ValidationError, "alpha must satisfy α ≥ 1");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw Error(Errc::ValidationError, "epsilon must lie in [0, 1)");
  if (!(s > 0.5 * dim)) throw Error(Errc::ValidationError, "s must exceed d/2");
}

SystemState SystemState::zeros(GridPtr grid, Params params) {
  SystemState st;
  st.e = grid->zero_vector();
  st.n = grid->zeros();
  st.n_t = grid->zeros();
  st.b = grid->zero_vector();
  st.b_t = grid->zero_vector();
  st.params = params;
  st.grid = std::move(grid);
  return st;
}

void SystemState::validate() const {
  if (!grid) throw Error(Errc::DomainError, "state has no grid");
  params.validate(grid->dim());
  auto check = [&](const Field& f, const char* name) {
    if (f.size() != grid->size()) throw Error(Errc::GridMismatch, std::string(name) + " size");
    spectral::require_finite(f, name);
  };
  for (int a = 0; a < 3; ++a) {
    check(e[a], "E");
    check(b[a], "B");
    check(b_t[a], "B_t");
    spectral::require_zero_mean(b[a], "B");
    spectral::require_zero_mean(b_t[a], "B_t");
  }
  check(n, "n");
  check(n_t, "n_t");
  spectral::require_zero_mean(n_t, "n_t");
  if (grid->dim() == 2) {
    auto zero = [](const Field& f) {
      return std::all_of(f.begin(), f.end(), [](const cplx& v) { return std::abs(v) < 1e-13; });
    };
    if (!zero(e[2]) || !zero(b[0]) || !zero(b[1]) || !zero(b_t[0]) || !zero(b_t[1]))
      throw Error(Errc::DomainError, "d = 2 state must have E3 = B1 = B2 = 0");
  }
}

VectorField cross(const TorusGrid& grid, const VectorField& u, const VectorField& v) {
  for (int a = 0; a < 3; ++a)
    if (u[a].size() != grid.size() || v[a].size() != grid.size())
      throw Error(Errc::GridMismatch, "cross: operands live on different grids");
  VectorField up = grid.zero_vector();
  VectorField vp = grid.zero_vector();
#pragma omp parallel for schedule(static)
  for (int a = 0; a < 3; ++a) {
    grid.to_physical(u[a], up[a]);
    grid.to_physical(v[a], vp[a]);
  }
  VectorField w = grid.zero_vector();
  kernels::par::cross(up[0], up[1], up[2], vp[0], vp[1], vp[2], w[0], w[1], w[2]);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < 3; ++a) {
    grid.to_spectral(w[a], w[a]);
    spectral::dealias_inplace(grid, w[a]);
  }
  return w;
}

VectorField spin_density(const TorusGrid& grid, const VectorField& e) {
  VectorField ep = grid.zero_vector();
  VectorField ec = grid.zero_vector();
  for (int a : grid.e_components()) {
    grid.to_physical(e[a], ep[a]);
    std::transform(ep[a].begin(), ep[a].end(), ec[a].begin(), [](cplx z) { return std::conj(z); });
  }
  VectorField w = grid.zero_vector();
  kernels::par::cross(ep[0], ep[1], ep[2], ec[0], ec[1], ec[2], w[0], w[1], w[2]);

  double emax = 0.0;
  for (int a : grid.e_components())
    for (const auto& z : ep[a]) emax = std::max(emax, std::norm(z));
  const double tol = 1e-12 * std::max(1.0, emax);

  VectorField s = grid.zero_vector();
  for (int a : grid.b_components()) {
    // -i (x + i y) = y - i x
    double residue = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      residue = std::max(residue, std::abs(w[a][i].real()));
      s[a][i] = cplx(w[a][i].imag(), 0.0);
    }
    if (residue > tol)
      throw Error(Errc::ImaginaryResidue,
                  "spin density has imaginary residue " + fmt(residue));
    grid.to_spectral(s[a], s[a]);
    spectral::dealias_inplace(grid, s[a]);
  }
  return s;
}

double sobolev_norm(const TorusGrid& grid, const Field& f, double s, NormFlavor flavor,
                    double negative_order) {
  if (f.size() != grid.size()) throw Error(Errc::GridMismatch, "sobolev_norm: field size");
  const auto k2 = grid.k2();
  auto homogeneous = [&](double order) {
    if (order < 0.0) spectral::require_zero_mean(f, "field in negative-order norm");
    if (order == 0.0) return kernels::par::weighted_norm2(k2, f, [](double) { return 1.0; });
    return kernels::par::weighted_norm2(k2, f, [order](double q) {
      return q == 0.0 ? 0.0 : std::pow(q, order);
    });
  };
  auto inhomogeneous = [&](double order) {
    return kernels::par::weighted_norm2(k2, f,
                                        [order](double q) { return std::pow(1.0 + q, order); });
  };
  double n2 = 0.0;
  switch (flavor) {
    case NormFlavor::inhomogeneous:
      n2 = inhomogeneous(s);
      break;
    case NormFlavor::homogeneous:
      n2 = homogeneous(s);
      break;
    case NormFlavor::intersection:
      n2 = std::max(inhomogeneous(s), homogeneous(negative_order));
      break;
  }
  return std::sqrt(grid.volume() * n2);
}

double sobolev_norm(const TorusGrid& grid, const VectorField& f, double s, NormFlavor flavor,
                    double negative_order) {
  if (flavor != NormFlavor::intersection) {
    double n2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double c = sobolev_norm(grid, f[a], s, flavor);
      n2 += c * c;
    }
    return std::sqrt(n2);
  }
  double h = 0.0, hd = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double c = sobolev_norm(grid, f[a], s, NormFlavor::inhomogeneous);
    const double cd = sobolev_norm(grid, f[a], negative_order, NormFlavor::homogeneous);
    h += c * c;
    hd += cd * cd;
  }
  return std::sqrt(std::max(h, hd));
}

double l2_norm_physical(const TorusGrid& grid, const Field& f) {
  const Field v = grid.to_physical(f);
  return std::sqrt(grid.cell_volume() * kernels::par::sum_abs_pow(v, 2.0));
}

double imaginary_residue(const TorusGrid& grid, const Field& f) {
  const Field v = grid.to_physical(f);
  double r = 0.0;
  for (const auto& z : v) r = std::max(r, std::abs(z.imag()));
  return r;
}

void project_real(const TorusGrid& grid, Field& f) {
  Field g(f.size());
  const auto n = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto m = grid.mode_index(static_cast<std::size_t>(i));
    for (auto& c : m) c = -c;
    g[i] = 0.5 * (f[i] + std::conj(f[grid.index_of(m)]));
  }
  f.swap(g);
}

void remove_mean(Field& f) {
  if (!f.empty()) f[0] = 0.0;
}

void apply_plane_embedding(SystemState& state) {
  if (state.grid->dim() != 2) return;
  std::fill(state.e[2].begin(), state.e[2].end(), cplx{});
  for (int a = 0; a < 2; ++a) {
    std::fill(state.b[a].begin(), state.b[a].end(), cplx{});
    std::fill(state.b_t[a].begin(), state.b_t[a].end(), cplx{});
  }
}

}  // namespace magzak
