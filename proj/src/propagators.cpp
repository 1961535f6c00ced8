#include "magzak/propagators.hpp"

#include <cmath>

#include "magzak/error.hpp"
#include "magzak/spectral.hpp"

namespace magzak::propagators {

cplx LinearGroupSpec::longitudinal_phase(double k2) const {
  return std::polar(1.0, -t * longitudinal_rate(k2));
}

cplx LinearGroupSpec::transverse_phase(double k2) const {
  return std::polar(1.0, -t * alpha * longitudinal_rate(k2));
}

double OscillatorSpec::omega(double k2) const {
  if (kind == Dispersion::wave) return std::sqrt(k2);
  return std::sqrt(k2 * (1.0 + k2));
}

double OscillatorSpec::cos_symbol(double k2) const { return std::cos(omega(k2) * t); }

double OscillatorSpec::sinc_symbol(double k2) const {
  const double w = omega(k2);
  return w == 0.0 ? t : std::sin(w * t) / w;
}

void schrodinger_group_inplace(const TorusGrid& grid, VectorField& e, double t, double alpha,
                               double epsilon) {
  if (t == 0.0) return;
  const LinearGroupSpec spec{t, alpha, epsilon};
  const auto k2 = grid.k2();
  const int d = grid.dim();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (k2[i] == 0.0) continue;
    const cplx pl = spec.longitudinal_phase(k2[i]);
    const cplx pt = spec.transverse_phase(k2[i]);
    cplx kdot = 0.0;
    for (int a = 0; a < d; ++a) kdot += grid.k(a)[i] * e[a][i];
    const cplx proj = kdot / k2[i];
    for (int a = 0; a < 3; ++a) {
      const double ka = a < d ? grid.k(a)[i] : 0.0;
      const cplx lon = proj * ka;
      e[a][i] = pl * lon + pt * (e[a][i] - lon);
    }
  }
}

VectorField schrodinger_group(const TorusGrid& grid, const VectorField& e, double t, double alpha,
                              double epsilon) {
  for (const auto& c : e.c) {
    if (c.size() != grid.size()) throw Error(Errc::GridMismatch, "schrodinger_group: field size");
    spectral::require_finite(c, "schrodinger_group input");
  }
  VectorField out = e;
  schrodinger_group_inplace(grid, out, t, alpha, epsilon);
  return out;
}

void oscillate_inplace(const TorusGrid& grid, Dispersion kind, Field& u, Field& u_t, double t) {
  if (t == 0.0) return;
  const OscillatorSpec spec{kind, t};
  const auto k2 = grid.k2();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double w = spec.omega(k2[i]);
    const double c = std::cos(w * t);
    const double sinc = w == 0.0 ? t : std::sin(w * t) / w;
    const double msin = w == 0.0 ? 0.0 : -w * std::sin(w * t);
    const cplx u0 = u[i];
    const cplx v0 = u_t[i];
    u[i] = c * u0 + sinc * v0;
    u_t[i] = msin * u0 + c * v0;
  }
}

std::pair<Field, Field> wave_free(const TorusGrid& grid, const Field& n, const Field& n_t, double t) {
  if (n.size() != grid.size() || n_t.size() != grid.size())
    throw Error(Errc::GridMismatch, "wave_free: field size");
  spectral::require_zero_mean(n_t, "n_t");
  Field u = n, v = n_t;
  oscillate_inplace(grid, Dispersion::wave, u, v, t);
  return {std::move(u), std::move(v)};
}

std::pair<VectorField, VectorField> plate_free(const TorusGrid& grid, const VectorField& b,
                                               const VectorField& b_t, double t) {
  VectorField u = b, v = b_t;
  for (int a = 0; a < 3; ++a) {
    if (b[a].size() != grid.size() || b_t[a].size() != grid.size())
      throw Error(Errc::GridMismatch, "plate_free: field size");
    spectral::require_zero_mean(b[a], "B");
    spectral::require_zero_mean(b_t[a], "B_t");
    oscillate_inplace(grid, Dispersion::plate, u[a], v[a], t);
  }
  return {std::move(u), std::move(v)};
}

std::array<std::pair<double, double>, 3> simpson_end_rule(double dt) {
  return {{{dt, dt / 6.0}, {0.5 * dt, 4.0 * dt / 6.0}, {0.0, dt / 6.0}}};
}

std::array<std::pair<double, double>, 3> simpson_mid_rule(double dt) {
  const double h = 0.5 * dt;
  return {{{h, 5.0 * h / 12.0}, {0.0, 8.0 * h / 12.0}, {-h, -h / 12.0}}};
}

void add_oscillator_sources(const TorusGrid& grid, Dispersion kind, Field& u, Field& u_t,
                            std::span<const KernelSample> samples) {
  const auto k2 = grid.k2();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  for (const auto& smp : samples) {
    if (smp.weight == 0.0) continue;
    const OscillatorSpec spec{kind, smp.lag};
    const Field& f = *smp.forcing;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      u[i] += smp.weight * spec.sinc_symbol(k2[i]) * f[i];
      u_t[i] += smp.weight * spec.cos_symbol(k2[i]) * f[i];
    }
  }
}

void add_group_sources(const TorusGrid& grid, VectorField& e, double alpha, double epsilon,
                       std::span<const GroupSample> samples) {
  for (const auto& smp : samples) {
    if (smp.weight == 0.0) continue;
    VectorField g = *smp.forcing;
    schrodinger_group_inplace(grid, g, smp.lag, alpha, epsilon);
    for (int a = 0; a < 3; ++a) kernels::par::axpy(e[a], smp.weight, g[a], e[a]);
  }
}

namespace {

void require_step(double dt) {
  if (!(dt > 0.0)) throw Error(Errc::QuadratureUnderflow, "Duhamel step must be positive");
}

}  // namespace

std::pair<Field, Field> duhamel_wave(const TorusGrid& grid, const Field& n, const Field& n_t,
                                     std::span<const Field, 3> forcing, double dt) {
  require_step(dt);
  for (const auto& f : forcing)
    if (f.size() != grid.size()) throw Error(Errc::GridMismatch, "duhamel_wave: forcing size");
  Field u = n, v = n_t;
  oscillate_inplace(grid, Dispersion::wave, u, v, dt);
  const auto rule = simpson_end_rule(dt);
  const std::array<KernelSample, 3> samples{{{rule[0].first, rule[0].second, &forcing[0]},
                                             {rule[1].first, rule[1].second, &forcing[1]},
                                             {rule[2].first, rule[2].second, &forcing[2]}}};
  add_oscillator_sources(grid, Dispersion::wave, u, v, samples);
  return {std::move(u), std::move(v)};
}

std::pair<VectorField, VectorField> duhamel_plate(const TorusGrid& grid, const VectorField& b,
                                                  const VectorField& b_t,
                                                  std::span<const VectorField, 3> spin, double dt) {
  require_step(dt);
  VectorField u = b, v = b_t;
  const auto rule = simpson_end_rule(dt);
  for (int a = 0; a < 3; ++a) {
    std::array<Field, 3> rhs;
    for (int j = 0; j < 3; ++j) {
      if (spin[j][a].size() != grid.size())
        throw Error(Errc::GridMismatch, "duhamel_plate: forcing size");
      rhs[j] = spin[j][a];
      kernels::par::apply_symbol(grid.k2(), rhs[j], [](double k2) { return k2 * k2; });
    }
    oscillate_inplace(grid, Dispersion::plate, u[a], v[a], dt);
    const std::array<KernelSample, 3> samples{{{rule[0].first, rule[0].second, &rhs[0]},
                                               {rule[1].first, rule[1].second, &rhs[1]},
                                               {rule[2].first, rule[2].second, &rhs[2]}}};
    add_oscillator_sources(grid, Dispersion::plate, u[a], v[a], samples);
  }
  return {std::move(u), std::move(v)};
}

}  // namespace magzak::propagators
