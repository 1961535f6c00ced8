#include "magzak/initial_data.hpp"

#include <cmath>
#include <random>

#include "magzak/error.hpp"
#include "magzak/random_fields.hpp"
#include "magzak/snapshot.hpp"
#include "magzak/spectral.hpp"

namespace magzak {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

double l2(const TorusGrid& g, const VectorField& e) {
  return sobolev_norm(g, e, 0.0, NormFlavor::inhomogeneous);
}

void scale_to(const TorusGrid& g, VectorField& e, double target) {
  const double now = l2(g, e);
  if (now == 0.0) return;
  for (auto& c : e.c)
    for (auto& z : c) z *= target / now;
}

// Gaussian bump of the given width centred at c, as spectral coefficients.
Field gaussian(const TorusGrid& g, const std::array<double, 3>& c, double width,
               const std::array<double, 3>& carrier) {
  Field v = g.zeros();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = g.point(i);
    double r2 = 0.0, phase = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      r2 += (x[a] - c[a]) * (x[a] - c[a]);
      phase += kTwoPi * carrier[a] / g.period() * x[a];
    }
    v[i] = std::exp(-r2 / (2.0 * width * width)) * std::polar(1.0, phase);
  }
  return g.to_spectral(v);
}

std::array<double, 3> unit(std::array<double, 3> v, int dim) {
  if (dim == 2) v[2] = 0.0;
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (n == 0.0) throw Error(Errc::ValidationError, "direction vector is zero");
  for (auto& x : v) x /= n;
  return v;
}

SystemState gaussian_packet(const InitialSpec& sp, GridPtr grid, const Params& params) {
  const TorusGrid& g = *grid;
  SystemState st = SystemState::zeros(grid, params);
  const double mid = 0.5 * g.period();
  const std::array<double, 3> c = sp.center.value_or(std::array<double, 3>{mid, mid, mid});
  const std::array<double, 3> none{0.0, 0.0, 0.0};
  const Field env = gaussian(g, c, sp.width, sp.carrier);
  const auto pol = unit(sp.polarization, g.dim());
  for (int a : g.e_components()) {
    st.e[a] = env;
    for (auto& z : st.e[a]) z *= pol[a];
  }
  for (auto& comp : st.e.c) spectral::dealias_inplace(g, comp);
  scale_to(g, st.e, sp.e_norm);

  const Field bump = gaussian(g, c, sp.width, none);
  auto scaled = [&](double amp) {
    Field f = bump;
    for (auto& z : f) z *= amp;
    return f;
  };
  st.n = scaled(sp.n_amplitude);
  st.n_t = scaled(sp.n_t_amplitude);
  const int last = g.b_components().back();
  st.b[last] = scaled(sp.b_amplitude);
  st.b_t[last] = scaled(sp.b_t_amplitude);
  return st;
}

SystemState single_mode(const InitialSpec& sp, GridPtr grid, const Params& params) {
  const TorusGrid& g = *grid;
  SystemState st = SystemState::zeros(grid, params);
  std::array<int, 3> m = sp.mode;
  if (g.dim() == 2) m[2] = 0;
  const std::size_t idx = g.index_of(m);
  if (g.mode_index(idx) != m || !g.dealias_mask()[idx])
    throw Error(Errc::ValidationError, "single-mode index lies outside the resolved band");
  std::array<double, 3> k{};
  for (int a = 0; a < g.dim(); ++a) k[a] = m[a];
  std::array<double, 3> dir{};
  if (sp.direction == "explicit") {
    dir = unit(sp.polarization, g.dim());
  } else if (sp.direction == "longitudinal") {
    dir = unit(k, g.dim());
  } else if (g.dim() == 2) {
    dir = unit({-k[1], k[0], 0.0}, 2);
  } else {
    // k x e_z, or k x e_x when k is along e_z
    std::array<double, 3> t{k[1], -k[0], 0.0};
    if (t[0] == 0.0 && t[1] == 0.0) t = {0.0, k[2], -k[1]};
    dir = unit(t, 3);
  }
  for (int a : g.e_components()) st.e[a][idx] = sp.amplitude * dir[a];
  return st;
}

SystemState random_smooth(const InitialSpec& sp, GridPtr grid, const Params& params,
                          std::uint64_t seed) {
  const TorusGrid& g = *grid;
  SystemState st = SystemState::zeros(grid, params);
  std::mt19937_64 rng(seed);
  random_fields::BandSpec spec{sp.band, sp.decay, 1.0, false};
  st.e = random_fields::complex_vector(g, rng, spec);
  for (auto& comp : st.e.c) spectral::dealias_inplace(g, comp);
  scale_to(g, st.e, sp.e_norm);
  spec.zero_mean = true;
  spec.amplitude = sp.n_amplitude;
  st.n = random_fields::real_field(g, rng, spec);
  spec.amplitude = sp.n_t_amplitude;
  st.n_t = random_fields::real_field(g, rng, spec);
  for (int a : g.b_components()) {
    spec.amplitude = sp.b_amplitude;
    st.b[a] = random_fields::real_field(g, rng, spec);
    spec.amplitude = sp.b_t_amplitude;
    st.b_t[a] = random_fields::real_field(g, rng, spec);
  }
  return st;
}

}  // namespace

void enforce_invariants(SystemState& st) {
  const TorusGrid& g = *st.grid;
  apply_plane_embedding(st);
  auto real_clean = [&](Field& f, bool mean_free) {
    spectral::dealias_inplace(g, f);
    project_real(g, f);
    if (mean_free) remove_mean(f);
  };
  for (auto& comp : st.e.c) spectral::dealias_inplace(g, comp);
  real_clean(st.n, false);
  real_clean(st.n_t, true);
  for (int a = 0; a < 3; ++a) {
    real_clean(st.b[a], true);
    real_clean(st.b_t[a], true);
  }
}

SystemState generate_initial_data(const InitialSpec& spec, GridPtr grid, const Params& params,
                                  std::uint64_t seed) {
  SystemState st;
  if (spec.generator == "gaussian-packet") {
    st = gaussian_packet(spec, grid, params);
  } else if (spec.generator == "single-mode") {
    st = single_mode(spec, grid, params);
  } else if (spec.generator == "random-smooth") {
    st = random_smooth(spec, grid, params, seed);
  } else if (spec.generator == "snapshot") {
    st = snapshot::load_state(spec.snapshot, params.s);
    if (!st.grid->same_as(*grid))
      throw Error(Errc::GridMismatch, "snapshot grid differs from the configured grid");
    st.grid = grid;
    st.params = params;
  } else {
    throw Error(Errc::UnknownGenerator, "unknown initial-data generator '" + spec.generator + "'");
  }
  enforce_invariants(st);
  st.validate();
  return st;
}

}  // namespace magzak
