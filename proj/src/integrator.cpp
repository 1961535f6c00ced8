#include "magzak/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "magzak/diagnostics.hpp"
#include "magzak/error.hpp"
#include "magzak/propagators.hpp"
#include "magzak/spectral.hpp"

namespace magzak {

LowFrequencyData LowFrequencyData::zeros(GridPtr grid) {
  LowFrequencyData lf;
  lf.n1 = grid->zeros();
  lf.b0 = grid->zero_vector();
  lf.b1 = grid->zero_vector();
  lf.grid = std::move(grid);
  return lf;
}

void IntegratorConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(dt)) throw Error(Errc::ValidationError, "dt must be positive");
  if (!(t_end >= 0.0 && std::isfinite(t_end)))
    throw Error(Errc::ValidationError, "T_end must be non-negative");
  if (scheme == Scheme::picard) {
    if (!positive(window)) throw Error(Errc::ValidationError, "T_win must be positive");
    if (!positive(tol_fp)) throw Error(Errc::ValidationError, "tol_fp must be positive");
    if (max_iter < 1) throw Error(Errc::ValidationError, "max_iter must be at least 1");
    if (max_halvings < 0) throw Error(Errc::ValidationError, "max_halvings must be non-negative");
  }
  if (modified_mode && !low)
    throw Error(Errc::ValidationError, "modified mode needs low-frequency data");
  if (!positive(blowup_threshold))
    throw Error(Errc::ValidationError, "blow-up threshold must be positive");
}

namespace {

namespace prop = propagators;

void check_low(const SystemState& state, const LowFrequencyData& low) {
  if (!low.grid || !low.grid->same_as(*state.grid))
    throw Error(Errc::GridMismatch, "low-frequency data lives on a different grid");
  spectral::require_zero_mean(low.n1, "n_1L");
  for (int a = 0; a < 3; ++a) {
    spectral::require_zero_mean(low.b0[a], "B_0L");
    spectral::require_zero_mean(low.b1[a], "B_1L");
  }
}

// Inverse transform of the listed components; the others stay zero.
VectorField physical(const TorusGrid& g, const VectorField& f, std::span<const int> comps) {
  VectorField out = g.zero_vector();
  for (int a : comps) g.to_physical(f[a], out[a]);
  return out;
}

void to_spectral_dealiased(const TorusGrid& g, Field& f) {
  g.to_spectral(f, f);
  kernels::par::apply_mask(f, g.dealias_mask());
}

void smooth(const TorusGrid& g, Field& f, double eps) {
  if (eps == 0.0) return;
  const double e2 = eps * eps;
  kernels::par::apply_symbol(g.k2(), f, [e2](double q) { return 1.0 / (1.0 + e2 * q * q); });
}

// L P(-i n E - E x B) from physical E, n, B.
VectorField e_force(const TorusGrid& g, const Params& p, const VectorField& ep, const Field& np,
                    const VectorField& bp) {
  VectorField out = g.zero_vector();
  const auto size = static_cast<std::ptrdiff_t>(g.size());
  for (int a : g.e_components()) {
    const int b1 = (a + 1) % 3, b2 = (a + 2) % 3;
    Field& o = out[a];
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < size; ++i) {
      const cplx exb = ep[b1][i] * bp[b2][i] - ep[b2][i] * bp[b1][i];
      o[i] = cplx(0.0, -1.0) * np[i] * ep[a][i] - exb;
    }
    to_spectral_dealiased(g, o);
    smooth(g, o, p.epsilon);
  }
  return out;
}

// Lap P|E|^2
Field wave_source(const TorusGrid& g, const VectorField& ep) {
  Field w = g.zeros();
  const auto size = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i)
    w[i] = std::norm(ep[0][i]) + std::norm(ep[1][i]) + std::norm(ep[2][i]);
  to_spectral_dealiased(g, w);
  kernels::par::apply_symbol(g.k2(), w, [](double q) { return -q; });
  return w;
}

// Lap^2 P S with S = -i E x conj(E) = 2 Im(E_{a+1} conj(E_{a+2})) componentwise.
VectorField plate_source(const TorusGrid& g, const VectorField& ep) {
  VectorField out = g.zero_vector();
  const auto size = static_cast<std::ptrdiff_t>(g.size());
  for (int a : g.b_components()) {
    const int b1 = (a + 1) % 3, b2 = (a + 2) % 3;
    Field& o = out[a];
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < size; ++i)
      o[i] = 2.0 * (ep[b1][i] * std::conj(ep[b2][i])).imag();
    to_spectral_dealiased(g, o);
    kernels::par::apply_symbol(g.k2(), o, [](double q) { return q * q; });
  }
  return out;
}

// n and B seen by the coupling terms at time tau (spectral).
Field effective_n(const Field& n, const LowFrequencyData* low, double tau) {
  if (!low) return n;
  Field out(n.size());
  kernels::par::axpy(n, tau, low->n1, out);
  return out;
}

VectorField effective_b(const TorusGrid& g, const VectorField& b, const LowFrequencyData* low,
                        double tau) {
  if (!low) return b;
  VectorField out = b;
  for (int a : g.b_components()) {
    kernels::par::axpy(out[a], 1.0, low->b0[a], out[a]);
    kernels::par::axpy(out[a], tau, low->b1[a], out[a]);
  }
  return out;
}

// Extra forcing of the shifted system: tau Lap n_1L and
// (-Lap^2 + Lap)(B_0L + tau B_1L).
void add_shift_sources(const TorusGrid& g, const LowFrequencyData* low, double tau, Field& fn,
                       VectorField& fb) {
  if (!low) return;
  const auto k2 = g.k2();
  const auto size = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i) fn[i] -= k2[i] * tau * low->n1[i];
  for (int a : g.b_components()) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < size; ++i) {
      const double q = k2[i];
      fb[a][i] -= (q * q + q) * (low->b0[a][i] + tau * low->b1[a][i]);
    }
  }
}

struct Coupling {
  VectorField e;
  Field n_t;
  VectorField b_t;
};

// Coupling part of the vector field with n and B frozen at the given values.
Coupling coupling(const TorusGrid& g, const Params& p, const VectorField& e, const Field& n,
                  const VectorField& b, const LowFrequencyData* low, double tau) {
  const VectorField ep = physical(g, e, g.e_components());
  const Field np = g.to_physical(effective_n(n, low, tau));
  const VectorField bp = physical(g, effective_b(g, b, low, tau), g.b_components());
  Coupling c{e_force(g, p, ep, np, bp), wave_source(g, ep), plate_source(g, ep)};
  add_shift_sources(g, low, tau, c.n_t, c.b_t);
  return c;
}

Derivative rhs_impl(const SystemState& st, const LowFrequencyData* low) {
  const TorusGrid& g = *st.grid;
  const Params& p = st.params;
  Coupling c = coupling(g, p, st.e, st.n, st.b, low, st.time);
  const auto k2 = g.k2();
  const int d = g.dim();
  const auto size = static_cast<std::ptrdiff_t>(g.size());
  const double e2 = p.epsilon * p.epsilon;

  Derivative out;
  out.e = std::move(c.e);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i) {
    const double q = k2[i];
    const double l = 1.0 / (1.0 + e2 * q * q);
    cplx kdot = 0.0;
    for (int a = 0; a < d; ++a) kdot += g.k(a)[i] * st.e[a][i];
    for (int a = 0; a < 3; ++a) {
      const double ka = a < d ? g.k(a)[i] : 0.0;
      const cplx ae = (1.0 - p.alpha) * ka * kdot + p.alpha * q * st.e[a][i];
      out.e[a][i] += cplx(0.0, -1.0) * l * ae;
    }
  }
  out.n = st.n_t;
  out.n_t = std::move(c.n_t);
  out.b = st.b_t;
  out.b_t = std::move(c.b_t);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i) {
    const double q = k2[i];
    out.n_t[i] -= q * st.n[i];
    for (int a = 0; a < 3; ++a) out.b_t[a][i] -= (q * q + q) * st.b[a][i];
  }
  return out;
}

void linear_flow(SystemState& st, double t) {
  const TorusGrid& g = *st.grid;
  prop::schrodinger_group_inplace(g, st.e, t, st.params.alpha, st.params.epsilon);
  prop::oscillate_inplace(g, prop::Dispersion::wave, st.n, st.n_t, t);
  for (int a : g.b_components()) prop::oscillate_inplace(g, prop::Dispersion::plate, st.b[a], st.b_t[a], t);
}

void axpy_vec(const TorusGrid& g, std::span<const int> comps, const VectorField& x, double w,
              const VectorField& y, VectorField& out) {
  (void)g;
  for (int a : comps) kernels::par::axpy(x[a], w, y[a], out[a]);
}

bool all_finite(const SystemState& st) {
  auto ok = [](const Field& f) {
    return std::all_of(f.begin(), f.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  };
  for (int a = 0; a < 3; ++a)
    if (!ok(st.e[a]) || !ok(st.b[a]) || !ok(st.b_t[a])) return false;
  return ok(st.n) && ok(st.n_t);
}

}  // namespace

Derivative rhs_regularized(const SystemState& state) { return rhs_impl(state, nullptr); }

Derivative rhs_modified(const SystemState& state, const LowFrequencyData& low) {
  check_low(state, low);
  return rhs_impl(state, &low);
}

SystemState to_modified(const SystemState& state, const LowFrequencyData& low) {
  check_low(state, low);
  SystemState out = state;
  const double t = state.time;
  kernels::par::axpy(out.n, -t, low.n1, out.n);
  kernels::par::axpy(out.n_t, -1.0, low.n1, out.n_t);
  for (int a = 0; a < 3; ++a) {
    kernels::par::axpy(out.b[a], -1.0, low.b0[a], out.b[a]);
    kernels::par::axpy(out.b[a], -t, low.b1[a], out.b[a]);
    kernels::par::axpy(out.b_t[a], -1.0, low.b1[a], out.b_t[a]);
  }
  return out;
}

SystemState from_modified(const SystemState& state, const LowFrequencyData& low) {
  check_low(state, low);
  SystemState out = state;
  const double t = state.time;
  kernels::par::axpy(out.n, t, low.n1, out.n);
  kernels::par::axpy(out.n_t, 1.0, low.n1, out.n_t);
  for (int a = 0; a < 3; ++a) {
    kernels::par::axpy(out.b[a], 1.0, low.b0[a], out.b[a]);
    kernels::par::axpy(out.b[a], t, low.b1[a], out.b[a]);
    kernels::par::axpy(out.b_t[a], 1.0, low.b1[a], out.b_t[a]);
  }
  return out;
}

SystemState strang_step(const SystemState& state, double dt, const LowFrequencyData* low) {
  if (!(dt > 0.0)) throw Error(Errc::QuadratureUnderflow, "step must be positive");
  if (low) check_low(state, *low);
  const TorusGrid& g = *state.grid;
  const auto ec = g.e_components();
  const auto bc = g.b_components();

  SystemState st = state;
  linear_flow(st, 0.5 * dt);

  // RK4 for E' = F_E(E, tau), n_t' = F_n(E, tau), B_t' = F_B(E, tau).
  const double t0 = state.time;
  const Coupling k1 = coupling(g, st.params, st.e, st.n, st.b, low, t0);
  VectorField tmp = st.e;
  axpy_vec(g, ec, st.e, 0.5 * dt, k1.e, tmp);
  const Coupling k2 = coupling(g, st.params, tmp, st.n, st.b, low, t0 + 0.5 * dt);
  axpy_vec(g, ec, st.e, 0.5 * dt, k2.e, tmp);
  const Coupling k3 = coupling(g, st.params, tmp, st.n, st.b, low, t0 + 0.5 * dt);
  axpy_vec(g, ec, st.e, dt, k3.e, tmp);
  const Coupling k4 = coupling(g, st.params, tmp, st.n, st.b, low, t0 + dt);

  const double w1 = dt / 6.0, w2 = dt / 3.0;
  auto combine = [&](Field& y, const Field& a, const Field& b, const Field& c, const Field& d) {
    const auto size = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < size; ++i) y[i] += w1 * (a[i] + d[i]) + w2 * (b[i] + c[i]);
  };
  for (int a : ec) combine(st.e[a], k1.e[a], k2.e[a], k3.e[a], k4.e[a]);
  combine(st.n_t, k1.n_t, k2.n_t, k3.n_t, k4.n_t);
  for (int a : bc) combine(st.b_t[a], k1.b_t[a], k2.b_t[a], k3.b_t[a], k4.b_t[a]);

  linear_flow(st, 0.5 * dt);
  st.time = t0 + dt;
  return st;
}

namespace {

struct Histories {
  std::vector<Field> n, n_t;
  std::vector<VectorField> b, b_t;
  std::vector<VectorField> ep;  // physical E at every node
};

// Wave and plate histories on the Simpson nodes driven by the E history.
Histories build_histories(const SystemState& st, const std::vector<VectorField>& e, double h,
                          const LowFrequencyData* low) {
  const TorusGrid& g = *st.grid;
  const std::size_t K = e.size();
  Histories hs;
  hs.n.resize(K);
  hs.n_t.resize(K);
  hs.b.resize(K);
  hs.b_t.resize(K);
  hs.ep.resize(K);
  std::vector<Field> fn(K);
  std::vector<VectorField> fb(K);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(K); ++j) {
    hs.ep[j] = physical(g, e[j], g.e_components());
    fn[j] = wave_source(g, hs.ep[j]);
    fb[j] = plate_source(g, hs.ep[j]);
    add_shift_sources(g, low, st.time + static_cast<double>(j) * h, fn[j], fb[j]);
  }

  const double step = 2.0 * h;
  const auto end_rule = prop::simpson_end_rule(step);
  const auto mid_rule = prop::simpson_mid_rule(step);
  hs.n[0] = st.n;
  hs.n_t[0] = st.n_t;
  hs.b[0] = st.b;
  hs.b_t[0] = st.b_t;
  for (std::size_t base = 0; base + 2 < K; base += 2) {
    for (int which = 0; which < 2; ++which) {
      const auto& rule = which == 0 ? mid_rule : end_rule;
      const std::size_t target = base + 1 + static_cast<std::size_t>(which);
      const double lag0 = which == 0 ? h : step;
      Field u = hs.n[base], v = hs.n_t[base];
      prop::oscillate_inplace(g, prop::Dispersion::wave, u, v, lag0);
      std::array<prop::KernelSample, 3> ns{};
      for (int q = 0; q < 3; ++q) ns[q] = {rule[q].first, rule[q].second, &fn[base + q]};
      prop::add_oscillator_sources(g, prop::Dispersion::wave, u, v, ns);
      hs.n[target] = std::move(u);
      hs.n_t[target] = std::move(v);

      VectorField bu = hs.b[base], bv = hs.b_t[base];
      for (int a : g.b_components()) {
        prop::oscillate_inplace(g, prop::Dispersion::plate, bu[a], bv[a], lag0);
        std::array<prop::KernelSample, 3> bs{};
        for (int q = 0; q < 3; ++q) bs[q] = {rule[q].first, rule[q].second, &fb[base + q][a]};
        prop::add_oscillator_sources(g, prop::Dispersion::plate, bu[a], bv[a], bs);
      }
      hs.b[target] = std::move(bu);
      hs.b_t[target] = std::move(bv);
    }
  }
  return hs;
}

}  // namespace

PicardResult picard_window(const SystemState& state, double window, double dt, double tol_fp,
                           int max_iter, const LowFrequencyData* low) {
  if (!(window > 0.0) || !(dt > 0.0))
    throw Error(Errc::QuadratureUnderflow, "Picard window and step must be positive");
  if (low) check_low(state, *low);
  const TorusGrid& g = *state.grid;
  const Params& p = state.params;
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(window / dt - 1e-9)));
  const double step = window / static_cast<double>(panels);
  const double h = 0.5 * step;
  const std::size_t K = 2 * panels + 1;

  std::vector<VectorField> e(K);
  e[0] = state.e;
  for (std::size_t j = 1; j < K; ++j) {
    e[j] = e[j - 1];
    prop::schrodinger_group_inplace(g, e[j], h, p.alpha, p.epsilon);
  }

  const auto end_rule = prop::simpson_end_rule(step);
  const auto mid_rule = prop::simpson_mid_rule(step);

  PicardResult res;
  int stalls = 0;
  bool converged = false;
  for (int iter = 1; iter <= max_iter; ++iter) {
    const Histories hs = build_histories(state, e, h, low);
    std::vector<VectorField> f(K);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(K); ++j) {
      const double tau = state.time + static_cast<double>(j) * h;
      const Field np = g.to_physical(effective_n(hs.n[j], low, tau));
      const VectorField bp = physical(g, effective_b(g, hs.b[j], low, tau), g.b_components());
      f[j] = e_force(g, p, hs.ep[j], np, bp);
    }

    std::vector<VectorField> next(K);
    next[0] = state.e;
    for (std::size_t base = 0; base + 2 < K; base += 2) {
      for (int which = 0; which < 2; ++which) {
        const auto& rule = which == 0 ? mid_rule : end_rule;
        const std::size_t target = base + 1 + static_cast<std::size_t>(which);
        VectorField u = next[base];
        prop::schrodinger_group_inplace(g, u, which == 0 ? h : step, p.alpha, p.epsilon);
        std::array<prop::GroupSample, 3> smp{};
        for (int q = 0; q < 3; ++q) smp[q] = {rule[q].first, rule[q].second, &f[base + q]};
        prop::add_group_sources(g, u, p.alpha, p.epsilon, smp);
        next[target] = std::move(u);
      }
    }

    double diff = 0.0;
    for (std::size_t j = 1; j < K; ++j) {
      VectorField delta = g.zero_vector();
      for (int a : g.e_components()) kernels::par::axpy(next[j][a], -1.0, e[j][a], delta[a]);
      diff = std::max(diff, sobolev_norm(g, delta, 1.0, NormFlavor::inhomogeneous));
    }
    if (!std::isfinite(diff)) throw Error(Errc::NonFinite, "Picard iterate is not finite");
    e.swap(next);
    if (!res.differences.empty()) {
      stalls = diff >= res.differences.back() ? stalls + 1 : 0;
    }
    res.differences.push_back(diff);
    res.iterations = iter;
    res.last_difference = diff;
    if (diff < tol_fp) {
      converged = true;
      break;
    }
    if (stalls >= 3)
      throw Error(Errc::NonContraction,
                  "Picard differences stopped shrinking at iteration " + std::to_string(iter));
  }
  if (!converged)
    throw Error(Errc::MaxIterExceeded,
                "Picard iteration did not reach tol_fp within " + std::to_string(max_iter) +
                    " iterations (last difference " + fmt(res.last_difference) + ")");

  const Histories hs = build_histories(state, e, h, low);
  SystemState out = state;
  out.e = e[K - 1];
  out.n = hs.n[K - 1];
  out.n_t = hs.n_t[K - 1];
  out.b = hs.b[K - 1];
  out.b_t = hs.b_t[K - 1];
  out.time = state.time + window;
  res.state = std::move(out);
  return res;
}

RunResult run(const SystemState& initial, const IntegratorConfig& config, const RunHooks& hooks) {
  config.validate();
  initial.validate();
  const LowFrequencyData* low = config.modified_mode ? &*config.low : nullptr;
  SystemState st = low ? to_modified(initial, *low) : initial;
  auto original = [&](const SystemState& s) { return low ? from_modified(s, *low) : s; };

  RunResult result;
  const double phi0 = diagnostics::phi(initial);
  const double psi0 = diagnostics::psi(initial);
  auto emit = [&](const SystemState& orig) {
    DiagnosticsRecord rec = diagnostics::make_record(orig, phi0, psi0);
    if (hooks.on_diagnostics) hooks.on_diagnostics(rec);
    result.diagnostics.push_back(std::move(rec));
  };
  emit(initial);

  const double t0 = initial.time;
  const double span = config.t_end - t0;
  const double eps_t = 1e-12 * std::max(1.0, std::abs(config.t_end));
  double next_diag = t0 + config.diagnostics_interval;
  double next_snap = t0 + config.snapshot_interval;

  // Strang uses equal steps that land exactly on T_end.
  const long strang_steps =
      span > eps_t ? static_cast<long>(std::ceil(span / config.dt - 1e-9)) : 0;
  const double strang_dt = strang_steps > 0 ? span / static_cast<double>(strang_steps) : 0.0;
  double window = config.window;

  while (config.t_end - st.time > eps_t) {
    if (config.scheme == Scheme::strang) {
      st = strang_step(st, strang_dt, low);
      ++result.steps;
      st.time = t0 + static_cast<double>(result.steps) * strang_dt;
    } else {
      const double w = std::min(window, config.t_end - st.time);
      try {
        PicardResult pr =
            picard_window(st, w, std::min(config.dt, w), config.tol_fp, config.max_iter, low);
        st = std::move(pr.state);
        ++result.steps;
      } catch (const Error& err) {
        if (err.code() != Errc::NonContraction || result.window_halvings >= config.max_halvings)
          throw;
        window *= 0.5;
        ++result.window_halvings;
        continue;
      }
    }

    const SystemState orig = original(st);
    if (!all_finite(orig)) {
      emit(orig);
      throw Error(Errc::NonFinite, "non-finite field at t = " + fmt(orig.time));
    }
    const bool last = config.t_end - st.time <= eps_t;
    double total = 0.0;
    for (const auto& [name, value] : diagnostics::norm_table(orig)) total += value;
    if (!(total <= config.blowup_threshold)) {
      emit(orig);
      throw Error(Errc::BlowUp, "solution norm " + fmt(total) + " exceeds threshold at t = " +
                                    fmt(orig.time));
    }
    if (config.diagnostics_interval <= 0.0 || st.time >= next_diag - eps_t || last) {
      emit(orig);
      while (config.diagnostics_interval > 0.0 && next_diag <= st.time + eps_t)
        next_diag += config.diagnostics_interval;
    }
    if (config.snapshot_interval > 0.0 && hooks.on_snapshot && st.time >= next_snap - eps_t) {
      hooks.on_snapshot(orig);
      while (next_snap <= st.time + eps_t) next_snap += config.snapshot_interval;
    }
  }
  result.final_state = original(st);
  return result;
}

}  // namespace magzak
