// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "magzak/diagnostics.hpp"
#include "magzak/field_state.hpp"
#include "magzak/groundstate.hpp"
#include "magzak/initial_data.hpp"
#include "magzak/integrator.hpp"
#include "magzak/propagators.hpp"
#include "magzak/random_fields.hpp"
#include "magzak/spectral.hpp"
#include "magzak/studies.hpp"
#include "shooting_oracle.hpp"

using namespace magzak;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

GridPtr base_grid() { return make_grid(2, 64, 16.0 * kPi); }

SystemState packet(GridPtr g, double epsilon, double e_norm = 0.1, double nb = 0.05) {
  InitialSpec spec;
  spec.generator = "gaussian-packet";
  spec.e_norm = e_norm;
  spec.width = 2.0;
  spec.n_amplitude = nb;
  spec.b_amplitude = nb;
  return generate_initial_data(spec, std::move(g), Params{1.0, epsilon, 2.0}, 1);
}

// Max relative drift of Phi and Psi over a Strang run with diagnostics every step.
std::pair<double, double> strang_drift(const SystemState& init, double dt, double t_end) {
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  const RunResult r = run(init, cfg);
  double phi = 0.0, psi = 0.0;
  for (const auto& rec : r.diagnostics) {
    phi = std::max(phi, rec.drift_phi);
    psi = std::max(psi, rec.drift_psi);
  }
  return {phi, psi};
}

SystemState evolve(const SystemState& init, IntegratorConfig cfg) {
  cfg.diagnostics_interval = cfg.t_end;
  return run(init, cfg).final_state;
}

VectorField diff(const VectorField& a, const VectorField& b) {
  VectorField d = a;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < d[c].size(); ++i) d[c][i] -= b[c][i];
  return d;
}

Field diff(const Field& a, const Field& b) {
  Field d = a;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b[i];
  return d;
}

double e_h1(const SystemState& a, const SystemState& b) {
  return sobolev_norm(*a.grid, diff(a.e, b.e), 1.0, NormFlavor::inhomogeneous);
}

// ||E||_{H^1} + ||n||_{L^2} + ||B||_{L^2} of the difference.
double state_distance(const SystemState& a, const SystemState& b) {
  const TorusGrid& g = *a.grid;
  return e_h1(a, b) + sobolev_norm(g, diff(a.n, b.n), 0.0, NormFlavor::inhomogeneous) +
         sobolev_norm(g, diff(a.b, b.b), 0.0, NormFlavor::inhomogeneous);
}

// ------------------------------------------------------------------ criteria

Outcome c1_phi() {
  const auto [phi, psi] = strang_drift(packet(base_grid(), 0.1), 1e-3, 1.0);
  return {phi < 1e-8, "max rel. drift of Phi = " + sci(phi) + " (< 1e-8)"};
}

Outcome c2_psi() {
  const SystemState init = packet(base_grid(), 0.1);
  const double d1 = strang_drift(init, 1e-3, 1.0).second;
  const double d2 = strang_drift(init, 5e-4, 1.0).second;
  const double ratio = d1 / d2;
  return {d1 < 1e-6 && ratio >= 3.5,
          "max rel. drift of Psi = " + sci(d1) + " (< 1e-6), dt/2 drift = " + sci(d2) +
              ", ratio = " + sci(ratio) + " (>= 3.5)"};
}

Outcome c3_epsilon() {
  const SystemState init = packet(base_grid(), 0.2);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  const auto t = studies::epsilon_convergence_study(init, {0.2, 0.1, 0.05, 0.025}, cfg, 0.05);
  bool ok = true;
  std::string detail = "combined:";
  for (const auto& p : t.pairs) detail += " " + sci(p.combined);
  detail += "; ratios:";
  for (double r : t.ratios) {
    ok = ok && r >= 2.0;
    detail += " " + sci(r);
  }
  detail += "; derivative ratios:";
  for (double r : t.derivative_ratios) {
    ok = ok && r > 1.0;
    detail += " " + sci(r);
  }
  return {ok, detail + " (factor >= 2, derivative terms decreasing)"};
}

Outcome c4_groundstate() {
  const auto ref = oracle::shoot_ground_state(2);
  const GroundState gs = petviashvili(make_grid(2, 512, 64.0), 1e-11);
  const double rel = std::abs(gs.mass - ref.mass) / ref.mass;
  const auto sharp = sharp_inequality_check(*gs.grid, gs.q, gs.mass);
  const bool ok = gs.residual < 1e-10 && rel < 5e-3 && std::abs(sharp.ratio - 1.0) < 1e-6;
  return {ok, "residual = " + sci(gs.residual) + ", mass = " + sci(gs.mass) + " vs oracle " +
                  sci(ref.mass) + " (rel " + sci(rel) + "), sharp ratio - 1 = " +
                  sci(sharp.ratio - 1.0)};
}

Outcome c5_identities() {
  std::mt19937_64 rng(2024);
  double split = 0.0, curlcurl = 0.0, unitary = 0.0;
  const int samples = 100;
  for (int dim = 2; dim <= 3; ++dim) {
    const GridPtr g = dim == 2 ? make_grid(2, 64, 2.0 * kPi) : make_grid(3, 16, 2.0 * kPi);
    const random_fields::BandSpec spec{dim == 2 ? 10 : 4, 2.0, 1.0, false};
    for (int i = 0; i < samples; ++i) {
      VectorField e = random_fields::complex_vector(*g, rng, spec);
      split = std::max(split, diagnostics::identity_check_grad_split(*g, e));
      // curl curl E = grad div E - Lap E
      const VectorField cc = spectral::curl_curl(*g, e);
      const VectorField gd = spectral::grad_div(*g, e);
      double num = 0.0, den = 0.0;
      for (int a = 0; a < 3; ++a)
        for (std::size_t k = 0; k < e[a].size(); ++k) {
          const cplx rhs = gd[a][k] + g->k2()[k] * e[a][k];
          num += std::norm(cc[a][k] - rhs);
          den += std::norm(rhs);
        }
      curlcurl = std::max(curlcurl, std::sqrt(num / den));
      for (double s : {0.0, 1.0, 2.0}) {
        const double before = sobolev_norm(*g, e, s, NormFlavor::inhomogeneous);
        const VectorField u = propagators::schrodinger_group(*g, e, 0.37 + 0.1 * i, 1.5, 0.1);
        const double after = sobolev_norm(*g, u, s, NormFlavor::inhomogeneous);
        unitary = std::max(unitary, std::abs(after - before) / before);
      }
    }
  }
  const auto tri = studies::trilinear_cancellation(*make_grid(2, 64, 2.0 * kPi), 2.0, samples, 7, 8);
  const bool ok = split < 1e-12 && curlcurl < 1e-12 && tri.max_cancellation < 1e-11 && unitary < 1e-12;
  return {ok, "grad split " + sci(split) + ", curl-curl " + sci(curlcurl) + ", |J13+J22| " +
                  sci(tri.max_cancellation) + ", U(t) in H^0,1,2 " + sci(unitary) +
                  " over 100 fields each"};
}

Outcome c6_order() {
  const SystemState init = packet(base_grid(), 0.1, 0.5, 0.2);
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  const double dt = 0.05;
  cfg.dt = dt / 8.0;
  const SystemState ref = evolve(init, cfg);
  cfg.dt = dt;
  const double e1 = state_distance(evolve(init, cfg), ref);
  cfg.dt = dt / 2.0;
  const double e2 = state_distance(evolve(init, cfg), ref);
  const double order = std::log2(e1 / e2);
  return {order >= 1.8 && order <= 2.2, "errors " + sci(e1) + ", " + sci(e2) +
                                            " against dt/8 reference, order = " + sci(order) +
                                            " (in [1.8, 2.2])"};
}

Outcome c7_picard() {
  const SystemState init = packet(base_grid(), 0.1, 0.1, 0.05);
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 0.25;
  const SystemState strang = evolve(init, cfg);
  cfg.scheme = Scheme::picard;
  cfg.window = 0.05;
  cfg.tol_fp = 1e-10;
  const SystemState picard = evolve(init, cfg);
  const double d = e_h1(strang, picard);
  const double bound = std::max(cfg.tol_fp, 10.0 * cfg.dt * cfg.dt);
  return {d < bound, "H^1 discrepancy = " + sci(d) + " (< " + sci(bound) + ")"};
}

Outcome c8_closed_forms() {
  const auto env = diagnostics::gronwall_envelope(1.0, 1.0, 1.5);
  const auto boot = diagnostics::bootstrap_root(1.0, 0.125, 2.0);
  const double x1 = 4.0 - 2.0 * std::sqrt(2.0);
  const double err = boot.root ? std::abs(*boot.root - x1) : 1.0;
  const bool ok = env.t_star() == 2.0 && boot.condition && err < 1e-12;
  return {ok, "T* = " + sci(env.t_star()) + ", |x1 - (4 - 2 sqrt 2)| = " + sci(err)};
}

Outcome c9_modified() {
  // n_t and B_t get a mean-free low-frequency part too.
  InitialSpec spec;
  spec.generator = "gaussian-packet";
  spec.e_norm = 0.1;
  spec.n_amplitude = 0.05;
  spec.n_t_amplitude = 0.05;
  spec.b_amplitude = 0.05;
  spec.b_t_amplitude = 0.05;
  const SystemState init = generate_initial_data(spec, base_grid(), Params{1.0, 0.1, 2.0}, 1);
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 0.25;
  const SystemState direct = evolve(init, cfg);
  cfg.modified_mode = true;
  cfg.low = studies::low_frequency_part(init);
  const SystemState shifted = evolve(init, cfg);
  const double d = e_h1(direct, shifted);
  const double low = sobolev_norm(*init.grid, cfg.low->n1, 0.0, NormFlavor::inhomogeneous) +
                     sobolev_norm(*init.grid, cfg.low->b0, 0.0, NormFlavor::inhomogeneous);
  const double bound = 10.0 * cfg.dt * cfg.dt;
  return {d < bound && low > 0.0,
          "H^1 difference = " + sci(d) + " (< " + sci(bound) + "), low-frequency data norm " + sci(low)};
}

Outcome c10_kato_ponce() {
  studies::KatoPonceOptions o;
  o.s = 2.0;
  o.samples = 200;
  o.seed = 11;
  o.band = 128 / 4 - 1;
  const auto coarse = studies::kato_ponce_ratio(*make_grid(2, 128, 2.0 * kPi), o);
  const auto fine = studies::kato_ponce_ratio(*make_grid(2, 256, 2.0 * kPi), o);
  const double dp = std::abs(fine.max_product - coarse.max_product) / coarse.max_product;
  const double dc = std::abs(fine.max_commutator - coarse.max_commutator) / coarse.max_commutator;
  return {dp < 0.1 && dc < 0.1, "product max " + sci(coarse.max_product) + " -> " +
                                    sci(fine.max_product) + " (change " + sci(dp) +
                                    "), commutator max " + sci(coarse.max_commutator) + " -> " +
                                    sci(fine.max_commutator) + " (change " + sci(dc) + ")"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Phi conservation", c1_phi},
      {"Psi conservation and dt^2 drift", c2_psi},
      {"epsilon Cauchy property", c3_epsilon},
      {"ground state vs shooting oracle", c4_groundstate},
      {"exact discrete identities", c5_identities},
      {"Strang self-convergence order", c6_order},
      {"Picard / Strang cross-validation", c7_picard},
      {"closed-form utilities", c8_closed_forms},
      {"modified-system equivalence", c9_modified},
      {"Kato-Ponce refinement stability", c10_kato_ponce},
  };
  // Optional filter: run only the listed criterion numbers.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
