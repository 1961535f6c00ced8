#include "magzak/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>
#include <nlohmann/json.hpp>

#include "magzak/error.hpp"
#include "magzak/spectral.hpp"

namespace magzak::diagnostics {

namespace {

// P^d sum_k w(k) |f_k|^2 summed over components.
template <class W>
double weighted(const TorusGrid& g, const VectorField& f, std::span<const int> comps, W w) {
  double s = 0.0;
  for (int a : comps) s += kernels::par::weighted_norm2(g.k2(), f[a], w);
  return g.volume() * s;
}

double div_norm2(const TorusGrid& g, const VectorField& e) {
  const int d = g.dim();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx kdot = 0.0;
    for (int a = 0; a < d; ++a) kdot += g.k(a)[i] * e[a][i];
    s += std::norm(kdot);
  }
  return g.volume() * s;
}

double inverse_power(double q, int p) { return q == 0.0 ? 0.0 : 1.0 / std::pow(q, p); }

}  // namespace

double phi(const SystemState& st) {
  const TorusGrid& g = *st.grid;
  const double e2 = st.params.epsilon * st.params.epsilon;
  return weighted(g, st.e, g.e_components(), [e2](double q) { return 1.0 + e2 * q * q; });
}

PsiTerms psi_terms(const SystemState& st) {
  const TorusGrid& g = *st.grid;
  const auto ec = g.e_components();
  const auto bc = g.b_components();
  const double vol = g.volume();
  auto one = [](double) { return 1.0; };
  PsiTerms t;
  t.divergence = div_norm2(g, st.e);
  const double grad2 = weighted(g, st.e, ec, [](double q) { return q; });
  t.curl = st.params.alpha * std::max(0.0, grad2 - t.divergence);
  t.n = 0.5 * vol * kernels::par::weighted_norm2(g.k2(), st.n, one);
  t.n_t = 0.5 * vol *
          kernels::par::weighted_norm2(g.k2(), st.n_t, [](double q) { return inverse_power(q, 1); });
  t.b_t = 0.5 * weighted(g, st.b_t, bc, [](double q) { return inverse_power(q, 2); });
  t.b = 0.5 * weighted(g, st.b, bc, one);
  t.b_neg = 0.5 * weighted(g, st.b, bc, [](double q) { return inverse_power(q, 1); });

  VectorField ep = g.zero_vector();
  for (int a : ec) g.to_physical(st.e[a], ep[a]);
  const Field np = g.to_physical(st.n);
  VectorField bp = g.zero_vector();
  for (int a : bc) g.to_physical(st.b[a], bp[a]);
  double cn = 0.0, cb = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double e2 = std::norm(ep[0][i]) + std::norm(ep[1][i]) + std::norm(ep[2][i]);
    cn += np[i].real() * e2;
    for (int a : bc) {
      const double s = 2.0 * (ep[(a + 1) % 3][i] * std::conj(ep[(a + 2) % 3][i])).imag();
      cb -= s * bp[a][i].real();
    }
  }
  t.coupling_n = g.cell_volume() * cn;
  t.coupling_b = g.cell_volume() * cb;
  return t;
}

double psi(const SystemState& st) { return psi_terms(st).total(); }

double identity_check_grad_split(const TorusGrid& g, const VectorField& e) {
  const int d = g.dim();
  double grad = 0.0, div = 0.0, curl = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::array<double, 3> k{};
    for (int a = 0; a < d; ++a) k[a] = g.k(a)[i];
    cplx kdot = 0.0;
    for (int a = 0; a < 3; ++a) {
      kdot += k[a] * e[a][i];
      grad += g.k2()[i] * std::norm(e[a][i]);
    }
    div += std::norm(kdot);
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      curl += std::norm(k[b] * e[c][i] - k[c] * e[b][i]);
    }
  }
  const double scale = std::max(grad, std::numeric_limits<double>::min());
  return std::abs(div + curl - grad) / scale;
}

std::map<std::string, double> norm_table(const SystemState& st) {
  const TorusGrid& g = *st.grid;
  const double s = st.params.s;
  return {
      {"E:H^{s+1}", sobolev_norm(g, st.e, s + 1.0, NormFlavor::inhomogeneous)},
      {"n:H^s", sobolev_norm(g, st.n, s, NormFlavor::inhomogeneous)},
      {"n_t:H^{s-1}&Hdot^{-1}", sobolev_norm(g, st.n_t, s - 1.0, NormFlavor::intersection, -1.0)},
      {"B:H^s&Hdot^{-1}", sobolev_norm(g, st.b, s, NormFlavor::intersection, -1.0)},
      {"B_t:H^{s-2}&Hdot^{-2}", sobolev_norm(g, st.b_t, s - 2.0, NormFlavor::intersection, -2.0)},
  };
}

double relative_drift(double x, double x0) {
  const double d = std::abs(x - x0);
  return x0 == 0.0 ? d : d / std::abs(x0);
}

DiagnosticsRecord make_record(const SystemState& st, double phi0, double psi0) {
  DiagnosticsRecord r;
  r.time = st.time;
  r.phi = phi(st);
  r.psi = psi(st);
  r.drift_phi = relative_drift(r.phi, phi0);
  r.drift_psi = relative_drift(r.psi, psi0);
  r.norms = norm_table(st);
  return r;
}

std::string to_ndjson(const DiagnosticsRecord& r) {
  nlohmann::json j;
  j["t"] = r.time;
  j["phi"] = r.phi;
  j["psi"] = r.psi;
  j["drift_phi"] = r.drift_phi;
  j["drift_psi"] = r.drift_psi;
  j["norms"] = r.norms;
  return j.dump();
}

BootstrapResult bootstrap_root(double a, double b, double kappa) {
  if (!(a > 0.0) || !(b > 0.0) || !(kappa > 1.0))
    throw Error(Errc::DomainError, "bootstrap_root needs a > 0, b > 0, kappa > 1");
  BootstrapResult res;
  const double km1 = kappa - 1.0;
  res.condition = std::pow(a, km1) * b < std::pow(km1, km1) / std::pow(kappa, kappa);
  if (!res.condition) return res;
  // g(x) = a + b x^kappa - x is positive at a and negative at its minimizer x0.
  const double x0 = std::pow(1.0 / (b * kappa), 1.0 / km1);
  auto g = [&](double x) { return a + b * std::pow(x, kappa) - x; };
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      g, a, x0, boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 1),
      iters);
  res.root = 0.5 * (lo + hi);
  return res;
}

double GronwallEnvelope::t_star() const {
  return 1.0 / ((kappa - 1.0) * std::pow(a1, kappa - 1.0) * a2);
}

double GronwallEnvelope::value(double t) const {
  const double base = 1.0 - (kappa - 1.0) * std::pow(a1, kappa - 1.0) * a2 * t;
  if (base <= 0.0) return std::numeric_limits<double>::infinity();
  return a1 / std::pow(base, 1.0 / (kappa - 1.0));
}

double GronwallEnvelope::worst_ratio(std::span<const double> times,
                                     std::span<const double> values) const {
  if (times.size() != values.size())
    throw Error(Errc::DomainError, "trajectory times and values differ in length");
  double worst = 0.0;
  const double ts = t_star();
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] < ts) worst = std::max(worst, values[i] / value(times[i]));
  return worst;
}

GronwallEnvelope gronwall_envelope(double a1, double a2, double kappa) {
  if (!(a1 > 0.0) || !(a2 > 0.0) || !(kappa > 1.0))
    throw Error(Errc::DomainError, "Gronwall envelope needs A1 > 0, A2 > 0, kappa > 1");
  return {a1, a2, kappa};
}

ThresholdReport threshold_report(int dim, double e0_mass, double grad_mass, double psi0,
                                 double q_mass) {
  if (dim != 2 && dim != 3) throw Error(Errc::DomainError, "threshold_report: d must be 2 or 3");
  if (!(q_mass > 0.0)) throw Error(Errc::DomainError, "ground-state mass must be positive");
  ThresholdReport r;
  r.dim = dim;
  r.e0_mass = e0_mass;
  r.grad_mass = grad_mass;
  r.psi0 = psi0;
  r.q_mass = q_mass;
  r.k4 = 2.0 / q_mass;
  r.psi_sign = psi0 > 0.0 ? 1 : (psi0 < 0.0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();
  auto log_ratio = [inf](double rhs, double lhs) {
    if (lhs == 0.0) return rhs > 0.0 ? inf : (rhs == 0.0 ? 0.0 : -inf);
    if (rhs == inf) return inf;
    return rhs > 0.0 ? std::log(rhs / lhs) : -inf;
  };
  if (dim == 2) {
    r.pass = 2.0 * e0_mass < q_mass;
    r.margin = log_ratio(q_mass, 2.0 * e0_mass);
  } else {
    const double apsi = std::abs(psi0);
    const double rhs1 = apsi == 0.0 ? inf : 1.0 / (27.0 * r.k4 * r.k4 * apsi);
    // Psi0 = ||grad E0||^2 exactly when n0 = B0 = 0 and alpha = 1, so the
    // non-strict condition gets round-off slack.
    const bool grad_ok = grad_mass <= apsi * (1.0 + 1e-12);
    double grad_margin = log_ratio(apsi, grad_mass);
    if (grad_ok) grad_margin = std::max(grad_margin, 0.0);
    r.pass = e0_mass < rhs1 && grad_ok;
    r.margin = std::min(log_ratio(rhs1, e0_mass), grad_margin);
  }
  return r;
}

ThresholdReport threshold_report(const TorusGrid& grid, const VectorField& e0, double psi0,
                                 double q_mass) {
  double mass = 0.0, grad = 0.0;
  for (int a : grid.e_components()) {
    mass += kernels::par::weighted_norm2(grid.k2(), e0[a], [](double) { return 1.0; });
    grad += kernels::par::weighted_norm2(grid.k2(), e0[a], [](double q) { return q; });
  }
  return threshold_report(grid.dim(), grid.volume() * mass, grid.volume() * grad, psi0, q_mass);
}

}  // namespace magzak::diagnostics
