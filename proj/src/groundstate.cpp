#include "magzak/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "magzak/error.hpp"

namespace magzak {

namespace {

double coef_a(const TorusGrid& g) { return 0.5 * g.dim(); }
double coef_b(const TorusGrid& g) { return 2.0 - 0.5 * g.dim(); }

double inner_real(const TorusGrid& g, const Field& u, const Field& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] * std::conj(v[i])).real();
  return g.volume() * s;
}

Field cube(const TorusGrid& g, const Field& qhat) {
  Field v = g.to_physical(qhat);
  for (auto& z : v) z = cplx(z.real() * z.real() * z.real(), 0.0);
  return g.to_spectral(v);
}

double boundary_max(const TorusGrid& g, const Field& qhat) {
  const Field v = g.to_physical(qhat);
  const int n = g.points();
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    // On a face when some coordinate index is 0 (the box is centred at P/2).
    std::size_t rest = i;
    bool face = false;
    for (int a = 0; a < g.dim(); ++a) {
      face = face || rest % static_cast<std::size_t>(n) == 0;
      rest /= static_cast<std::size_t>(n);
    }
    if (face) m = std::max(m, std::abs(v[i]));
  }
  return m;
}

}  // namespace

double ground_state_residual(const TorusGrid& g, const Field& q) {
  const Field q3 = cube(g, q);
  const auto k2 = g.k2();
  const double a = coef_a(g), b = coef_b(g);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += std::norm(-a * k2[i] * q[i] - b * q[i] + q3[i]);
  return std::sqrt(g.volume() * s);
}

GroundState petviashvili(GridPtr grid, double tol, const PetviashviliOptions& opts) {
  if (!(tol > 0.0)) throw Error(Errc::ValidationError, "ground-state tolerance must be positive");
  const TorusGrid& g = *grid;
  const double a = coef_a(g), b = coef_b(g);
  const double centre = 0.5 * g.period();

  Field v = g.zeros();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = g.point(i);
    double r2 = 0.0;
    for (int d = 0; d < g.dim(); ++d) r2 += (x[d] - centre) * (x[d] - centre);
    v[i] = opts.initial_amplitude * std::exp(-r2 / (opts.initial_width * opts.initial_width));
  }
  Field q = g.to_spectral(v);
  const auto k2 = g.k2();

  double best = ground_state_residual(g, q);
  int since_best = 0;
  int it = 0;
  std::vector<double> history;
  while (best >= tol) {
    if (++it > opts.max_iter)
      throw Error(Errc::NoConvergence, "Petviashvili iteration exhausted at residual " +
                                           fmt(best));
    const Field q3 = cube(g, q);
    Field mq = q;
    for (std::size_t i = 0; i < mq.size(); ++i) mq[i] *= b + a * k2[i];
    const double num = inner_real(g, mq, q);
    const double den = inner_real(g, q3, q);
    if (!(den > 0.0)) throw Error(Errc::NoConvergence, "Petviashvili stabilizing factor undefined");
    const double factor = std::pow(num / den, 1.5);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = factor * q3[i] / (b + a * k2[i]);
    // Q is real; drop round-off imaginary parts.
    Field qp = g.to_physical(q);
    for (auto& z : qp) z = cplx(z.real(), 0.0);
    q = g.to_spectral(qp);

    const double r = ground_state_residual(g, q);
    if (!std::isfinite(r)) throw Error(Errc::NoConvergence, "Petviashvili residual is not finite");
    history.push_back(r);
    if (r < best) {
      best = r;
      since_best = 0;
    } else if (++since_best >= opts.stall_iterations) {
      throw Error(Errc::NoConvergence,
                  "Petviashvili residual stalled at " + fmt(best));
    }
  }

  const double edge = boundary_max(g, q);
  if (edge > opts.boundary_tol)
    throw Error(Errc::BoundaryContamination,
                "|Q| on the box boundary is " + fmt(edge) + "; enlarge the box");

  GroundState gs;
  gs.grid = std::move(grid);
  gs.tol = tol;
  gs.residual = ground_state_residual(g, q);
  gs.mass = g.volume() * kernels::par::weighted_norm2(k2, q, [](double) { return 1.0; });
  gs.iterations = it;
  gs.residual_history = std::move(history);
  gs.q = std::move(q);
  return gs;
}

double best_constant(const GroundState& gs) {
  if (!(gs.mass > 0.0)) throw Error(Errc::DomainError, "ground state has zero mass");
  return 2.0 / gs.mass;
}

double best_constant_k8(const GroundState& gs) {
  const double k4 = best_constant(gs);
  return k4 * k4;
}

SharpInequality sharp_inequality_check(const TorusGrid& g, const Field& f, double q_mass) {
  if (!(q_mass > 0.0)) throw Error(Errc::DomainError, "ground-state mass must be positive");
  const Field v = g.to_physical(f);
  const double l4 = g.cell_volume() * kernels::par::sum_abs_pow(v, 4.0);
  const double l2 = g.volume() * kernels::par::weighted_norm2(g.k2(), f, [](double) { return 1.0; });
  const double h1 = g.volume() * kernels::par::weighted_norm2(g.k2(), f, [](double q) { return q; });
  if (l2 == 0.0) throw Error(Errc::DomainError, "sharp inequality needs a nonzero field");
  const int d = g.dim();
  SharpInequality s;
  s.lhs = l4;
  s.rhs = (2.0 / q_mass) * std::pow(l2, 0.5 * (4 - d)) * std::pow(h1, 0.5 * d);
  s.ratio = s.rhs > 0.0 ? s.lhs / s.rhs : 0.0;
  return s;
}

double sharp_inequality_max(const TorusGrid& g, std::span<const Field> trials, double q_mass) {
  if (trials.empty()) throw Error(Errc::DomainError, "sharp inequality needs at least one trial field");
  double m = 0.0;
  for (const Field& f : trials) m = std::max(m, sharp_inequality_check(g, f, q_mass).ratio);
  return m;
}

}  // namespace magzak
