#include "magzak/studies.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "magzak/error.hpp"
#include "magzak/random_fields.hpp"

namespace magzak::studies {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Field lambda(const TorusGrid& g, const Field& f, double s) {
  Field out = f;
  if (s == 0.0) return out;
  kernels::par::apply_symbol(g.k2(), out, [s](double q) { return q == 0.0 ? 0.0 : std::pow(q, 0.5 * s); });
  return out;
}

VectorField lambda(const TorusGrid& g, const VectorField& f, double s) {
  return {{lambda(g, f[0], s), lambda(g, f[1], s), lambda(g, f[2], s)}};
}

Field sub(const Field& a, const Field& b) {
  Field out(a.size());
  kernels::par::axpy(a, -1.0, b, out);
  return out;
}

VectorField sub(const VectorField& a, const VectorField& b) {
  return {{sub(a[0], b[0]), sub(a[1], b[1]), sub(a[2], b[2])}};
}

// int u conj(v) over the torus (Parseval).
cplx inner(const TorusGrid& g, const Field& u, const Field& v) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * std::conj(v[i]);
  return g.volume() * s;
}

cplx inner(const TorusGrid& g, const VectorField& u, const VectorField& v) {
  return inner(g, u[0], v[0]) + inner(g, u[1], v[1]) + inner(g, u[2], v[2]);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Runs fn(i) for i in [0, n) in parallel and rethrows the first exception.
template <class Fn>
void parallel_for(std::ptrdiff_t n, Fn fn) {
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(magzak_studies_err)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

// ---------------------------------------------------------------- epsilon ladder

std::vector<double> geometric_ladder(double eps0, int count) {
  std::vector<double> v;
  for (int j = 0; j < count; ++j) v.push_back(eps0 * std::ldexp(1.0, -j));
  return v;
}

std::vector<SystemState> sample_run(const SystemState& initial, double epsilon,
                                    const IntegratorConfig& config, double interval) {
  SystemState start = initial;
  start.params.epsilon = epsilon;
  IntegratorConfig cfg = config;
  cfg.snapshot_interval = interval;
  cfg.diagnostics_interval = config.t_end - initial.time;
  std::vector<SystemState> samples{start};
  RunHooks hooks;
  hooks.on_snapshot = [&](const SystemState& s) { samples.push_back(s); };
  RunResult r = run(start, cfg, hooks);
  if (std::abs(samples.back().time - r.final_state.time) > 1e-12)
    samples.push_back(std::move(r.final_state));
  return samples;
}

PairDifference pair_difference(const std::vector<SystemState>& a, const std::vector<SystemState>& b) {
  if (a.size() != b.size() || a.empty())
    throw Error(Errc::GridMismatch, "runs were sampled at different times");
  PairDifference d;
  d.eps_a = a.front().params.epsilon;
  d.eps_b = b.front().params.epsilon;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const TorusGrid& g = *a[i].grid;
    if (!g.same_as(*b[i].grid) || std::abs(a[i].time - b[i].time) > 1e-12)
      throw Error(Errc::GridMismatch, "runs were sampled on different grids or times");
    const double e = sobolev_norm(g, sub(a[i].e, b[i].e), 1.0, NormFlavor::inhomogeneous);
    const double n = sobolev_norm(g, sub(a[i].n, b[i].n), 0.0, NormFlavor::inhomogeneous);
    const double bb = sobolev_norm(g, sub(a[i].b, b[i].b), 0.0, NormFlavor::intersection, -1.0);
    const Derivative da = rhs_regularized(a[i]);
    const Derivative db = rhs_regularized(b[i]);
    const double et = sobolev_norm(g, sub(da.e, db.e), -1.0, NormFlavor::inhomogeneous);
    const double nt = sobolev_norm(g, sub(da.n, db.n), -1.0, NormFlavor::homogeneous);
    const double bt = sobolev_norm(g, sub(da.b, db.b), -2.0, NormFlavor::homogeneous);
    d.e_h1 = std::max(d.e_h1, e);
    d.n_l2 = std::max(d.n_l2, n);
    d.b_l2_hm1 = std::max(d.b_l2_hm1, bb);
    d.combined = std::max(d.combined, e + n + bb);
    d.e_t_hm1 = std::max(d.e_t_hm1, et);
    d.n_t_hm1 = std::max(d.n_t_hm1, nt);
    d.b_t_hm2 = std::max(d.b_t_hm2, bt);
    d.derivative_combined = std::max(d.derivative_combined, et + nt + bt);
  }
  return d;
}

ConvergenceTable epsilon_convergence_study(const SystemState& initial,
                                           const std::vector<double>& ladder,
                                           const IntegratorConfig& config, double sample_interval) {
  if (ladder.size() < 2)
    throw Error(Errc::UsageError, "an epsilon ladder needs at least two entries");
  for (double e : ladder) Params{initial.params.alpha, e, initial.params.s}.validate(initial.grid->dim());
  std::vector<std::vector<SystemState>> runs(ladder.size());
  parallel_for(static_cast<std::ptrdiff_t>(ladder.size()), [&](std::ptrdiff_t j) {
    runs[j] = sample_run(initial, ladder[j], config, sample_interval);
  });
  ConvergenceTable t;
  t.ladder = ladder;
  for (std::size_t j = 0; j + 1 < runs.size(); ++j) t.pairs.push_back(pair_difference(runs[j], runs[j + 1]));
  auto ratio = [](double a, double b) { return b > 0.0 ? a / b : (a > 0.0 ? kInf : 1.0); };
  for (std::size_t j = 0; j + 1 < t.pairs.size(); ++j) {
    t.ratios.push_back(ratio(t.pairs[j].combined, t.pairs[j + 1].combined));
    t.derivative_ratios.push_back(
        ratio(t.pairs[j].derivative_combined, t.pairs[j + 1].derivative_combined));
  }
  return t;
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& t) {
  out << "eps_a,eps_b,e_h1,n_l2,b_l2_hm1,combined,e_t_hm1,n_t_hm1,b_t_hm2,derivative_combined\n";
  out.precision(17);
  for (const auto& p : t.pairs)
    out << p.eps_a << ',' << p.eps_b << ',' << p.e_h1 << ',' << p.n_l2 << ',' << p.b_l2_hm1 << ','
        << p.combined << ',' << p.e_t_hm1 << ',' << p.n_t_hm1 << ',' << p.b_t_hm2 << ','
        << p.derivative_combined << '\n';
}

std::string convergence_summary_json(const ConvergenceTable& t) {
  nlohmann::json j;
  j["ladder"] = t.ladder;
  std::vector<double> combined, deriv;
  for (const auto& p : t.pairs) {
    combined.push_back(p.combined);
    deriv.push_back(p.derivative_combined);
  }
  j["combined"] = combined;
  j["derivative_combined"] = deriv;
  j["ratios"] = t.ratios;
  j["derivative_ratios"] = t.derivative_ratios;
  j["max"] = combined.empty() ? 0.0 : *std::max_element(combined.begin(), combined.end());
  j["median"] = median(combined);
  return j.dump(2);
}

// ---------------------------------------------------------------- Kato-Ponce

ExponentTuple default_exponents() { return {2.0, kInf, 2.0, 2.0, kInf}; }

void ExponentTuple::validate() const {
  auto open = [](double q) { return q > 1.0 && q < kInf; };
  auto half_open = [](double q) { return q > 1.0; };
  if (!open(p) || !open(p2) || !open(p3) || !half_open(p1) || !half_open(p4))
    throw Error(Errc::ExponentMismatch, "exponents must lie in (1, inf) (p1, p4 may be inf)");
  const double inv = 1.0 / p;
  if (std::abs(inv - (1.0 / p1 + 1.0 / p2)) > 1e-12 || std::abs(inv - (1.0 / p3 + 1.0 / p4)) > 1e-12)
    throw Error(Errc::ExponentMismatch, "1/p must equal 1/p1 + 1/p2 and 1/p3 + 1/p4");
}

double lp_norm(const TorusGrid& g, const Field& values, double p) {
  const double s = kernels::par::sum_abs_pow(values, p);
  if (std::isinf(p)) return s;
  return std::pow(g.cell_volume() * s, 1.0 / p);
}

double lambda_lp_norm(const TorusGrid& g, const Field& f, double s, double p) {
  return lp_norm(g, g.to_physical(lambda(g, f, s)), p);
}

KatoPonceSample kato_ponce_sample(const TorusGrid& g, const Field& f, const Field& gf, double s,
                                  const ExponentTuple& e) {
  e.validate();
  const Field fp = g.to_physical(f);
  const Field gp = g.to_physical(gf);
  Field prod(fp.size());
  kernels::par::multiply(fp, gp, prod);
  const Field prod_hat = g.to_spectral(prod);

  KatoPonceSample r;
  const Field lam_prod = g.to_physical(lambda(g, prod_hat, s));
  r.product_lhs = lp_norm(g, lam_prod, e.p);
  const double f_p1 = lp_norm(g, fp, e.p1);
  const double f_s_p3 = lambda_lp_norm(g, f, s, e.p3);
  const double g_p4 = lp_norm(g, gp, e.p4);
  r.product_rhs = f_p1 * lambda_lp_norm(g, gf, s, e.p2) + f_s_p3 * g_p4;

  const Field lam_g = g.to_physical(lambda(g, gf, s));
  Field comm(fp.size());
  for (std::size_t i = 0; i < comm.size(); ++i) comm[i] = lam_prod[i] - fp[i] * lam_g[i];
  r.commutator_lhs = lp_norm(g, comm, e.p);

  Field grad_mag(fp.size(), cplx{});
  for (int a = 0; a < g.dim(); ++a) {
    Field da = f;
    for (std::size_t i = 0; i < da.size(); ++i) da[i] *= cplx(0.0, g.k(a)[i]);
    const Field dp = g.to_physical(da);
    for (std::size_t i = 0; i < dp.size(); ++i) grad_mag[i] += std::norm(dp[i]);
  }
  for (auto& z : grad_mag) z = std::sqrt(z.real());
  r.commutator_rhs = lp_norm(g, grad_mag, e.p1) * lambda_lp_norm(g, gf, s - 1.0, e.p2) + f_s_p3 * g_p4;
  return r;
}

KatoPonceResult kato_ponce_ratio(const TorusGrid& g, const KatoPonceOptions& o) {
  o.exponents.validate();
  if (o.samples < 1) throw Error(Errc::ValidationError, "sample count must be positive");
  KatoPonceResult res;
  res.samples.resize(static_cast<std::size_t>(o.samples));
  parallel_for(o.samples, [&](std::ptrdiff_t i) {
    auto rng = sample_rng(o.seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    random_fields::BandSpec spec{o.band, o.decay + 1.0 + u(rng), std::exp(2.0 * u(rng)), false};
    const Field f = random_fields::real_field(g, rng, spec);
    spec.decay = o.decay + 1.0 + u(rng);
    spec.amplitude = std::exp(2.0 * u(rng));
    const Field h = random_fields::real_field(g, rng, spec);
    res.samples[i] = kato_ponce_sample(g, f, h, o.s, o.exponents);
  });
  std::vector<double> pr, cr;
  for (const auto& smp : res.samples) {
    if (!std::isfinite(smp.product_ratio()) || !std::isfinite(smp.commutator_ratio()))
      throw Error(Errc::NonFinite, "Kato-Ponce ratio is not finite");
    pr.push_back(smp.product_ratio());
    cr.push_back(smp.commutator_ratio());
  }
  res.max_product = *std::max_element(pr.begin(), pr.end());
  res.max_commutator = *std::max_element(cr.begin(), cr.end());
  res.median_product = median(pr);
  res.median_commutator = median(cr);
  return res;
}

void write_kato_ponce_csv(std::ostream& out, const KatoPonceResult& r) {
  out << "sample,product_lhs,product_rhs,product_ratio,commutator_lhs,commutator_rhs,commutator_ratio\n";
  out.precision(17);
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const auto& s = r.samples[i];
    out << i << ',' << s.product_lhs << ',' << s.product_rhs << ',' << s.product_ratio() << ','
        << s.commutator_lhs << ',' << s.commutator_rhs << ',' << s.commutator_ratio() << '\n';
  }
}

// ---------------------------------------------------------------- trilinear terms

TrilinearTerms trilinear_terms(const TorusGrid& g, const VectorField& f, const VectorField& gv,
                               const Field& h, double s) {
  TrilinearTerms t;
  VectorField fp = g.zero_vector();
  for (int a = 0; a < 3; ++a) g.to_physical(f[a], fp[a]);
  const Field hp = g.to_physical(h);

  // J1
  VectorField fh = g.zero_vector();
  for (int a = 0; a < 3; ++a) {
    kernels::par::multiply(fp[a], hp, fh[a]);
    g.to_spectral(fh[a], fh[a]);
  }
  t.j1 = inner(g, lambda(g, fh, s + 1.0), lambda(g, gv, s + 1.0)).imag();

  // J2: conj(f) . Lambda^2 g is a scalar.
  const VectorField lam2g = lambda(g, gv, 2.0);
  Field dot = g.zeros();
  for (int a = 0; a < 3; ++a) {
    const Field lp = g.to_physical(lam2g[a]);
    for (std::size_t i = 0; i < dot.size(); ++i) dot[i] += std::conj(fp[a][i]) * lp[i];
  }
  const Field dot_hat = g.to_spectral(dot);
  const Field lam_h = lambda(g, h, s);
  // int u v for real v equals int u conj(v).
  t.j2 = inner(g, lambda(g, dot_hat, s), lam_h).imag();

  // J13, J22 pointwise so that the two integrands are exact conjugates.
  const VectorField lam_s2g = lambda(g, gv, s + 2.0);
  const Field lam_hp = g.to_physical(lam_h);
  cplx a13 = 0.0, a22 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const Field gp = g.to_physical(lam_s2g[a]);
    for (std::size_t i = 0; i < gp.size(); ++i) {
      const double w = lam_hp[i].real();
      a13 += fp[a][i] * std::conj(gp[i]) * w;
      a22 += std::conj(fp[a][i]) * gp[i] * w;
    }
  }
  t.j13 = g.cell_volume() * a13.imag();
  t.j22 = g.cell_volume() * a22.imag();
  t.scale = sobolev_norm(g, f, s + 1.0, NormFlavor::inhomogeneous) *
            sobolev_norm(g, gv, s + 1.0, NormFlavor::inhomogeneous) *
            sobolev_norm(g, h, s, NormFlavor::inhomogeneous);
  return t;
}

std::pair<double, double> cross_trilinear(const TorusGrid& g, const VectorField& f,
                                          const VectorField& gv, const VectorField& h, double s) {
  const VectorField fxh = cross(g, f, h);
  const double first = inner(g, lambda(g, fxh, s + 1.0), lambda(g, gv, s + 1.0)).real();
  VectorField fc = g.zero_vector();
  for (int a = 0; a < 3; ++a) {
    const Field fp = g.to_physical(f[a]);
    Field c(fp.size());
    std::transform(fp.begin(), fp.end(), c.begin(), [](cplx z) { return std::conj(z); });
    fc[a] = g.to_spectral(c);
  }
  const VectorField fxg = cross(g, fc, lambda(g, gv, 2.0));
  const double second = inner(g, lambda(g, fxg, s), lambda(g, h, s)).real();
  const double scale = sobolev_norm(g, f, s + 1.0, NormFlavor::inhomogeneous) *
                       sobolev_norm(g, gv, s + 1.0, NormFlavor::inhomogeneous) *
                       sobolev_norm(g, h, s, NormFlavor::inhomogeneous);
  return {first - second, scale};
}

TrilinearResult trilinear_cancellation(const TorusGrid& g, double s, int samples, std::uint64_t seed,
                                       int band) {
  if (!(s > 0.5 * g.dim())) throw Error(Errc::DomainError, "trilinear estimates need s > d/2");
  if (samples < 1) throw Error(Errc::ValidationError, "sample count must be positive");
  TrilinearResult res;
  res.samples.resize(static_cast<std::size_t>(samples));
  std::vector<double> cross_norm(res.samples.size());
  parallel_for(samples, [&](std::ptrdiff_t i) {
    auto rng = sample_rng(seed, static_cast<std::uint64_t>(i));
    const random_fields::BandSpec spec{band, s + 2.0, 1.0, false};
    VectorField f = g.zero_vector(), gv = g.zero_vector(), ht = g.zero_vector();
    for (int a = 0; a < 3; ++a) {
      f[a] = random_fields::complex_field(g, rng, spec);
      gv[a] = random_fields::complex_field(g, rng, spec);
      ht[a] = random_fields::real_field(g, rng, spec);
    }
    const Field h = random_fields::real_field(g, rng, spec);
    res.samples[i] = trilinear_terms(g, f, gv, h, s);
    const auto [c, scale] = cross_trilinear(g, f, gv, ht, s);
    cross_norm[i] = scale > 0.0 ? std::abs(c) / scale : 0.0;
  });
  for (std::size_t i = 0; i < res.samples.size(); ++i) {
    const auto& t = res.samples[i];
    const double norm = t.scale > 0.0 ? std::abs(t.j()) / t.scale : 0.0;
    if (!std::isfinite(norm) || !std::isfinite(cross_norm[i]))
      throw Error(Errc::NonFinite, "trilinear term is not finite");
    res.max_normalized = std::max(res.max_normalized, norm);
    res.max_cancellation = std::max(res.max_cancellation, std::abs(t.j13 + t.j22));
    res.max_cross_normalized = std::max(res.max_cross_normalized, cross_norm[i]);
  }
  return res;
}

void write_trilinear_csv(std::ostream& out, const TrilinearResult& r) {
  out << "sample,j1,j2,j,j13,j22,scale\n";
  out.precision(17);
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const auto& t = r.samples[i];
    out << i << ',' << t.j1 << ',' << t.j2 << ',' << t.j() << ',' << t.j13 << ',' << t.j22 << ','
        << t.scale << '\n';
  }
}

// ---------------------------------------------------------------- frequency split

double CutoffSpec::operator()(double kabs) const {
  const double rho = kabs / radius;
  if (rho <= 1.0) return 1.0;
  if (rho >= 2.0) return 0.0;
  const double t = rho - 1.0;
  return 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

std::pair<Field, Field> frequency_split(const TorusGrid& g, const Field& f, const CutoffSpec& phi) {
  if (f.size() != g.size()) throw Error(Errc::GridMismatch, "frequency_split: field size");
  Field lo(f.size()), hi(f.size());
  const auto k2 = g.k2();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = phi(std::sqrt(k2[i]));
    lo[i] = w * f[i];
    hi[i] = f[i] - lo[i];
  }
  return {std::move(lo), std::move(hi)};
}

std::pair<VectorField, VectorField> frequency_split(const TorusGrid& g, const VectorField& f,
                                                    const CutoffSpec& phi) {
  std::pair<VectorField, VectorField> out;
  for (int a = 0; a < 3; ++a) std::tie(out.first[a], out.second[a]) = frequency_split(g, f[a], phi);
  return out;
}

LowFrequencyData low_frequency_part(const SystemState& st, const CutoffSpec& phi) {
  LowFrequencyData lf;
  lf.grid = st.grid;
  lf.n1 = frequency_split(*st.grid, st.n_t, phi).first;
  lf.b0 = frequency_split(*st.grid, st.b, phi).first;
  lf.b1 = frequency_split(*st.grid, st.b_t, phi).first;
  return lf;
}

SplitBoundCheck split_bound_check(const TorusGrid& g, const Field& f, double k, double r, double m,
                                  const CutoffSpec& phi) {
  const auto [lo, hi] = frequency_split(g, f, phi);
  const double base = sobolev_norm(g, f, r, NormFlavor::inhomogeneous);
  SplitBoundCheck c;
  if (base == 0.0) return c;
  c.low_ratio = sobolev_norm(g, lo, k, NormFlavor::inhomogeneous) / base;
  c.high_ratio = sobolev_norm(g, hi, r, NormFlavor::intersection, m) / base;
  // sup over |xi| <= 2R of (1 + xi^2)^{k - r}
  const double r2 = 4.0 * phi.radius * phi.radius;
  c.low_constant = std::sqrt(std::max(std::pow(1.0 + r2, k - r), 1.0));
  // sup over x = |xi|^2 >= R^2 of x^m (1 + x)^{-r}
  const double x0 = phi.radius * phi.radius;
  auto w = [&](double x) { return std::pow(x, m) * std::pow(1.0 + x, -r); };
  double sup = w(x0);
  if (m > 0.0 && r > m) {
    const double xs = m / (r - m);
    if (xs > x0) sup = std::max(sup, w(xs));
  }
  if (m == r) sup = std::max(sup, 1.0);
  if (m > r) sup = kInf;
  c.high_constant = std::max(1.0, std::sqrt(sup));
  return c;
}

}  // namespace magzak::studies
