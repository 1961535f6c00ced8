#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "magzak/field_state.hpp"
#include "magzak/integrator.hpp"

namespace magzak::studies {

// ---------------------------------------------------------------- epsilon ladder

// Differences between two runs sampled at the same times (sup over samples).
struct PairDifference {
  double eps_a = 0.0;
  double eps_b = 0.0;
  double e_h1 = 0.0;        // ||E^a - E^b||_{H^1}
  double n_l2 = 0.0;        // ||n^a - n^b||_{L^2}
  double b_l2_hm1 = 0.0;    // ||B^a - B^b||_{L^2 & Hdot^{-1}}
  double combined = 0.0;    // sup_t of the sum of the three
  double e_t_hm1 = 0.0;     // ||E_t^a - E_t^b||_{H^{-1}}
  double n_t_hm1 = 0.0;     // ||n_t^a - n_t^b||_{Hdot^{-1}}
  double b_t_hm2 = 0.0;     // ||B_t^a - B_t^b||_{Hdot^{-2}}
  double derivative_combined = 0.0;
};

struct ConvergenceTable {
  std::vector<double> ladder;
  std::vector<PairDifference> pairs;  // consecutive ladder entries
  std::vector<double> ratios;             // combined[j] / combined[j+1]
  std::vector<double> derivative_ratios;  // same for the derivative differences
};

// Geometric ladder eps0 * 2^{-j}, j = 0..count-1.
std::vector<double> geometric_ladder(double eps0, int count);

// States of one run at t0, t0 + interval, ..., T (interval <= 0: endpoints only).
std::vector<SystemState> sample_run(const SystemState& initial, double epsilon,
                                    const IntegratorConfig& config, double interval);

PairDifference pair_difference(const std::vector<SystemState>& a, const std::vector<SystemState>& b);

// Runs the integrator once per ladder entry (in parallel) from identical data
// and compares consecutive entries. Needs at least two entries.
ConvergenceTable epsilon_convergence_study(const SystemState& initial,
                                           const std::vector<double>& ladder,
                                           const IntegratorConfig& config, double sample_interval);

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);
std::string convergence_summary_json(const ConvergenceTable& table);

// ---------------------------------------------------------------- Kato-Ponce

// 1/p = 1/p1 + 1/p2 = 1/p3 + 1/p4; p, p2, p3 in (1, inf), p1, p4 in (1, inf].
struct ExponentTuple {
  double p = 2.0;
  double p1 = 0.0;
  double p2 = 2.0;
  double p3 = 2.0;
  double p4 = 0.0;

  void validate() const;  // ExponentMismatch
};

ExponentTuple default_exponents();  // p = p2 = p3 = 2, p1 = p4 = inf

struct KatoPonceOptions {
  double s = 2.0;
  ExponentTuple exponents = default_exponents();
  int samples = 200;
  std::uint64_t seed = 1;
  int band = 8;         // index band of the random fields
  double decay = 4.0;   // spectral decay exponent
};

struct KatoPonceSample {
  double product_lhs = 0.0;
  double product_rhs = 0.0;
  double commutator_lhs = 0.0;
  double commutator_rhs = 0.0;
  double product_ratio() const { return product_rhs > 0.0 ? product_lhs / product_rhs : 0.0; }
  double commutator_ratio() const {
    return commutator_rhs > 0.0 ? commutator_lhs / commutator_rhs : 0.0;
  }
};

struct KatoPonceResult {
  double max_product = 0.0;
  double max_commutator = 0.0;
  double median_product = 0.0;
  double median_commutator = 0.0;
  std::vector<KatoPonceSample> samples;
};

// (cell volume * sum |v|^p)^{1/p} of grid values; p = inf gives the max.
double lp_norm(const TorusGrid& grid, const Field& values, double p);
// ||Lambda^s f||_{L^p} with the homogeneous Lambda = |k| (f spectral).
double lambda_lp_norm(const TorusGrid& grid, const Field& f, double s, double p);

KatoPonceSample kato_ponce_sample(const TorusGrid& grid, const Field& f, const Field& g, double s,
                                  const ExponentTuple& e);
KatoPonceResult kato_ponce_ratio(const TorusGrid& grid, const KatoPonceOptions& opts);

void write_kato_ponce_csv(std::ostream& out, const KatoPonceResult& r);

// ---------------------------------------------------------------- trilinear terms

struct TrilinearTerms {
  double j1 = 0.0;   // Im int Lambda^{s+1}(f h) . conj(Lambda^{s+1} g)
  double j2 = 0.0;   // Im int Lambda^s(conj f . Lambda^2 g) Lambda^s h
  double j13 = 0.0;  // Im int f Lambda^s h . conj(Lambda^{s+2} g)
  double j22 = 0.0;  // Im int conj f . Lambda^{s+2} g Lambda^s h
  double scale = 0.0;  // ||f||_{H^{s+1}} ||g||_{H^{s+1}} ||h||_{H^s}
  double j() const { return j1 + j2; }
};

// f, g complex 3-vectors, h real scalar (all spectral).
TrilinearTerms trilinear_terms(const TorusGrid& grid, const VectorField& f, const VectorField& g,
                               const Field& h, double s);

// Re int Lambda^{s+1}(f x h) . conj(Lambda^{s+1} g) - Re int Lambda^s(conj f x Lambda^2 g) . Lambda^s h
// for a real vector field h; second member is the normalizing product.
std::pair<double, double> cross_trilinear(const TorusGrid& grid, const VectorField& f,
                                          const VectorField& g, const VectorField& h, double s);

struct TrilinearResult {
  double max_normalized = 0.0;
  double max_cancellation = 0.0;  // max |J13 + J22|
  double max_cross_normalized = 0.0;
  std::vector<TrilinearTerms> samples;
};

TrilinearResult trilinear_cancellation(const TorusGrid& grid, double s, int samples,
                                       std::uint64_t seed, int band);

void write_trilinear_csv(std::ostream& out, const TrilinearResult& r);

// ---------------------------------------------------------------- frequency split

// phi(|k| / radius): 1 on [0, 1], 0 on [2, inf), 1 - 3t^2 + 2t^3 (t = rho - 1) between.
struct CutoffSpec {
  double radius = 1.0;
  double operator()(double kabs) const;
};

std::pair<Field, Field> frequency_split(const TorusGrid& grid, const Field& f,
                                        const CutoffSpec& phi = {});
std::pair<VectorField, VectorField> frequency_split(const TorusGrid& grid, const VectorField& f,
                                                    const CutoffSpec& phi = {});

// Low-frequency data (phi n_t, phi B, phi B_t) of a state.
LowFrequencyData low_frequency_part(const SystemState& state, const CutoffSpec& phi = {});

// ||f_L||_{H^k} <= C_L ||f||_{H^r} and ||f_H||_{H^r & Hdot^m} <= C_H ||f||_{H^r}
// with the sharp multiplier constants of the unit cutoff.
struct SplitBoundCheck {
  double low_ratio = 0.0;
  double low_constant = 0.0;
  double high_ratio = 0.0;
  double high_constant = 0.0;
  bool holds() const { return low_ratio <= low_constant * (1 + 1e-12) && high_ratio <= high_constant * (1 + 1e-12); }
};
SplitBoundCheck split_bound_check(const TorusGrid& grid, const Field& f, double k, double r,
                                  double m, const CutoffSpec& phi = {});

}  // namespace magzak::studies
