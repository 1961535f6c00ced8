#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "magzak/field_state.hpp"

namespace magzak::diagnostics {

// Phi = ||E||^2 + eps^2 ||Lap E||^2
double phi(const SystemState& state);

// Terms of the conserved energy; total() is Psi.
struct PsiTerms {
  double divergence = 0.0;  // ||div E||^2
  double curl = 0.0;        // alpha ||curl E||^2
  double n = 0.0;           // ||n||^2 / 2
  double n_t = 0.0;         // ||Lambda^{-1} n_t||^2 / 2
  double b_t = 0.0;         // ||Lambda^{-2} B_t||^2 / 2
  double b = 0.0;           // ||B||^2 / 2
  double b_neg = 0.0;       // ||Lambda^{-1} B||^2 / 2
  double coupling_n = 0.0;  // int n |E|^2
  double coupling_b = 0.0;  // i int (E x conj E) . B = -int S . B

  double total() const {
    return divergence + curl + n + n_t + b_t + b + b_neg + coupling_n + coupling_b;
  }
};

PsiTerms psi_terms(const SystemState& state);
double psi(const SystemState& state);

// |(||div E||^2 + ||curl E||^2) - ||grad E||^2| / max(||grad E||^2, tiny), with
// the curl assembled componentwise so the check exercises an independent path.
double identity_check_grad_split(const TorusGrid& grid, const VectorField& e);

// Solution norms keyed by "E:H^{s+1}", "n:H^s", "n_t:H^{s-1}&Hdot^{-1}",
// "B:H^s&Hdot^{-1}", "B_t:H^{s-2}&Hdot^{-2}".
std::map<std::string, double> norm_table(const SystemState& state);

// |x - x0| / |x0|, or |x - x0| when x0 = 0.
double relative_drift(double x, double x0);

DiagnosticsRecord make_record(const SystemState& state, double phi0, double psi0);

// One NDJSON line (no trailing newline).
std::string to_ndjson(const DiagnosticsRecord& rec);

// Smallest positive root of x = a + b x^kappa when
// a^{kappa-1} b < (kappa-1)^{kappa-1} / kappa^kappa.
struct BootstrapResult {
  bool condition = false;
  std::optional<double> root;
};
BootstrapResult bootstrap_root(double a, double b, double kappa);

// Solution of v' = A2 v^kappa, v(0) = A1 and its blow-up time.
struct GronwallEnvelope {
  double a1 = 0.0;
  double a2 = 0.0;
  double kappa = 2.0;

  double t_star() const;
  double value(double t) const;
  // max_i values[i] / v(times[i]) over samples with times[i] < T*.
  double worst_ratio(std::span<const double> times, std::span<const double> values) const;
};
GronwallEnvelope gronwall_envelope(double a1, double a2, double kappa);

// Small-data global-existence thresholds. K^4 = 2 / ||Q||^2.
//   d = 2:  2 ||E0||^2 < ||Q||^2
//   d = 3:  ||E0||^2 < 1 / (27 K^8 |Psi0|)  and  ||grad E0||^2 <= |Psi0|
// margin = ln(RHS / LHS), minimized over the conditions: positive when every
// condition holds strictly, +inf for E0 = 0.
struct ThresholdReport {
  int dim = 2;
  double e0_mass = 0.0;
  double grad_mass = 0.0;
  double psi0 = 0.0;
  double q_mass = 0.0;
  double k4 = 0.0;
  bool pass = false;
  double margin = 0.0;
  int psi_sign = 0;
};

ThresholdReport threshold_report(int dim, double e0_mass, double grad_mass, double psi0,
                                 double q_mass);
ThresholdReport threshold_report(const TorusGrid& grid, const VectorField& e0, double psi0,
                                 double q_mass);

}  // namespace magzak::diagnostics
