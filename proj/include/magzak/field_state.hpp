#pragma once

#include <map>
#include <string>

#include "magzak/grid.hpp"

namespace magzak {

// alpha >= 1, 0 <= epsilon < 1, s > d/2.
struct Params {
  double alpha = 1.0;
  double epsilon = 0.0;
  double s = 2.0;

  void validate(int dim) const;
};

// (E, n, n_t, B, B_t) at one instant, stored as spectral coefficients.
// n, n_t, B, B_t are real fields; n_t, B, B_t have zero mean. In d = 2,
// E3 = B1 = B2 = 0.
struct SystemState {
  GridPtr grid;
  VectorField e;
  Field n;
  Field n_t;
  VectorField b;
  VectorField b_t;
  double time = 0.0;
  Params params;

  static SystemState zeros(GridPtr grid, Params params);

  // Throws on a violated invariant (NonZeroMean, NonFinite, DomainError).
  void validate() const;
};

struct DiagnosticsRecord {
  double time = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  double drift_phi = 0.0;
  double drift_psi = 0.0;
  std::map<std::string, double> norms;
};

// Pointwise u x v, computed in physical space and dealiased.
VectorField cross(const TorusGrid& grid, const VectorField& u, const VectorField& v);

// -i (E x conj(E)), a real vector field; residual imaginary parts up to 1e-12
// (relative to max |E|^2) are dropped, larger ones raise ImaginaryResidue.
VectorField spin_density(const TorusGrid& grid, const VectorField& e);

enum class NormFlavor {
  inhomogeneous,  // ||(1 + |k|^2)^{s/2} f||
  homogeneous,    // ||Lambda^s f||
  intersection,   // max(||f||_{H^s}, ||f||_{Hdot^{neg}})
};

double sobolev_norm(const TorusGrid& grid, const Field& f, double s, NormFlavor flavor,
                    double negative_order = -1.0);
double sobolev_norm(const TorusGrid& grid, const VectorField& f, double s, NormFlavor flavor,
                    double negative_order = -1.0);

// L^2 norm evaluated from grid values (quadrature), for Parseval checks.
double l2_norm_physical(const TorusGrid& grid, const Field& f);

// Largest |Im f(x)| over the grid.
double imaginary_residue(const TorusGrid& grid, const Field& f);

// Projects f onto real-valued fields (Hermitian symmetric coefficients).
void project_real(const TorusGrid& grid, Field& f);

// Zeroes the k = 0 coefficient.
void remove_mean(Field& f);

// Zeroes the components that must vanish in d = 2.
void apply_plane_embedding(SystemState& state);

}  // namespace magzak
