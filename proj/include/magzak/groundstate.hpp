#pragma once

#include <span>
#include <vector>

#include "magzak/grid.hpp"

namespace magzak {

// Positive radial solution of (d/2) Lap Q - (2 - d/2) Q + Q^3 = 0 centred in
// the box, scaled so that ||grad Q||^2 = ||Q||^2 and ||Q||_4^4 = 2 ||Q||^2.
struct GroundState {
  GridPtr grid;
  Field q;  // spectral coefficients
  double tol = 0.0;
  double mass = 0.0;  // ||Q||_2^2
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;  // after each iteration
};

struct PetviashviliOptions {
  int max_iter = 5000;
  // Give up when the residual has not improved for this many iterations.
  int stall_iterations = 50;
  double boundary_tol = 1e-10;
  // Start from initial_amplitude * exp(-|x - x_c|^2 / initial_width^2).
  double initial_amplitude = 1.0;
  double initial_width = 1.0;
};

// Throws NoConvergence on stall or exhaustion and BoundaryContamination when
// |Q| on the box faces exceeds boundary_tol.
GroundState petviashvili(GridPtr grid, double tol, const PetviashviliOptions& opts = {});

// L^2 norm of (d/2) Lap Q - (2 - d/2) Q + Q^3 (Q given spectrally).
double ground_state_residual(const TorusGrid& grid, const Field& q);

// K^4 = 2 / ||Q||^2 (DomainError for zero mass) and its square K^8.
double best_constant(const GroundState& gs);
double best_constant_k8(const GroundState& gs);

// ||f||_4^4 <= K^4 ||f||_2^{4-d} ||grad f||_2^d; ratio = lhs / rhs (1 at Q).
// DomainError for a zero field.
struct SharpInequality {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};
SharpInequality sharp_inequality_check(const TorusGrid& grid, const Field& f, double q_mass);
// Largest ratio over several trial fields.
double sharp_inequality_max(const TorusGrid& grid, std::span<const Field> trials, double q_mass);

}  // namespace magzak
