#pragma once

// Exact linear solution operators as Fourier multipliers:
//   U(t)        of  i E_t = L A E,   A = -grad div + alpha curl curl,  L = (1 + eps^2 |k|^4)^{-1}
//   wave        of  n_tt - Lap n = F
//   plate       of  B_tt + Lap^2 B - Lap B = F,  frequency |k| <k>
// plus the Simpson-rule Duhamel steps that add a sampled forcing.

#include <array>
#include <span>
#include <utility>

#include "magzak/grid.hpp"

namespace magzak::propagators {

// Per-mode phases exp(-i t lambda) with lambda = |k|^2 / (1 + eps^2 |k|^4) on
// the longitudinal part and alpha * lambda on the transverse part.
struct LinearGroupSpec {
  double t = 0.0;
  double alpha = 1.0;
  double epsilon = 0.0;

  double longitudinal_rate(double k2) const { return k2 / (1.0 + epsilon * epsilon * k2 * k2); }
  cplx longitudinal_phase(double k2) const;
  cplx transverse_phase(double k2) const;
};

enum class Dispersion { wave, plate };

// cos(omega t) and sin(omega t) / omega, the latter with limit t at omega = 0.
struct OscillatorSpec {
  Dispersion kind = Dispersion::wave;
  double t = 0.0;

  double omega(double k2) const;
  double cos_symbol(double k2) const;
  double sinc_symbol(double k2) const;
};

using WavePropagatorSpec = OscillatorSpec;
using PlatePropagatorSpec = OscillatorSpec;

VectorField schrodinger_group(const TorusGrid& grid, const VectorField& e, double t, double alpha,
                              double epsilon);
void schrodinger_group_inplace(const TorusGrid& grid, VectorField& e, double t, double alpha,
                               double epsilon);

std::pair<Field, Field> wave_free(const TorusGrid& grid, const Field& n, const Field& n_t, double t);
std::pair<VectorField, VectorField> plate_free(const TorusGrid& grid, const VectorField& b,
                                               const VectorField& b_t, double t);

// In-place free evolution of one scalar channel, no precondition checks.
void oscillate_inplace(const TorusGrid& grid, Dispersion kind, Field& u, Field& u_t, double t);

// One step of length dt: free evolution plus Simpson quadrature of the Duhamel
// integral with forcing samples at t0, t0 + dt/2, t0 + dt. For the wave
// equation the samples are the full right-hand side (Lap |E|^2); for the plate
// equation they are the spin density S = -i E x conj(E), to which Lap^2 is
// applied here.
std::pair<Field, Field> duhamel_wave(const TorusGrid& grid, const Field& n, const Field& n_t,
                                     std::span<const Field, 3> forcing, double dt);
std::pair<VectorField, VectorField> duhamel_plate(const TorusGrid& grid, const VectorField& b,
                                                  const VectorField& b_t,
                                                  std::span<const VectorField, 3> spin, double dt);

// A forcing sample contributing weight * K(lag) F to the solution, where K is
// the propagator kernel evaluated at the time lag between sample and target.
struct KernelSample {
  double lag;
  double weight;
  const Field* forcing;
};

// u += sum w sin(omega lag)/omega F,  u_t += sum w cos(omega lag) F
void add_oscillator_sources(const TorusGrid& grid, Dispersion kind, Field& u, Field& u_t,
                            std::span<const KernelSample> samples);

struct GroupSample {
  double lag;
  double weight;
  const VectorField* forcing;
};

// e += sum w U(lag) f
void add_group_sources(const TorusGrid& grid, VectorField& e, double alpha, double epsilon,
                       std::span<const GroupSample> samples);

// Simpson weights over a step dt targeting its end point, and the
// three-point rule targeting the midpoint from samples at 0, dt/2, dt.
std::array<std::pair<double, double>, 3> simpson_end_rule(double dt);
std::array<std::pair<double, double>, 3> simpson_mid_rule(double dt);

}  // namespace magzak::propagators
