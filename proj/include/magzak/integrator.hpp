#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "magzak/field_state.hpp"

namespace magzak {

// Low-frequency parts (n_1L, B_0L, B_1L) used by the shifted system
//   n~ = n - t n_1L,   B~ = B - B_0L - t B_1L.
struct LowFrequencyData {
  GridPtr grid;
  Field n1;
  VectorField b0;
  VectorField b1;

  static LowFrequencyData zeros(GridPtr grid);
};

enum class Scheme { picard, strang };

struct IntegratorConfig {
  Scheme scheme = Scheme::strang;
  double dt = 1e-3;
  double t_end = 1.0;
  // Picard only.
  double window = 0.05;
  double tol_fp = 1e-10;
  int max_iter = 60;
  int max_halvings = 8;
  // Evolve the shifted system built from `low` and report original variables.
  bool modified_mode = false;
  std::optional<LowFrequencyData> low;
  // <= 0 means every step.
  double diagnostics_interval = 0.0;
  // <= 0 disables intermediate snapshots.
  double snapshot_interval = 0.0;
  // Heuristic blow-up threshold on the sum of the solution norms.
  double blowup_threshold = 1e6;

  void validate() const;
};

// Time derivative of every channel of the state.
struct Derivative {
  VectorField e;
  Field n;
  Field n_t;
  VectorField b;
  VectorField b_t;
};

Derivative rhs_regularized(const SystemState& state);
// Right-hand side of the shifted system at time state.time; `state` holds the
// shifted variables (n~, n~_t, B~, B~_t).
Derivative rhs_modified(const SystemState& state, const LowFrequencyData& low);

SystemState to_modified(const SystemState& state, const LowFrequencyData& low);
SystemState from_modified(const SystemState& state, const LowFrequencyData& low);

// Strang splitting: half-step exact linear flow, full-step RK4 for the
// coupling terms (n and B frozen, n_t and B_t driven), half-step linear flow.
// With `low` set the state holds shifted variables.
SystemState strang_step(const SystemState& state, double dt, const LowFrequencyData* low = nullptr);

struct PicardResult {
  SystemState state;
  int iterations = 0;
  double last_difference = 0.0;
  std::vector<double> differences;
};

// Fixed-point iteration of the Duhamel map over [t, t + window] on Simpson
// nodes spaced dt/2. Throws NonContraction when successive differences fail to
// shrink three times in a row and MaxIterExceeded when max_iter is hit.
PicardResult picard_window(const SystemState& state, double window, double dt, double tol_fp,
                           int max_iter, const LowFrequencyData* low = nullptr);

struct RunHooks {
  std::function<void(const DiagnosticsRecord&)> on_diagnostics;
  std::function<void(const SystemState&)> on_snapshot;
};

struct RunResult {
  SystemState final_state;
  std::vector<DiagnosticsRecord> diagnostics;
  long steps = 0;
  int window_halvings = 0;
};

// Advances `initial` (original variables) to config.t_end. Diagnostics refer to
// the original variables in every mode. On a physics failure the hooks have
// already received every record emitted so far.
RunResult run(const SystemState& initial, const IntegratorConfig& config, const RunHooks& hooks = {});

}  // namespace magzak
