#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "magzak/field_state.hpp"
#include "magzak/integrator.hpp"
#include "magzak/studies.hpp"

namespace magzak {

struct GridConfig {
  int dim = 2;
  int points = 64;
  double period = 16.0 * 3.14159265358979323846;
};

// Initial data: a named generator and its parameters.
struct InitialSpec {
  std::string generator = "gaussian-packet";
  // Shared by gaussian-packet and random-smooth: ||E0||_{L^2} after dealiasing.
  double e_norm = 0.1;
  // gaussian-packet
  double width = 2.0;
  std::optional<std::array<double, 3>> center;  // default: box centre
  std::array<double, 3> carrier{0.0, 0.0, 0.0}; // mode index of the carrier wave
  std::array<double, 3> polarization{1.0, 0.0, 0.0};
  double n_amplitude = 0.0;   // gaussian n0 (random-smooth: coefficient scale)
  double n_t_amplitude = 0.0; // mean-free gaussian n1
  double b_amplitude = 0.0;   // mean-free gaussian along the last B component
  double b_t_amplitude = 0.0;
  // single-mode
  std::array<int, 3> mode{1, 0, 0};
  double amplitude = 0.1;
  std::string direction = "transverse";  // transverse | longitudinal | explicit
  // random-smooth
  double decay = 4.0;
  int band = 8;
  // snapshot
  std::filesystem::path snapshot;
};

struct OutputConfig {
  std::filesystem::path dir = "out";
  double diagnostics_interval = 0.0;
  double snapshot_interval = 0.0;
};

struct ConvergeConfig {
  std::vector<double> ladder{0.2, 0.1, 0.05, 0.025};
  double sample_interval = 0.05;
};

struct GroundStateConfig {
  int dim = 2;
  int points = 512;
  double period = 64.0;
  double tol = 1e-11;
  // Largest |Q| allowed on the box faces.
  double boundary_tol = 1e-10;
  // thresholds: use this mass instead of solving for Q.
  std::optional<double> mass;
};

struct InequalityConfig {
  studies::KatoPonceOptions kato_ponce;
  int trilinear_samples = 100;
  int trilinear_band = 8;
};

struct SplitConfig {
  double radius = 1.0;
};

struct RunConfig {
  GridConfig grid;
  Params params;
  IntegratorConfig integrator;
  InitialSpec initial;
  OutputConfig output;
  std::uint64_t seed = 1;
  std::optional<int> threads;
  std::filesystem::path low_frequency;  // for integrator.modified
  ConvergeConfig converge;
  GroundStateConfig groundstate;
  InequalityConfig inequalities;
  SplitConfig split;
};

// Line-oriented "key = value" grammar with [section] headers; see
// docs/config.md. Relative paths are resolved against base_dir. Throws
// ParseError (with line and column) or ValidationError.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Scalar with an optional "pi" factor: "3", "1e-3", "16pi", "2*pi", "inf".
double parse_number(const std::string& text);

}  // namespace magzak
