#pragma once

// Binary snapshot container.
//
//   bytes 0..4   magic "MZAK1"
//   u32          d
//   u32          N
//   f64          P
//   f64          time
//   f64          alpha
//   f64          epsilon
//   char[2]      record tag: "ST" state, "GS" ground state, "LF" low-frequency data
//   payload      record specific, all little-endian
//
// "ST": E1 E2 E3 n n_t B1 B2 B3 Bt1 Bt2 Bt3, each N^d complex coefficients
//       written as interleaved (re, im) f64 in row-major mode order.
// "GS": f64 tol, f64 mass, f64 residual, then the profile Q (one field).
// "LF": n_1L, B_0L (3 components), B_1L (3 components).

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "magzak/field_state.hpp"

namespace magzak {

struct GroundState;
struct LowFrequencyData;

namespace snapshot {

inline constexpr std::string_view kMagic = "MZAK1";

void write_state(std::ostream& out, const SystemState& state);
SystemState read_state(std::istream& in, double s = 2.0);

void write_ground_state(std::ostream& out, const GroundState& gs);
GroundState read_ground_state(std::istream& in);

void write_low_frequency(std::ostream& out, const LowFrequencyData& lf);
LowFrequencyData read_low_frequency(std::istream& in);

void save_state(const std::filesystem::path& path, const SystemState& state);
SystemState load_state(const std::filesystem::path& path, double s = 2.0);
void save_ground_state(const std::filesystem::path& path, const GroundState& gs);
GroundState load_ground_state(const std::filesystem::path& path);
void save_low_frequency(const std::filesystem::path& path, const LowFrequencyData& lf);
LowFrequencyData load_low_frequency(const std::filesystem::path& path);

}  // namespace snapshot
}  // namespace magzak
