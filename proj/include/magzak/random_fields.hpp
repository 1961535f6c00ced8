#pragma once

#include <cstdint>
#include <random>

#include "magzak/grid.hpp"

namespace magzak::random_fields {

// Band-limited random fields. Coefficients live on |m_j| <= band and are drawn
// in a fixed order over that cube, so the same seed gives the same function on
// every grid that resolves the band.
struct BandSpec {
  int band = 4;
  double decay = 2.0;  // |c_m| ~ (1 + |m|)^{-decay}
  double amplitude = 1.0;
  bool zero_mean = true;
};

Field complex_field(const TorusGrid& grid, std::mt19937_64& rng, const BandSpec& spec);
// Hermitian symmetric coefficients, i.e. a real function.
Field real_field(const TorusGrid& grid, std::mt19937_64& rng, const BandSpec& spec);
// Components outside grid.e_components() stay zero.
VectorField complex_vector(const TorusGrid& grid, std::mt19937_64& rng, const BandSpec& spec);

}  // namespace magzak::random_fields
