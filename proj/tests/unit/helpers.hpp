#pragma once

#include <random>

#include "doctest.h"
#include "magzak/field_state.hpp"
#include "magzak/random_fields.hpp"

namespace testing {

inline constexpr double kPi = 3.14159265358979323846;

inline double max_abs_diff(const magzak::Field& a, const magzak::Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const magzak::VectorField& a, const magzak::VectorField& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, max_abs_diff(a[c], b[c]));
  return m;
}

// Small random state with every channel populated.
inline magzak::SystemState random_state(magzak::GridPtr g, std::uint64_t seed, double amp = 0.1,
                                        magzak::Params p = {1.0, 0.1, 2.0}) {
  using namespace magzak;
  std::mt19937_64 rng(seed);
  random_fields::BandSpec spec{4, 3.0, amp, true};
  SystemState st = SystemState::zeros(g, p);
  st.e = random_fields::complex_vector(*g, rng, {4, 3.0, amp, false});
  st.n = random_fields::real_field(*g, rng, spec);
  st.n_t = random_fields::real_field(*g, rng, spec);
  for (int c : g->b_components()) {
    st.b[c] = random_fields::real_field(*g, rng, spec);
    st.b_t[c] = random_fields::real_field(*g, rng, spec);
  }
  st.validate();
  return st;
}

}  // namespace testing
