#include "magzak/random_fields.hpp"

#include <cmath>

#include "magzak/error.hpp"
#include "magzak/field_state.hpp"

namespace magzak::random_fields {

Field complex_field(const TorusGrid& g, std::mt19937_64& rng, const BandSpec& spec) {
  if (spec.band < 0 || 2 * spec.band >= g.points())
    throw Error(Errc::DomainError, "random band does not fit the grid");
  std::normal_distribution<double> normal;
  Field f = g.zeros();
  const int b = spec.band;
  const int d = g.dim();
  std::array<int, 3> m{};
  const int span = 2 * b + 1;
  const int count = d == 2 ? span * span : span * span * span;
  for (int idx = 0; idx < count; ++idx) {
    int rest = idx;
    for (int a = d - 1; a >= 0; --a) {
      m[a] = rest % span - b;
      rest /= span;
    }
    const double re = normal(rng);
    const double im = normal(rng);
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += m[a] * m[a];
    f[g.index_of(m)] = spec.amplitude * cplx(re, im) / std::pow(1.0 + std::sqrt(r2), spec.decay);
  }
  if (spec.zero_mean) f[0] = 0.0;
  return f;
}

Field real_field(const TorusGrid& g, std::mt19937_64& rng, const BandSpec& spec) {
  Field f = complex_field(g, rng, spec);
  project_real(g, f);
  return f;
}

VectorField complex_vector(const TorusGrid& g, std::mt19937_64& rng, const BandSpec& spec) {
  VectorField v = g.zero_vector();
  for (int a : g.e_components()) v[a] = complex_field(g, rng, spec);
  return v;
}

}  // namespace magzak::random_fields
