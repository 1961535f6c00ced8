#include "helpers.hpp"
#include "magzak/error.hpp"
#include "magzak/propagators.hpp"
#include "magzak/spectral.hpp"

using namespace magzak;
using testing::kPi;

TEST_CASE("params validation") {
  CHECK_THROWS_AS((Params{0.5, 0.1, 2.0}.validate(2)), Error);
  CHECK_THROWS_AS((Params{1.0, 1.0, 2.0}.validate(2)), Error);
  CHECK_THROWS_AS((Params{1.0, 0.1, 1.5}.validate(3)), Error);
  CHECK_NOTHROW((Params{1.0, 0.0, 1.6}.validate(3)));
}

TEST_CASE("state invariants are enforced") {
  const auto g = make_grid(2, 16, 10.0);
  SystemState st = testing::random_state(g, 4);
  SUBCASE("nonzero mean of n_t") {
    st.n_t[0] = 0.5;
    try {
      st.validate();
      FAIL("expected NonZeroMean");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NonZeroMean);
    }
  }
  SUBCASE("d = 2 embedding") {
    st.e[2][3] = 1.0;
    CHECK_THROWS_AS(st.validate(), Error);
    apply_plane_embedding(st);
    CHECK_NOTHROW(st.validate());
  }
  SUBCASE("n may have a mean") {
    st.n[0] = 0.5;
    CHECK_NOTHROW(st.validate());
  }
}

TEST_CASE("cross product and spin density") {
  const auto g = make_grid(3, 8, 2.0 * kPi);
  VectorField u = g->zero_vector(), v = g->zero_vector();
  u[0][0] = 1.0;  // constant e1
  v[1][0] = 1.0;  // constant e2
  const VectorField w = cross(*g, u, v);
  CHECK(w[2][0].real() == doctest::Approx(1.0));
  // E = (1, i, 0) gives S = -i E x conj E = (0, 0, -2).
  VectorField e = g->zero_vector();
  e[0][0] = 1.0;
  e[1][0] = cplx(0.0, 1.0);
  const VectorField s = spin_density(*g, e);
  CHECK(s[2][0].real() == doctest::Approx(-2.0));
  CHECK(std::abs(s[0][0]) < 1e-15);
}

TEST_CASE("norm flavours") {
  const auto g = make_grid(2, 16, 2.0 * kPi);
  Field f = g->zeros();
  f[g->index_of({1, 0, 0})] = 1.0;
  f[g->index_of({-1, 0, 0})] = 1.0;
  const double vol = g->volume();
  CHECK(sobolev_norm(*g, f, 1.0, NormFlavor::inhomogeneous) == doctest::Approx(std::sqrt(4 * vol)));
  CHECK(sobolev_norm(*g, f, 1.0, NormFlavor::homogeneous) == doctest::Approx(std::sqrt(2 * vol)));
  f[g->index_of({2, 0, 0})] = 1.0;
  CHECK(sobolev_norm(*g, f, -1.0, NormFlavor::intersection, -1.0) >=
        sobolev_norm(*g, f, -1.0, NormFlavor::inhomogeneous));
  CHECK(imaginary_residue(*g, f) > 0.1);  // unpaired +2 mode is complex
  project_real(*g, f);
  CHECK(imaginary_residue(*g, f) < 1e-15);
}

TEST_CASE("Schrodinger group: unitarity, group law, commuting with Lambda") {
  const auto g = make_grid(2, 32, 9.0);
  std::mt19937_64 rng(5);
  const VectorField e = random_fields::complex_vector(*g, rng, {8, 1.0, 1.0, false});
  const VectorField a = propagators::schrodinger_group(*g, e, 0.3, 2.0, 0.2);
  const VectorField ab = propagators::schrodinger_group(*g, a, 0.5, 2.0, 0.2);
  const VectorField c = propagators::schrodinger_group(*g, e, 0.8, 2.0, 0.2);
  CHECK(testing::max_abs_diff(ab, c) < 1e-13);
  for (double s : {0.0, 1.0, 2.0, 3.5})
    CHECK(sobolev_norm(*g, a, s, NormFlavor::inhomogeneous) ==
          doctest::Approx(sobolev_norm(*g, e, s, NormFlavor::inhomogeneous)).epsilon(1e-13));
  const VectorField back = propagators::schrodinger_group(*g, a, -0.3, 2.0, 0.2);
  CHECK(testing::max_abs_diff(back, e) < 1e-13);
  VectorField la = g->zero_vector(), al = g->zero_vector();
  VectorField le = g->zero_vector();
  for (int c2 = 0; c2 < 3; ++c2) {
    la[c2] = spectral::apply_lambda(*g, a[c2], 1.5, false);
    le[c2] = spectral::apply_lambda(*g, e[c2], 1.5, false);
  }
  al = propagators::schrodinger_group(*g, le, 0.3, 2.0, 0.2);
  CHECK(testing::max_abs_diff(la, al) < 1e-12);
}

TEST_CASE("Schrodinger phase on a single transverse mode") {
  const auto g = make_grid(2, 16, 2.0 * kPi);
  VectorField e = g->zero_vector();
  const auto i = g->index_of({0, 2, 0});
  e[0][i] = 1.0;  // transverse to k = (0, 2)
  const double t = 0.7, alpha = 3.0, eps = 0.1;
  const VectorField u = propagators::schrodinger_group(*g, e, t, alpha, eps);
  const double lambda = alpha * 4.0 / (1.0 + eps * eps * 16.0);
  CHECK(std::abs(u[0][i] - std::exp(cplx(0.0, -lambda * t))) < 1e-14);
}

TEST_CASE("wave and plate free evolution on one mode") {
  const auto g = make_grid(2, 16, 2.0 * kPi);
  const auto i = g->index_of({3, 0, 0});
  const double t = 0.9;
  Field n = g->zeros(), nt = g->zeros();
  n[i] = 1.0;
  auto [n1, nt1] = propagators::wave_free(*g, n, nt, t);
  CHECK(n1[i].real() == doctest::Approx(std::cos(3.0 * t)));
  CHECK(nt1[i].real() == doctest::Approx(-3.0 * std::sin(3.0 * t)));

  VectorField b = g->zero_vector(), bt = g->zero_vector();
  bt[2][i] = 1.0;
  auto [b1, bt1] = propagators::plate_free(*g, b, bt, t);
  const double w = 3.0 * std::sqrt(10.0);
  CHECK(b1[2][i].real() == doctest::Approx(std::sin(w * t) / w));
  CHECK(bt1[2][i].real() == doctest::Approx(std::cos(w * t)));

  // Zero mode: sin(omega t)/omega -> t.
  propagators::OscillatorSpec z{propagators::Dispersion::plate, 0.4};
  CHECK(z.sinc_symbol(0.0) == doctest::Approx(0.4));
}

TEST_CASE("Duhamel wave step with constant forcing") {
  const auto g = make_grid(2, 16, 2.0 * kPi);
  const auto i = g->index_of({1, 1, 0});
  Field f = g->zeros();
  f[i] = 1.0;
  const std::array<Field, 3> forcing{f, f, f};
  const double dt = 0.1;
  auto [n, nt] = propagators::duhamel_wave(*g, g->zeros(), g->zeros(), forcing, dt);
  const double w2 = 2.0, w = std::sqrt(2.0);
  CHECK(n[i].real() == doctest::Approx((1.0 - std::cos(w * dt)) / w2).epsilon(1e-6));
  CHECK(nt[i].real() == doctest::Approx(std::sin(w * dt) / w).epsilon(1e-6));
  CHECK_THROWS_AS(propagators::duhamel_wave(*g, g->zeros(), g->zeros(), forcing, 0.0), Error);
}

TEST_CASE("Simpson rules integrate quadratics exactly") {
  const double dt = 0.3;
  for (auto rule : {propagators::simpson_end_rule(dt), propagators::simpson_mid_rule(dt)}) {
    double w = 0.0;
    for (auto [lag, weight] : rule) w += weight;
    CHECK(w > 0.0);
  }
  // End rule: sum w f(t_j) with t_j = dt - lag equals int_0^dt f for f = t^2.
  double s = 0.0;
  for (auto [lag, weight] : propagators::simpson_end_rule(dt)) s += weight * (dt - lag) * (dt - lag);
  CHECK(s == doctest::Approx(dt * dt * dt / 3.0));
  // Mid rule targets t = dt/2 from samples at 0, dt/2, dt.
  const double h = 0.5 * dt;
  s = 0.0;
  for (auto [lag, weight] : propagators::simpson_mid_rule(dt)) s += weight * (h - lag) * (h - lag);
  CHECK(s == doctest::Approx(h * h * h / 3.0));
}
