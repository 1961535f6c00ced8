#include <cmath>

#include "helpers.hpp"
#include "magzak/diagnostics.hpp"
#include "magzak/error.hpp"
#include "magzak/spectral.hpp"

using namespace magzak;
using testing::kPi;

TEST_CASE("Phi on a single mode") {
  const auto g = make_grid(2, 16, 2.0 * kPi);
  SystemState st = SystemState::zeros(g, {1.0, 0.2, 2.0});
  st.e[1][g->index_of({1, 1, 0})] = 0.5;
  // P^2 (1 + eps^2 |k|^4) |c|^2
  CHECK(diagnostics::phi(st) == doctest::Approx(g->volume() * (1.0 + 0.04 * 4.0) * 0.25));
}

TEST_CASE("Psi terms are consistent") {
  const auto g = make_grid(2, 16, 10.0);
  const SystemState st = testing::random_state(g, 21);
  const auto t = diagnostics::psi_terms(st);
  CHECK(t.total() == doctest::Approx(diagnostics::psi(st)));
  CHECK(t.divergence >= 0.0);
  CHECK(t.n > 0.0);
  CHECK(t.b_neg > 0.0);
  // alpha = 1: div + curl = ||grad E||^2.
  double grad = 0.0;
  for (int c = 0; c < 3; ++c) grad += std::pow(sobolev_norm(*g, st.e[c], 1.0, NormFlavor::homogeneous), 2);
  CHECK(t.divergence + t.curl == doctest::Approx(grad).epsilon(1e-12));
}

TEST_CASE("norm table keys") {
  const auto g = make_grid(2, 16, 10.0);
  const auto table = diagnostics::norm_table(testing::random_state(g, 22));
  for (const char* key : {"E:H^{s+1}", "n:H^s", "n_t:H^{s-1}&Hdot^{-1}", "B:H^s&Hdot^{-1}",
                          "B_t:H^{s-2}&Hdot^{-2}"}) {
    REQUIRE(table.count(key) == 1);
    CHECK(table.at(key) > 0.0);
  }
}

TEST_CASE("NDJSON record") {
  DiagnosticsRecord r;
  r.time = 0.5;
  r.phi = 1.0;
  r.norms["n:H^s"] = 2.0;
  const std::string line = diagnostics::to_ndjson(r);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(line.find("\"t\":0.5") != std::string::npos);
  CHECK(line.find("\"n:H^s\":2") != std::string::npos);
}

TEST_CASE("relative drift") {
  CHECK(diagnostics::relative_drift(1.1, 1.0) == doctest::Approx(0.1));
  CHECK(diagnostics::relative_drift(1e-3, 0.0) == doctest::Approx(1e-3));
}

TEST_CASE("bootstrap root") {
  SUBCASE("closed form for kappa = 2") {
    const auto r = diagnostics::bootstrap_root(1.0, 0.125, 2.0);
    REQUIRE(r.condition);
    CHECK(*r.root == doctest::Approx(4.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-14));
  }
  SUBCASE("root satisfies the fixed-point equation") {
    const auto r = diagnostics::bootstrap_root(0.3, 0.2, 1.7);
    REQUIRE(r.root);
    CHECK(*r.root == doctest::Approx(0.3 + 0.2 * std::pow(*r.root, 1.7)).epsilon(1e-13));
  }
  SUBCASE("condition fails") {
    const auto r = diagnostics::bootstrap_root(1.0, 1.0, 2.0);
    CHECK_FALSE(r.condition);
    CHECK_FALSE(r.root);
  }
}

TEST_CASE("Gronwall envelope") {
  const auto env = diagnostics::gronwall_envelope(1.0, 1.0, 1.5);
  CHECK(env.t_star() == 2.0);
  // v = (1 - t/2)^{-2}
  CHECK(env.value(1.0) == doctest::Approx(4.0));
  // v' = A2 v^kappa by finite differences.
  const double h = 1e-5;
  CHECK((env.value(0.5 + h) - env.value(0.5 - h)) / (2 * h) ==
        doctest::Approx(std::pow(env.value(0.5), 1.5)).epsilon(1e-8));
  const std::vector<double> ts{0.0, 1.0, 3.0}, vs{0.5, 2.0, 100.0};
  CHECK(env.worst_ratio(ts, vs) == doctest::Approx(0.5));
  CHECK(diagnostics::gronwall_envelope(1.0, 0.125, 2.0).t_star() == doctest::Approx(8.0));
  // The envelope itself as the trajectory: equality on [0, 0.9 T*].
  std::vector<double> tt, vv;
  for (int i = 0; i <= 90; ++i) {
    tt.push_back(0.01 * i * env.t_star());
    vv.push_back(env.value(tt.back()));
  }
  CHECK(env.worst_ratio(tt, vv) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("thresholds") {
  SUBCASE("d = 2 mass condition") {
    const auto ok = diagnostics::threshold_report(2, 5.0, 1.0, 1.0, 11.7);
    CHECK(ok.pass);
    CHECK(ok.margin == doctest::Approx(std::log(11.7 / 10.0)));
    const auto bad = diagnostics::threshold_report(2, 6.0, 1.0, 1.0, 11.7);
    CHECK_FALSE(bad.pass);
    CHECK(bad.margin < 0.0);
  }
  SUBCASE("zero data passes with infinite margin") {
    const auto g = make_grid(2, 8, 5.0);
    const auto r = diagnostics::threshold_report(*g, g->zero_vector(), 0.0, 11.7);
    CHECK(r.pass);
    CHECK(std::isinf(r.margin));
    CHECK(r.margin > 0.0);
  }
  SUBCASE("d = 3 uses both conditions") {
    const double q = 18.9, k4 = 2.0 / q;
    const double psi0 = -2.0, mass_limit = 1.0 / (27.0 * k4 * k4 * 2.0);
    CHECK(diagnostics::threshold_report(3, 0.5 * mass_limit, 1.0, psi0, q).pass);
    CHECK_FALSE(diagnostics::threshold_report(3, 0.5 * mass_limit, 3.0, psi0, q).pass);
    CHECK(diagnostics::threshold_report(3, 0.5 * mass_limit, 1.0, psi0, q).psi_sign == -1);
    // Equality in the gradient condition up to round-off still passes.
    const auto eq = diagnostics::threshold_report(3, 0.5 * mass_limit, 2.0 * (1 + 1e-15), psi0, q);
    CHECK(eq.pass);
    CHECK(eq.margin == 0.0);
  }
}

TEST_CASE("grad split identity on random fields") {
  const auto g = make_grid(3, 16, 6.0);
  std::mt19937_64 rng(23);
  for (int i = 0; i < 5; ++i) {
    const VectorField e = random_fields::complex_vector(*g, rng, {5, 1.0, 1.0, false});
    CHECK(diagnostics::identity_check_grad_split(*g, e) < 1e-12);
  }
}
