#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "helpers.hpp"
#include "magzak/cli_runner.hpp"
#include "magzak/config.hpp"
#include "magzak/error.hpp"
#include "magzak/groundstate.hpp"
#include "magzak/initial_data.hpp"
#include "magzak/snapshot.hpp"
#include "nlohmann/json.hpp"

using namespace magzak;
using testing::kPi;
namespace fs = std::filesystem;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no magzak::Error thrown");
  return Errc::UsageError;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("magzak_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.ini";
  std::ofstream(p) << text;
  return p;
}

const char* kSmallRun = R"(
[grid]
d = 2
N = 16
P = 4pi
[params]
epsilon = 0.1
[integrator]
dt = 0.01
T_end = 0.05
[initial]
generator = random-smooth
band = 4
n_amplitude = 0.05
)";

}  // namespace

TEST_CASE("config defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.grid.dim == 2);
  CHECK(c.grid.points == 64);
  CHECK(c.grid.period == doctest::Approx(16.0 * kPi));
  CHECK(c.params.alpha == 1.0);
  CHECK(c.integrator.scheme == Scheme::strang);
  CHECK(c.integrator.dt == 1e-3);
  CHECK(c.initial.generator == "gaussian-packet");
  CHECK(c.converge.ladder == std::vector<double>{0.2, 0.1, 0.05, 0.025});
  CHECK(c.groundstate.points == 512);
  CHECK(c.seed == 1);
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(R"(
# comment
[grid]
d = 3      # trailing comment
N = 32
P = 2*pi
[integrator]
scheme = picard
T_win = 0.1
[initial]
generator = single-mode
mode = 1, 2, 0
[inequalities]
p1 = inf
p4 = inf
[converge]
ladder = 0.4, 0.2
)");
  CHECK(c.grid.dim == 3);
  CHECK(c.grid.period == doctest::Approx(2.0 * kPi));
  CHECK(c.integrator.scheme == Scheme::picard);
  CHECK(c.integrator.window == 0.1);
  CHECK(c.initial.mode == std::array<int, 3>{1, 2, 0});
  CHECK(std::isinf(c.inequalities.kato_ponce.exponents.p1));
  CHECK(c.converge.ladder.size() == 2);
  CHECK(parse_number("16pi") == doctest::Approx(16.0 * kPi));
  CHECK(parse_number("pi") == doctest::Approx(kPi));
  CHECK(parse_number("-2.5e-1") == -0.25);
}

TEST_CASE("config errors") {
  SUBCASE("alpha below one") {
    try {
      parse_config("[params]\nalpha = 0.5\n");
      FAIL("expected ValidationError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ValidationError);
      CHECK(std::string(e.what()).find("α ≥ 1") != std::string::npos);
    }
  }
  SUBCASE("duplicate key") {
    CHECK(code_of([] { parse_config("[grid]\nN = 32\nN = 64\n"); }) == Errc::ParseError);
  }
  SUBCASE("location in the message") {
    try {
      parse_config("[grid]\nN = x32\n");
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ParseError);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("unknown key and section") {
    CHECK(code_of([] { parse_config("[grid]\nM = 3\n"); }) == Errc::ParseError);
    CHECK(code_of([] { parse_config("[nope]\n"); }) == Errc::ParseError);
  }
  SUBCASE("domain checks") {
    CHECK(code_of([] { parse_config("[grid]\nN = 15\n"); }) == Errc::ValidationError);
    CHECK(code_of([] { parse_config("[grid]\nd = 4\n"); }) == Errc::ValidationError);
  }
  SUBCASE("missing file") {
    CHECK(code_of([] { load_config("/nonexistent/run.ini"); }) == Errc::IoError);
  }
}

TEST_CASE("initial data generators") {
  const auto g = make_grid(2, 16, 2.0 * kPi);
  const Params p{1.0, 0.1, 2.0};
  SUBCASE("single transverse mode") {
    InitialSpec spec;
    spec.generator = "single-mode";
    spec.mode = {1, 0, 0};
    spec.amplitude = 0.1;
    const SystemState st = generate_initial_data(spec, g, p, 1);
    const auto i = g->index_of({1, 0, 0});
    CHECK(std::abs(st.e[0][i]) < 1e-16);
    CHECK(st.e[1][i].real() == doctest::Approx(0.1));
    double rest = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j)
      if (j != i) rest += std::abs(st.e[1][j]) + std::abs(st.n[j]) + std::abs(st.b[2][j]);
    CHECK(rest == 0.0);
    spec.mode = {7, 0, 0};
    CHECK(code_of([&] { generate_initial_data(spec, g, p, 1); }) == Errc::ValidationError);
  }
  SUBCASE("gaussian packet has the requested mass") {
    InitialSpec spec;
    spec.e_norm = 0.3;
    spec.width = 1.0;
    const SystemState st = generate_initial_data(spec, g, p, 1);
    CHECK(sobolev_norm(*g, st.e, 0.0, NormFlavor::inhomogeneous) == doctest::Approx(0.3));
  }
  SUBCASE("random-smooth is deterministic and grid converged") {
    InitialSpec spec;
    spec.generator = "random-smooth";
    spec.decay = 4.0;
    spec.band = 4;
    spec.n_amplitude = 0.1;
    const SystemState a = generate_initial_data(spec, g, p, 7);
    const SystemState b = generate_initial_data(spec, g, p, 7);
    CHECK(testing::max_abs_diff(a.e, b.e) == 0.0);
    CHECK(testing::max_abs_diff(a.n, b.n) == 0.0);
    const SystemState c = generate_initial_data(spec, g, p, 8);
    CHECK(testing::max_abs_diff(a.e, c.e) > 0.0);
    const auto g2 = make_grid(2, 32, 2.0 * kPi);
    const SystemState fine = generate_initial_data(spec, g2, p, 7);
    const double h1 = sobolev_norm(*g, a.e, 3.0, NormFlavor::inhomogeneous);
    const double h2 = sobolev_norm(*g2, fine.e, 3.0, NormFlavor::inhomogeneous);
    CHECK(std::isfinite(h1));
    CHECK(std::abs(h1 - h2) < 0.01 * h2);
  }
  SUBCASE("unknown generator") {
    InitialSpec spec;
    spec.generator = "tophat";
    CHECK(code_of([&] { generate_initial_data(spec, g, p, 1); }) == Errc::UnknownGenerator);
  }
}

TEST_CASE("snapshots") {
  const fs::path dir = scratch("snap");
  const auto g = make_grid(2, 16, 7.0);
  SystemState st = testing::random_state(g, 61);
  st.time = 1.25;
  SUBCASE("state round trip is bit exact") {
    snapshot::save_state(dir / "s.mzak", st);
    const SystemState back = snapshot::load_state(dir / "s.mzak");
    CHECK(back.time == st.time);
    CHECK(back.params.epsilon == st.params.epsilon);
    CHECK(testing::max_abs_diff(back.e, st.e) == 0.0);
    CHECK(testing::max_abs_diff(back.b_t, st.b_t) == 0.0);
    // And the generator reads it back on the same grid.
    InitialSpec spec;
    spec.generator = "snapshot";
    spec.snapshot = dir / "s.mzak";
    const SystemState gen = generate_initial_data(spec, g, st.params, 1);
    CHECK(testing::max_abs_diff(gen.n, st.n) == 0.0);
    CHECK(code_of([&] { generate_initial_data(spec, make_grid(2, 32, 7.0), st.params, 1); }) ==
          Errc::GridMismatch);
  }
  SUBCASE("bad magic and wrong record") {
    std::ofstream(dir / "bad.mzak") << "NOTASNAPSHOT";
    CHECK(code_of([&] { snapshot::load_state(dir / "bad.mzak"); }) == Errc::SnapshotVersionMismatch);
    snapshot::save_state(dir / "s.mzak", st);
    CHECK(code_of([&] { snapshot::load_ground_state(dir / "s.mzak"); }) ==
          Errc::SnapshotVersionMismatch);
  }
  SUBCASE("truncated file") {
    snapshot::save_state(dir / "s.mzak", st);
    const std::string bytes = slurp(dir / "s.mzak");
    std::ofstream(dir / "t.mzak", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
    CHECK(code_of([&] { snapshot::load_state(dir / "t.mzak"); }) == Errc::IoError);
  }
  SUBCASE("low-frequency and ground-state records") {
    LowFrequencyData lf = LowFrequencyData::zeros(g);
    lf.n1 = st.n_t;
    lf.b0 = st.b;
    snapshot::save_low_frequency(dir / "lf.mzak", lf);
    const LowFrequencyData back = snapshot::load_low_frequency(dir / "lf.mzak");
    CHECK(testing::max_abs_diff(back.n1, lf.n1) == 0.0);
    CHECK(testing::max_abs_diff(back.b0, lf.b0) == 0.0);
    GroundState gs;
    gs.grid = g;
    gs.q = st.n;
    gs.mass = 3.5;
    gs.tol = 1e-9;
    gs.residual = 1e-10;
    snapshot::save_ground_state(dir / "gs.mzak", gs);
    const GroundState gb = snapshot::load_ground_state(dir / "gs.mzak");
    CHECK(gb.mass == 3.5);
    CHECK(testing::max_abs_diff(gb.q, gs.q) == 0.0);
  }
  CHECK(code_of([&] { snapshot::load_state(dir / "missing.mzak"); }) == Errc::IoError);
}

TEST_CASE("cli") {
  const fs::path dir = scratch("cli");
  SUBCASE("simulate with T_end = 0") {
    const fs::path cfg = write_config(dir, std::string(kSmallRun) + "[output]\ndir = " +
                                               (dir / "zero").string() + "\n");
    const std::string text = slurp(cfg);
    std::ofstream(cfg) << std::regex_replace(text, std::regex("T_end = 0.05"), "T_end = 0");
    CHECK(run_cli({"simulate", "--config", cfg.string(), "--quiet"}) == kExitOk);
    const std::string nd = slurp(dir / "zero" / "diagnostics.ndjson");
    CHECK(std::count(nd.begin(), nd.end(), '\n') == 1);
    const auto manifest = nlohmann::json::parse(slurp(dir / "zero" / "manifest.json"));
    CHECK(manifest["status"] == "ok");
    CHECK(manifest["command"] == "simulate");
    CHECK(fs::exists(dir / "zero" / "final.mzak"));
  }
  SUBCASE("simulate is byte reproducible") {
    const fs::path cfg = write_config(dir, kSmallRun);
    CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "a").string(), "--quiet"}) == kExitOk);
    CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "b").string(), "--quiet"}) == kExitOk);
    const std::string a = slurp(dir / "a" / "diagnostics.ndjson");
    CHECK(std::count(a.begin(), a.end(), '\n') == 6);
    CHECK(a == slurp(dir / "b" / "diagnostics.ndjson"));
  }
  SUBCASE("converge with one ladder entry is a usage error") {
    const fs::path cfg = write_config(dir, std::string(kSmallRun) + "[converge]\nladder = 0.1\n");
    CHECK(run_cli({"converge", "--config", cfg.string(), "--out", (dir / "c").string(), "--quiet"}) == kExitUsage);
    const auto manifest = nlohmann::json::parse(slurp(dir / "c" / "manifest.json"));
    CHECK(manifest["status"] == "error");
  }
  SUBCASE("thresholds report a violated condition without failing") {
    const fs::path cfg = write_config(dir, R"(
[grid]
N = 32
P = 8pi
[initial]
generator = gaussian-packet
e_norm = 3
[groundstate]
mass = 11.7008965
)");
    CHECK(run_cli({"thresholds", "--config", cfg.string(), "--out", (dir / "t").string(), "--quiet"}) == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "t" / "thresholds.json"));
    CHECK(j["condition"] == false);
    CHECK(j["margin"].get<double>() < 0.0);
  }
  SUBCASE("physics failure exits with 2 and still writes a manifest") {
    const fs::path cfg = write_config(dir, std::string(kSmallRun) + "[output]\ndir = " +
                                               (dir / "blow").string() + "\n");
    const std::string text = slurp(cfg);
    std::ofstream(cfg) << std::regex_replace(text, std::regex("\\[integrator\\]"),
                                             "[integrator]\nblowup_threshold = 1e-9");
    CHECK(run_cli({"simulate", "--config", cfg.string(), "--quiet"}) == kExitPhysics);
    const auto manifest = nlohmann::json::parse(slurp(dir / "blow" / "manifest.json"));
    CHECK(manifest["status"] == "physics-failure");
  }
  SUBCASE("usage errors") {
    CHECK(run_cli({"simulate"}) == kExitUsage);
    CHECK(run_cli({"--config", "x.ini"}) == kExitUsage);
    CHECK(run_cli({"simulate", "--config", (dir / "none.ini").string(), "--out", (dir / "u").string()}) == kExitUsage);
    CHECK(run_cli({"simulate", "--config", "x.ini", "--threads", "0"}) == kExitUsage);
  }
  CHECK(!version_string().empty());
}
