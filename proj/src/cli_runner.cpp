#include "magzak/cli_runner.hpp"

#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "magzak/config.hpp"
#include "magzak/diagnostics.hpp"
#include "magzak/error.hpp"
#include "magzak/groundstate.hpp"
#include "magzak/initial_data.hpp"
#include "magzak/integrator.hpp"
#include "magzak/snapshot.hpp"
#include "magzak/studies.hpp"

#ifndef MAGZAK_VERSION
#define MAGZAK_VERSION "v0.1.0-unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace magzak {

std::string version_string() { return MAGZAK_VERSION; }

namespace {

struct Context {
  std::string command;
  fs::path config_path;
  RunConfig config;
  fs::path out;
  std::uint64_t seed = 1;
  int threads = 1;
  bool quiet = false;
  json outputs = json::array();
  json inputs = json::array();
  json extra = json::object();

  void log(const std::string& msg) const {
    if (!quiet) std::cout << msg << '\n';
  }

  fs::path output(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::IoError, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(Errc::IoError, "failed writing " + path.string());
}

json grid_json(const GridConfig& g) { return {{"d", g.dim}, {"N", g.points}, {"P", g.period}}; }

void write_manifest(const Context& ctx, const std::string& status, const std::string& error) {
  json m;
  m["command"] = ctx.command;
  m["version"] = version_string();
  m["config"] = ctx.config_path.empty() ? "" : fs::absolute(ctx.config_path).string();
  m["inputs"] = ctx.inputs;
  m["seed"] = ctx.seed;
  m["threads"] = ctx.threads;
  m["outputs"] = ctx.outputs;
  m["status"] = status;
  if (!error.empty()) m["error"] = error;
  if (!ctx.extra.empty()) m["results"] = ctx.extra;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  std::ofstream f(ctx.out / "manifest.json");
  f << m.dump(2) << '\n';
}

GridPtr sim_grid(const RunConfig& c) {
  return make_grid(c.grid.dim, c.grid.points, c.grid.period);
}

SystemState initial_state(Context& ctx) {
  if (ctx.config.initial.generator == "snapshot")
    ctx.inputs.push_back(fs::absolute(ctx.config.initial.snapshot).string());
  return generate_initial_data(ctx.config.initial, sim_grid(ctx.config), ctx.config.params, ctx.seed);
}

IntegratorConfig integrator_config(const Context& ctx) {
  IntegratorConfig ic = ctx.config.integrator;
  ic.diagnostics_interval = ctx.config.output.diagnostics_interval;
  ic.snapshot_interval = ctx.config.output.snapshot_interval;
  return ic;
}

LowFrequencyData low_data(Context& ctx, const SystemState& st) {
  if (!ctx.config.low_frequency.empty()) {
    ctx.inputs.push_back(fs::absolute(ctx.config.low_frequency).string());
    LowFrequencyData lf = snapshot::load_low_frequency(ctx.config.low_frequency);
    if (!lf.grid->same_as(*st.grid))
      throw Error(Errc::GridMismatch, "low-frequency file grid differs from the configured grid");
    lf.grid = st.grid;
    return lf;
  }
  return studies::low_frequency_part(st, studies::CutoffSpec{ctx.config.split.radius});
}

void cmd_simulate(Context& ctx) {
  const SystemState st = initial_state(ctx);
  IntegratorConfig ic = integrator_config(ctx);
  if (ic.modified_mode) ic.low = low_data(ctx, st);

  std::ofstream diag(ctx.output("diagnostics.ndjson"));
  if (!diag) throw Error(Errc::IoError, "cannot write diagnostics");
  const fs::path snap_dir = ctx.out / "snapshots";
  int snap_count = 0;
  RunHooks hooks;
  hooks.on_diagnostics = [&](const DiagnosticsRecord& r) {
    diag << diagnostics::to_ndjson(r) << '\n';
    diag.flush();
  };
  hooks.on_snapshot = [&](const SystemState& s) {
    fs::create_directories(snap_dir);
    std::ostringstream name;
    name << "snapshots/state_" << std::setw(6) << std::setfill('0') << snap_count++ << ".mzak";
    snapshot::save_state(ctx.output(name.str()), s);
  };
  ctx.log("simulate: t_end = " + fmt(ic.t_end) + ", dt = " + fmt(ic.dt));
  const RunResult r = run(st, ic, hooks);
  snapshot::save_state(ctx.output("final.mzak"), r.final_state);
  const auto& last = r.diagnostics.back();
  ctx.extra = {{"steps", r.steps},
               {"window_halvings", r.window_halvings},
               {"final_time", r.final_state.time},
               {"drift_phi", last.drift_phi},
               {"drift_psi", last.drift_psi}};
  ctx.log("simulate: " + std::to_string(r.steps) + " steps, drift(phi) = " +
          fmt(last.drift_phi) + ", drift(psi) = " + fmt(last.drift_psi));
}

void cmd_converge(Context& ctx) {
  if (ctx.config.converge.ladder.size() < 2)
    throw Error(Errc::UsageError, "converge needs an epsilon ladder with at least two entries");
  const SystemState st = initial_state(ctx);
  const IntegratorConfig ic = integrator_config(ctx);
  ctx.log("converge: " + std::to_string(ctx.config.converge.ladder.size()) + " ladder entries");
  const auto table = studies::epsilon_convergence_study(st, ctx.config.converge.ladder, ic,
                                                        ctx.config.converge.sample_interval);
  std::ofstream csv(ctx.output("convergence.csv"));
  studies::write_convergence_csv(csv, table);
  json summary = json::parse(studies::convergence_summary_json(table));
  summary["seed"] = ctx.seed;
  summary["grid"] = grid_json(ctx.config.grid);
  write_text(ctx.output("convergence.json"), summary.dump(2) + "\n");
  ctx.extra = {{"ratios", table.ratios}};
}

GroundState solve_ground_state(const Context& ctx) {
  const auto& gc = ctx.config.groundstate;
  PetviashviliOptions opts;
  opts.boundary_tol = gc.boundary_tol;
  return petviashvili(make_grid(gc.dim, gc.points, gc.period), gc.tol, opts);
}

void cmd_groundstate(Context& ctx) {
  ctx.log("groundstate: Petviashvili iteration");
  const GroundState gs = solve_ground_state(ctx);
  snapshot::save_ground_state(ctx.output("groundstate.mzak"), gs);
  const auto sharp = sharp_inequality_check(*gs.grid, gs.q, gs.mass);
  double peak = 0.0;
  for (const auto& z : gs.grid->to_physical(gs.q)) peak = std::max(peak, z.real());
  json j{{"d", gs.grid->dim()},
         {"N", gs.grid->points()},
         {"P", gs.grid->period()},
         {"mass", gs.mass},
         {"residual", gs.residual},
         {"iterations", gs.iterations},
         {"peak", peak},
         {"K4", best_constant(gs)},
         {"sharp_ratio", sharp.ratio}};
  write_text(ctx.output("groundstate.json"), j.dump(2) + "\n");
  ctx.extra = j;
  ctx.log("groundstate: mass = " + fmt(gs.mass) + ", residual = " +
          fmt(gs.residual));
}

void cmd_inequalities(Context& ctx) {
  const GridPtr g = sim_grid(ctx.config);
  studies::KatoPonceOptions kp = ctx.config.inequalities.kato_ponce;
  kp.seed = ctx.seed;
  ctx.log("verify-inequalities: " + std::to_string(kp.samples) + " Kato-Ponce samples");
  const auto kr = studies::kato_ponce_ratio(*g, kp);
  std::ofstream kcsv(ctx.output("kato_ponce.csv"));
  studies::write_kato_ponce_csv(kcsv, kr);
  const auto tr = studies::trilinear_cancellation(*g, ctx.config.params.s,
                                                  ctx.config.inequalities.trilinear_samples, ctx.seed,
                                                  ctx.config.inequalities.trilinear_band);
  std::ofstream tcsv(ctx.output("trilinear.csv"));
  studies::write_trilinear_csv(tcsv, tr);
  json j{{"seed", ctx.seed},
         {"grid", grid_json(ctx.config.grid)},
         {"kato_ponce",
          {{"s", kp.s},
           {"samples", kp.samples},
           {"product", {{"max", kr.max_product}, {"median", kr.median_product}}},
           {"commutator", {{"max", kr.max_commutator}, {"median", kr.median_commutator}}}}},
         {"trilinear",
          {{"samples", ctx.config.inequalities.trilinear_samples},
           {"max_normalized", tr.max_normalized},
           {"max_cancellation", tr.max_cancellation},
           {"max_cross_normalized", tr.max_cross_normalized}}}};
  write_text(ctx.output("inequalities.json"), j.dump(2) + "\n");
  ctx.extra = j;
}

void cmd_split(Context& ctx) {
  const SystemState st = initial_state(ctx);
  const studies::CutoffSpec phi{ctx.config.split.radius};
  const LowFrequencyData lf = studies::low_frequency_part(st, phi);
  snapshot::save_low_frequency(ctx.output("low_frequency.mzak"), lf);
  snapshot::save_state(ctx.output("high_frequency.mzak"), to_modified(st, lf));
  const TorusGrid& g = *st.grid;
  const double s = st.params.s;
  auto check = [&](const Field& f, double r, double m) {
    const auto c = studies::split_bound_check(g, f, s + 2.0, r, m, phi);
    return json{{"low_ratio", c.low_ratio},
                {"low_constant", c.low_constant},
                {"high_ratio", c.high_ratio},
                {"high_constant", c.high_constant},
                {"holds", c.holds()}};
  };
  const int last = g.b_components().back();
  json j{{"radius", phi.radius},
         {"n_t", check(st.n_t, s - 1.0, -1.0)},
         {"B", check(st.b[last], s, -1.0)},
         {"B_t", check(st.b_t[last], s - 2.0, -2.0)}};
  write_text(ctx.output("split.json"), j.dump(2) + "\n");
  ctx.extra = j;
}

void cmd_thresholds(Context& ctx) {
  const SystemState st = initial_state(ctx);
  double q_mass = 0.0;
  if (ctx.config.groundstate.mass) {
    q_mass = *ctx.config.groundstate.mass;
  } else {
    ctx.log("thresholds: solving for the ground state");
    q_mass = solve_ground_state(ctx).mass;
  }
  const double psi0 = diagnostics::psi(st);
  const auto r = diagnostics::threshold_report(*st.grid, st.e, psi0, q_mass);
  json j{{"d", r.dim},
         {"e0_mass", r.e0_mass},
         {"grad_e0_mass", r.grad_mass},
         {"psi0", r.psi0},
         {"psi_sign", r.psi_sign},
         {"q_mass", r.q_mass},
         {"K4", r.k4},
         {"condition", r.pass},
         {"margin", std::isinf(r.margin) ? json(r.margin > 0 ? "inf" : "-inf") : json(r.margin)}};
  write_text(ctx.output("thresholds.json"), j.dump(2) + "\n");
  ctx.extra = j;
  ctx.log(std::string("thresholds: condition = ") + (r.pass ? "true" : "false"));
}

int resolve_threads(std::optional<int> flag, std::optional<int> from_config) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MAGZAK_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (...) {
    }
    throw Error(Errc::UsageError, std::string("MAGZAK_THREADS must be a positive integer, got '") + env + "'");
  }
  if (from_config) return *from_config;
  return omp_get_max_threads();
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Pseudo-spectral solver for the regularized magnetic Zakharov system", "magzak"};
  app.set_version_flag("--version", version_string());
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool quiet = false;
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  app.add_option("--seed", seed, "RNG seed (overrides [run] seed)");
  app.add_option("--threads", threads, "worker threads (fallback: MAGZAK_THREADS)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "suppress progress output");
  app.require_subcommand(1, 1);
  app.fallthrough();
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "integrate the configured initial data"},
      {"converge", "epsilon-ladder Cauchy study"},
      {"groundstate", "Petviashvili ground state and sharp constant"},
      {"verify-inequalities", "Kato-Ponce and trilinear studies"},
      {"split-data", "low/high frequency split of the initial data"},
      {"thresholds", "small-data threshold report"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  std::vector<std::string> storage{"magzak"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Context ctx;
  ctx.command = app.get_subcommands().front()->get_name();
  ctx.config_path = config_path;
  ctx.quiet = quiet;
  ctx.out = out_dir.empty() ? fs::path("out") : fs::path(out_dir);
  bool manifest_possible = !out_dir.empty();
  try {
    ctx.config = load_config(config_path);
    ctx.inputs.push_back(fs::absolute(config_path).string());
    if (out_dir.empty()) ctx.out = ctx.config.output.dir;
    manifest_possible = true;
    ctx.seed = seed.value_or(ctx.config.seed);
    ctx.threads = resolve_threads(threads, ctx.config.threads);
    omp_set_num_threads(ctx.threads);
    fs::create_directories(ctx.out);

    if (ctx.command == "simulate") cmd_simulate(ctx);
    else if (ctx.command == "converge") cmd_converge(ctx);
    else if (ctx.command == "groundstate") cmd_groundstate(ctx);
    else if (ctx.command == "verify-inequalities") cmd_inequalities(ctx);
    else if (ctx.command == "split-data") cmd_split(ctx);
    else cmd_thresholds(ctx);
    write_manifest(ctx, "ok", "");
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "magzak " << ctx.command << ": " << e.what() << '\n';
    const bool physics = is_physics_failure(e.code());
    if (manifest_possible) write_manifest(ctx, physics ? "physics-failure" : "error", e.what());
    return physics ? kExitPhysics : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "magzak " << ctx.command << ": " << e.what() << '\n';
    if (manifest_possible) write_manifest(ctx, "error", e.what());
    return kExitUsage;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace magzak
