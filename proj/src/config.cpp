#include "magzak/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "magzak/error.hpp"

namespace magzak {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;  // of the value
};

using Table = std::map<std::string, std::map<std::string, Entry>>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"grid", {"d", "N", "P"}},
      {"params", {"alpha", "epsilon", "s"}},
      {"integrator",
       {"scheme", "dt", "T_end", "T_win", "tol_fp", "max_iter", "max_halvings", "modified",
        "blowup_threshold", "low_frequency"}},
      {"initial",
       {"generator", "e_norm", "width", "center", "carrier", "polarization", "n_amplitude",
        "n_t_amplitude", "b_amplitude", "b_t_amplitude", "mode", "amplitude", "direction", "decay",
        "band", "path"}},
      {"output", {"dir", "diagnostics_interval", "snapshot_interval"}},
      {"run", {"seed", "threads"}},
      {"converge", {"ladder", "sample_interval"}},
      {"groundstate", {"d", "N", "P", "tol", "boundary_tol", "mass"}},
      {"inequalities",
       {"s", "samples", "p", "p1", "p2", "p3", "p4", "band", "decay", "trilinear_samples",
        "trilinear_band"}},
      {"split", {"radius"}},
  };
  return s;
}

[[noreturn]] void parse_fail(int line, int column, const std::string& msg) {
  throw Error(Errc::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Table tokenize(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = hash == std::string::npos ? raw : raw.substr(0, hash);
    const std::string t = trim(body);
    if (t.empty()) continue;
    const int first = static_cast<int>(body.find_first_not_of(" \t")) + 1;
    if (t.front() == '[') {
      if (t.back() != ']') parse_fail(line, first, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!schema().count(section)) parse_fail(line, first + 1, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) parse_fail(line, first, "expected 'key = value'");
    if (section.empty()) parse_fail(line, first, "key outside of any [section]");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) parse_fail(line, first, "missing key before '='");
    const std::string value = trim(body.substr(eq + 1));
    const auto vpos = body.find_first_not_of(" \t", eq + 1);
    const int vcol = static_cast<int>(vpos == std::string::npos ? eq + 2 : vpos + 1);
    if (!schema().at(section).count(key))
      parse_fail(line, first, "unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) parse_fail(line, vcol, "missing value for '" + key + "'");
    auto [it, fresh] = table[section].emplace(key, Entry{value, line, vcol});
    if (!fresh)
      parse_fail(line, first, "duplicate key '" + key + "' in [" + section + "] (first on line " +
                                  std::to_string(it->second.line) + ")");
  }
  return table;
}

class Reader {
 public:
  explicit Reader(const Table& t) : t_(t) {}

  const Entry* find(const std::string& sec, const std::string& key) const {
    auto s = t_.find(sec);
    if (s == t_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  template <class Fn>
  void with(const std::string& sec, const std::string& key, Fn fn) const {
    if (const Entry* e = find(sec, key)) {
      try {
        fn(*e);
      } catch (const Error& err) {
        if (err.code() == Errc::ParseError) parse_fail(e->line, e->column, err.what());
        throw;
      }
    }
  }

  void number(const std::string& sec, const std::string& key, double& out) const {
    with(sec, key, [&](const Entry& e) { out = parse_number(e.value); });
  }

  void optional_number(const std::string& sec, const std::string& key,
                       std::optional<double>& out) const {
    with(sec, key, [&](const Entry& e) { out = parse_number(e.value); });
  }

  template <class Int>
  void integer(const std::string& sec, const std::string& key, Int& out) const {
    with(sec, key, [&](const Entry& e) {
      Int v{};
      const auto* end = e.value.data() + e.value.size();
      const auto r = std::from_chars(e.value.data(), end, v);
      if (r.ec != std::errc() || r.ptr != end)
        parse_fail(e.line, e.column, "expected an integer, got '" + e.value + "'");
      out = v;
    });
  }

  void boolean(const std::string& sec, const std::string& key, bool& out) const {
    with(sec, key, [&](const Entry& e) {
      std::string v = e.value;
      std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
      if (v == "true" || v == "yes" || v == "on" || v == "1")
        out = true;
      else if (v == "false" || v == "no" || v == "off" || v == "0")
        out = false;
      else
        parse_fail(e.line, e.column, "expected a boolean, got '" + e.value + "'");
    });
  }

  void string(const std::string& sec, const std::string& key, std::string& out) const {
    with(sec, key, [&](const Entry& e) {
      out = e.value;
      if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    });
  }

  std::vector<double> list(const Entry& e) const {
    std::string v = e.value;
    if (!v.empty() && (v.front() == '(' || v.front() == '[' || v.front() == '{')) {
      const char close = v.front() == '(' ? ')' : (v.front() == '[' ? ']' : '}');
      if (v.back() != close) parse_fail(e.line, e.column, "unbalanced brackets");
      v = v.substr(1, v.size() - 2);
    }
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(trim(item)));
    return out;
  }

  void vector3(const std::string& sec, const std::string& key, std::array<double, 3>& out) const {
    with(sec, key, [&](const Entry& e) {
      const auto v = list(e);
      if (v.size() < 2 || v.size() > 3)
        parse_fail(e.line, e.column, "expected 2 or 3 components");
      out = {v[0], v[1], v.size() == 3 ? v[2] : 0.0};
    });
  }

 private:
  const Table& t_;
};

void validation(const std::string& msg) { throw Error(Errc::ValidationError, msg); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

}  // namespace

double parse_number(const std::string& raw) {
  std::string s = trim(raw);
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "inf" || lower == "infinity" || lower == "+inf") return std::numeric_limits<double>::infinity();
  double factor = 1.0;
  if (lower.size() >= 2 && lower.compare(lower.size() - 2, 2, "pi") == 0) {
    factor = 3.14159265358979323846;
    s = trim(s.substr(0, s.size() - 2));
    if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
    if (s.empty()) return factor;
    if (s == "-") return -factor;
  }
  double v = 0.0;
  const char* begin = s.data();
  if (!s.empty() && s.front() == '+') ++begin;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(begin, end, v);
  if (r.ec != std::errc() || r.ptr != end || begin == end)
    throw Error(Errc::ParseError, "expected a number, got '" + raw + "'");
  return v * factor;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  const Table table = tokenize(text);
  const Reader r(table);
  RunConfig c;

  r.integer("grid", "d", c.grid.dim);
  r.integer("grid", "N", c.grid.points);
  r.number("grid", "P", c.grid.period);

  r.number("params", "alpha", c.params.alpha);
  r.number("params", "epsilon", c.params.epsilon);
  r.number("params", "s", c.params.s);

  std::string scheme = "strang";
  r.string("integrator", "scheme", scheme);
  r.number("integrator", "dt", c.integrator.dt);
  r.number("integrator", "T_end", c.integrator.t_end);
  r.number("integrator", "T_win", c.integrator.window);
  r.number("integrator", "tol_fp", c.integrator.tol_fp);
  r.integer("integrator", "max_iter", c.integrator.max_iter);
  r.integer("integrator", "max_halvings", c.integrator.max_halvings);
  r.boolean("integrator", "modified", c.integrator.modified_mode);
  r.number("integrator", "blowup_threshold", c.integrator.blowup_threshold);
  std::string lf;
  r.string("integrator", "low_frequency", lf);

  InitialSpec& ini = c.initial;
  r.string("initial", "generator", ini.generator);
  r.number("initial", "e_norm", ini.e_norm);
  r.number("initial", "width", ini.width);
  r.with("initial", "center", [&](const Entry&) {
    std::array<double, 3> v{};
    r.vector3("initial", "center", v);
    ini.center = v;
  });
  r.vector3("initial", "carrier", ini.carrier);
  r.vector3("initial", "polarization", ini.polarization);
  r.number("initial", "n_amplitude", ini.n_amplitude);
  r.number("initial", "n_t_amplitude", ini.n_t_amplitude);
  r.number("initial", "b_amplitude", ini.b_amplitude);
  r.number("initial", "b_t_amplitude", ini.b_t_amplitude);
  r.with("initial", "mode", [&](const Entry& e) {
    const auto v = r.list(e);
    if (v.size() < 2 || v.size() > 3) parse_fail(e.line, e.column, "expected 2 or 3 components");
    for (std::size_t a = 0; a < 3; ++a) {
      const double x = a < v.size() ? v[a] : 0.0;
      if (x != std::round(x)) parse_fail(e.line, e.column, "mode indices must be integers");
      ini.mode[a] = static_cast<int>(x);
    }
  });
  r.number("initial", "amplitude", ini.amplitude);
  r.string("initial", "direction", ini.direction);
  r.number("initial", "decay", ini.decay);
  r.integer("initial", "band", ini.band);
  std::string snap;
  r.string("initial", "path", snap);

  std::string dir;
  r.string("output", "dir", dir);
  if (!dir.empty()) c.output.dir = dir;
  r.number("output", "diagnostics_interval", c.output.diagnostics_interval);
  r.number("output", "snapshot_interval", c.output.snapshot_interval);

  r.integer("run", "seed", c.seed);
  r.with("run", "threads", [&](const Entry&) {
    int t = 0;
    r.integer("run", "threads", t);
    c.threads = t;
  });

  r.with("converge", "ladder", [&](const Entry& e) { c.converge.ladder = r.list(e); });
  r.number("converge", "sample_interval", c.converge.sample_interval);

  r.integer("groundstate", "d", c.groundstate.dim);
  r.integer("groundstate", "N", c.groundstate.points);
  r.number("groundstate", "P", c.groundstate.period);
  r.number("groundstate", "tol", c.groundstate.tol);
  r.number("groundstate", "boundary_tol", c.groundstate.boundary_tol);
  r.optional_number("groundstate", "mass", c.groundstate.mass);

  auto& kp = c.inequalities.kato_ponce;
  r.number("inequalities", "s", kp.s);
  r.integer("inequalities", "samples", kp.samples);
  r.number("inequalities", "p", kp.exponents.p);
  r.number("inequalities", "p1", kp.exponents.p1);
  r.number("inequalities", "p2", kp.exponents.p2);
  r.number("inequalities", "p3", kp.exponents.p3);
  r.number("inequalities", "p4", kp.exponents.p4);
  r.integer("inequalities", "band", kp.band);
  r.number("inequalities", "decay", kp.decay);
  r.integer("inequalities", "trilinear_samples", c.inequalities.trilinear_samples);
  r.integer("inequalities", "trilinear_band", c.inequalities.trilinear_band);

  r.number("split", "radius", c.split.radius);

  // Domain validation.
  try {
    TorusGrid probe(c.grid.dim, c.grid.points, c.grid.period);
  } catch (const Error& e) {
    validation(std::string("[grid] ") + e.what());
  }
  c.params.validate(c.grid.dim);
  if (scheme == "strang")
    c.integrator.scheme = Scheme::strang;
  else if (scheme == "picard")
    c.integrator.scheme = Scheme::picard;
  else
    validation("[integrator] scheme must be 'strang' or 'picard', got '" + scheme + "'");
  if (!lf.empty()) {
    c.low_frequency = resolve(base_dir, lf);
    if (!std::filesystem::exists(c.low_frequency))
      validation("[integrator] low_frequency file not found: " + c.low_frequency.string());
  }
  {
    // modified mode without a file derives the low parts from the initial data
    IntegratorConfig probe = c.integrator;
    probe.modified_mode = false;
    probe.validate();
  }
  static const std::set<std::string> generators{"gaussian-packet", "single-mode", "random-smooth",
                                                "snapshot"};
  if (!generators.count(ini.generator))
    throw Error(Errc::UnknownGenerator, "unknown initial-data generator '" + ini.generator + "'");
  if (ini.generator == "snapshot") {
    if (snap.empty()) validation("[initial] generator 'snapshot' needs path");
    ini.snapshot = resolve(base_dir, snap);
    if (!std::filesystem::exists(ini.snapshot))
      validation("[initial] snapshot file not found: " + ini.snapshot.string());
  }
  if (!(ini.e_norm >= 0.0)) validation("[initial] e_norm must be non-negative");
  if (!(ini.width > 0.0)) validation("[initial] width must be positive");
  if (ini.direction != "transverse" && ini.direction != "longitudinal" && ini.direction != "explicit")
    validation("[initial] direction must be transverse, longitudinal or explicit");
  if (ini.band < 0 || 2 * ini.band >= c.grid.points) validation("[initial] band must be below N/2");
  if (!(c.output.diagnostics_interval >= 0.0) || !(c.output.snapshot_interval >= 0.0))
    validation("[output] intervals must be non-negative");
  for (double e : c.converge.ladder) {
    if (!(e >= 0.0 && e < 1.0)) validation("[converge] ladder entries must lie in [0, 1)");
  }
  if (!(c.converge.sample_interval >= 0.0)) validation("[converge] sample_interval must be non-negative");
  if (c.threads && *c.threads < 1) validation("[run] threads must be at least 1");
  try {
    TorusGrid probe(c.groundstate.dim, c.groundstate.points, c.groundstate.period);
  } catch (const Error& e) {
    validation(std::string("[groundstate] ") + e.what());
  }
  if (!(c.groundstate.tol > 0.0)) validation("[groundstate] tol must be positive");
  if (!(c.groundstate.boundary_tol > 0.0)) validation("[groundstate] boundary_tol must be positive");
  if (c.groundstate.mass && !(*c.groundstate.mass > 0.0)) validation("[groundstate] mass must be positive");
  if (kp.samples < 1 || c.inequalities.trilinear_samples < 1)
    validation("[inequalities] sample counts must be positive");
  if (!(c.split.radius > 0.0)) validation("[split] radius must be positive");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace magzak
