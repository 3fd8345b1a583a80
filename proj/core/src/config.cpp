#include "obflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "obflow/certificate.hpp"

namespace obflow {

FlatConfig parse_flat_config(std::istream& is) {
  FlatConfig cfg;
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, static_cast<int>(s.size()) + 1, "expected 'key = value'");
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r");
      const auto e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, 1, "empty key");
    if (value.empty())
      throw ConfigError(lineno, static_cast<int>(eq) + 2, "empty value for key '" + key + "'");
    if (cfg.values.count(key))
      throw ConfigError(lineno, 1, "duplicate key '" + key + "'");
    cfg.values[key] = value;
    cfg.lines[key] = lineno;
  }
  return cfg;
}

namespace {

[[noreturn]] void key_error(const FlatConfig& cfg, const std::string& key,
                            const std::string& what) {
  const int line = cfg.lines.count(key) ? cfg.lines.at(key) : 0;
  throw ConfigError(line, 1, "key '" + key + "': " + what);
}

double get_double(const FlatConfig& cfg, const std::string& key, double fallback,
                  bool required = false) {
  if (!cfg.has(key)) {
    if (required) throw ConfigError(0, 0, "missing required key '" + key + "'");
    return fallback;
  }
  const std::string& v = cfg.values.at(key);
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    key_error(cfg, key, "not a number: '" + v + "'");
  }
  if (pos != v.size()) key_error(cfg, key, "trailing characters in number: '" + v + "'");
  return out;
}

int get_int(const FlatConfig& cfg, const std::string& key, int fallback) {
  if (!cfg.has(key)) return fallback;
  const std::string& v = cfg.values.at(key);
  std::size_t pos = 0;
  long out;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    key_error(cfg, key, "not an integer: '" + v + "'");
  }
  if (pos != v.size()) key_error(cfg, key, "trailing characters in integer: '" + v + "'");
  return static_cast<int>(out);
}

std::string get_string(const FlatConfig& cfg, const std::string& key, const std::string& fb) {
  return cfg.has(key) ? cfg.values.at(key) : fb;
}

std::vector<double> parse_list(const FlatConfig& cfg, const std::string& key) {
  std::vector<double> out;
  if (!cfg.has(key)) return out;
  std::string v = cfg.values.at(key);
  for (char& c : v)
    if (c == ',') c = ' ';
  std::istringstream ss(v);
  double x;
  while (ss >> x) out.push_back(x);
  if (!ss.eof()) key_error(cfg, key, "not a comma-separated list of numbers");
  return out;
}

}  // namespace

TimeGrid RunConfig::time_grid() const {
  if (!explicit_dts.empty()) return TimeGrid::from_steps(explicit_dts, time_ratio);
  return TimeGrid::uniform(t_end, steps, time_ratio);
}

Forcing RunConfig::make_forcing() const {
  Forcing f;
  if (forcing_kind == "none") return f;
  const double fx = forcing_x, fy = forcing_y;
  if (forcing_kind == "constant") {
    f.f = [fx, fy](double, Point) { return Vec2{fx, fy}; };
  } else {  // ramp: f = t * (fx, fy)
    f.f = [fx, fy](double t, Point) { return Vec2{t * fx, t * fy}; };
  }
  return f;
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "scheme = " << scheme_kind_name(scheme) << '\n';
  if (mesh_file.empty()) {
    os << "mesh.nx = " << nx << '\n' << "mesh.ny = " << ny << '\n';
  } else {
    os << "mesh.file = " << mesh_file << '\n';
  }
  os << "domain = " << format_g17(domain.x0) << ' ' << format_g17(domain.y0) << ' '
     << format_g17(domain.x1) << ' ' << format_g17(domain.y1) << '\n';
  os << "velocity = " << space_name(velocity) << '\n';
  os << "re = " << format_g17(fluid.reynolds) << '\n';
  os << "wi = " << format_g17(fluid.weissenberg) << '\n';
  os << "eps = " << format_g17(fluid.viscosity_fraction) << '\n';
  os << "alpha = " << format_g17(fluid.diffusion) << '\n';
  if (delta) os << "delta = " << format_g17(*delta) << '\n';
  if (cutoff) os << "cutoff = " << format_g17(*cutoff) << '\n';
  if (explicit_dts.empty()) {
    os << "time.t_end = " << format_g17(t_end) << '\n' << "time.steps = " << steps << '\n';
  } else {
    os << "time.dts =";
    for (double dt : explicit_dts) os << ' ' << format_g17(dt);
    os << '\n';
  }
  os << "forcing = " << forcing_kind;
  if (forcing_kind != "none") os << ' ' << format_g17(forcing_x) << ' ' << format_g17(forcing_y);
  os << '\n';
  os << "initial = "
     << (scenario.kind == Scenario::Kind::Equilibrium
             ? "equilibrium"
             : scenario.kind == Scenario::Kind::RandomSpd ? "random-spd" : "cavity")
     << '\n';
  if (scenario.kind == Scenario::Kind::RandomSpd)
    os << "initial.lambda = " << format_g17(scenario.lambda_min) << ' '
       << format_g17(scenario.lambda_max) << "\ninitial.seed = " << scenario.seed << '\n';
  os << "solver.tol = " << format_g17(solver.tol) << '\n';
  os << "solver.max_iter = " << solver.max_iter << '\n';
  os << "solver.audit_tol = " << format_g17(solver.audit_tol) << '\n';
  if (!continuation.empty()) {
    os << "continuation =";
    for (double d : continuation) os << ' ' << format_g17(d);
    os << '\n';
  }
  return os.str();
}

std::string RunConfig::hash() const {
  const std::string text = canonical();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig RunConfig::from_flat(const FlatConfig& cfg) {
  RunConfig rc;
  const std::string scheme = get_string(cfg, "scheme", "");
  if (scheme == "dg0")
    rc.scheme = SchemeKind::DG0;
  else if (scheme == "fem1")
    rc.scheme = SchemeKind::FEM1;
  else if (scheme == "fem1-unreg")
    rc.scheme = SchemeKind::FEM1_UNREG;
  else if (scheme.empty())
    throw ConfigError(0, 0, "missing required key 'scheme'");
  else
    key_error(cfg, "scheme", "must be dg0, fem1 or fem1-unreg");

  rc.mesh_file = get_string(cfg, "mesh.file", "");
  rc.nx = get_int(cfg, "mesh.nx", 8);
  rc.ny = get_int(cfg, "mesh.ny", 8);
  if (rc.mesh_file.empty() && (rc.nx < 1 || rc.ny < 1))
    key_error(cfg, cfg.has("mesh.nx") ? "mesh.nx" : "mesh.ny", "mesh subdivisions must be >= 1");
  rc.domain.x0 = get_double(cfg, "domain.x0", 0.0);
  rc.domain.y0 = get_double(cfg, "domain.y0", 0.0);
  rc.domain.x1 = get_double(cfg, "domain.x1", 1.0);
  rc.domain.y1 = get_double(cfg, "domain.y1", 1.0);

  const std::string vel = get_string(cfg, "velocity", "p2");
  if (vel == "p2")
    rc.velocity = SpaceTag::VEL_P2;
  else if (vel == "p2-reduced")
    rc.velocity = SpaceTag::VEL_P2_REDUCED;
  else if (vel == "mini")
    rc.velocity = SpaceTag::VEL_MINI;
  else
    key_error(cfg, "velocity", "must be p2, p2-reduced or mini");
  const SpaceTag pres = rc.scheme == SchemeKind::DG0 ? SpaceTag::PRES_P0 : SpaceTag::PRES_P1;
  if (!lbb_whitelisted(rc.velocity, pres))
    key_error(cfg, "velocity",
              std::string("velocity '") + vel + "' is not LBB-whitelisted with pressure '" +
                  space_name(pres) + "'");

  rc.fluid.reynolds = get_double(cfg, "re", 1.0);
  rc.fluid.weissenberg = get_double(cfg, "wi", 1.0);
  rc.fluid.viscosity_fraction = get_double(cfg, "eps", 0.5);
  rc.fluid.diffusion = get_double(cfg, "alpha", rc.scheme == SchemeKind::DG0 ? 0.0 : 0.01);
  if (!(rc.fluid.reynolds > 0.0)) key_error(cfg, "re", "Re must be positive");
  if (!(rc.fluid.weissenberg > 0.0)) key_error(cfg, "wi", "Wi must be positive");
  if (!(rc.fluid.viscosity_fraction > 0.0 && rc.fluid.viscosity_fraction < 1.0))
    key_error(cfg, "eps", "eps must lie in (0,1)");
  if (!(rc.fluid.diffusion >= 0.0)) key_error(cfg, "alpha", "alpha must be >= 0");
  if (rc.scheme == SchemeKind::DG0 && rc.fluid.diffusion != 0.0)
    key_error(cfg, "alpha", "the dg0 scheme carries no stress diffusion; set alpha = 0");

  if (cfg.has("delta")) {
    const double d = get_double(cfg, "delta", 0.0);
    if (!(d > 0.0 && d <= 0.5)) key_error(cfg, "delta", "delta must lie in (0, 1/2]");
    rc.delta = d;
  }
  if (rc.scheme == SchemeKind::FEM1_UNREG) {
    if (rc.delta) key_error(cfg, "delta", "fem1-unreg takes no delta regularization");
  } else if (!rc.delta) {
    throw ConfigError(0, 0, "missing required key 'delta' (in (0, 1/2])");
  }
  const std::string cut = get_string(cfg, "cutoff", "none");
  if (cut != "none") {
    const double l = get_double(cfg, "cutoff", 0.0);
    if (!(l >= 2.0)) key_error(cfg, "cutoff", "cutoff L must satisfy L >= 2");
    rc.cutoff = l;
  }

  rc.t_end = get_double(cfg, "time.t_end", 1.0);
  rc.steps = get_int(cfg, "time.steps", 10);
  rc.explicit_dts = parse_list(cfg, "time.dts");
  rc.time_ratio = get_double(cfg, "time.ratio", 2.0);
  if (rc.explicit_dts.empty()) {
    if (!(rc.t_end > 0.0)) key_error(cfg, "time.t_end", "t_end must be positive");
    if (rc.steps < 1) key_error(cfg, "time.steps", "steps must be >= 1");
  }
  try {
    rc.time_grid();
  } catch (const std::exception& e) {
    key_error(cfg, cfg.has("time.dts") ? "time.dts" : "time.steps", e.what());
  }

  const std::string forc = get_string(cfg, "forcing", "none");
  if (forc == "none" || forc == "constant" || forc == "ramp") {
    rc.forcing_kind = forc;
    if (forc != "none") {
      rc.forcing_x = get_double(cfg, "forcing.x", 0.0);
      rc.forcing_y = get_double(cfg, "forcing.y", 0.0);
    }
  } else {
    key_error(cfg, "forcing", "must be none, constant or ramp");
  }

  const std::string init = get_string(cfg, "initial", "equilibrium");
  if (init == "equilibrium") {
    rc.scenario.kind = Scenario::Kind::Equilibrium;
  } else if (init == "random-spd") {
    rc.scenario.kind = Scenario::Kind::RandomSpd;
    rc.scenario.lambda_min = get_double(cfg, "initial.lambda_min", 0.5);
    rc.scenario.lambda_max = get_double(cfg, "initial.lambda_max", 2.0);
    rc.scenario.seed = static_cast<std::uint64_t>(get_int(cfg, "initial.seed", 1));
    if (!(rc.scenario.lambda_min > 0.0) || !(rc.scenario.lambda_max >= rc.scenario.lambda_min))
      key_error(cfg, "initial.lambda_min", "need 0 < lambda_min <= lambda_max");
  } else if (init == "lid-driven-cavity" || init == "cavity") {
    rc.scenario.kind = Scenario::Kind::LidDrivenCavity;
  } else {
    key_error(cfg, "initial", "must be equilibrium, random-spd or lid-driven-cavity");
  }

  rc.solver.tol = get_double(cfg, "solver.tol", 1e-10);
  rc.solver.max_iter = get_int(cfg, "solver.max_iter", 200);
  rc.solver.audit_tol = get_double(cfg, "solver.audit_tol", 1e-9);
  if (!(rc.solver.tol > 0.0)) key_error(cfg, "solver.tol", "tol must be positive");
  if (rc.solver.max_iter < 1) key_error(cfg, "solver.max_iter", "max_iter must be >= 1");

  rc.continuation = parse_list(cfg, "continuation");
  for (std::size_t i = 0; i < rc.continuation.size(); ++i) {
    if (!(rc.continuation[i] > 0.0 && rc.continuation[i] <= 0.5))
      key_error(cfg, "continuation", "every delta must lie in (0, 1/2]");
    if (i > 0 && !(rc.continuation[i] < rc.continuation[i - 1]))
      key_error(cfg, "continuation", "schedule must be strictly decreasing");
  }
  if (!rc.continuation.empty() && rc.scheme == SchemeKind::FEM1_UNREG)
    key_error(cfg, "continuation", "the continuation drives the regularized schemes only");
  return rc;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  const FlatConfig flat = parse_flat_config(is);
  return from_flat(flat);
}

}  // namespace obflow
