#include "mpnsch/config.hpp"

#include <cctype>
#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mpnsch/errors.hpp"

namespace mpnsch {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& v, int line) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(x))
    throw ParseError(line, "expected a finite number, got '" + v + "'");
  return x;
}

int parse_int(const std::string& v, int line) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE ||
      x < -2147483648LL || x > 2147483647LL)
    throw ParseError(line, "expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& v, int line) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE ||
      v.find('-') != std::string::npos)
    throw ParseError(line, "expected an unsigned integer, got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ParseError(line, "expected 'true' or 'false', got '" + v + "'");
}

const char* potential_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::Logarithmic: return "logarithmic";
    case PotentialKind::KappaRegularised: return "kappa_regularised";
    case PotentialKind::Obstacle: return "obstacle";
  }
  return "logarithmic";
}

PotentialKind potential_from(const std::string& v, int line) {
  if (v == "logarithmic") return PotentialKind::Logarithmic;
  if (v == "kappa_regularised") return PotentialKind::KappaRegularised;
  if (v == "obstacle") return PotentialKind::Obstacle;
  throw ParseError(line, "unknown potential kind '" + v +
                             "' (logarithmic | kappa_regularised | obstacle)");
}

const char* wetting_name(WettingInterpolation k) {
  return k == WettingInterpolation::Affine ? "affine" : "sine";
}

WettingInterpolation wetting_from(const std::string& v, int line) {
  if (v == "affine") return WettingInterpolation::Affine;
  if (v == "sine") return WettingInterpolation::Sine;
  throw ParseError(line, "unknown wetting kind '" + v + "' (affine | sine)");
}

const char* initial_name(InitialKind k) {
  switch (k) {
    case InitialKind::Uniform: return "uniform";
    case InitialKind::Spinodal: return "spinodal";
    case InitialKind::DropletWall: return "droplet_wall";
    case InitialKind::Stripe: return "stripe";
  }
  return "uniform";
}

InitialKind initial_from(const std::string& v, int line) {
  if (v == "uniform") return InitialKind::Uniform;
  if (v == "spinodal") return InitialKind::Spinodal;
  if (v == "droplet_wall") return InitialKind::DropletWall;
  if (v == "stripe") return InitialKind::Stripe;
  throw ParseError(line, "unknown initial profile '" + v +
                             "' (uniform | spinodal | droplet_wall | stripe)");
}

}  // namespace

void RunConfig::validate() const {
  std::vector<std::string> bad;
  auto req = [&](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };
  req(grid.Lx > 0.0 && grid.Ly > 0.0, "grid lengths must be positive");
  req(grid.nx >= 4 && grid.ny >= 4, "grid needs at least 4 cells per axis");
  req(n_steps >= 0, "stepping.n_steps must be >= 0");
  req(io.snapshot_stride >= 0, "io.snapshot_stride must be >= 0");
  req(io.csv_stride >= 1, "io.csv_stride must be >= 1");
  req(!io.outdir.empty(), "io.outdir must not be empty");
  req(initial.width > 0.0, "initial.width must be positive");
  req(initial.radius > 0.0, "initial.radius must be positive");
  req(initial.amplitude >= 0.0, "initial.amplitude must be >= 0");
  if (!bad.empty()) throw ValidationError(std::move(bad));
  physics.validate();
  stepping.validate();
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  double theta = c.physics.pot.theta, theta_c = c.physics.pot.theta_c;
  double kappa = c.physics.pot.kappa;
  PotentialKind pkind = c.physics.pot.kind;
  double zeta = c.physics.bpot.zeta;
  double gamma1 = c.physics.bpot.gamma1, gamma2 = c.physics.bpot.gamma2;
  WettingInterpolation wkind = c.physics.bpot.kind;

  using Setter = std::function<void(const std::string&, int)>;
  const std::map<std::string, Setter> keys = {
      {"grid.Lx", [&](const std::string& v, int l) { c.grid.Lx = parse_double(v, l); }},
      {"grid.Ly", [&](const std::string& v, int l) { c.grid.Ly = parse_double(v, l); }},
      {"grid.nx", [&](const std::string& v, int l) { c.grid.nx = parse_int(v, l); }},
      {"grid.ny", [&](const std::string& v, int l) { c.grid.ny = parse_int(v, l); }},
      {"physics.rho1", [&](const std::string& v, int l) { c.physics.rho1 = parse_double(v, l); }},
      {"physics.rho2", [&](const std::string& v, int l) { c.physics.rho2 = parse_double(v, l); }},
      {"physics.eta1", [&](const std::string& v, int l) { c.physics.eta.f1 = parse_double(v, l); }},
      {"physics.eta2", [&](const std::string& v, int l) { c.physics.eta.f2 = parse_double(v, l); }},
      {"physics.eta_r1", [&](const std::string& v, int l) { c.physics.eta_r.f1 = parse_double(v, l); }},
      {"physics.eta_r2", [&](const std::string& v, int l) { c.physics.eta_r.f2 = parse_double(v, l); }},
      {"physics.c01", [&](const std::string& v, int l) { c.physics.c0.f1 = parse_double(v, l); }},
      {"physics.c02", [&](const std::string& v, int l) { c.physics.c0.f2 = parse_double(v, l); }},
      {"physics.cd1", [&](const std::string& v, int l) { c.physics.cd.f1 = parse_double(v, l); }},
      {"physics.cd2", [&](const std::string& v, int l) { c.physics.cd.f2 = parse_double(v, l); }},
      {"physics.ca1", [&](const std::string& v, int l) { c.physics.ca.f1 = parse_double(v, l); }},
      {"physics.ca2", [&](const std::string& v, int l) { c.physics.ca.f2 = parse_double(v, l); }},
      {"physics.mobility1", [&](const std::string& v, int l) { c.physics.mobility.f1 = parse_double(v, l); }},
      {"physics.mobility2", [&](const std::string& v, int l) { c.physics.mobility.f2 = parse_double(v, l); }},
      {"physics.sigma", [&](const std::string& v, int l) { c.physics.sigma = parse_double(v, l); }},
      {"physics.eps_reg", [&](const std::string& v, int l) { c.physics.eps_reg = parse_double(v, l); }},
      {"physics.q", [&](const std::string& v, int l) { c.physics.q = parse_double(v, l); }},
      {"physics.delta_rho", [&](const std::string& v, int l) { c.physics.delta_rho = parse_double(v, l); }},
      {"physics.body_force_x", [&](const std::string& v, int l) { c.physics.body_force_x = parse_double(v, l); }},
      {"potential.kind", [&](const std::string& v, int l) { pkind = potential_from(v, l); }},
      {"potential.theta", [&](const std::string& v, int l) { theta = parse_double(v, l); }},
      {"potential.theta_c", [&](const std::string& v, int l) { theta_c = parse_double(v, l); }},
      {"potential.kappa", [&](const std::string& v, int l) { kappa = parse_double(v, l); }},
      {"boundary.kind", [&](const std::string& v, int l) { wkind = wetting_from(v, l); }},
      {"boundary.zeta", [&](const std::string& v, int l) { zeta = parse_double(v, l); }},
      {"boundary.gamma1", [&](const std::string& v, int l) { gamma1 = parse_double(v, l); }},
      {"boundary.gamma2", [&](const std::string& v, int l) { gamma2 = parse_double(v, l); }},
      {"stepping.h", [&](const std::string& v, int l) { c.physics.h = parse_double(v, l); }},
      {"stepping.n_steps", [&](const std::string& v, int l) { c.n_steps = parse_int(v, l); }},
      {"stepping.picard_tol", [&](const std::string& v, int l) { c.stepping.picard_tol = parse_double(v, l); }},
      {"stepping.picard_max", [&](const std::string& v, int l) { c.stepping.picard_max = parse_int(v, l); }},
      {"stepping.newton_tol", [&](const std::string& v, int l) { c.stepping.newton_tol = parse_double(v, l); }},
      {"stepping.newton_max", [&](const std::string& v, int l) { c.stepping.newton_max = parse_int(v, l); }},
      {"stepping.under_relaxation", [&](const std::string& v, int l) { c.stepping.under_relaxation = parse_double(v, l); }},
      {"stepping.enable_q_regulariser", [&](const std::string& v, int l) { c.stepping.enable_q_regulariser = parse_bool(v, l); }},
      {"stepping.enable_sigma_regulariser", [&](const std::string& v, int l) { c.stepping.enable_sigma_regulariser = parse_bool(v, l); }},
      {"stepping.freeze_boundary_data", [&](const std::string& v, int l) { c.stepping.freeze_boundary_data = parse_bool(v, l); }},
      {"stepping.solve_omega", [&](const std::string& v, int l) { c.stepping.solve_omega = parse_bool(v, l); }},
      {"io.outdir", [&](const std::string& v, int l) {
         if (v.empty()) throw ParseError(l, "io.outdir must not be empty");
         c.io.outdir = v;
       }},
      {"io.snapshot_stride", [&](const std::string& v, int l) { c.io.snapshot_stride = parse_int(v, l); }},
      {"io.csv_stride", [&](const std::string& v, int l) { c.io.csv_stride = parse_int(v, l); }},
      {"initial.kind", [&](const std::string& v, int l) { c.initial.kind = initial_from(v, l); }},
      {"initial.value", [&](const std::string& v, int l) { c.initial.value = parse_double(v, l); }},
      {"initial.amplitude", [&](const std::string& v, int l) { c.initial.amplitude = parse_double(v, l); }},
      {"initial.seed", [&](const std::string& v, int l) { c.initial.seed = parse_u64(v, l); }},
      {"initial.radius", [&](const std::string& v, int l) { c.initial.radius = parse_double(v, l); }},
      {"initial.center_x", [&](const std::string& v, int l) { c.initial.center_x = parse_double(v, l); }},
      {"initial.width", [&](const std::string& v, int l) { c.initial.width = parse_double(v, l); }},
  };

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError(line, "expected 'section.key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError(line, "missing key before '='");
    const auto it = keys.find(key);
    if (it == keys.end()) throw ParseError(line, "unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ParseError(line, "duplicate key '" + key + "'");
    it->second(value, line);
  }

  switch (pkind) {
    case PotentialKind::Logarithmic:
      c.physics.pot = SplitPotential::logarithmic(theta, theta_c);
      break;
    case PotentialKind::KappaRegularised:
      c.physics.pot = SplitPotential::kappa_regularised(theta, theta_c, kappa);
      break;
    case PotentialKind::Obstacle:
      c.physics.pot = SplitPotential::obstacle(theta_c);
      c.physics.pot.theta = theta;  // kept for sweep reference temperatures
      break;
  }
  c.physics.pot.kappa = kappa;
  c.physics.kappa = kappa;
  c.physics.bpot = wkind == WettingInterpolation::Affine
                       ? BoundaryPotential::affine(gamma1, gamma2, zeta)
                       : BoundaryPotential::sine(gamma1, gamma2, zeta);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const RunConfig& c) {
  std::ostringstream o;
  auto put = [&](const char* key, const std::string& value) {
    o << key << " = " << value << "\n";
  };
  auto putd = [&](const char* key, double v) { put(key, fmt(v)); };
  auto puti = [&](const char* key, long long v) {
    put(key, std::to_string(v));
  };
  auto putb = [&](const char* key, bool v) { put(key, v ? "true" : "false"); };

  putd("grid.Lx", c.grid.Lx);
  putd("grid.Ly", c.grid.Ly);
  puti("grid.nx", c.grid.nx);
  puti("grid.ny", c.grid.ny);
  o << "\n";
  putd("physics.rho1", c.physics.rho1);
  putd("physics.rho2", c.physics.rho2);
  putd("physics.eta1", c.physics.eta.f1);
  putd("physics.eta2", c.physics.eta.f2);
  putd("physics.eta_r1", c.physics.eta_r.f1);
  putd("physics.eta_r2", c.physics.eta_r.f2);
  putd("physics.c01", c.physics.c0.f1);
  putd("physics.c02", c.physics.c0.f2);
  putd("physics.cd1", c.physics.cd.f1);
  putd("physics.cd2", c.physics.cd.f2);
  putd("physics.ca1", c.physics.ca.f1);
  putd("physics.ca2", c.physics.ca.f2);
  putd("physics.mobility1", c.physics.mobility.f1);
  putd("physics.mobility2", c.physics.mobility.f2);
  putd("physics.sigma", c.physics.sigma);
  putd("physics.eps_reg", c.physics.eps_reg);
  putd("physics.q", c.physics.q);
  putd("physics.delta_rho", c.physics.delta_rho);
  putd("physics.body_force_x", c.physics.body_force_x);
  o << "\n";
  put("potential.kind", potential_name(c.physics.pot.kind));
  putd("potential.theta", c.physics.pot.theta);
  putd("potential.theta_c", c.physics.pot.theta_c);
  putd("potential.kappa", c.physics.pot.kappa);
  o << "\n";
  put("boundary.kind", wetting_name(c.physics.bpot.kind));
  putd("boundary.zeta", c.physics.bpot.zeta);
  putd("boundary.gamma1", c.physics.bpot.gamma1);
  putd("boundary.gamma2", c.physics.bpot.gamma2);
  o << "\n";
  putd("stepping.h", c.physics.h);
  puti("stepping.n_steps", c.n_steps);
  putd("stepping.picard_tol", c.stepping.picard_tol);
  puti("stepping.picard_max", c.stepping.picard_max);
  putd("stepping.newton_tol", c.stepping.newton_tol);
  puti("stepping.newton_max", c.stepping.newton_max);
  putd("stepping.under_relaxation", c.stepping.under_relaxation);
  putb("stepping.enable_q_regulariser", c.stepping.enable_q_regulariser);
  putb("stepping.enable_sigma_regulariser",
       c.stepping.enable_sigma_regulariser);
  putb("stepping.freeze_boundary_data", c.stepping.freeze_boundary_data);
  putb("stepping.solve_omega", c.stepping.solve_omega);
  o << "\n";
  put("io.outdir", c.io.outdir);
  puti("io.snapshot_stride", c.io.snapshot_stride);
  puti("io.csv_stride", c.io.csv_stride);
  o << "\n";
  put("initial.kind", initial_name(c.initial.kind));
  putd("initial.value", c.initial.value);
  putd("initial.amplitude", c.initial.amplitude);
  o << "initial.seed = " << c.initial.seed << "\n";
  putd("initial.radius", c.initial.radius);
  putd("initial.center_x", c.initial.center_x);
  putd("initial.width", c.initial.width);
  return o.str();
}

MixtureState make_initial_state(const Grid& g, const RunConfig& c) {
  MixtureState s = MixtureState::make(g);
  const InitialCondition& ic = c.initial;

  // Analytic phase profile; the wall traces sample the same function, so the
  // initial state carries a consistent ghost closure.
  auto periodic_dist = [&](double x, double x0) {
    double d = std::abs(x - x0);
    return std::min(d, g.Lx - d);
  };
  std::function<double(double, double)> profile;
  switch (ic.kind) {
    case InitialKind::Uniform:
      profile = [&](double, double) { return ic.value; };
      break;
    case InitialKind::Spinodal:
      profile = nullptr;  // noise; handled below
      break;
    case InitialKind::DropletWall:
      profile = [&](double x, double y) {
        const double r = std::hypot(periodic_dist(x, ic.center_x), y);
        return std::tanh((ic.radius - r) / (std::sqrt(2.0) * ic.width));
      };
      break;
    case InitialKind::Stripe:
      profile = [&](double x, double) {
        const double d = periodic_dist(x, ic.center_x);
        return std::tanh((ic.radius - d) / (std::sqrt(2.0) * ic.width));
      };
      break;
  }

  if (ic.kind == InitialKind::Spinodal) {
    std::mt19937_64 rng(ic.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int jc = 0; jc < g.ny; ++jc)
      for (int i = 0; i < g.nx; ++i)
        s.phi[g.cell(i, jc)] = ic.value + ic.amplitude * unif(rng);
    // Traces copy the adjacent cell (zero initial normal derivative).
    for (int i = 0; i < g.nx; ++i) {
      s.psi_bottom[i] = s.phi[g.cell(i, 0)];
      s.psi_top[i] = s.phi[g.cell(i, g.ny - 1)];
    }
  } else {
    for (int jc = 0; jc < g.ny; ++jc)
      for (int i = 0; i < g.nx; ++i)
        s.phi[g.cell(i, jc)] = profile(g.x_cell(i), g.y_cell(jc));
    for (int i = 0; i < g.nx; ++i) {
      s.psi_bottom[i] = profile(g.x_bnode(i), 0.0);
      s.psi_top[i] = profile(g.x_bnode(i), g.Ly);
    }
  }

  double mean = 0.0;
  for (int cidx = 0; cidx < g.cells(); ++cidx) mean += s.phi[cidx];
  mean /= g.cells();
  if (!(mean > -1.0 && mean < 1.0))
    throw ValidationError({"initial mean phase " + fmt(mean) +
                           " must lie strictly inside (-1, 1)"});
  return s;
}

}  // namespace mpnsch
