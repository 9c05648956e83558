#include "spray/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "spray/errors.hpp"

namespace spray {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& where, const std::string& key, const char* what) {
  throw config_error("config: " + (where.empty() ? key : where + "." + key) + ": " + what);
}

void expect_keys(const json& j, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw config_error("config: " + (where.empty() ? "root" : where) + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) bad_key(where, item.key(), "unknown key");
  }
}

void read_double(const json& j, const std::string& where, const char* key, double& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number()) bad_key(where, key, "expected a number");
  out = v.get<double>();
}

void read_int(const json& j, const std::string& where, const char* key, int& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer()) bad_key(where, key, "expected an integer");
  out = v.get<int>();
}

void read_string(const json& j, const std::string& where, const char* key, std::string& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_string()) bad_key(where, key, "expected a string");
  out = v.get<std::string>();
}

void read_vec2(const json& j, const std::string& where, const char* key, Vec2& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    bad_key(where, key, "expected [x, y]");
  out = Vec2{v[0].get<double>(), v[1].get<double>()};
}

void read_omega(const json& j, OmegaPreset& p) {
  expect_keys(j, "omega",
              {"kind", "amplitude", "sigma", "center", "separation", "radius", "circulation"});
  read_string(j, "omega", "kind", p.kind);
  read_double(j, "omega", "amplitude", p.amplitude);
  read_double(j, "omega", "sigma", p.sigma);
  read_vec2(j, "omega", "center", p.center);
  read_double(j, "omega", "separation", p.separation);
  read_double(j, "omega", "radius", p.radius);
  read_double(j, "omega", "circulation", p.circulation);
}

void read_spray(const json& j, SprayPreset& p) {
  expect_keys(j, "spray", {"kind", "sigma", "center", "xi_scale", "xi_const"});
  read_string(j, "spray", "kind", p.kind);
  read_double(j, "spray", "sigma", p.sigma);
  read_vec2(j, "spray", "center", p.center);
  read_double(j, "spray", "xi_scale", p.xi_scale);
  read_vec2(j, "spray", "xi_const", p.xi_const);
}

void read_field(const json& j, FieldPreset& p) {
  expect_keys(j, "v0", {"kind", "omega", "amplitude", "sigma", "c"});
  read_string(j, "v0", "kind", p.kind);
  read_double(j, "v0", "omega", p.omega);
  read_double(j, "v0", "amplitude", p.amplitude);
  read_double(j, "v0", "sigma", p.sigma);
  read_vec2(j, "v0", "c", p.c);
}

void require(bool ok, const char* msg) {
  if (!ok) throw config_error(std::string("config: ") + msg);
}

bool one_of(const std::string& s, std::initializer_list<const char*> set) {
  for (const char* k : set)
    if (s == k) return true;
  return false;
}

void validate(const SimConfig& c) {
  require(std::isfinite(c.delta) && c.delta > 0.0, "delta must be positive");
  require(std::isfinite(c.epsilon) && c.epsilon > 0.0, "epsilon must be positive");
  require(std::isfinite(c.dt) && c.dt > 0.0, "dt must be positive");
  require(std::isfinite(c.T) && c.T >= 0.0, "T must be non-negative");
  require(c.n_vortex >= 0, "n_vortex must be non-negative");
  require(c.n_spray >= 0, "n_spray must be non-negative");
  require(one_of(c.scheme, {"auto", "rk4", "split"}), "scheme must be auto, rk4 or split");
  require(c.cadence >= 1, "cadence must be >= 1");
  require(c.n_seeds >= 1, "n_seeds must be >= 1");
  require(std::isfinite(c.eta) && c.eta >= 0.0, "eta must be non-negative");
  require(!c.n_grid.empty(), "n_grid must be non-empty");
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
    require(c.n_grid[i] >= 1, "n_grid entries must be positive");
    if (i > 0) require(c.n_grid[i] > c.n_grid[i - 1], "n_grid must be strictly increasing");
  }
  require(!c.eps_grid.empty(), "eps_grid must be non-empty");
  for (std::size_t i = 0; i < c.eps_grid.size(); ++i) {
    require(std::isfinite(c.eps_grid[i]) && c.eps_grid[i] > 0.0,
            "eps_grid entries must be positive");
    if (i > 0)
      require(c.eps_grid[i] < c.eps_grid[i - 1], "eps_grid must be strictly decreasing");
  }
  require(c.metric_rows >= 1, "metric_rows must be >= 1");
  require(std::isfinite(c.hydro_radius) && c.hydro_radius > 0.0, "hydro_radius must be positive");
  require(std::isfinite(c.hydro_floor) && c.hydro_floor >= 0.0,
          "hydro_floor must be non-negative");
  require(c.window.lo.x < c.window.hi.x && c.window.lo.y < c.window.hi.y,
          "window must have positive extent");
  require(c.ref_quad_resolution >= 1, "ref_quad_resolution must be >= 1");
  require(one_of(c.omega.kind, {"gaussian", "dipole", "ring", "none"}),
          "omega.kind must be gaussian, dipole, ring or none");
  require(std::isfinite(c.omega.sigma) && c.omega.sigma > 0.0, "omega.sigma must be positive");
  require(std::isfinite(c.omega.radius) && c.omega.radius > 0.0, "omega.radius must be positive");
  require(std::isfinite(c.omega.amplitude), "omega.amplitude must be finite");
  require(std::isfinite(c.omega.separation) && c.omega.separation > 0.0,
          "omega.separation must be positive");
  require(std::isfinite(c.omega.circulation), "omega.circulation must be finite");
  require(one_of(c.spray.kind, {"gaussian", "monokinetic", "constant", "none"}),
          "spray.kind must be gaussian, monokinetic, constant or none");
  require(std::isfinite(c.spray.sigma) && c.spray.sigma > 0.0, "spray.sigma must be positive");
  require(std::isfinite(c.spray.xi_scale), "spray.xi_scale must be finite");
  require(finite(c.spray.xi_const), "spray.xi_const must be finite");
  require(one_of(c.v0.kind, {"rigid", "blob", "constant", "zero"}),
          "v0.kind must be rigid, blob, constant or zero");
  require(std::isfinite(c.v0.omega), "v0.omega must be finite");
  require(std::isfinite(c.v0.amplitude), "v0.amplitude must be finite");
  require(std::isfinite(c.v0.sigma) && c.v0.sigma > 0.0, "v0.sigma must be positive");
  require(finite(c.v0.c), "v0.c must be finite");
}

}  // namespace

SimConfig default_config(const std::string& scenario) {
  SimConfig c;
  c.scenario = scenario;
  if (scenario == "simulate") {
  } else if (scenario == "meanfield") {
    c.dt = 2e-3;
    c.n_vortex = 64;
    c.n_spray = 64;
    c.spray.xi_scale = 0.3;
  } else if (scenario == "stability") {
    c.omega.kind = "ring";
    c.omega.circulation = 1.0;
    c.omega.radius = 1.0;
    c.spray.xi_scale = 0.3;
  } else if (scenario == "hydro") {
    c.T = 0.5;
    c.n_vortex = 16;
    c.n_spray = 64;
    c.omega.amplitude = 0.25;
    c.omega.sigma = 0.75;
    c.spray.kind = "monokinetic";
    c.v0.kind = "rigid";
    c.v0.omega = 0.5;
  } else if (scenario == "conservation") {
    c.T = 5.0;
    c.scheme = "rk4";
    c.omega.kind = "ring";
    c.omega.circulation = 64.0;
    c.omega.radius = 0.7;
    c.epsilon = 0.5;
    c.spray.sigma = 0.4;
    c.spray.xi_scale = 1.0;
  } else if (scenario == "massless") {
    c.scheme = "split";
    c.n_vortex = 64;
    c.n_spray = 64;
  } else {
    throw config_error("config: unknown scenario '" + scenario + "'");
  }
  return c;
}

SimConfig parse_config(const nlohmann::json& j) {
  std::string scenario = "simulate";
  if (j.contains("scenario")) {
    if (!j.at("scenario").is_string()) throw config_error("config: scenario must be a string");
    scenario = j.at("scenario").get<std::string>();
  }
  SimConfig c = default_config(scenario);

  expect_keys(j, "",
              {"scenario", "delta", "epsilon", "dt", "T", "n_vortex", "n_spray", "scheme", "seed",
               "cadence", "n_seeds", "eta", "n_grid", "eps_grid", "metric_rows", "hydro_radius",
               "hydro_floor", "window", "ref_quad_resolution", "omega", "spray", "v0", "out_dir"});

  read_double(j, "", "delta", c.delta);
  read_double(j, "", "epsilon", c.epsilon);
  read_double(j, "", "dt", c.dt);
  read_double(j, "", "T", c.T);
  read_int(j, "", "n_vortex", c.n_vortex);
  read_int(j, "", "n_spray", c.n_spray);
  read_string(j, "", "scheme", c.scheme);
  if (j.contains("seed")) {
    const json& v = j.at("seed");
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<std::int64_t>() < 0))
      throw config_error("config: seed must be a non-negative integer");
    c.seed = v.get<std::uint64_t>();
  }
  read_int(j, "", "cadence", c.cadence);
  read_int(j, "", "n_seeds", c.n_seeds);
  read_double(j, "", "eta", c.eta);
  if (j.contains("n_grid")) {
    const json& v = j.at("n_grid");
    if (!v.is_array()) throw config_error("config: n_grid must be an array of integers");
    c.n_grid.clear();
    for (const json& e : v) {
      if (!e.is_number_integer()) throw config_error("config: n_grid must be an array of integers");
      c.n_grid.push_back(e.get<int>());
    }
  }
  if (j.contains("eps_grid")) {
    const json& v = j.at("eps_grid");
    if (!v.is_array()) throw config_error("config: eps_grid must be an array of numbers");
    c.eps_grid.clear();
    for (const json& e : v) {
      if (!e.is_number()) throw config_error("config: eps_grid must be an array of numbers");
      c.eps_grid.push_back(e.get<double>());
    }
  }
  read_int(j, "", "metric_rows", c.metric_rows);
  read_double(j, "", "hydro_radius", c.hydro_radius);
  read_double(j, "", "hydro_floor", c.hydro_floor);
  if (j.contains("window")) {
    const json& v = j.at("window");
    if (!v.is_array() || v.size() != 4) throw config_error("config: window must be [x0, y0, x1, y1]");
    for (const json& e : v)
      if (!e.is_number()) throw config_error("config: window must be [x0, y0, x1, y1]");
    c.window.lo = Vec2{v[0].get<double>(), v[1].get<double>()};
    c.window.hi = Vec2{v[2].get<double>(), v[3].get<double>()};
  }
  read_int(j, "", "ref_quad_resolution", c.ref_quad_resolution);
  if (j.contains("omega")) read_omega(j.at("omega"), c.omega);
  if (j.contains("spray")) read_spray(j.at("spray"), c.spray);
  if (j.contains("v0")) read_field(j.at("v0"), c.v0);
  read_string(j, "", "out_dir", c.out_dir);

  validate(c);
  return c;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config: parse failure in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw config_error("config: override must look like key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;  // bare words are strings
  }

  nlohmann::json* cur = &j;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw config_error("config: bad override path '" + path + "'");
    if (dot == std::string::npos) {
      (*cur)[part] = value;
      break;
    }
    cur = &(*cur)[part];
    start = dot + 1;
  }
}

nlohmann::ordered_json config_json(const SimConfig& c) {
  nlohmann::ordered_json j;
  j["scenario"] = c.scenario;
  j["delta"] = c.delta;
  j["epsilon"] = c.epsilon;
  j["dt"] = c.dt;
  j["T"] = c.T;
  j["n_vortex"] = c.n_vortex;
  j["n_spray"] = c.n_spray;
  j["scheme"] = c.scheme;
  j["seed"] = c.seed;
  j["cadence"] = c.cadence;
  j["n_seeds"] = c.n_seeds;
  j["eta"] = c.eta;
  j["n_grid"] = c.n_grid;
  j["eps_grid"] = c.eps_grid;
  j["metric_rows"] = c.metric_rows;
  j["hydro_radius"] = c.hydro_radius;
  j["hydro_floor"] = c.hydro_floor;
  j["window"] = {c.window.lo.x, c.window.lo.y, c.window.hi.x, c.window.hi.y};
  j["ref_quad_resolution"] = c.ref_quad_resolution;
  j["omega"] = {{"kind", c.omega.kind},     {"amplitude", c.omega.amplitude},
                {"sigma", c.omega.sigma},   {"center", {c.omega.center.x, c.omega.center.y}},
                {"separation", c.omega.separation}, {"radius", c.omega.radius},
                {"circulation", c.omega.circulation}};
  j["spray"] = {{"kind", c.spray.kind},
                {"sigma", c.spray.sigma},
                {"center", {c.spray.center.x, c.spray.center.y}},
                {"xi_scale", c.spray.xi_scale},
                {"xi_const", {c.spray.xi_const.x, c.spray.xi_const.y}}};
  j["v0"] = {{"kind", c.v0.kind},
             {"omega", c.v0.omega},
             {"amplitude", c.v0.amplitude},
             {"sigma", c.v0.sigma},
             {"c", {c.v0.c.x, c.v0.c.y}}};
  return j;
}

std::string config_hash(const SimConfig& c) {
  const std::string canon = config_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char byte : canon) {
    h ^= byte;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

Scheme parse_scheme(const std::string& name) {
  if (name == "auto") return Scheme::automatic;
  if (name == "rk4") return Scheme::rk4;
  if (name == "split") return Scheme::split;
  throw config_error("config: unknown scheme '" + name + "'");
}

}  // namespace spray
