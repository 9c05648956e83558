#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "spray/dynamics.hpp"
#include "spray/measures.hpp"

namespace spray {

// initial vorticity preset
struct OmegaPreset {
  std::string kind = "gaussian";  // gaussian | dipole | ring | none
  double amplitude = 1.0;         // gaussian peak, or dipole lobe peak
  double sigma = 0.5;
  Vec2 center{0.0, 0.0};
  double separation = 1.0;  // dipole: distance between lobe centers
  double radius = 1.0;      // ring: circle radius
  double circulation = 1.0;  // ring: total circulation, split evenly
};

// initial spray preset; positions are gaussian around center with width sigma
struct SprayPreset {
  std::string kind = "gaussian";  // gaussian | monokinetic | constant | none
  double sigma = 0.5;
  Vec2 center{0.0, 0.0};
  double xi_scale = 0.3;    // gaussian: xi ~ xi_scale N(0, I)
  Vec2 xi_const{0.0, 0.0};  // constant: xi = xi_const
                            // monokinetic: xi = v0(h) from the v0 preset
};

// reference velocity field preset
struct FieldPreset {
  std::string kind = "rigid";  // rigid | blob | constant | zero
  double omega = 0.5;          // rigid
  double amplitude = 1.0;      // blob circulation
  double sigma = 0.5;          // blob core
  Vec2 c{0.0, 0.0};            // constant
};

struct SimConfig {
  std::string scenario = "simulate";
  double delta = 0.5;
  double epsilon = 1.0;
  double dt = 1e-3;
  double T = 1.0;
  int n_vortex = 32;
  int n_spray = 32;
  std::string scheme = "auto";  // auto | rk4 | split
  std::uint64_t seed = 0;
  int cadence = 20;  // target number of observation intervals per run
  int n_seeds = 5;
  double eta = 1e-3;                                  // stability: perturbation size
  std::vector<int> n_grid{32, 64, 128, 256};          // meanfield: atom counts
  std::vector<double> eps_grid{0.1, 0.025, 0.00625};  // massless: epsilon sweep
  int metric_rows = 1;       // meanfield: transport evaluations per run
  double hydro_radius = 0.5;  // hydro: pair radius
  double hydro_floor = 1.0;   // hydro: threshold when the initial ratio vanishes
  Window window{{-2.0, -2.0}, {2.0, 2.0}};
  int ref_quad_resolution = 256;  // reference quadrature cells per side
  OmegaPreset omega;
  SprayPreset spray;
  FieldPreset v0;
  std::string out_dir = ".";
};

// scenario defaults before any file or override is applied
SimConfig default_config(const std::string& scenario);

// Strict parse: unknown keys anywhere raise config_error, as do values out of
// range.  The scenario key is read first and selects the default base.
SimConfig parse_config(const nlohmann::json& j);

SimConfig load_config_file(const std::string& path);

// "a.b=value" assignment onto a raw json tree; the value is parsed as JSON
// when possible and taken as a string otherwise
void apply_override(nlohmann::json& j, const std::string& assignment);

// canonical echo of every field, in fixed order (out_dir excluded)
nlohmann::ordered_json config_json(const SimConfig& cfg);

// 16 hex digits, FNV-1a over the canonical serialization
std::string config_hash(const SimConfig& cfg);

Scheme parse_scheme(const std::string& name);

}  // namespace spray
