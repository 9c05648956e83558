#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "json.hpp"
#include "spray/config.hpp"
#include "spray/dynamics.hpp"
#include "spray/reference_field.hpp"

namespace spray {

// Stream cells of the splittable generator.  Every random draw belongs to
// exactly one (seed, cell) stream, so adding a scenario never shifts the
// numbers of another.
namespace cells {
inline constexpr std::uint64_t simulate_spray = 1;
inline constexpr std::uint64_t hydro_spray = 2;
inline constexpr std::uint64_t conservation_spray = 3;
inline constexpr std::uint64_t massless_spray = 4;

// grid_idx 0..6 index n_grid entries, 7 is the fine reference cloud
inline std::uint64_t meanfield(int seed_idx, int grid_idx) {
  return 16 + 8 * static_cast<std::uint64_t>(seed_idx) + static_cast<std::uint64_t>(grid_idx);
}
// role 0 draws the spray, role 1 the perturbation direction
inline std::uint64_t stability(int seed_idx, int role) {
  return 1024 + 4 * static_cast<std::uint64_t>(seed_idx) + static_cast<std::uint64_t>(role);
}
}  // namespace cells

struct ExperimentReport {
  std::string scenario;
  std::string hash;
  bool pass = false;
  nlohmann::ordered_json body;
};

// smooth density of the vorticity preset; null for atomic presets (ring, none)
std::function<double(Vec2)> omega_density(const OmegaPreset& p);

ReferenceField build_field(const FieldPreset& p);

// Initial condition of a run: vortices from the omega preset (ring presets
// place exactly n_vortex atoms, smooth presets are discretized on a grid of
// round(sqrt(n_vortex)) cells per side), spray drawn from the stream
// (cfg.seed, spray_cell).
SprayState initial_state(const SimConfig& cfg, std::uint64_t spray_cell);

ExperimentReport run_meanfield(const SimConfig& cfg);
ExperimentReport run_stability(const SimConfig& cfg);
ExperimentReport run_hydro(const SimConfig& cfg);
ExperimentReport run_conservation(const SimConfig& cfg);
ExperimentReport run_massless(const SimConfig& cfg);

// dispatch on cfg.scenario; config_error for scenarios without a verdict
ExperimentReport run_experiment(const SimConfig& cfg);

// writes {scenario}-{hash}.report.json and {scenario}-{hash}.metrics.csv
// under out_dir, creating it if needed; returns the report path
std::string write_report(const ExperimentReport& report, const std::string& out_dir);

}  // namespace spray
