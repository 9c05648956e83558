#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "spray/dynamics.hpp"
#include "spray/measures.hpp"

namespace spray {

struct DiagnosticsRow {
  double time = 0.0;
  double hamiltonian = 0.0;
  double circ_pos = 0.0;
  double circ_neg = 0.0;
  double spray_mass = 0.0;
  double m2 = 0.0;             // sum w |xi|^2
  double eps_kinetic = 0.0;    // eps sum w |xi - v(h)|^2
  double sqrt_eps_j_l1 = 0.0;  // sqrt(eps) sum w |xi|
};

// Conserved energy of the coupled flow:
//   H = 1/2 [ eps sum_i w_i |xi_i|^2
//             - sum_{p != q} c_p c_q G_delta(z_p - z_q) ]
// where the pair sum runs over all atoms (vortices and spray together) with
// their signed weights.
double hamiltonian(const SprayState& s, const CouplingParams& c);

// Modulated energy 2 H^eps_v against a reference velocity field v and a
// discrete curl cloud:
//   eps sum_i w_i |xi_i - v(h_i)|^2 - sum_{p != q} c_p c_q G_delta(z_p - z_q)
// with the pair sum over the combined cloud state - curl_discrete.  A
// curl_discrete atom cancels a state atom only when their positions are
// bitwise equal; otherwise it enters with negated weight.  With v = 0 and an
// empty curl cloud this equals exactly 2 hamiltonian.
double modulated_energy(const SprayState& s, const CouplingParams& c,
                        const std::function<Vec2(Vec2)>& v,
                        const SignedAtomCloud& curl_discrete);

// scalar observables of one state; ref_velocity = nullptr measures the
// kinetic deviation against v = 0
DiagnosticsRow observables(const SprayState& s, const CouplingParams& c,
                           const std::function<Vec2(Vec2)>* ref_velocity = nullptr);

std::vector<DiagnosticsRow> trajectory_diagnostics(
    const Trajectory& traj, const CouplingParams& c,
    const std::function<Vec2(Vec2)>* ref_velocity = nullptr);

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows);

// Squared atom-wise divergence between two trajectories sharing initial atom
// identities (same counts, weights and observation times):
//   spray_q  = sum_i w_i (|h1-h2|^2 + |xi1-xi2|^2)
//   vortex_q = sum_j |a_j| |x1-x2|^2
struct LoeperRow {
  double time = 0.0;
  double spray_q = 0.0;
  double vortex_q = 0.0;
};

std::vector<LoeperRow> loeper_divergence(const Trajectory& a, const Trajectory& b);

}  // namespace spray
