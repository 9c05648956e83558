#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "spray/rng.hpp"
#include "spray/vec2.hpp"

namespace spray {

// weighted point mass of a signed measure on R^2
struct Atom {
  Vec2 pos;
  double weight = 0.0;
};

// phase-space point mass (position, velocity, positive weight)
struct PhaseAtom {
  Vec2 pos;
  Vec2 vel;
  double weight = 0.0;
};

// Finite signed measure sum_i w_i delta_{x_i}.  Atoms with w_i = 0 are
// dropped at construction; non-finite entries are rejected.  Atoms at equal
// positions are kept separate; no merging ever happens.
struct SignedAtomCloud {
  std::vector<Atom> atoms;

  SignedAtomCloud() = default;
  explicit SignedAtomCloud(std::vector<Atom> in);

  std::size_t size() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }
};

// Spray ensemble sum_i w_i delta_{(h_i, xi_i)} with w_i > 0.
struct PhaseAtomCloud {
  std::vector<PhaseAtom> atoms;

  PhaseAtomCloud() = default;
  explicit PhaseAtomCloud(std::vector<PhaseAtom> in);

  std::size_t size() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }
};

double mass_positive(const SignedAtomCloud& nu);
double mass_negative(const SignedAtomCloud& nu);  // >= 0, mass of the negative part
double total_variation(const SignedAtomCloud& nu);
double mass(const PhaseAtomCloud& f);

// Jordan decomposition; both returned clouds carry positive weights (the
// second holds |w_i| of the negative atoms).
std::pair<SignedAtomCloud, SignedAtomCloud> jordan(const SignedAtomCloud& nu);

// Sign-class masses agree within rtol * max total variation.
bool compatible(const SignedAtomCloud& a, const SignedAtomCloud& b, double rtol = 1e-9);

// Image measure under tau: weights unchanged, positions mapped.
SignedAtomCloud pushforward(const SignedAtomCloud& nu, const std::function<Vec2(Vec2)>& tau);

struct SprayMarginals {
  SignedAtomCloud rho;                           // space marginal, positive weights
  std::vector<std::pair<Vec2, Vec2>> current;    // (position, w_i xi_i)
};

SprayMarginals marginals(const PhaseAtomCloud& f);

// sum_i w_i |xi_i|^2
double second_moment(const PhaseAtomCloud& f);

struct Window {
  Vec2 lo{-2.0, -2.0};
  Vec2 hi{2.0, 2.0};
};

// Midpoint-rule discretization of a smooth vorticity density on a window:
// n_per_side^2 cells, alpha_i = omega0(center_i) * cell_area, zero cells
// dropped, then each sign class rescaled so its mass equals the reference
// mass of that class computed by midpoint quadrature at ref_resolution per
// side (default 4 * n_per_side).  Pass an explicit ref_resolution when clouds
// of different resolutions must stay compatible with each other.
SignedAtomCloud discretize_vorticity(const std::function<double(Vec2)>& omega0, Window window,
                                     int n_per_side, int ref_resolution = 0);

// n independent atoms of weight 1/n; positions from position_sampler,
// velocities from velocity_sampler (which sees the drawn position, so
// monokinetic data is velocity_sampler = [v0](pos, rng) { return v0(pos); }).
PhaseAtomCloud sample_spray(int n, Rng& rng, const std::function<Vec2(Rng&)>& position_sampler,
                            const std::function<Vec2(Vec2, Rng&)>& velocity_sampler);

}  // namespace spray
