#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "spray/measures.hpp"

namespace spray {

// Optimal coupling between two positive atom clouds.  cost is the transported
// work (unit cost |x-y| for p = 1, |x-y|^2 for p = 2); entries index atoms of
// the two inputs.  Plans are produced by an exact network-simplex solve and
// certified: marginals match the inputs to 1e-9 of the total mass and every
// reduced cost is >= -1e-12 * max cost.
struct TransportPlan {
  struct Entry {
    std::size_t from = 0;
    std::size_t to = 0;
    double mass = 0.0;
  };
  std::vector<Entry> entries;
  double cost = 0.0;
};

struct WassersteinResult {
  double distance = 0.0;
  TransportPlan plan;
};

// W_p between positive clouds (all weights > 0, equal masses to 1e-9
// relative), p in {1, 2}.  Empty input raises std::domain_error; mass
// mismatch raises incompatibility_error; certification failure raises
// solver_error.
WassersteinResult w_p_positive(const SignedAtomCloud& mu, const SignedAtomCloud& nu, int p);

// Signed W1: the positive-cloud W1 between mu+ + nu- and mu- + nu+.
// Requires compatible(mu, nu).
double w1_signed(const SignedAtomCloud& mu, const SignedAtomCloud& nu);

// Signed W2: (W2(mu+, nu+)^2 + W2(mu-, nu-)^2)^(1/2).  Requires
// compatible(mu, nu).
double w2_signed(const SignedAtomCloud& mu, const SignedAtomCloud& nu);

// W1 between spray ensembles with the Euclidean distance on R^4 (positions
// and velocities jointly).  Masses must agree to 1e-9 relative.
double w1_phase(const PhaseAtomCloud& f, const PhaseAtomCloud& g);

// Distance between (vorticity, spray) pairs: w1_signed on the vortex clouds
// plus w1_phase on the sprays.
double w1_pair(const SignedAtomCloud& omega1, const PhaseAtomCloud& f1,
               const SignedAtomCloud& omega2, const PhaseAtomCloud& f2);

// Exhaustive-permutation reference for the signed W1 on small equal-weight
// instances: both combined sides must have the same atom count (at most 8)
// and uniform weights, otherwise oracle_error.
double brute_force_w1(const SignedAtomCloud& mu, const SignedAtomCloud& nu);

// 1-Lipschitz test functions for Kantorovich lower bounds.
using Witness = std::function<double(Vec2)>;
Witness cone(Vec2 anchor);                       // x -> |x - anchor|
Witness cone_max(std::vector<Vec2> anchors);     // max of cones

// sum_mu w phi(x) - sum_nu w phi(x); for 1-Lipschitz phi and compatible
// inputs this is a lower bound for w1_signed up to roundoff.
double dual_lower_bound(const SignedAtomCloud& mu, const SignedAtomCloud& nu, const Witness& phi);

}  // namespace spray
