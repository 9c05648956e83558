#pragma once

#include <vector>

#include "spray/measures.hpp"

namespace spray {

struct CouplingParams {
  double delta;
  double epsilon;

  CouplingParams(double delta_, double epsilon_);
};

// full particle state: point vortices plus spray atoms, at a common time
struct SprayState {
  SignedAtomCloud vortices;
  PhaseAtomCloud spray;
  double time = 0.0;
};

// Velocity induced at the targets by every atom of the state through the blob
// kernel of width delta.  An atom induces nothing at its own position since
// H_delta(0) = 0, so targets may coincide with sources.
std::vector<Vec2> induced_velocity(const SprayState& s, double delta,
                                   const std::vector<Vec2>& targets);
Vec2 induced_velocity(const SprayState& s, double delta, Vec2 target);

// time derivative of the coupled system:
//   vortices    x'  = u(x)
//   spray       h'  = xi,   xi' = (xi - u(h))^perp / epsilon
struct Derivative {
  std::vector<Vec2> vortex_vel;
  std::vector<Vec2> spray_vel;
  std::vector<Vec2> spray_acc;
};
Derivative rhs(const SprayState& s, const CouplingParams& c);

// classical fourth-order Runge-Kutta step
SprayState step_rk4(const SprayState& s, const CouplingParams& c, double dt);

// Strang step for stiff epsilon: half step of the slow flow (positions only),
// exact gyroscopic rotation xi <- u + R(dt/eps)(xi - u) with u frozen at the
// midpoint state, half step of the slow flow.  Weights never change.
SprayState step_split(const SprayState& s, const CouplingParams& c, double dt);

enum class Scheme { rk4, split, automatic };

struct Trajectory {
  std::vector<SprayState> states;  // observed states; initial first, final last
  Scheme scheme = Scheme::rk4;     // scheme actually used
};

// Fixed-step integration from s.time to s.time + T, landing on the final time
// exactly (the last step is shortened when dt does not divide T).  Records
// the initial state, every observe_every-th step and the final state.
// automatic selects split when epsilon <= 10 dt, rk4 otherwise.  Any
// coordinate leaving [-1e12, 1e12] (or going non-finite) raises blowup_error.
Trajectory integrate(const SprayState& s, const CouplingParams& c, double dt, double T,
                     int observe_every, Scheme scheme = Scheme::automatic);

}  // namespace spray
