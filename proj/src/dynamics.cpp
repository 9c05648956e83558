#include "spray/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "spray/errors.hpp"
#include "spray/kernels.hpp"

namespace spray {

namespace {

// flattened source arrays; weights carry the 1/(2 pi) kernel prefactor
struct Sources {
  std::vector<double> x, y, w;

  void reserve(std::size_t n) {
    x.reserve(n);
    y.reserve(n);
    w.reserve(n);
  }
  void push(Vec2 p, double weight) {
    constexpr double inv_two_pi = 1.0 / (2.0 * pi);
    x.push_back(p.x);
    y.push_back(p.y);
    w.push_back(weight * inv_two_pi);
  }
};

Sources gather_sources(const SprayState& s) {
  Sources src;
  src.reserve(s.vortices.atoms.size() + s.spray.atoms.size());
  for (const Atom& a : s.vortices.atoms) src.push(a.pos, a.weight);
  for (const PhaseAtom& a : s.spray.atoms) src.push(a.pos, a.weight);
  return src;
}

// velocity of the blob field at each target; four independent accumulator
// lanes per component, combined in a fixed order for determinism
void eval_field(const Sources& src, double delta2, const Vec2* targets, std::size_t n_targets,
                Vec2* out) {
  const std::size_t n = src.x.size();
  for (std::size_t t = 0; t < n_targets; ++t) {
    const double tx = targets[t].x;
    const double ty = targets[t].y;
    double ux0 = 0, ux1 = 0, ux2 = 0, ux3 = 0;
    double uy0 = 0, uy1 = 0, uy2 = 0, uy3 = 0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const double dx0 = tx - src.x[j + 0], dy0 = ty - src.y[j + 0];
      const double dx1 = tx - src.x[j + 1], dy1 = ty - src.y[j + 1];
      const double dx2 = tx - src.x[j + 2], dy2 = ty - src.y[j + 2];
      const double dx3 = tx - src.x[j + 3], dy3 = ty - src.y[j + 3];
      const double f0 = src.w[j + 0] / (dx0 * dx0 + dy0 * dy0 + delta2);
      const double f1 = src.w[j + 1] / (dx1 * dx1 + dy1 * dy1 + delta2);
      const double f2 = src.w[j + 2] / (dx2 * dx2 + dy2 * dy2 + delta2);
      const double f3 = src.w[j + 3] / (dx3 * dx3 + dy3 * dy3 + delta2);
      ux0 -= f0 * dy0;
      ux1 -= f1 * dy1;
      ux2 -= f2 * dy2;
      ux3 -= f3 * dy3;
      uy0 += f0 * dx0;
      uy1 += f1 * dx1;
      uy2 += f2 * dx2;
      uy3 += f3 * dx3;
    }
    for (; j < n; ++j) {
      const double dx = tx - src.x[j], dy = ty - src.y[j];
      const double f = src.w[j] / (dx * dx + dy * dy + delta2);
      ux0 -= f * dy;
      uy0 += f * dx;
    }
    out[t] = Vec2{(ux0 + ux1) + (ux2 + ux3), (uy0 + uy1) + (uy2 + uy3)};
  }
}

constexpr double blowup_limit = 1e12;

bool bad(double v) { return !std::isfinite(v) || std::fabs(v) > blowup_limit; }

[[noreturn]] void report_blowup(double time, std::size_t index, bool spray) {
  char msg[128];
  std::snprintf(msg, sizeof msg, "blow-up at t=%.6g: %s atom %zu left the trusted range", time,
                spray ? "spray" : "vortex", index);
  throw blowup_error(msg, time, index, spray);
}

void check_state(const SprayState& s) {
  for (std::size_t i = 0; i < s.vortices.atoms.size(); ++i) {
    const Vec2 p = s.vortices.atoms[i].pos;
    if (bad(p.x) || bad(p.y)) report_blowup(s.time, i, false);
  }
  for (std::size_t i = 0; i < s.spray.atoms.size(); ++i) {
    const PhaseAtom& a = s.spray.atoms[i];
    if (bad(a.pos.x) || bad(a.pos.y) || bad(a.vel.x) || bad(a.vel.y))
      report_blowup(s.time, i, true);
  }
}

// half of the split step: vortices follow the induced field by one RK4 step
// while spray atoms stream linearly along their frozen velocities (that
// sub-flow is exact); spray positions at RK4 stage offsets enter the field
SprayState slow_flow(const SprayState& s, double delta, double h) {
  const std::size_t nv = s.vortices.atoms.size();
  const std::size_t ns = s.spray.atoms.size();
  const double delta2 = delta * delta;

  std::vector<Vec2> base(nv);
  for (std::size_t i = 0; i < nv; ++i) base[i] = s.vortices.atoms[i].pos;

  std::vector<Vec2> stage = base;
  std::vector<Vec2> k1(nv), k2(nv), k3(nv), k4(nv);

  auto field_at = [&](const std::vector<Vec2>& vortex_pos, double tau, std::vector<Vec2>& out) {
    Sources src;
    src.reserve(nv + ns);
    for (std::size_t i = 0; i < nv; ++i) src.push(vortex_pos[i], s.vortices.atoms[i].weight);
    for (const PhaseAtom& a : s.spray.atoms) src.push(a.pos + tau * a.vel, a.weight);
    eval_field(src, delta2, vortex_pos.data(), nv, out.data());
  };

  field_at(base, 0.0, k1);
  for (std::size_t i = 0; i < nv; ++i) stage[i] = base[i] + (h / 2) * k1[i];
  field_at(stage, h / 2, k2);
  for (std::size_t i = 0; i < nv; ++i) stage[i] = base[i] + (h / 2) * k2[i];
  field_at(stage, h / 2, k3);
  for (std::size_t i = 0; i < nv; ++i) stage[i] = base[i] + h * k3[i];
  field_at(stage, h, k4);

  SprayState out = s;
  for (std::size_t i = 0; i < nv; ++i)
    out.vortices.atoms[i].pos =
        base[i] + (h / 6) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  for (std::size_t i = 0; i < ns; ++i) out.spray.atoms[i].pos += h * s.spray.atoms[i].vel;
  out.time = s.time + h;
  return out;
}

SprayState apply_derivative(const SprayState& s, const Derivative& d, double h) {
  SprayState r = s;
  for (std::size_t i = 0; i < r.vortices.atoms.size(); ++i)
    r.vortices.atoms[i].pos += h * d.vortex_vel[i];
  for (std::size_t i = 0; i < r.spray.atoms.size(); ++i) {
    r.spray.atoms[i].pos += h * d.spray_vel[i];
    r.spray.atoms[i].vel += h * d.spray_acc[i];
  }
  r.time = s.time + h;
  return r;
}

}  // namespace

CouplingParams::CouplingParams(double delta_, double epsilon_) : delta(delta_), epsilon(epsilon_) {
  if (!(std::isfinite(delta) && delta > 0.0))
    throw std::invalid_argument("coupling: delta must be positive and finite");
  if (!(std::isfinite(epsilon) && epsilon > 0.0))
    throw std::invalid_argument("coupling: epsilon must be positive and finite");
}

std::vector<Vec2> induced_velocity(const SprayState& s, double delta,
                                   const std::vector<Vec2>& targets) {
  if (!(std::isfinite(delta) && delta > 0.0))
    throw std::invalid_argument("induced_velocity: delta must be positive and finite");
  std::vector<Vec2> out(targets.size());
  const Sources src = gather_sources(s);
  eval_field(src, delta * delta, targets.data(), targets.size(), out.data());
  return out;
}

Vec2 induced_velocity(const SprayState& s, double delta, Vec2 target) {
  return induced_velocity(s, delta, std::vector<Vec2>{target})[0];
}

Derivative rhs(const SprayState& s, const CouplingParams& c) {
  const std::size_t nv = s.vortices.atoms.size();
  const std::size_t ns = s.spray.atoms.size();

  std::vector<Vec2> targets(nv + ns);
  for (std::size_t i = 0; i < nv; ++i) targets[i] = s.vortices.atoms[i].pos;
  for (std::size_t i = 0; i < ns; ++i) targets[nv + i] = s.spray.atoms[i].pos;

  std::vector<Vec2> u(nv + ns);
  const Sources src = gather_sources(s);
  eval_field(src, c.delta * c.delta, targets.data(), targets.size(), u.data());

  Derivative d;
  d.vortex_vel.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(nv));
  d.spray_vel.resize(ns);
  d.spray_acc.resize(ns);
  const double inv_eps = 1.0 / c.epsilon;
  for (std::size_t i = 0; i < ns; ++i) {
    const Vec2 xi = s.spray.atoms[i].vel;
    d.spray_vel[i] = xi;
    d.spray_acc[i] = inv_eps * (xi - u[nv + i]).perp();
  }
  return d;
}

SprayState step_rk4(const SprayState& s, const CouplingParams& c, double dt) {
  const Derivative k1 = rhs(s, c);
  const Derivative k2 = rhs(apply_derivative(s, k1, dt / 2), c);
  const Derivative k3 = rhs(apply_derivative(s, k2, dt / 2), c);
  const Derivative k4 = rhs(apply_derivative(s, k3, dt), c);

  SprayState out = s;
  for (std::size_t i = 0; i < out.vortices.atoms.size(); ++i)
    out.vortices.atoms[i].pos +=
        (dt / 6) * (k1.vortex_vel[i] + 2.0 * k2.vortex_vel[i] + 2.0 * k3.vortex_vel[i] +
                    k4.vortex_vel[i]);
  for (std::size_t i = 0; i < out.spray.atoms.size(); ++i) {
    out.spray.atoms[i].pos +=
        (dt / 6) *
        (k1.spray_vel[i] + 2.0 * k2.spray_vel[i] + 2.0 * k3.spray_vel[i] + k4.spray_vel[i]);
    out.spray.atoms[i].vel +=
        (dt / 6) *
        (k1.spray_acc[i] + 2.0 * k2.spray_acc[i] + 2.0 * k3.spray_acc[i] + k4.spray_acc[i]);
  }
  out.time = s.time + dt;
  return out;
}

SprayState step_split(const SprayState& s, const CouplingParams& c, double dt) {
  SprayState mid = slow_flow(s, c.delta, dt / 2);

  const std::size_t ns = mid.spray.atoms.size();
  if (ns > 0) {
    std::vector<Vec2> targets(ns);
    for (std::size_t i = 0; i < ns; ++i) targets[i] = mid.spray.atoms[i].pos;
    const std::vector<Vec2> u = induced_velocity(mid, c.delta, targets);

    const double theta = dt / c.epsilon;
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    for (std::size_t i = 0; i < ns; ++i) {
      const Vec2 w = mid.spray.atoms[i].vel - u[i];
      mid.spray.atoms[i].vel =
          u[i] + Vec2{cs * w.x - sn * w.y, sn * w.x + cs * w.y};
    }
  }

  SprayState out = slow_flow(mid, c.delta, dt / 2);
  out.time = s.time + dt;
  return out;
}

Trajectory integrate(const SprayState& s, const CouplingParams& c, double dt, double T,
                     int observe_every, Scheme scheme) {
  if (!(std::isfinite(dt) && dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(std::isfinite(T) && T >= 0.0))
    throw std::invalid_argument("integrate: horizon must be non-negative");
  if (observe_every < 1) throw std::invalid_argument("integrate: observe_every must be >= 1");

  Scheme used = scheme;
  if (used == Scheme::automatic) used = (c.epsilon <= 10.0 * dt) ? Scheme::split : Scheme::rk4;
  auto advance = [&](const SprayState& st, double h) {
    return used == Scheme::split ? step_split(st, c, h) : step_rk4(st, c, h);
  };

  // count of full steps; the remainder below machine noise is dropped so that
  // T = k dt takes exactly k steps
  auto n_full = static_cast<long long>(std::floor(T / dt + 1e-9));
  double rem = T - static_cast<double>(n_full) * dt;
  if (rem <= 1e-12 * dt) rem = 0.0;

  Trajectory traj;
  traj.scheme = used;
  check_state(s);
  traj.states.push_back(s);

  SprayState cur = s;
  for (long long k = 1; k <= n_full; ++k) {
    cur = advance(cur, dt);
    check_state(cur);
    if (k % observe_every == 0) traj.states.push_back(cur);
  }
  if (rem > 0.0) {
    cur = advance(cur, rem);
    check_state(cur);
  }
  if (traj.states.back().time != cur.time) traj.states.push_back(cur);
  return traj;
}

}  // namespace spray
