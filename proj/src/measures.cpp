#include "spray/measures.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "spray/errors.hpp"
#include "spray/summation.hpp"

namespace spray {

SignedAtomCloud::SignedAtomCloud(std::vector<Atom> in) {
  atoms.reserve(in.size());
  for (const Atom& a : in) {
    if (!finite(a.pos) || !std::isfinite(a.weight))
      throw std::invalid_argument("SignedAtomCloud: non-finite atom");
    if (a.weight == 0.0) continue;
    atoms.push_back(a);
  }
}

PhaseAtomCloud::PhaseAtomCloud(std::vector<PhaseAtom> in) {
  atoms.reserve(in.size());
  for (const PhaseAtom& a : in) {
    if (!finite(a.pos) || !finite(a.vel) || !std::isfinite(a.weight))
      throw std::invalid_argument("PhaseAtomCloud: non-finite atom");
    if (!(a.weight > 0.0)) throw std::invalid_argument("PhaseAtomCloud: weights must be positive");
    atoms.push_back(a);
  }
}

double mass_positive(const SignedAtomCloud& nu) {
  return kahan_sum(nu.atoms.begin(), nu.atoms.end(),
                   [](const Atom& a) { return a.weight > 0.0 ? a.weight : 0.0; });
}

double mass_negative(const SignedAtomCloud& nu) {
  return kahan_sum(nu.atoms.begin(), nu.atoms.end(),
                   [](const Atom& a) { return a.weight < 0.0 ? -a.weight : 0.0; });
}

double total_variation(const SignedAtomCloud& nu) {
  return kahan_sum(nu.atoms.begin(), nu.atoms.end(),
                   [](const Atom& a) { return std::fabs(a.weight); });
}

double mass(const PhaseAtomCloud& f) {
  return kahan_sum(f.atoms.begin(), f.atoms.end(), [](const PhaseAtom& a) { return a.weight; });
}

std::pair<SignedAtomCloud, SignedAtomCloud> jordan(const SignedAtomCloud& nu) {
  SignedAtomCloud pos, neg;
  for (const Atom& a : nu.atoms) {
    if (a.weight > 0.0)
      pos.atoms.push_back(a);
    else
      neg.atoms.push_back({a.pos, -a.weight});
  }
  return {std::move(pos), std::move(neg)};
}

bool compatible(const SignedAtomCloud& a, const SignedAtomCloud& b, double rtol) {
  double scale = std::max(total_variation(a), total_variation(b));
  double tol = rtol * scale;
  return std::fabs(mass_positive(a) - mass_positive(b)) <= tol &&
         std::fabs(mass_negative(a) - mass_negative(b)) <= tol;
}

SignedAtomCloud pushforward(const SignedAtomCloud& nu, const std::function<Vec2(Vec2)>& tau) {
  SignedAtomCloud out;
  out.atoms.reserve(nu.size());
  for (const Atom& a : nu.atoms) {
    Vec2 y = tau(a.pos);
    if (!finite(y)) throw std::invalid_argument("pushforward: map produced a non-finite position");
    out.atoms.push_back({y, a.weight});
  }
  return out;
}

SprayMarginals marginals(const PhaseAtomCloud& f) {
  SprayMarginals m;
  m.rho.atoms.reserve(f.size());
  m.current.reserve(f.size());
  for (const PhaseAtom& a : f.atoms) {
    m.rho.atoms.push_back({a.pos, a.weight});
    m.current.emplace_back(a.pos, a.weight * a.vel);
  }
  return m;
}

double second_moment(const PhaseAtomCloud& f) {
  return kahan_sum(f.atoms.begin(), f.atoms.end(),
                   [](const PhaseAtom& a) { return a.weight * a.vel.norm2(); });
}

namespace {

// midpoint quadrature of the positive / negative parts over the window
std::pair<double, double> quadrature_sign_masses(const std::function<double(Vec2)>& omega0,
                                                 Window w, int res) {
  double hx = (w.hi.x - w.lo.x) / res;
  double hy = (w.hi.y - w.lo.y) / res;
  double cell = hx * hy;
  KahanSum pos, neg;
  for (int i = 0; i < res; ++i) {
    double cx = w.lo.x + (i + 0.5) * hx;
    for (int j = 0; j < res; ++j) {
      double v = omega0({cx, w.lo.y + (j + 0.5) * hy});
      if (!std::isfinite(v)) throw discretization_error("discretize_vorticity: non-finite density");
      if (v > 0.0)
        pos.add(v * cell);
      else
        neg.add(-v * cell);
    }
  }
  return {pos.value(), neg.value()};
}

}  // namespace

SignedAtomCloud discretize_vorticity(const std::function<double(Vec2)>& omega0, Window window,
                                     int n_per_side, int ref_resolution) {
  if (n_per_side < 1) throw std::invalid_argument("discretize_vorticity: n_per_side must be >= 1");
  if (!(window.hi.x > window.lo.x) || !(window.hi.y > window.lo.y))
    throw std::invalid_argument("discretize_vorticity: empty window");
  if (ref_resolution == 0) ref_resolution = 4 * n_per_side;
  if (ref_resolution < n_per_side)
    throw std::invalid_argument("discretize_vorticity: reference resolution below grid resolution");

  auto [ref_pos, ref_neg] = quadrature_sign_masses(omega0, window, ref_resolution);

  double hx = (window.hi.x - window.lo.x) / n_per_side;
  double hy = (window.hi.y - window.lo.y) / n_per_side;
  double cell = hx * hy;
  std::vector<Atom> raw;
  raw.reserve(static_cast<std::size_t>(n_per_side) * n_per_side);
  KahanSum beta_pos, beta_neg;
  for (int i = 0; i < n_per_side; ++i) {
    double cx = window.lo.x + (i + 0.5) * hx;
    for (int j = 0; j < n_per_side; ++j) {
      Vec2 c{cx, window.lo.y + (j + 0.5) * hy};
      double alpha = omega0(c) * cell;
      if (alpha == 0.0) continue;
      raw.push_back({c, alpha});
      if (alpha > 0.0)
        beta_pos.add(alpha);
      else
        beta_neg.add(alpha);
    }
  }

  double tv_ref = ref_pos + ref_neg;
  if (ref_pos > 1e-12 * tv_ref && beta_pos.value() == 0.0)
    throw discretization_error("discretize_vorticity: positive class lost by the grid");
  if (ref_neg > 1e-12 * tv_ref && beta_neg.value() == 0.0)
    throw discretization_error("discretize_vorticity: negative class lost by the grid");

  double scale_pos = beta_pos.value() > 0.0 ? ref_pos / beta_pos.value() : 0.0;
  double scale_neg = beta_neg.value() < 0.0 ? ref_neg / (-beta_neg.value()) : 0.0;
  for (Atom& a : raw) a.weight *= (a.weight > 0.0 ? scale_pos : scale_neg);
  return SignedAtomCloud(std::move(raw));
}

PhaseAtomCloud sample_spray(int n, Rng& rng, const std::function<Vec2(Rng&)>& position_sampler,
                            const std::function<Vec2(Vec2, Rng&)>& velocity_sampler) {
  if (n < 1) throw std::invalid_argument("sample_spray: n must be >= 1");
  std::vector<PhaseAtom> atoms;
  atoms.reserve(n);
  double w = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    Vec2 x = position_sampler(rng);
    Vec2 xi = velocity_sampler(x, rng);
    atoms.push_back({x, xi, w});
  }
  return PhaseAtomCloud(std::move(atoms));
}

}  // namespace spray
