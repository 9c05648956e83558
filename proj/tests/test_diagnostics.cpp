#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "spray/diagnostics.hpp"
#include "spray/errors.hpp"
#include "spray/kernels.hpp"
#include "spray/reference_field.hpp"
#include "spray/rng.hpp"

using namespace spray;

namespace {

// centered differences of a planar field
struct FieldProbe {
  const std::function<Vec2(Vec2)>& v;
  double h = 1e-6;

  double d(int comp, int dir, Vec2 x) const {
    Vec2 xp = x, xm = x;
    (dir == 0 ? xp.x : xp.y) += h;
    (dir == 0 ? xm.x : xm.y) -= h;
    const Vec2 vp = v(xp), vm = v(xm);
    return ((comp == 0 ? vp.x : vp.y) - (comp == 0 ? vm.x : vm.y)) / (2.0 * h);
  }

  double curl(Vec2 x) const { return d(1, 0, x) - d(0, 1, x); }
  double div(Vec2 x) const { return d(0, 0, x) + d(1, 1, x); }
  Vec2 material(Vec2 x) const {
    const Vec2 u = v(x);
    return {u.x * d(0, 0, x) + u.y * d(0, 1, x), u.x * d(1, 0, x) + u.y * d(1, 1, x)};
  }
  // spectral norm of the symmetric part of the gradient
  double sym_grad(Vec2 x) const {
    const double a = d(0, 0, x);
    const double bc = 0.5 * (d(0, 1, x) + d(1, 0, x));
    const double dd = d(1, 1, x);
    const double mean = 0.5 * (a + dd);
    const double rad = std::sqrt(0.25 * (a - dd) * (a - dd) + bc * bc);
    return std::max(std::fabs(mean + rad), std::fabs(mean - rad));
  }
};

}  // namespace

TEST_CASE("frozen energy of a vortex next to a resting spray atom") {
  SprayState s;
  s.vortices = SignedAtomCloud(std::vector<Atom>{{{0.0, 0.0}, 1.0}});
  s.spray = PhaseAtomCloud(std::vector<PhaseAtom>{{{1.0, 0.0}, {0.0, 0.0}, 1.0}});
  const CouplingParams c(1.0, 1.0);
  CHECK(hamiltonian(s, c) == doctest::Approx(-std::log(2.0) / (4.0 * pi)).epsilon(1e-14));
}

TEST_CASE("hamiltonian is half the bare modulated energy") {
  Rng rng(51);
  SprayState s;
  std::vector<Atom> va;
  std::vector<PhaseAtom> pa;
  for (int i = 0; i < 6; ++i)
    va.push_back({{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}, rng.uniform(-1.0, 1.0)});
  for (int i = 0; i < 5; ++i)
    pa.push_back({{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)},
                  {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}, rng.uniform(0.1, 1.0)});
  s.vortices = SignedAtomCloud(va);
  s.spray = PhaseAtomCloud(pa);
  const CouplingParams c(0.5, 0.7);
  const double me =
      modulated_energy(s, c, [](Vec2) { return Vec2{0.0, 0.0}; }, SignedAtomCloud{});
  CHECK(hamiltonian(s, c) == 0.5 * me);
}

TEST_CASE("perfectly modulated states have zero energy") {
  const Vec2 c1{0.3, -0.2}, c2{-0.8, 0.5};
  SprayState s;
  s.spray = PhaseAtomCloud(std::vector<PhaseAtom>{{c1, {0.25, 0.5}, 0.75},
                                                  {c2, {0.25, 0.5}, 0.5}});
  const CouplingParams c(0.5, 0.9);
  const auto v = [](Vec2) { return Vec2{0.25, 0.5}; };
  const SignedAtomCloud curl_cloud(std::vector<Atom>{{c1, 0.75}, {c2, 0.5}});
  CHECK(modulated_energy(s, c, v, curl_cloud) == 0.0);
}

TEST_CASE("curl atoms cancel only at bitwise equal positions") {
  SprayState s;
  s.vortices = SignedAtomCloud(std::vector<Atom>{{{0.0, 0.0}, 1.0}});
  const CouplingParams c(1.0, 1.0);
  const auto v0 = [](Vec2) { return Vec2{0.0, 0.0}; };

  const SignedAtomCloud hit(std::vector<Atom>{{{0.0, 0.0}, 1.0}});
  CHECK(modulated_energy(s, c, v0, hit) == 0.0);

  const SignedAtomCloud miss(std::vector<Atom>{{{1e-300, 0.0}, 1.0}});
  // the off-atom survives with negated weight and interacts with the vortex
  const double expect = -2.0 * (1.0 * -1.0) * BlobKernel(1.0).stream({1e-300, 0.0});
  CHECK(modulated_energy(s, c, v0, miss) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("observable row frozen values") {
  SprayState s;
  s.vortices = SignedAtomCloud(std::vector<Atom>{{{0.0, 0.0}, 2.0}, {{1.0, 0.0}, -0.5}});
  s.spray = PhaseAtomCloud(std::vector<PhaseAtom>{{{0.0, 1.0}, {3.0, 4.0}, 1.0}});
  s.time = 1.25;
  const CouplingParams c(0.5, 0.25);

  const DiagnosticsRow row = observables(s, c);
  CHECK(row.time == 1.25);
  CHECK(row.circ_pos == doctest::Approx(2.0));
  CHECK(row.circ_neg == doctest::Approx(0.5));
  CHECK(row.spray_mass == doctest::Approx(1.0));
  CHECK(row.m2 == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(row.eps_kinetic == doctest::Approx(6.25).epsilon(1e-15));
  CHECK(row.sqrt_eps_j_l1 == doctest::Approx(2.5).epsilon(1e-15));

  const std::function<Vec2(Vec2)> ref = [](Vec2) { return Vec2{3.0, 4.0}; };
  const DiagnosticsRow matched = observables(s, c, &ref);
  CHECK(matched.eps_kinetic == 0.0);
  CHECK(matched.m2 == doctest::Approx(25.0));
}

TEST_CASE("reference fields match their derived quantities") {
  Rng rng(52);
  const ReferenceField fields[3] = {ReferenceField::rigid_rotation(0.3),
                                    ReferenceField::blob_vortex(1.2, 0.7),
                                    ReferenceField::constant({0.4, -0.9})};
  for (const ReferenceField& f : fields) {
    const FieldProbe probe{f.velocity};
    for (int i = 0; i < 50; ++i) {
      const Vec2 x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
      CHECK(std::fabs(probe.curl(x) - f.curl(x)) <= 1e-6);
      CHECK(std::fabs(probe.div(x)) <= 1e-6);
      const Vec2 m = probe.material(x);
      CHECK((m - f.material(x)).norm() <= 1e-5);
      CHECK(probe.sym_grad(x) <= f.sym_grad_sup + 1e-6);
      CHECK(f.velocity(x).norm() <= f.velocity_sup * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("blob field curl integrates to its circulation") {
  const ReferenceField f = ReferenceField::blob_vortex(1.2, 0.7);
  const int n = 600;
  const double L = 30.0;
  const double cell = 2.0 * L / n;
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 x{-L + (i + 0.5) * cell, -L + (j + 0.5) * cell};
      total += f.curl(x) * cell * cell;
    }
  CHECK(total == doctest::Approx(f.total_curl).epsilon(2e-3));
}

TEST_CASE("velocity sup of the blob field is attained at the core radius") {
  const ReferenceField f = ReferenceField::blob_vortex(2.0, 0.5);
  CHECK(f.velocity({0.5, 0.0}).norm() == doctest::Approx(f.velocity_sup).epsilon(1e-14));
  CHECK(f.total_curl == 2.0);
}

TEST_CASE("diagnostics csv carries the fixed header and full precision") {
  std::vector<DiagnosticsRow> rows(1);
  rows[0].time = 0.1;
  rows[0].hamiltonian = -1.0 / 3.0;
  std::ostringstream out;
  write_diagnostics_csv(out, rows);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "time,hamiltonian,circ_pos,circ_neg,spray_mass,m2,eps_kinetic,sqrt_eps_j_l1");
  std::getline(in, line);
  CHECK(line.find("-0.33333333333333331") != std::string::npos);
}

TEST_CASE("trajectory divergence of a translated twin") {
  SprayState s0;
  s0.vortices = SignedAtomCloud(std::vector<Atom>{{{0.5, 0.0}, 1.0}, {{-0.5, 0.0}, -0.25}});
  s0.spray = PhaseAtomCloud(std::vector<PhaseAtom>{{{0.0, 0.5}, {0.2, 0.0}, 0.5},
                                                   {{0.0, -0.5}, {-0.1, 0.3}, 0.5}});
  const Vec2 shift{0.01, -0.02};
  SprayState s1 = s0;
  for (Atom& a : s1.vortices.atoms) a.pos += shift;
  for (PhaseAtom& a : s1.spray.atoms) a.pos += shift;

  const CouplingParams c(0.5, 0.5);
  const Trajectory ta = integrate(s0, c, 1e-3, 0.5, 100);
  const Trajectory tb = integrate(s1, c, 1e-3, 0.5, 100);
  const std::vector<LoeperRow> rows = loeper_divergence(ta, tb);

  const double q_spray = 1.0 * shift.norm2();     // spray mass times |shift|^2
  const double q_vortex = 1.25 * shift.norm2();   // total variation times |shift|^2
  for (const LoeperRow& r : rows) {
    CHECK(r.spray_q == doctest::Approx(q_spray).epsilon(1e-9));
    CHECK(r.vortex_q == doctest::Approx(q_vortex).epsilon(1e-9));
  }
}

TEST_CASE("divergence requires identical atom layouts") {
  SprayState a, b;
  a.vortices = SignedAtomCloud(std::vector<Atom>{{{0.0, 0.0}, 1.0}});
  b.vortices = SignedAtomCloud(std::vector<Atom>{{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, 1.0}});
  const CouplingParams c(0.5, 1.0);
  const Trajectory ta = integrate(a, c, 0.1, 0.2, 1);
  const Trajectory tb = integrate(b, c, 0.1, 0.2, 1);
  CHECK_THROWS_AS(loeper_divergence(ta, tb), pairing_error);

  SprayState d = a;
  d.vortices.atoms[0].weight = 2.0;
  const Trajectory td = integrate(d, c, 0.1, 0.2, 1);
  CHECK_THROWS_AS(loeper_divergence(ta, td), pairing_error);
}
