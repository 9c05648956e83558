#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "spray/errors.hpp"
#include "spray/rng.hpp"
#include "spray/transport.hpp"

using namespace spray;

namespace {

SignedAtomCloud cloud(std::vector<Atom> atoms) { return SignedAtomCloud(std::move(atoms)); }

SignedAtomCloud random_cloud(Rng& rng, int n_pos, int n_neg, bool uniform_weights) {
  std::vector<Atom> atoms;
  for (int i = 0; i < n_pos; ++i)
    atoms.push_back({{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)},
                     uniform_weights ? 1.0 : rng.uniform(0.2, 2.0)});
  for (int i = 0; i < n_neg; ++i)
    atoms.push_back({{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)},
                     -(uniform_weights ? 1.0 : rng.uniform(0.2, 2.0))});
  return cloud(std::move(atoms));
}

// rescale the sign classes of b to match a exactly
SignedAtomCloud match_masses(const SignedAtomCloud& a, const SignedAtomCloud& b) {
  const double sp = mass_positive(a) / mass_positive(b);
  const double sn = mass_negative(a) / mass_negative(b);
  std::vector<Atom> atoms = b.atoms;
  for (Atom& at : atoms) at.weight *= at.weight > 0.0 ? sp : sn;
  return cloud(std::move(atoms));
}

}  // namespace

TEST_CASE("two atom transport has the obvious cost") {
  const SignedAtomCloud mu = cloud({{{0.0, 0.0}, 1.0}});
  const SignedAtomCloud nu = cloud({{{2.0, 0.0}, 1.0}});
  const WassersteinResult r1 = w_p_positive(mu, nu, 1);
  CHECK(r1.distance == doctest::Approx(2.0).epsilon(1e-14));
  REQUIRE(r1.plan.entries.size() == 1);
  CHECK(r1.plan.entries[0].mass == doctest::Approx(1.0).epsilon(1e-14));

  const SignedAtomCloud nu2 = cloud({{{1.0, 1.0}, 1.0}});
  CHECK(w_p_positive(mu, nu2, 2).distance == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("splitting mass to two sites") {
  const SignedAtomCloud mu = cloud({{{0.0, 0.0}, 1.0}});
  const SignedAtomCloud nu = cloud({{{-2.0, 0.0}, 0.5}, {{2.0, 0.0}, 0.5}});
  CHECK(w_p_positive(mu, nu, 1).distance == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("signed distances on frozen instances") {
  const SignedAtomCloud mu = cloud({{{0.0, 0.0}, 1.0}});
  const SignedAtomCloud nu = cloud({{{1.0, 0.0}, 1.0}});
  CHECK(w1_signed(mu, nu) == doctest::Approx(1.0).epsilon(1e-14));

  const SignedAtomCloud mu2 = cloud({{{0.0, 0.0}, 0.5}});
  const SignedAtomCloud nu2 = cloud({{{1.0, 0.0}, 0.5}});
  CHECK(w2_signed(mu2, nu2) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));

  // a signed pair: negative mass travels on the swapped side
  const SignedAtomCloud a = cloud({{{0.0, 0.0}, 1.0}, {{3.0, 0.0}, -1.0}});
  const SignedAtomCloud b = cloud({{{1.0, 0.0}, 1.0}, {{3.0, 0.0}, -1.0}});
  CHECK(w1_signed(a, b) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("identical clouds are at distance exactly zero") {
  Rng rng(31);
  const SignedAtomCloud mu = random_cloud(rng, 5, 3, false);
  CHECK(w1_signed(mu, mu) == 0.0);
  CHECK(w2_signed(mu, mu) == 0.0);

  const PhaseAtomCloud f(std::vector<PhaseAtom>{{{0.1, 0.2}, {0.3, -0.1}, 0.5},
                                                {{1.0, -1.0}, {0.0, 0.0}, 0.5}});
  CHECK(w1_phase(f, f) == 0.0);
}

TEST_CASE("incompatible sign masses are rejected") {
  const SignedAtomCloud mu = cloud({{{0.0, 0.0}, 1.0}});
  const SignedAtomCloud nu = cloud({{{1.0, 0.0}, 2.0}});
  CHECK_THROWS_AS(w1_signed(mu, nu), incompatibility_error);
  CHECK_THROWS_AS(w2_signed(mu, nu), incompatibility_error);
  const SignedAtomCloud dip = cloud({{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, -1.0}});
  CHECK_THROWS_AS(w1_signed(mu, dip), incompatibility_error);
}

TEST_CASE("solver agrees with permutation enumeration") {
  Rng rng(32);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 4.0);  // up to 4 per sign class
    const int m = static_cast<int>(rng.uniform() * 3.0);
    SignedAtomCloud mu = random_cloud(rng, n, m, true);
    SignedAtomCloud nu = match_masses(mu, random_cloud(rng, n, m, true));
    const double exact = brute_force_w1(mu, nu);
    const double solved = w1_signed(mu, nu);
    CHECK(solved == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("enumeration oracle guards its own scope") {
  Rng rng(33);
  const SignedAtomCloud big_a = random_cloud(rng, 9, 0, true);
  const SignedAtomCloud big_b = match_masses(big_a, random_cloud(rng, 9, 0, true));
  CHECK_THROWS_AS(brute_force_w1(big_a, big_b), oracle_error);

  const SignedAtomCloud uneven_a = cloud({{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, 2.0}});
  const SignedAtomCloud uneven_b = cloud({{{2.0, 0.0}, 1.5}, {{3.0, 0.0}, 1.5}});
  CHECK_THROWS_AS(brute_force_w1(uneven_a, uneven_b), oracle_error);
}

TEST_CASE("plans are certified and their marginals close") {
  Rng rng(34);
  const SignedAtomCloud mu = random_cloud(rng, 40, 0, false);
  SignedAtomCloud nu = match_masses(mu, random_cloud(rng, 25, 0, false));
  const WassersteinResult r = w_p_positive(mu, nu, 1);

  std::vector<double> row(mu.size(), 0.0), col(nu.size(), 0.0);
  for (const TransportPlan::Entry& e : r.plan.entries) {
    row[e.from] += e.mass;
    col[e.to] += e.mass;
  }
  for (std::size_t i = 0; i < mu.size(); ++i)
    CHECK(row[i] == doctest::Approx(mu.atoms[i].weight).epsilon(1e-9));
  for (std::size_t j = 0; j < nu.size(); ++j)
    CHECK(col[j] == doctest::Approx(nu.atoms[j].weight).epsilon(1e-9));

  // the plan pays exactly the reported distance
  double paid = 0.0;
  for (const TransportPlan::Entry& e : r.plan.entries)
    paid += e.mass * (mu.atoms[e.from].pos - nu.atoms[e.to].pos).norm();
  CHECK(paid == doctest::Approx(r.distance).epsilon(1e-12));
}

TEST_CASE("distances are deterministic and permutation invariant") {
  Rng rng(35);
  const SignedAtomCloud mu = random_cloud(rng, 12, 6, false);
  const SignedAtomCloud nu = match_masses(mu, random_cloud(rng, 9, 11, false));
  const double d1 = w1_signed(mu, nu);
  const double d2 = w1_signed(mu, nu);
  CHECK(d1 == d2);

  std::vector<Atom> shuffled = mu.atoms;
  std::reverse(shuffled.begin(), shuffled.end());
  const double d3 = w1_signed(cloud(std::move(shuffled)), nu);
  CHECK(d3 == doctest::Approx(d1).epsilon(1e-12));
}

TEST_CASE("translation invariance and homogeneity") {
  Rng rng(36);
  const SignedAtomCloud mu = random_cloud(rng, 8, 4, false);
  const SignedAtomCloud nu = match_masses(mu, random_cloud(rng, 6, 6, false));
  const double d = w1_signed(mu, nu);

  const Vec2 shift{0.37, -1.2};
  const auto tau = [shift](Vec2 x) { return x + shift; };
  CHECK(w1_signed(pushforward(mu, tau), pushforward(nu, tau)) ==
        doctest::Approx(d).epsilon(1e-12));

  std::vector<Atom> mu2 = mu.atoms, nu2 = nu.atoms;
  for (Atom& a : mu2) a.weight *= 2.0;
  for (Atom& a : nu2) a.weight *= 2.0;
  CHECK(w1_signed(cloud(std::move(mu2)), cloud(std::move(nu2))) ==
        doctest::Approx(2.0 * d).epsilon(1e-12));
}

TEST_CASE("witness functions certify lower bounds") {
  const SignedAtomCloud mu = cloud({{{3.0, 4.0}, 1.0}});
  const SignedAtomCloud nu = cloud({{{0.0, 0.0}, 1.0}});
  const double primal = w1_signed(mu, nu);
  CHECK(primal == doctest::Approx(5.0).epsilon(1e-14));

  const Witness phi = cone({0.0, 0.0});
  const double lower = dual_lower_bound(mu, nu, phi);
  CHECK(lower == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(lower <= primal * (1.0 + 1e-12));

  // a combination of cones stays admissible
  Rng rng(37);
  const SignedAtomCloud a = random_cloud(rng, 7, 2, false);
  const SignedAtomCloud b = match_masses(a, random_cloud(rng, 5, 4, false));
  const double p = w1_signed(a, b);
  for (int i = 0; i < 20; ++i) {
    const Witness w = cone_max({{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)},
                                {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)}});
    CHECK(dual_lower_bound(a, b, w) <= p + 1e-9);
  }
}

TEST_CASE("phase distance uses the four dimensional metric") {
  const PhaseAtomCloud f(std::vector<PhaseAtom>{{{0.0, 0.0}, {0.0, 0.0}, 1.0}});
  const PhaseAtomCloud g(std::vector<PhaseAtom>{{{3.0, 0.0}, {0.0, 4.0}, 1.0}});
  CHECK(w1_phase(f, g) == doctest::Approx(5.0).epsilon(1e-14));

  const PhaseAtomCloud h(std::vector<PhaseAtom>{{{0.0, 0.0}, {0.0, 0.0}, 0.5}});
  CHECK_THROWS_AS(w1_phase(f, h), incompatibility_error);
}

TEST_CASE("pair distance is the sum of its parts") {
  Rng rng(38);
  const SignedAtomCloud mu = random_cloud(rng, 6, 3, false);
  const SignedAtomCloud nu = match_masses(mu, random_cloud(rng, 4, 5, false));
  std::vector<PhaseAtom> fa, ga;
  for (int i = 0; i < 5; ++i) {
    fa.push_back({{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)},
                  {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}, 0.2});
    ga.push_back({{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)},
                  {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}, 0.2});
  }
  const PhaseAtomCloud f(fa), g(ga);
  CHECK(w1_pair(mu, f, nu, g) ==
        doctest::Approx(w1_signed(mu, nu) + w1_phase(f, g)).epsilon(1e-14));
}

TEST_CASE("triangle inequality on random triples") {
  Rng rng(39);
  for (int trial = 0; trial < 40; ++trial) {
    const SignedAtomCloud a = random_cloud(rng, 5, 3, false);
    const SignedAtomCloud b = match_masses(a, random_cloud(rng, 4, 4, false));
    const SignedAtomCloud c = match_masses(a, random_cloud(rng, 6, 2, false));
    const double ab = w1_signed(a, b);
    const double bc = w1_signed(b, c);
    const double ac = w1_signed(a, c);
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("moderately large clouds solve and certify") {
  Rng rng(40);
  const SignedAtomCloud mu = random_cloud(rng, 260, 40, false);
  const SignedAtomCloud nu = match_masses(mu, random_cloud(rng, 240, 60, false));
  const double d = w1_signed(mu, nu);
  CHECK(d > 0.0);
  CHECK(std::isfinite(d));

  const WassersteinResult r2 = w_p_positive(jordan(mu).first, jordan(nu).first, 2);
  CHECK(std::isfinite(r2.distance));
}
