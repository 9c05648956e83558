#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "spray/errors.hpp"
#include "spray/measures.hpp"
#include "spray/snapshot.hpp"

using namespace spray;

TEST_CASE("cloud construction drops zero weights and rejects bad atoms") {
  const SignedAtomCloud nu(std::vector<Atom>{{{0.0, 0.0}, 1.5}, {{1.0, 0.0}, 0.0},
                                             {{2.0, 0.0}, -0.5}});
  CHECK(nu.size() == 2);
  CHECK(mass_positive(nu) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(mass_negative(nu) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(total_variation(nu) == doctest::Approx(2.0).epsilon(1e-15));

  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SignedAtomCloud(std::vector<Atom>{{{inf, 0.0}, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SignedAtomCloud(std::vector<Atom>{{{0.0, 0.0}, std::nan("")}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PhaseAtomCloud(std::vector<PhaseAtom>{{{0.0, 0.0}, {0.0, 0.0}, -1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PhaseAtomCloud(std::vector<PhaseAtom>{{{0.0, 0.0}, {inf, 0.0}, 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("equal positions are kept as separate atoms") {
  const SignedAtomCloud nu(std::vector<Atom>{{{1.0, 1.0}, 1.0}, {{1.0, 1.0}, -1.0}});
  CHECK(nu.size() == 2);
  CHECK(total_variation(nu) == doctest::Approx(2.0));
}

TEST_CASE("mass sums stay accurate for many small weights") {
  std::vector<Atom> atoms;
  long double exact = 0.0L;
  Rng rng(21);
  for (int i = 0; i < 1000000; ++i) {
    const double w = rng.uniform(0.5e-6, 1.5e-6);
    atoms.push_back({{0.0, 0.0}, w});
    exact += w;
  }
  const SignedAtomCloud nu(std::move(atoms));
  CHECK(mass_positive(nu) ==
        doctest::Approx(static_cast<double>(exact)).epsilon(1e-14));
}

TEST_CASE("jordan decomposition separates the sign classes") {
  const SignedAtomCloud nu(std::vector<Atom>{{{0.0, 0.0}, 2.0}, {{1.0, 0.0}, -3.0},
                                             {{2.0, 0.0}, 0.5}});
  const auto [pos, neg] = jordan(nu);
  CHECK(pos.size() == 2);
  CHECK(neg.size() == 1);
  CHECK(mass_positive(pos) == doctest::Approx(2.5));
  CHECK(mass_negative(pos) == 0.0);
  CHECK(neg.atoms[0].weight == 3.0);
  CHECK(neg.atoms[0].pos.x == 1.0);
}

TEST_CASE("compatibility compares sign-class masses with a relative gate") {
  const SignedAtomCloud a(std::vector<Atom>{{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, -2.0}});
  const SignedAtomCloud b(std::vector<Atom>{{{5.0, 5.0}, 1.0}, {{6.0, 0.0}, -2.0}});
  CHECK(compatible(a, b));
  const SignedAtomCloud c(std::vector<Atom>{{{0.0, 0.0}, 1.0 + 1e-7}, {{1.0, 0.0}, -2.0}});
  CHECK_FALSE(compatible(a, c));
  const SignedAtomCloud d(std::vector<Atom>{{{0.0, 0.0}, 1.0 + 1e-12}, {{1.0, 0.0}, -2.0}});
  CHECK(compatible(a, d));
}

TEST_CASE("pushforward maps positions and keeps weights") {
  const SignedAtomCloud nu(std::vector<Atom>{{{1.0, 2.0}, 1.0}, {{-1.0, 0.5}, -0.25}});
  const SignedAtomCloud tau = pushforward(nu, [](Vec2 x) { return Vec2{x.y, -x.x}; });
  CHECK(tau.atoms[0].pos.x == 2.0);
  CHECK(tau.atoms[0].pos.y == -1.0);
  CHECK(tau.atoms[0].weight == 1.0);
  CHECK(tau.atoms[1].weight == -0.25);
  CHECK_THROWS_AS(
      pushforward(nu, [](Vec2) { return Vec2{std::numeric_limits<double>::infinity(), 0.0}; }),
      std::invalid_argument);
}

TEST_CASE("spray marginals and moments") {
  const PhaseAtomCloud f(std::vector<PhaseAtom>{{{0.0, 0.0}, {3.0, 4.0}, 1.0},
                                                {{1.0, 1.0}, {1.0, 0.0}, 0.5}});
  CHECK(mass(f) == doctest::Approx(1.5));
  CHECK(second_moment(f) == doctest::Approx(25.0 + 0.5).epsilon(1e-15));

  const SprayMarginals m = marginals(f);
  CHECK(m.rho.size() == 2);
  CHECK(m.rho.atoms[0].weight == 1.0);
  CHECK(m.current[0].second.x == 3.0);
  CHECK(m.current[1].second.x == 0.5);
}

TEST_CASE("constant density discretizes exactly") {
  const Window w{{-2.0, -2.0}, {2.0, 2.0}};
  const SignedAtomCloud nu = discretize_vorticity([](Vec2) { return 1.0; }, w, 4);
  CHECK(nu.size() == 16);
  for (const Atom& a : nu.atoms) CHECK(a.weight == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(mass_positive(nu) == doctest::Approx(16.0).epsilon(1e-13));
}

TEST_CASE("discretizations at different resolutions share reference masses") {
  const Window w{{-2.0, -2.0}, {2.0, 2.0}};
  const auto density = [](Vec2 x) {
    return std::exp(-(x - Vec2{-0.7, 0.0}).norm2()) - std::exp(-(x - Vec2{0.7, 0.0}).norm2());
  };
  const SignedAtomCloud a = discretize_vorticity(density, w, 6, 128);
  const SignedAtomCloud b = discretize_vorticity(density, w, 17, 128);
  CHECK(compatible(a, b));
  CHECK(mass_positive(a) == doctest::Approx(mass_positive(b)).epsilon(1e-12));
  CHECK(mass_negative(a) == doctest::Approx(mass_negative(b)).epsilon(1e-12));
}

TEST_CASE("discretization failures") {
  const Window w{{-2.0, -2.0}, {2.0, 2.0}};
  CHECK_THROWS_AS(discretize_vorticity([](Vec2) { return std::nan(""); }, w, 4),
                  discretization_error);
  CHECK_THROWS_AS(discretize_vorticity([](Vec2) { return 1.0; }, w, 0), std::invalid_argument);
  // a sign class present in the reference but missed by a coarse grid
  const auto needle = [](Vec2 x) {
    const double spike = std::exp(-((x - Vec2{0.501, 0.501}).norm2()) / 1e-4);
    return std::exp(-x.norm2()) - 3.0 * spike;
  };
  CHECK_THROWS_AS(discretize_vorticity(needle, w, 2, 512), discretization_error);
}

TEST_CASE("sampled spray has uniform weights and centered positions") {
  Rng rng(7, 3);
  const int n = 10000;
  const PhaseAtomCloud f = sample_spray(
      n, rng, [](Rng& r) { return r.gaussian2(); },
      [](Vec2, Rng& r) { return 0.5 * r.gaussian2(); });
  CHECK(f.size() == static_cast<std::size_t>(n));
  CHECK(mass(f) == doctest::Approx(1.0).epsilon(1e-12));
  Vec2 mean{0.0, 0.0};
  for (const PhaseAtom& a : f.atoms) mean += a.weight * a.pos;
  CHECK(std::fabs(mean.x) <= 0.05);
  CHECK(std::fabs(mean.y) <= 0.05);
}

TEST_CASE("generator streams are deterministic and decorrelated") {
  Rng a(42, 9);
  Rng b(42, 9);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng c(42, 10);
  int agree = 0;
  Rng a2(42, 9);
  for (int i = 0; i < 64; ++i) agree += (a2.next() == c.next());
  CHECK(agree == 0);
}

TEST_CASE("snapshot round trip is byte exact") {
  const SignedAtomCloud nu(std::vector<Atom>{{{1.0 / 3.0, -2.0e-17}, 0.1},
                                             {{-1.0, 1.0e300}, -3.5}});
  const PhaseAtomCloud f(std::vector<PhaseAtom>{{{0.1, 0.2}, {-0.3, 0.7}, 1.0 / 7.0}});
  const Snapshot s{nu, f};

  std::ostringstream first;
  write_snapshot(first, s);
  std::istringstream readback(first.str());
  const Snapshot t = read_snapshot(readback);
  std::ostringstream second;
  write_snapshot(second, t);
  CHECK(first.str() == second.str());
  CHECK(t.vortices.atoms[0].pos.x == nu.atoms[0].pos.x);
  CHECK(t.spray.atoms[0].weight == f.atoms[0].weight);
}

TEST_CASE("snapshot reader rejects malformed lines") {
  std::istringstream bad1("{\"kind\":\"vortex\",\"x1\":0,\"x2\":0,\"xi1\":1,\"xi2\":0,\"weight\":1}\n");
  CHECK_THROWS_AS(read_snapshot(bad1), spray::error);
  std::istringstream bad2("{\"kind\":\"comet\",\"x1\":0,\"x2\":0,\"xi1\":null,\"xi2\":null,\"weight\":1}\n");
  CHECK_THROWS_AS(read_snapshot(bad2), spray::error);
  std::istringstream bad3("not json\n");
  CHECK_THROWS_AS(read_snapshot(bad3), spray::error);
}
