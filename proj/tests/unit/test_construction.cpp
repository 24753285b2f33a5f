#include <cmath>
#include <set>

#include "doctest.h"

#include "gibq/construction.hpp"
#include "gibq/errors.hpp"
#include "gibq/norms.hpp"

using namespace gibq;

TEST_CASE("schedule arithmetic") {
  ScheduleOptions o;
  o.delta_hint = 0.5;
  o.enforce_separation = false;
  const auto P = schedule(2, 2, -1.0, -1.0, o);
  CHECK(P.N == 16);
  CHECK(P.R == doctest::Approx(4.0));
  CHECK(P.T == doctest::Approx(std::pow(16.0, -0.375)));
  CHECK(P.T == doctest::Approx(0.3536).epsilon(1e-3));
  CHECK(P.A == 10);

  CHECK(delta_ceiling(-0.5, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(delta_ceiling(-4.0, 2) == doctest::Approx(1.0));
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(schedule(1, 2, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(schedule(1, 2, 0.5, 0.5), DomainError);
  ScheduleOptions bad;
  bad.delta_hint = 0.6;
  try {
    schedule(1, 2, -0.5, -0.5, bad);
    FAIL("expected rejection");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("0.333") != std::string::npos);
  }
  ScheduleOptions tiny;
  tiny.N_override = 10;
  CHECK_THROWS_AS(schedule(1, 2, -0.75, -0.75, tiny), DomainError);
}

TEST_CASE("separation and the default delta") {
  const auto P = schedule(1, 2, -0.75, -0.75);
  CHECK(P.delta == doctest::Approx(0.25));
  CHECK(P.N >= kSeparationFactor * P.A);
  CHECK(!P.adjustments.empty());
  ScheduleOptions o;
  o.delta_hint = 0.25;
  const auto P2 = schedule(2, 2, -0.75, -0.75, o);
  CHECK(P2.N == 1024);  // 2^8 = 256 raised to the separation threshold
  CHECK(P2.T < 0.5);
  CHECK(P2.R == doctest::Approx(std::pow(1024.0, 0.5)));
}

TEST_CASE("bump support and amplitudes") {
  ScheduleOptions o;
  o.delta_hint = 0.25;
  o.N_override = 256;
  const auto P = schedule(1, 2, -0.75, -0.75, o);
  const auto bump = make_bump(P);
  CHECK(bump.sigma == std::vector<Frequency>{-512, -256, 256, 512});
  REQUIRE(bump.omega.size() == 44);
  std::set<Frequency> expected;
  for (Frequency eta : {-512, -256, 256, 512})
    for (Frequency d = -5; d <= 5; ++d) expected.insert(eta + d);
  CHECK(std::set<Frequency>(bump.omega.begin(), bump.omega.end()) == expected);
  CHECK(bump.phi.u0.size() == 44);
  CHECK(bump.phi.u1.empty());
  for (const auto& m : bump.phi.u0.modes()) CHECK(m.value == Complex(P.R));
  CHECK(bump.phi.u0.at(0) == Complex(0.0));
  CHECK(bump.phi.u0.at(300) == Complex(0.0));
  CHECK(norm(bump.phi, NormSpec::wiener_algebra_pair()) == doctest::Approx(44 * P.R));
  CHECK(bump.phi.is_hermitian());
}

TEST_CASE("base data") {
  const auto a = sample_base_data(42, 0.5, 1.0);
  const auto b = sample_base_data(42, 0.5, 1.0);
  CHECK(a.u0.modes().size() == b.u0.modes().size());
  for (std::size_t i = 0; i < a.u0.size(); ++i) CHECK(a.u0.modes()[i] == b.u0.modes()[i]);
  for (std::size_t i = 0; i < a.u1.size(); ++i) CHECK(a.u1.modes()[i] == b.u1.modes()[i]);
  CHECK(a.is_hermitian());
  CHECK(a.u0.max_abs_frequency() <= kBaseDataBand);
  const auto z = sample_base_data(42, 0.5, 0.0);
  CHECK(z.u0.empty());
  CHECK(z.u1.empty());
  CHECK((sample_base_data(43, 0.5, 1.0).u0 - a.u0).l1() > 0);
  CHECK_THROWS_AS(sample_base_data(1, 0.0, 1.0), DomainError);

  ScheduleOptions o;
  o.delta_hint = 0.25;
  const auto P = schedule(1, 2, -0.75, -0.75, o);
  const auto bump = make_bump(P);
  CHECK(norm(a, NormSpec::wiener_algebra_pair()) < P.R * P.A);
  const auto pert = perturbed_data(InitialPair::zero(FrequencyLattice::torus()), bump);
  CHECK((pert.u0 - bump.phi.u0).l1() == 0.0);
  const auto moved = perturbed_data(a, bump) - a;
  CHECK((moved.u0 - bump.phi.u0).l1() <= 1e-12 * bump.phi.u0.l1());
  CHECK(norm(moved, NormSpec::sobolev_pair(P.s)) < 1.0 / P.n);
}
