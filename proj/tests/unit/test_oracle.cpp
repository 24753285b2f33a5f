#include <cmath>

#include "doctest.h"

#include "gibq/construction.hpp"
#include "gibq/oracle.hpp"
#include "gibq/series.hpp"

using namespace gibq;

namespace {
const FrequencyLattice L = FrequencyLattice::torus();
}

TEST_CASE("linear hook reproduces the exact flow") {
  const Frequency xi = 4;
  const InitialPair p{SpectralField(L, {{xi, 0.5}, {-xi, 0.5}}), SpectralField(L)};
  Rk4Options o;
  o.nonlinear = false;
  const auto r = rk4_solve(p, 2, 1.0, o);
  const double lam = lambda_symbol(xi, L);
  for (std::size_t i = 0; i < r.trajectory.nodes().size(); ++i)
    CHECK(std::abs(r.trajectory.values()[i].at(xi) - 0.5 * std::cos(r.trajectory.nodes()[i] * lam)) <= 1e-8);
  CHECK(rk4_solve(InitialPair::zero(L), 2, 1.0).trajectory.sup_l1() == 0.0);
}

TEST_CASE("rk4 agrees with the series at small amplitude") {
  const auto pair = sample_base_data(3, 0.5, 0.05);
  Rk4Options o;
  o.fail_on_tail = false;
  const auto r = rk4_solve(pair, 2, 1.0, o);
  const auto acc = partial_sum(pair, 2, 8, 1.0);
  CHECK(sup_l1_distance(r.trajectory, acc.sum()) < 1e-6);
  CHECK(r.energy_drift < 1e-6);
  CHECK(r.steps >= 2000);
  CHECK(r.dt == doctest::Approx(1.0 / 2000));
  CHECK(r.tail_ok);
}

TEST_CASE("closure") {
  const InitialPair p{SpectralField(L, {{3, 1.0}, {-3, 1.0}}), SpectralField(L)};
  const auto c = support_closure(p, 2, 2);
  // Sums of up to 3 elements of {-3, 3}.
  CHECK(c == std::vector<Frequency>{-9, -6, -3, 0, 3, 6, 9});
}

TEST_CASE("closed-form first term") {
  for (int k : {2, 3}) {
    const auto full = sample_base_data(20 + k, 0.4, 0.5);
    const InitialPair pair{full.u0.restricted([](Frequency x) { return std::abs(x) <= 10; }), SpectralField(L)};
    for (double T : {0.2, 1.0}) {
      const auto closed = xi1_closed_form(pair, k, T);
      const auto path = xi_term(pair, k, 1, T).trajectory.final_value();
      CHECK((closed - path).l1() <= 1e-10 * path.l1());
    }
  }
  CHECK(xi1_closed_form(InitialPair::zero(L), 2, 0.5).empty());
  CHECK(cosine_kernel(0.0, 0.3, 1.0) == 0.0);

  ScheduleOptions o;
  o.delta_hint = 0.25;
  o.N_override = 256;
  const auto P = schedule(1, 2, -0.75, -0.75, o);
  const auto bump = make_bump(P);
  const auto closed = xi1_closed_form(bump, P, P.T);
  const auto path = xi_term(bump.phi, 2, 1, P.T).trajectory.final_value();
  CHECK((closed - path).l1() <= 1e-10 * path.l1());
  // lambda(0) = 0 makes the zero mode vanish; the resonant sum shows up next to it.
  CHECK(std::abs(closed.at(0)) <= 1e-14 * closed.l1());
  CHECK(closed.at(1).real() > 0);
  CHECK(std::abs(closed.at(1).imag()) <= 1e-12 * closed.at(1).real());
}

TEST_CASE("convolution sandwich") {
  const auto r10 = convolution_sandwich(0, 0, 10);
  REQUIRE(r10.values.size() == 21);
  CHECK(r10.values[10] == doctest::Approx(11.0));
  CHECK(r10.values[5] == doctest::Approx(6.0));
  CHECK(r10.support_ok);
  CHECK(r10.holds());
  CHECK(r10.lower_constant == doctest::Approx(6.0 / 11.0));
  CHECK(r10.upper_constant == doctest::Approx(1.0));
  const auto r2 = convolution_sandwich(5, -9, 2);
  CHECK(r2.values == std::vector<double>{1, 2, 3, 2, 1});
  CHECK(r2.holds());
  CHECK(!r2.holds(0.9, 1.0));
}
