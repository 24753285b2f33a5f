#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "gibq/chebyshev.hpp"
#include "gibq/errors.hpp"
#include "gibq/flow.hpp"

using namespace gibq;

namespace {

const FrequencyLattice L = FrequencyLattice::torus();

Trajectory constant(const SpectralField& f, double horizon, int p = kDefaultTimeDegree) {
  return Trajectory(horizon, std::vector<SpectralField>(p + 1, f));
}

InitialPair random_pair(std::uint64_t seed, Frequency band) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto field = [&] {
    std::vector<Mode> m{{0, Complex(u(rng), 0)}};
    for (Frequency xi = 1; xi <= band; ++xi) {
      const Complex c(u(rng), u(rng));
      m.push_back({xi, c});
      m.push_back({-xi, std::conj(c)});
    }
    return SpectralField(L, m);
  };
  return {field(), field()};
}

}  // namespace

TEST_CASE("chebyshev nodes and quadrature") {
  const auto t = lobatto_nodes(16, 0.0, 2.0);
  REQUIRE(t.size() == 17);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(2.0));
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);

  // Trig integrands with frequency <= 1 on [0, 1] against the analytic value.
  for (int p : {16, 32}) {
    const auto x = lobatto_nodes(p, 0.0, 1.0);
    const auto w = clenshaw_curtis_weights(p, 0.0, 1.0);
    for (double a : {0.0, 0.3, 1.0}) {
      double q = 0;
      for (std::size_t i = 0; i < x.size(); ++i) q += w[i] * std::cos(a * x[i]) * std::sin(0.7 * x[i]);
      const double exact = a == 0.0 ? (1 - std::cos(0.7)) / 0.7
                                    : 0.5 * ((1 - std::cos(0.7 + a)) / (0.7 + a) +
                                             (1 - std::cos(0.7 - a)) / (0.7 - a));
      CHECK(q == doctest::Approx(exact).epsilon(1e-12));
    }
  }

  const auto bw = barycentric_weights(16);
  for (double s : {0.0, 0.123, 0.77}) {
    const auto row = interpolation_row(t, bw, s);
    double v = 0;
    for (std::size_t i = 0; i < t.size(); ++i) v += row[i] * std::exp(-t[i]);
    CHECK(v == doctest::Approx(std::exp(-s)).epsilon(1e-12));
  }
}

TEST_CASE("linear flow examples") {
  const Complex c(0.8, 0.0);
  const auto still = linear_flow({SpectralField::delta(L, 0, c), SpectralField(L)}, 1.0);
  for (const auto& v : still.values()) CHECK(v.at(0) == c);
  const auto drift = linear_flow({SpectralField(L), SpectralField::delta(L, 0, c)}, 1.0);
  for (std::size_t i = 0; i < drift.nodes().size(); ++i)
    CHECK(drift.values()[i].at(0).real() == doctest::Approx(drift.nodes()[i] * c.real()));

  const Frequency xi = 3;
  const double lam = lambda_symbol(xi, L);
  const auto osc = linear_flow({SpectralField::delta(L, xi, 1.0), SpectralField::delta(L, xi, 2.0)}, 0.9);
  for (std::size_t i = 0; i < osc.nodes().size(); ++i) {
    const double t = osc.nodes()[i];
    CHECK(osc.values()[i].at(xi).real() ==
          doctest::Approx(std::cos(t * lam) + 2 * std::sin(t * lam) / lam).epsilon(1e-13));
  }

  const auto pair = random_pair(1, 30);
  const auto traj = linear_flow(pair, 1.0);
  for (const auto& v : traj.values()) CHECK(v.l1() <= pair.u0.l1() + pair.u1.l1() + 1e-12);
  CHECK(sin_over_lambda(0.5, 0.0) == 0.5);
  CHECK(sin_over_lambda(0.5, 1e-9) == doctest::Approx(0.5));
}

TEST_CASE("trajectory evaluation interpolates") {
  const auto pair = random_pair(2, 6);
  const auto traj = linear_flow(pair, 0.8);
  const auto mid = traj.evaluate(0.31);
  const auto direct = linear_flow(pair, 0.31).final_value();
  CHECK((mid - direct).l1() <= 1e-12 * direct.l1());
  CHECK_THROWS_AS(traj + linear_flow(pair, 0.5), StructuralError);
}

TEST_CASE("duhamel of constant single frequencies") {
  const double T = 0.9;
  const Complex c1(0.7, 0.2), c2(-1.1, 0.4), c3(0.5, 0);
  const auto a = constant(SpectralField::delta(L, 5, c1), T);
  const auto b = constant(SpectralField::delta(L, -2, c2), T);
  const auto d = constant(SpectralField::delta(L, 9, c3), T);
  const Trajectory* args[] = {&a, &b, &d};
  const Frequency out = 12;
  const double lam = lambda_symbol(out, L);
  for (double t : {0.1, 0.45, T}) {
    const auto v = duhamel(args, t);
    const Complex expected = c1 * c2 * c3 * (1 - std::cos(t * lam));
    CHECK(std::abs(v.at(out) - expected) <= 1e-10 * std::abs(expected));
  }
  const auto traj = duhamel_trajectory(args);
  for (std::size_t i = 0; i < traj.nodes().size(); ++i) {
    const Complex expected = c1 * c2 * c3 * (1 - std::cos(traj.nodes()[i] * lam));
    CHECK(std::abs(traj.values()[i].at(out) - expected) <= 1e-10 * std::abs(c1 * c2 * c3));
  }
}

TEST_CASE("duhamel is multilinear and bounded") {
  const auto p = random_pair(3, 12);
  const auto u = linear_flow(p, 0.7);
  const auto zero = Trajectory::zero(L, 0.7, kDefaultTimeDegree);
  const Trajectory* with_zero[] = {&u, &zero};
  CHECK(duhamel_trajectory(with_zero).sup_l1() == 0.0);
  CHECK(duhamel(with_zero, 0.7).empty());

  const Trajectory* args[] = {&u, &u, &u};
  const double out = duhamel(args, 0.7).l1();
  CHECK(out <= 0.5 * 0.7 * 0.7 * std::pow(u.sup_l1(), 3));

  const auto traj = duhamel_trajectory(args);
  CHECK(traj.final_value().l1() <= 0.5 * 0.7 * 0.7 * std::pow(u.sup_l1(), 3));
  CHECK((traj.final_value() - duhamel(args, 0.7)).l1() <= 1e-10 * out);
}

TEST_CASE("time degree self-convergence") {
  const auto p = random_pair(4, 10);
  auto run = [&](int deg) {
    const auto u = linear_flow(p, 1.0, deg);
    const Trajectory* args[] = {&u, &u};
    return duhamel_trajectory(args).final_value();
  };
  const auto a = run(16), b = run(32);
  CHECK((a - b).l1() <= 1e-11 * b.l1());
}

TEST_CASE("pair and trajectory algebra") {
  const auto p = random_pair(5, 4);
  CHECK(p.is_hermitian());
  const auto q = p.scaled(2.0) - p;
  CHECK((q.u0 - p.u0).l1() == 0.0);
  const auto t = linear_flow(p, 0.5);
  CHECK(sup_l1_distance(t.scaled(3.0), t + t + t) <= 1e-14 * t.sup_l1());
}
