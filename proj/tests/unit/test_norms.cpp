#include <cmath>
#include <random>

#include "doctest.h"

#include "gibq/construction.hpp"
#include "gibq/errors.hpp"
#include "gibq/norms.hpp"

using namespace gibq;

namespace {

InflationParams params_for(Frequency N) {
  ScheduleOptions o;
  o.delta_hint = 0.25;
  o.N_override = N;
  return schedule(1, 2, -0.75, -0.75, o);
}

}  // namespace

TEST_CASE("spec parsing") {
  CHECK(NormSpec::parse("hs,-0.75").family == NormFamily::Sobolev);
  CHECK(NormSpec::parse("sobolev,-0.75").s == -0.75);
  const auto fl = NormSpec::parse("fl,-0.5,inf");
  CHECK(fl.family == NormFamily::FourierLebesgue);
  CHECK(std::isinf(fl.q));
  CHECK(NormSpec::parse("mod,-1,1").family == NormFamily::Modulation);
  CHECK(NormSpec::parse("wa,0,2").family == NormFamily::WienerAmalgam);
  CHECK(NormSpec::parse("fl1-pair").family == NormFamily::WienerAlgebraPair);
  const auto round = NormSpec::parse(NormSpec::modulation(-0.25, 2).to_string());
  CHECK(round.family == NormFamily::Modulation);
  CHECK(round.s == -0.25);
  CHECK_THROWS_AS(NormSpec::parse("hs"), ConfigError);
  CHECK_THROWS_AS(NormSpec::parse("bogus,1"), ConfigError);
  CHECK_THROWS_AS(NormSpec::parse("fl,0,0.5"), ConfigError);
}

TEST_CASE("simple values") {
  const auto L = FrequencyLattice::torus();
  const auto d0 = SpectralField::delta(L, 0, 1.0);
  for (double s : {-2.0, -0.5, 0.0, 1.5}) CHECK(norm(d0, NormSpec::sobolev(s)) == doctest::Approx(1.0));
  CHECK(norm(SpectralField(L), NormSpec::fourier_lebesgue(0, kInf)) == 0.0);
  const auto d3 = SpectralField::delta(L, 3, 2.0);
  const double w = std::pow(1.0 + 9.0, -0.25);
  CHECK(norm(d3, NormSpec::fourier_lebesgue(-0.5, 1)) == doctest::Approx(2 * w));
  CHECK(norm(d3, NormSpec::fourier_lebesgue(-0.5, kInf)) == doctest::Approx(2 * w));
  // On the unit torus the band norms collapse to FL^{s,q}.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Mode> m;
  for (Frequency xi = -20; xi <= 20; ++xi) m.push_back({xi, Complex(u(rng), u(rng))});
  const SpectralField f(L, m);
  for (double q : {1.0, 2.0, kInf}) {
    const double fl = norm(f, NormSpec::fourier_lebesgue(-0.3, q));
    CHECK(norm(f, NormSpec::modulation(-0.3, q)) == doctest::Approx(fl).epsilon(1e-12));
    CHECK(norm(f, NormSpec::wiener_amalgam(-0.3, q)) == doctest::Approx(fl).epsilon(1e-10));
  }
  CHECK(norm(f, NormSpec::sobolev(0)) == doctest::Approx(f.l2()));
}

TEST_CASE("bump norms") {
  std::vector<double> ratios;
  for (Frequency N : {256, 1024, 4096}) {
    const auto P = params_for(N);
    const auto bump = make_bump(P);
    const double fl1 = norm(bump.phi, NormSpec::wiener_algebra_pair());
    CHECK(fl1 == doctest::Approx(P.R * 44).epsilon(1e-13));
    const double r = fl1 / (P.R * 4 * P.A);
    CHECK(r >= 1.0);
    CHECK(r <= 1.2);
    const double hs = norm(bump.phi, NormSpec::sobolev_pair(P.s));
    const double ratio = hs / (P.R * std::pow(static_cast<double>(N), P.s) * std::sqrt(P.A));
    // Two cubes at |xi| ~ N and two at ~2N: sqrt((22 + 22 * 2^{2s}) / A).
    CHECK(ratio == doctest::Approx(std::sqrt((22 + 22 * std::pow(2.0, 2 * P.s)) / P.A)).epsilon(2e-3));
    ratios.push_back(ratio);
  }
  CHECK(ratios.back() == doctest::Approx(ratios.front()).epsilon(1e-3));
}

TEST_CASE("band partition") {
  const auto torus = FrequencyLattice::torus();
  const auto single = band_partition(SpectralField::delta(torus, 3, 1.0));
  REQUIRE(single.bands.size() == 1);
  CHECK(single.bands[0].n == 3);

  const auto line = FrequencyLattice::line_approx(8.0);
  CHECK(band_index(4, line) == 1);   // nu = 0.5 rounds up
  CHECK(band_index(3, line) == 0);
  CHECK(band_index(-4, line) == 0);  // nu = -0.5 belongs to Q_0
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Mode> m;
  for (Frequency xi = -70; xi <= 70; ++xi) m.push_back({xi, Complex(u(rng), u(rng))});
  const SpectralField f(line, m);
  const auto part = band_partition(f);
  double energy = 0;
  for (const auto& b : part.bands) energy += b.l2() * b.l2();
  CHECK(energy == doctest::Approx(l_two(f) * l_two(f)).epsilon(1e-12));

  const auto P = params_for(256);
  const auto bp = band_partition(make_bump(P).phi.u0);
  CHECK(bp.bands.size() == 44);
  for (const auto& b : bp.bands) {
    const Frequency d = std::min({std::abs(b.n - 256), std::abs(b.n + 256), std::abs(b.n - 512),
                                  std::abs(b.n + 512)});
    CHECK(d <= 5);
  }
}

TEST_CASE("embeddings and algebra on a corpus") {
  const auto corpus = embedding_corpus(99, 25);
  REQUIRE(corpus.size() == 25);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(corpus[i].is_hermitian());
    const auto e = check_embeddings(corpus[i], i % 2 ? -0.5 : 0.25);
    CHECK(e.all_hold());
    CHECK(e.linf_over_l2 > 0);
    const auto a = check_algebra(corpus[i], corpus[(i + 3) % corpus.size()]);
    CHECK(a.fl1.holds);
    CHECK(a.m21.holds);
    CHECK(a.m21_constant <= 8.0);
  }
  const auto d0 = SpectralField::delta(FrequencyLattice::torus(), 0, 1.0);
  const auto a = check_algebra(d0, d0);
  CHECK(a.fl1.lhs == doctest::Approx(a.fl1.rhs));
}

TEST_CASE("sup norm of the weighted bump") {
  const auto P = params_for(1024);
  const auto bump = make_bump(P);
  const double hs = norm(bump.phi.u0, NormSpec::sobolev(P.s));
  const double ws = norm(bump.phi.u0, NormSpec::w_s2inf(P.s));
  CHECK(ws <= (1 + 2 * std::sqrt(P.A)) * hs);
  CHECK(l_infinity(bessel_potential(bump.phi.u0, P.s)) <= 2 * std::sqrt(P.A + 1.0) * hs);
}

TEST_CASE("g_s and f_sq are finite and positive") {
  CHECK(g_s(-0.75, 10) > 0);
  CHECK(f_sq(-0.75, 1, 10) > 0);
  CHECK(std::isfinite(f_sq(-0.75, kInf, 10)));
}
