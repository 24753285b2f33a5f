#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "gibq/harness.hpp"
#include "gibq/oracle.hpp"

using namespace gibq;

namespace {

InflationParams params_for(int k, Frequency N, double sigma = -0.75) {
  ScheduleOptions o;
  o.delta_hint = k == 2 ? 0.25 : 0.15;
  o.N_override = N;
  return schedule(1, k, -0.75, sigma, o);
}

}  // namespace

TEST_CASE("resonant split") {
  const auto P = params_for(2, 256);
  const auto bump = make_bump(P);
  const auto split = resonant_split(bump, P, P.T);
  CHECK(split.sigma1.size() == 4);
  CHECK(split.sigma2.size() == 12);
  for (const auto& t : split.sigma1) CHECK(t[0] + t[1] == 0);
  const auto xi1 = xi1_closed_form(bump, P, P.T).scaled(1.0 / (P.R * P.R));
  CHECK(((split.I1 + split.I2) - xi1).l1() <= 1e-10 * xi1.l1());
  for (const auto& m : split.I1.modes()) CHECK(std::abs(m.xi) <= P.A);

  const auto P3 = params_for(3, 256);
  const auto s3 = resonant_split(make_bump(P3), P3, P3.T);
  CHECK(s3.sigma1.size() + s3.sigma2.size() == 64);
  const std::vector<Frequency> t{256, 256, -512};
  CHECK(std::find(s3.sigma1.begin(), s3.sigma1.end(), t) != s3.sigma1.end());

  std::vector<double> ratio;
  for (Frequency N : {256, 1024, 4096}) {
    const auto Q = params_for(2, N);
    const auto s = resonant_split(make_bump(Q), Q, Q.T);
    ratio.push_back(norm(s.I2, NormSpec::sobolev(-0.75)) / norm(s.I1, NormSpec::sobolev(-0.75)));
  }
  CHECK(ratio[1] < ratio[0]);
  CHECK(ratio[2] < ratio[1]);
}

TEST_CASE("conditions are evaluated and violations reported") {
  const auto P = params_for(2, 1024);
  const auto base = sample_base_data(5, 0.5, 1.0);
  const auto L = check_conditions(P, base);
  CHECK(L.conditions.size() == 7);
  for (const auto& c : L.conditions) {
    CHECK(std::isfinite(c.margin));
    CHECK(c.holds == (c.margin < 1.0));
  }
  CHECK(L.condition("vi").holds);
  CHECK(L.condition("iii.a").holds);
  const auto big = check_conditions(P, base.scaled(1000.0));
  CHECK(!big.condition("iii.a").holds);
  CHECK(big.condition("iii.a").margin > L.condition("iii.a").margin);
  CHECK_THROWS(L.condition("vii"));

  // Scheduled n = 2: every margin is logged; which ones hold at this scale
  // is a measurement, not an assumption.
  ScheduleOptions o;
  o.delta_hint = 0.25;
  const auto P2 = schedule(2, 2, -0.75, -0.75, o);
  const auto L2 = check_conditions(P2, InitialPair::zero(FrequencyLattice::torus()));
  CHECK(L2.conditions.size() == 7);
  CHECK(L2.condition("vi").holds);
  const double pert = norm(make_bump(P2).phi, NormSpec::sobolev_pair(-0.75));
  CHECK(L2.condition("i").lhs == doctest::Approx(pert));
  CHECK(L2.condition("i").margin == doctest::Approx(pert * 2));
}

TEST_CASE("condition (ii) follows the schedule slope") {
  std::vector<double> v;
  for (Frequency N : {256, 1024, 4096})
    v.push_back(check_conditions(params_for(2, N), InitialPair::zero(FrequencyLattice::torus()))
                    .condition("ii").lhs);
  const double slope = std::log(v[2] / v[0]) / std::log(16.0);
  CHECK(slope == doctest::Approx(-0.125).epsilon(0.03 / 0.125));
}

TEST_CASE("decomposition identity") {
  const auto P = params_for(2, 256);
  const auto base = sample_base_data(6, 0.5, 1.0);
  CHECK(decomposition_identity_error(base, make_bump(P).phi, 2, P.T) <= 1e-10);
}

TEST_CASE("method names") {
  CHECK(parse_method("series") == SolveMethod::Series);
  CHECK(parse_method("fixed-point") == SolveMethod::FixedPoint);
  CHECK(parse_method("rk4") == SolveMethod::Rk4);
  CHECK(to_string(SolveMethod::FixedPoint) == "fixed-point");
  CHECK_THROWS(parse_method("euler"));
}

TEST_CASE("convergent run and divergent abort") {
  // T^2 ||phi||_{FL^1} ~ A N^{-delta/2}: with delta close to its ceiling and
  // a large N the series converges.
  ScheduleOptions o;
  o.N_override = 65536;
  o.delta_hint = 0.95;
  const auto P = schedule(1, 2, -3.0, -3.0, o);
  RunOptions ro;
  ro.max_generation = 4;
  ro.cross_check_fixed_point = true;
  const auto rep = run_inflation(P, ro, NormSpec::sobolev(-3.0));
  CHECK(rep.status == "ok");
  CHECK(rep.xi_hs.size() == 5);
  CHECK(std::isfinite(rep.solution_hs));
  CHECK(rep.fixed_point_distance >= 0);
  CHECK(rep.estimates.conditions.size() == 7);

  const auto Pd = params_for(2, 1024);
  RunOptions rd;
  rd.max_generation = 3;
  try {
    run_inflation(Pd, rd, std::vector<NormSpec>{NormSpec::sobolev(-0.75), NormSpec::fourier_lebesgue(-0.75, 1)});
    FAIL("expected the divergent series to abort");
  } catch (const InflationAborted& e) {
    REQUIRE(e.partial().size() == 2);
    CHECK(e.partial()[0].status == "series-divergent");
    CHECK(e.partial()[0].xi1_phi_hs > 0);
    CHECK(e.measured_factor() >= 1.0);
  }
}

TEST_CASE("sweep output") {
  SweepConfig c;
  c.N_list = {};
  c.n_list = {};
  const auto empty = sweep(c);
  CHECK(empty.reports.empty());
  std::string header;
  for (const auto& col : csv_columns()) header += (header.empty() ? "" : ",") + col;
  CHECK(empty.csv == header + "\n");

  SweepConfig s;
  s.delta = 0.25;
  s.N_list = {256, 512, 1024};
  s.J = 2;
  const auto a = sweep(s);
  const auto b = sweep(s);
  CHECK(a.csv == b.csv);
  CHECK(a.reports.size() == 3);
  CHECK(std::count(a.csv.begin(), a.csv.end(), '\n') == 4);
  CHECK(a.reports[0].xi1_phi_hs < a.reports[1].xi1_phi_hs);
  CHECK(a.reports[1].xi1_phi_hs < a.reports[2].xi1_phi_hs);
  for (const auto& r : a.reports) CHECK(r.status == "series-divergent");
}
