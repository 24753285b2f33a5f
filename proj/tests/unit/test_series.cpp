#include <cmath>

#include "doctest.h"

#include "gibq/construction.hpp"
#include "gibq/errors.hpp"
#include "gibq/series.hpp"

using namespace gibq;

namespace {

const FrequencyLattice L = FrequencyLattice::torus();

double rel(const Trajectory& a, const Trajectory& b) {
  return sup_l1_distance(a, b) / std::max(a.sup_l1(), b.sup_l1());
}

}  // namespace

TEST_CASE("first generations") {
  const auto pair = sample_base_data(7, 0.5, 0.3);
  const double T = 0.6;
  const auto flow = linear_flow(pair, T);
  CHECK(sup_l1_distance(xi_term(pair, 2, 0, T).trajectory, flow) == 0.0);
  const Trajectory* args[] = {&flow, &flow, &flow};
  const auto xi1 = xi_term(pair, 3, 1, T);
  CHECK(xi1.degree == 3);
  CHECK(rel(xi1.trajectory, duhamel_trajectory(args)) <= 1e-13);

  const auto zero = InitialPair::zero(L);
  for (int j = 0; j <= 3; ++j) CHECK(xi_term(zero, 2, j, T).trajectory.sup_l1() == 0.0);
}

TEST_CASE("tree sums reproduce the generation terms") {
  const auto pair = sample_base_data(8, 0.5, 0.3);
  const double T = 0.7;
  CHECK(sup_l1_distance(psi_tree(pair, KTree::terminal(2), T), linear_flow(pair, T)) == 0.0);
  for (auto [k, J] : {std::pair{2, 3}, std::pair{3, 2}}) {
    for (int j = 1; j <= J; ++j) {
      std::optional<Trajectory> sum;
      for (const auto& tree : enumerate_trees(k, j)) {
        const auto t = psi_tree(pair, tree, T);
        sum = sum ? *sum + t : t;
      }
      CHECK(rel(*sum, xi_term(pair, k, j, T).trajectory) <= 1e-10);
    }
  }
}

TEST_CASE("partial sums, ledger and tail") {
  const auto pair = sample_base_data(9, 0.5, 0.1);
  const double T = 0.8;
  const auto acc0 = partial_sum(pair, 2, 0, T);
  CHECK(sup_l1_distance(acc0.sum(), linear_flow(pair, T)) == 0.0);

  const auto acc = partial_sum(pair, 2, 8, T);
  REQUIRE(acc.ledger.size() == 9);
  const double M = pair_fl1(pair);
  for (int j = 1; j <= 8; ++j) {
    CHECK(acc.ratios[j] < 1.0);
    CHECK(acc.ledger[j] <= std::pow(acc.fitted_c, j) * std::pow(T, 2 * j) * std::pow(M, j + 1) * (1 + 1e-9));
  }
  CHECK(acc.fitted_c > 0);
  const double r8 = tail_residual(acc, pair);
  const double r6 = tail_residual(partial_sum(pair, 2, 6, T), pair);
  CHECK(r8 < r6);
  CHECK(r8 < 1e-8);
  CHECK(tail_residual(partial_sum(InitialPair::zero(L), 2, 3, T), InitialPair::zero(L)) == 0.0);
}

TEST_CASE("builder memoizes") {
  const auto pair = sample_base_data(10, 0.5, 0.2);
  SeriesBuilder b(pair, 2, 0.5);
  const Trajectory& first = b.term(3);
  const Trajectory& again = b.term(3);
  CHECK(&first == &again);
  CHECK(sup_l1_distance(first, xi_term(pair, 2, 3, 0.5).trajectory) == 0.0);
}

TEST_CASE("fixed point agrees with the series") {
  const auto pair = sample_base_data(11, 0.5, 0.1);
  const double T = 0.8, tol = 1e-11;
  const auto fp = fixed_point(pair, 2, T, tol);
  const auto acc = partial_sum(pair, 2, 14, T);
  CHECK(sup_l1_distance(fp.solution, acc.sum()) < 10 * tol * std::max(1.0, acc.sum().sup_l1()));
  CHECK(fp.contraction_factor < 1.0);
  CHECK(fp.predicted_factor > 0);
  // Order-of-magnitude agreement of the measured and predicted factors.
  CHECK(fp.contraction_factor < 10 * fp.predicted_factor);

  const auto z = fixed_point(InitialPair::zero(L), 2, T, tol);
  CHECK(z.iterations == 1);
  CHECK(z.solution.sup_l1() == 0.0);
}

TEST_CASE("fixed point reports divergence") {
  const auto pair = sample_base_data(12, 0.5, 30.0);
  try {
    fixed_point(pair, 2, 1.0, 1e-9);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.measured_factor() > 1.0);
  } catch (const CapacityError&) {
  }
}
