#pragma once

// Picard power series u = sum_j Xi_j(pair) and the Duhamel fixed point.

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "gibq/flow.hpp"
#include "gibq/ktree.hpp"

namespace gibq {

struct SeriesTerm {
  int j = 0;
  Trajectory trajectory;
  int degree = 1;  // (k-1)j + 1
};

/// Memoised Xi_j via Xi_j = sum over j_1+...+j_k = j-1 of I_k(Xi_{j_1}, ..., Xi_{j_k}).
/// Compositions that are permutations of each other give the same product,
/// so each sorted multiset is formed once and weighted by its multinomial count.
class SeriesBuilder {
 public:
  SeriesBuilder(InitialPair pair, int k, double horizon, int degree = kDefaultTimeDegree);

  int arity() const noexcept { return k_; }
  double horizon() const noexcept { return horizon_; }
  int time_degree() const noexcept { return p_; }
  const InitialPair& pair() const noexcept { return pair_; }

  const Trajectory& term(int j);
  /// The forcing whose Duhamel integral is Xi_j (j >= 1).
  Trajectory forcing(int j);

 private:
  InitialPair pair_;
  int k_;
  double horizon_;
  int p_;
  std::mutex mutex_;
  std::vector<std::unique_ptr<Trajectory>> memo_;
};

SeriesTerm xi_term(const InitialPair& pair, int k, int j, double horizon,
                   int degree = kDefaultTimeDegree);

/// Structural recursion: a terminal node is S(t)pair, an internal node is
/// I_k of its children.
Trajectory psi_tree(const InitialPair& pair, const KTree& tree, double horizon,
                    int degree = kDefaultTimeDegree);

/// sum of ||u0||_{FL^1} and ||u1||_{FL^1}
double pair_fl1(const InitialPair& pair);
/// sum of ||u0||_{L^2} and ||u1||_{L^2} on the coefficient side
double pair_h0(const InitialPair& pair);

struct SeriesAccumulator {
  int k = 2;
  double horizon = 0.0;
  std::vector<SeriesTerm> terms;
  std::vector<Trajectory> partial_sums;  // U_J for J = 0..max
  std::vector<double> ledger;            // sup over time of ||Xi_j||_{l1}
  std::vector<double> ratios;            // ledger[j] / ledger[j-1], 0 at j = 0
  std::vector<double> final_linf;        // ||Xi_j(T)||_{l^inf}
  double pair_fl1 = 0.0;
  double pair_h0 = 0.0;
  /// Smallest C with ledger[j] <= C^j T^{2j} M^{(k-1)j+1} for all j >= 1.
  double fitted_c = 0.0;
  /// Smallest C with ||Xi_j(T)||_inf <= C^j T^{2j} M^{(k-1)j-1} ||pair||_{H^0}^2.
  double fitted_c_inf = 0.0;

  const Trajectory& sum() const { return partial_sums.back(); }
  int max_generation() const { return static_cast<int>(terms.size()) - 1; }
};

SeriesAccumulator partial_sum(const InitialPair& pair, int k, int max_generation, double horizon,
                              int degree = kDefaultTimeDegree);

/// Builds the accumulator from an existing builder (shares its memo).
SeriesAccumulator partial_sum(SeriesBuilder& builder, int max_generation);

/// sup over time of || U_J - (S(t)pair + I_k(U_J)) ||_{l1}.
double tail_residual(const SeriesAccumulator& acc, const InitialPair& pair);

struct FixedPointOptions {
  int max_iterations = 64;
  int degree = kDefaultTimeDegree;
  std::size_t support_budget = 200'000;
};

struct FixedPointResult {
  Trajectory solution;
  int iterations = 0;
  std::vector<double> distances;  // successive sup-l1 distances
  double contraction_factor = 0.0;  // last distance ratio, 0 if fewer than two steps
  double predicted_factor = 0.0;    // k * T^2/2 * (2M)^{k-1}
};

/// Iterates u -> S(t)pair + I_k(u) from u = S(t)pair until the successive
/// sup-l1 distance drops below tol.
FixedPointResult fixed_point(const InitialPair& pair, int k, double horizon, double tol,
                             const FixedPointOptions& options = {});

}  // namespace gibq
