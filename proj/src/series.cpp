#include "gibq/series.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gibq/errors.hpp"

namespace gibq {
namespace {

// Nondecreasing k-tuples summing to total.
void sorted_multisets(int total, int parts, int min_part, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    if (total >= min_part) {
      cur.push_back(total);
      out.push_back(cur);
      cur.pop_back();
    }
    return;
  }
  for (int v = min_part; v * parts <= total; ++v) {
    cur.push_back(v);
    sorted_multisets(total - v, parts - 1, v, cur, out);
    cur.pop_back();
  }
}

double multinomial(const std::vector<int>& parts) {
  double r = 1.0;
  int n = 0;
  std::size_t i = 0;
  while (i < parts.size()) {
    std::size_t run = 1;
    while (i + run < parts.size() && parts[i + run] == parts[i]) ++run;
    for (std::size_t m = 1; m <= run; ++m) {
      ++n;
      r = r * n / static_cast<double>(m);
    }
    i += run;
  }
  return r;
}

}  // namespace

SeriesBuilder::SeriesBuilder(InitialPair pair, int k, double horizon, int degree)
    : pair_(std::move(pair)), k_(k), horizon_(horizon), p_(degree) {
  if (k < 2) throw DomainError(fmt::format("arity must be >= 2, got {}", k));
}

Trajectory SeriesBuilder::forcing(int j) {
  if (j < 1) throw DomainError("the forcing is defined for j >= 1");
  std::vector<std::vector<int>> sets;
  std::vector<int> cur;
  sorted_multisets(j - 1, k_, 0, cur, sets);
  std::vector<Trajectory> products;
  std::vector<double> weights;
  for (const auto& set : sets) {
    std::vector<const Trajectory*> args;
    for (int part : set) args.push_back(&term(part));
    products.push_back(product_trajectory(args));
    weights.push_back(multinomial(set));
  }
  std::vector<SpectralField> values;
  for (std::size_t m = 0; m < products.front().values().size(); ++m) {
    std::vector<const SpectralField*> fields;
    for (const auto& pr : products) fields.push_back(&pr.values()[m]);
    values.push_back(linear_combination(weights, fields));
  }
  return Trajectory(horizon_, std::move(values));
}

const Trajectory& SeriesBuilder::term(int j) {
  if (j < 0) throw DomainError("generation must be >= 0");
  {
    std::lock_guard lock(mutex_);
    if (static_cast<std::size_t>(j) < memo_.size() && memo_[j]) return *memo_[j];
  }
  auto value = std::make_unique<Trajectory>(j == 0 ? linear_flow(pair_, horizon_, p_)
                                                   : duhamel_integrate(forcing(j)));
  std::lock_guard lock(mutex_);
  if (memo_.size() <= static_cast<std::size_t>(j)) memo_.resize(j + 1);
  if (!memo_[j]) memo_[j] = std::move(value);
  return *memo_[j];
}

SeriesTerm xi_term(const InitialPair& pair, int k, int j, double horizon, int degree) {
  SeriesBuilder builder(pair, k, horizon, degree);
  return {j, builder.term(j), (k - 1) * j + 1};
}

Trajectory psi_tree(const InitialPair& pair, const KTree& tree, double horizon, int degree) {
  const Trajectory flow = linear_flow(pair, horizon, degree);
  auto rec = [&](auto&& self, const KTree& t) -> Trajectory {
    if (t.is_terminal()) return flow;
    std::vector<Trajectory> children;
    for (const auto& c : t.children()) children.push_back(self(self, c));
    std::vector<const Trajectory*> args;
    for (const auto& c : children) args.push_back(&c);
    return duhamel_trajectory(args);
  };
  return rec(rec, tree);
}

double pair_fl1(const InitialPair& pair) { return pair.u0.l1() + pair.u1.l1(); }

double pair_h0(const InitialPair& pair) { return pair.u0.l2() + pair.u1.l2(); }

SeriesAccumulator partial_sum(SeriesBuilder& builder, int max_generation) {
  if (max_generation < 0) throw DomainError("max generation must be >= 0");
  const int k = builder.arity();
  const double T = builder.horizon();
  SeriesAccumulator acc;
  acc.k = k;
  acc.horizon = T;
  acc.pair_fl1 = pair_fl1(builder.pair());
  acc.pair_h0 = pair_h0(builder.pair());
  for (int j = 0; j <= max_generation; ++j) {
    const Trajectory& t = builder.term(j);
    acc.terms.push_back({j, t, (k - 1) * j + 1});
    acc.partial_sums.push_back(j == 0 ? t : acc.partial_sums.back() + t);
    acc.ledger.push_back(t.sup_l1());
    acc.final_linf.push_back(t.final_value().max_abs());
    acc.ratios.push_back(j == 0 || acc.ledger[j - 1] == 0.0 ? 0.0
                                                            : acc.ledger[j] / acc.ledger[j - 1]);
  }
  const double M = acc.pair_fl1;
  const double H = acc.pair_h0;
  for (int j = 1; j <= max_generation && M > 0; ++j) {
    const double base = std::pow(T, 2.0 * j);
    const double c1 = acc.ledger[j] / (base * std::pow(M, (k - 1.0) * j + 1.0));
    acc.fitted_c = std::max(acc.fitted_c, std::pow(c1, 1.0 / j));
    if (H > 0) {
      const double ci = acc.final_linf[j] / (base * std::pow(M, (k - 1.0) * j - 1.0) * H * H);
      acc.fitted_c_inf = std::max(acc.fitted_c_inf, std::pow(ci, 1.0 / j));
    }
  }
  return acc;
}

SeriesAccumulator partial_sum(const InitialPair& pair, int k, int max_generation, double horizon,
                              int degree) {
  SeriesBuilder builder(pair, k, horizon, degree);
  return partial_sum(builder, max_generation);
}

namespace {

Trajectory gamma_map(const Trajectory& flow, const Trajectory& u, int k) {
  std::vector<const Trajectory*> args(k, &u);
  return flow + duhamel_trajectory(args);
}

}  // namespace

double tail_residual(const SeriesAccumulator& acc, const InitialPair& pair) {
  const Trajectory& U = acc.sum();
  const Trajectory flow = linear_flow(pair, acc.horizon, U.degree());
  return sup_l1_distance(U, gamma_map(flow, U, acc.k));
}

FixedPointResult fixed_point(const InitialPair& pair, int k, double horizon, double tol,
                             const FixedPointOptions& options) {
  if (!(tol > 0)) throw DomainError("fixed-point tolerance must be positive");
  if (k < 2) throw DomainError(fmt::format("arity must be >= 2, got {}", k));
  const Trajectory flow = linear_flow(pair, horizon, options.degree);
  FixedPointResult result;
  result.predicted_factor =
      k * 0.5 * horizon * horizon * std::pow(2.0 * pair_fl1(pair), k - 1.0);
  Trajectory u = flow;
  int increases = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Trajectory next = gamma_map(flow, u, k);
    for (const auto& v : next.values())
      if (v.size() > options.support_budget)
        throw CapacityError(fmt::format("fixed-point iterate support {} exceeds budget {}",
                                        v.size(), options.support_budget));
    const double d = sup_l1_distance(next, u);
    result.distances.push_back(d);
    result.iterations = it;
    const std::size_t n = result.distances.size();
    if (n >= 2 && result.distances[n - 2] > 0)
      result.contraction_factor = d / result.distances[n - 2];
    u = std::move(next);
    if (!std::isfinite(d))
      throw DivergenceError("fixed-point iteration produced a non-finite distance",
                            result.contraction_factor);
    if (d < tol) {
      result.solution = std::move(u);
      return result;
    }
    increases = (n >= 2 && d > result.distances[n - 2]) ? increases + 1 : 0;
    if (increases >= 3)
      throw DivergenceError(
          fmt::format("fixed-point iteration is not contracting after {} iterations", it),
          result.contraction_factor);
  }
  throw DivergenceError(fmt::format("fixed-point iteration did not reach tolerance {} within {} "
                                    "iterations",
                                    tol, options.max_iterations),
                        result.contraction_factor);
}

}  // namespace gibq
