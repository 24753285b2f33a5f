#include "gibq/flow.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gibq/chebyshev.hpp"
#include "gibq/errors.hpp"
#include "gibq/parallel.hpp"

namespace gibq {

InitialPair InitialPair::zero(const FrequencyLattice& lattice) {
  return {SpectralField(lattice), SpectralField(lattice)};
}

bool InitialPair::is_hermitian(double relative_tolerance) const {
  return u0.is_hermitian(relative_tolerance) && u1.is_hermitian(relative_tolerance);
}

InitialPair InitialPair::scaled(double factor) const {
  return {u0.scaled(factor), u1.scaled(factor)};
}

InitialPair operator+(const InitialPair& a, const InitialPair& b) {
  return {a.u0 + b.u0, a.u1 + b.u1};
}

InitialPair operator-(const InitialPair& a, const InitialPair& b) {
  return {a.u0 - b.u0, a.u1 - b.u1};
}

Trajectory::Trajectory(double horizon, std::vector<SpectralField> values)
    : horizon_(horizon), values_(std::move(values)) {
  if (!(horizon_ >= 0) || !std::isfinite(horizon_))
    throw DomainError(fmt::format("trajectory horizon must be >= 0, got {}", horizon_));
  if (values_.size() < 2) throw StructuralError("a trajectory needs at least two nodes");
  for (const auto& v : values_)
    if (!(v.lattice() == values_.front().lattice()))
      throw StructuralError("trajectory node fields live on different lattices");
  nodes_ = lobatto_nodes(degree(), 0.0, horizon_);
  bary_ = barycentric_weights(degree());
}

Trajectory Trajectory::zero(const FrequencyLattice& lattice, double horizon, int degree) {
  return Trajectory(horizon, std::vector<SpectralField>(degree + 1, SpectralField(lattice)));
}

void Trajectory::require_compatible(const Trajectory& other, const char* op) const {
  if (horizon_ != other.horizon_)
    throw StructuralError(
        fmt::format("{}: horizons differ ({} vs {})", op, horizon_, other.horizon_));
  if (degree() != other.degree())
    throw StructuralError(
        fmt::format("{}: time degrees differ ({} vs {})", op, degree(), other.degree()));
  if (!(lattice() == other.lattice()))
    throw StructuralError(fmt::format("{}: lattices differ", op));
}

SpectralField Trajectory::evaluate(double t) const {
  const double slack = 1e-12 * std::max(1.0, horizon_);
  if (t < -slack || t > horizon_ + slack)
    throw DomainError(fmt::format("evaluation time {} outside [0, {}]", t, horizon_));
  t = std::clamp(t, 0.0, horizon_);
  if (horizon_ == 0.0) return values_.front();
  const auto row = interpolation_row(nodes_, bary_, t);
  std::vector<const SpectralField*> ptrs;
  for (const auto& v : values_) ptrs.push_back(&v);
  return linear_combination(row, ptrs);
}

double Trajectory::sup_l1() const {
  double s = 0.0;
  for (const auto& v : values_) s = std::max(s, v.l1());
  return s;
}

double Trajectory::sup_linf() const {
  double s = 0.0;
  for (const auto& v : values_) s = std::max(s, v.max_abs());
  return s;
}

Trajectory Trajectory::scaled(double factor) const {
  std::vector<SpectralField> out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.push_back(v.scaled(factor));
  return Trajectory(horizon_, std::move(out));
}

Trajectory operator+(const Trajectory& a, const Trajectory& b) {
  a.require_compatible(b, "trajectory add");
  std::vector<SpectralField> out;
  for (std::size_t m = 0; m < a.values_.size(); ++m) out.push_back(a.values_[m] + b.values_[m]);
  return Trajectory(a.horizon_, std::move(out));
}

Trajectory operator-(const Trajectory& a, const Trajectory& b) {
  a.require_compatible(b, "trajectory subtract");
  std::vector<SpectralField> out;
  for (std::size_t m = 0; m < a.values_.size(); ++m) out.push_back(a.values_[m] - b.values_[m]);
  return Trajectory(a.horizon_, std::move(out));
}

double sup_l1_distance(const Trajectory& a, const Trajectory& b) { return (a - b).sup_l1(); }

double sin_over_lambda(double t, double lambda) {
  const double x = t * lambda;
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return t * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0)));
  }
  return std::sin(x) / lambda;
}

Trajectory linear_flow(const InitialPair& pair, double horizon, int degree) {
  if (!(horizon > 0)) throw DomainError(fmt::format("horizon must be > 0, got {}", horizon));
  if (!(pair.u0.lattice() == pair.u1.lattice()))
    throw StructuralError("initial pair components live on different lattices");
  const FrequencyLattice& lattice = pair.lattice();
  const auto nodes = lobatto_nodes(degree, 0.0, horizon);
  std::vector<SpectralField> values;
  values.reserve(nodes.size());
  for (double t : nodes) {
    auto a = pair.u0.multiplied([&](Frequency xi) { return std::cos(t * lambda_symbol(xi, lattice)); });
    auto b = pair.u1.multiplied(
        [&](Frequency xi) { return sin_over_lambda(t, lambda_symbol(xi, lattice)); });
    values.push_back(a + b);
  }
  return Trajectory(horizon, std::move(values));
}

namespace {

void require_args(std::span<const Trajectory* const> args, const char* op) {
  if (args.empty()) throw StructuralError(fmt::format("{}: no arguments", op));
  for (const auto* a : args) args.front()->require_compatible(*a, op);
}

SpectralField product_of(std::vector<SpectralField> factors) {
  SpectralField acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = convolve(acc, factors[i]);
  return acc;
}

}  // namespace

Trajectory product_trajectory(std::span<const Trajectory* const> args) {
  require_args(args, "product");
  const std::size_t nodes = args.front()->values().size();
  std::vector<SpectralField> values(nodes);
  parallel_for(nodes, [&](std::size_t m) {
    std::vector<SpectralField> factors;
    for (const auto* a : args) factors.push_back(a->values()[m]);
    values[m] = product_of(std::move(factors));
  });
  return Trajectory(args.front()->horizon(), std::move(values));
}

SpectralField duhamel(std::span<const Trajectory* const> args, double t_eval) {
  require_args(args, "duhamel");
  const Trajectory& first = *args.front();
  const FrequencyLattice& lattice = first.lattice();
  const double slack = 1e-12 * std::max(1.0, first.horizon());
  if (t_eval < -slack || t_eval > first.horizon() + slack)
    throw DomainError(fmt::format("duhamel time {} outside [0, {}]", t_eval, first.horizon()));
  if (t_eval <= 0.0) return SpectralField(lattice);

  const int p = first.degree();
  const auto tau = lobatto_nodes(p, 0.0, t_eval);
  const auto w = clenshaw_curtis_weights(p, 0.0, t_eval);
  std::vector<SpectralField> terms(tau.size(), SpectralField(lattice));
  // The last node has t - tau = 0, where the kernel vanishes.
  parallel_for(tau.size() - 1, [&](std::size_t q) {
    std::vector<SpectralField> factors;
    for (const auto* a : args) factors.push_back(a->evaluate(tau[q]));
    const double dt = t_eval - tau[q];
    terms[q] = product_of(std::move(factors)).multiplied([&](Frequency xi) {
      const double l = lambda_symbol(xi, lattice);
      return w[q] * std::sin(dt * l) * l;
    });
  });
  std::vector<Mode> all;
  for (const auto& f : terms)
    for (const auto& m : f.modes()) all.push_back(m);
  return SpectralField(lattice, std::move(all));
}

Trajectory duhamel_integrate(const Trajectory& forcing) {
  const FrequencyLattice& lattice = forcing.lattice();
  const int p = forcing.degree();
  const std::size_t P = static_cast<std::size_t>(p) + 1;
  const auto& t = forcing.nodes();
  const auto bary = barycentric_weights(p);

  // For node i the integral over [0, t_i] uses Clenshaw-Curtis of order 2p;
  // the forcing is replaced by its interpolant sum_m F_m L_m(tau), so that
  //   I(t_i) = sum_m K_im(lambda) F_m,
  //   K_im = sum_q W_iq sin((t_i - tau_iq) lambda) lambda L_m(tau_iq).
  const int Q = 2 * p;
  struct NodePlan {
    std::vector<double> dt, weight;
    std::vector<std::vector<double>> rows;
  };
  std::vector<NodePlan> plan(P);
  for (std::size_t i = 1; i < P; ++i) {
    const auto tau = lobatto_nodes(Q, 0.0, t[i]);
    const auto wq = clenshaw_curtis_weights(Q, 0.0, t[i]);
    for (std::size_t q = 0; q + 1 < tau.size(); ++q) {
      plan[i].dt.push_back(t[i] - tau[q]);
      plan[i].weight.push_back(wq[q]);
      plan[i].rows.push_back(interpolation_row(t, bary, tau[q]));
    }
  }

  std::vector<Frequency> support;
  for (const auto& f : forcing.values())
    for (const auto& m : f.modes()) support.push_back(m.xi);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const std::size_t S = support.size();

  std::vector<Complex> in(S * P);
  for (std::size_t m = 0; m < P; ++m) {
    std::size_t pos = 0;
    for (const auto& mode : forcing.values()[m].modes()) {
      while (support[pos] != mode.xi) ++pos;
      in[pos * P + m] = mode.value;
    }
  }

  // The kernel depends on |xi| only, so +xi and -xi share one evaluation.
  std::vector<Frequency> magnitudes;
  for (Frequency xi : support) magnitudes.push_back(xi < 0 ? -xi : xi);
  std::sort(magnitudes.begin(), magnitudes.end());
  magnitudes.erase(std::unique(magnitudes.begin(), magnitudes.end()), magnitudes.end());

  std::vector<Complex> out(S * P);
  parallel_for(magnitudes.size(), [&](std::size_t a) {
    const Frequency mag = magnitudes[a];
    const double l = lambda_symbol(mag, lattice);
    std::vector<double> K(P * P, 0.0);
    for (std::size_t i = 1; i < P; ++i) {
      const auto& np = plan[i];
      for (std::size_t q = 0; q < np.dt.size(); ++q) {
        const double g = np.weight[q] * std::sin(np.dt[q] * l) * l;
        if (g == 0.0) continue;
        const auto& row = np.rows[q];
        for (std::size_t m = 0; m < P; ++m) K[i * P + m] += g * row[m];
      }
    }
    for (Frequency xi : {-mag, mag}) {
      auto it = std::lower_bound(support.begin(), support.end(), xi);
      if (it == support.end() || *it != xi) continue;
      const std::size_t s = static_cast<std::size_t>(it - support.begin());
      for (std::size_t i = 1; i < P; ++i) {
        Complex acc{};
        for (std::size_t m = 0; m < P; ++m) acc += K[i * P + m] * in[s * P + m];
        out[s * P + i] = acc;
      }
      if (mag == 0) break;
    }
  });

  std::vector<SpectralField> values;
  values.reserve(P);
  for (std::size_t i = 0; i < P; ++i) {
    std::vector<Mode> modes;
    modes.reserve(S);
    for (std::size_t s = 0; s < S; ++s)
      if (out[s * P + i] != Complex{}) modes.push_back({support[s], out[s * P + i]});
    values.emplace_back(lattice, std::move(modes));
  }
  return Trajectory(forcing.horizon(), std::move(values));
}

Trajectory duhamel_trajectory(std::span<const Trajectory* const> args) {
  return duhamel_integrate(product_trajectory(args));
}

}  // namespace gibq
