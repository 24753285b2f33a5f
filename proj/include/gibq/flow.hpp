#pragma once

// Linear propagator and multilinear Duhamel operator for
//   u_tt - u_xx - u_ttxx = (u^k)_xx,
// which on the Fourier side reads u''(xi) = -lambda^2 u(xi) + lambda^2 [u^k](xi)
// with lambda = |omega|/<omega>. Time dependence is carried on Chebyshev-Lobatto
// nodes in [0, T].

#include <span>
#include <vector>

#include "gibq/lattice.hpp"

namespace gibq {

inline constexpr int kDefaultTimeDegree = 16;

struct InitialPair {
  SpectralField u0;
  SpectralField u1;

  static InitialPair zero(const FrequencyLattice& lattice);
  const FrequencyLattice& lattice() const { return u0.lattice(); }
  bool is_hermitian(double relative_tolerance = 1e-12) const;
  InitialPair scaled(double factor) const;
  friend InitialPair operator+(const InitialPair& a, const InitialPair& b);
  friend InitialPair operator-(const InitialPair& a, const InitialPair& b);
};

class Trajectory {
 public:
  Trajectory() = default;
  /// values[m] is the field at the m-th Lobatto node of [0, horizon].
  Trajectory(double horizon, std::vector<SpectralField> values);
  static Trajectory zero(const FrequencyLattice& lattice, double horizon, int degree);

  double horizon() const noexcept { return horizon_; }
  int degree() const noexcept { return static_cast<int>(values_.size()) - 1; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<SpectralField>& values() const noexcept { return values_; }
  const FrequencyLattice& lattice() const { return values_.front().lattice(); }
  const SpectralField& final_value() const { return values_.back(); }

  /// Barycentric interpolation in time, t in [0, horizon].
  SpectralField evaluate(double t) const;

  /// max over nodes of the l1 norm of the coefficients.
  double sup_l1() const;
  /// max over nodes of max |coefficient|.
  double sup_linf() const;

  Trajectory scaled(double factor) const;
  friend Trajectory operator+(const Trajectory& a, const Trajectory& b);
  friend Trajectory operator-(const Trajectory& a, const Trajectory& b);

  /// Throws StructuralError unless horizon, degree and lattice agree.
  void require_compatible(const Trajectory& other, const char* op) const;

 private:
  double horizon_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> bary_;
  std::vector<SpectralField> values_;
};

double sup_l1_distance(const Trajectory& a, const Trajectory& b);

/// sin(t lambda)/lambda, with a Taylor expansion when |t lambda| < 1e-4
/// (the lambda -> 0 limit is t).
double sin_over_lambda(double t, double lambda);

/// S(t)(u0, u1) = cos(t lambda) u0 + sin(t lambda)/lambda u1 at the nodes.
Trajectory linear_flow(const InitialPair& pair, double horizon, int degree = kDefaultTimeDegree);

/// Node-wise product of the arguments (the Fourier side of u_1 ... u_k).
Trajectory product_trajectory(std::span<const Trajectory* const> args);

/// I_k(args)(t) = int_0^t sin((t - t') lambda) lambda [u_1 ... u_k]^(t') dt',
/// evaluated directly: each argument is interpolated to the Clenshaw-Curtis
/// nodes of [0, t_eval] and the product formed there.
SpectralField duhamel(std::span<const Trajectory* const> args, double t_eval);

/// int_0^t sin((t - t') lambda) lambda F(t') dt' at every node, where F is the
/// polynomial interpolant of the forcing trajectory.
Trajectory duhamel_integrate(const Trajectory& forcing);

/// I_k(args) at every node: duhamel_integrate(product_trajectory(args)).
Trajectory duhamel_trajectory(std::span<const Trajectory* const> args);

}  // namespace gibq
