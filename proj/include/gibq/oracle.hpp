#pragma once

// Independent reference computations: direct time stepping of the Fourier-side
// ODE, the closed-form first Picard term, and exact lattice convolutions of
// cube indicators.

#include <cstddef>
#include <vector>

#include "gibq/construction.hpp"
#include "gibq/flow.hpp"

namespace gibq {

struct Rk4Options {
  double dt = 0.0;              // 0 means horizon / 2000
  int closure_depth = 6;        // union of the ((k-1)j+1)-fold sumsets, j <= depth
  double tail_tolerance = 1e-10;
  bool fail_on_tail = true;     // otherwise the breach is only reported
  bool nonlinear = true;        // test hook: off gives the linear flow
  int output_degree = kDefaultTimeDegree;
};

struct Rk4Result {
  Trajectory trajectory;
  std::vector<Frequency> closure;
  int closure_depth = 0;
  long long steps = 0;
  double dt = 0.0;
  /// max over steps of (T^2/2) ||[u^k]^ outside the closure||_2 / ||u||_2
  double tail = 0.0;
  bool tail_ok = true;
  double energy_initial = 0.0;
  double energy_drift = 0.0;  // max |E(t) - E(0)| / max(|E(0)|, tiny)
};

/// Classical RK4 for u'' = -lambda^2 u + lambda^2 [u^k]^ on a fixed support
/// closure, with [u^k]^ formed pseudospectrally on an alias-free grid.
/// Substeps land exactly on the Lobatto nodes of the output trajectory.
Rk4Result rk4_solve(const InitialPair& pair, int k, double horizon, const Rk4Options& options = {});

/// Union of the ((k-1)j+1)-fold sumsets of the support of the pair, j <= depth.
std::vector<Frequency> support_closure(const InitialPair& pair, int k, int depth);

inline constexpr std::size_t kTupleBudget = 20'000'000;

/// int_0^T sin((T-t')l) l cos(b t') dt' = (l^2 T^2 / 2) sinc((l+b)T/2) sinc((l-b)T/2).
double cosine_kernel(double lambda, double b, double T);

/// Xi_1(pair)(T) for a pair with zero second component, by expanding the
/// product of cosines into 2^{k-1} cosines and integrating each exactly.
SpectralField xi1_closed_form(const InitialPair& pair, int k, double horizon,
                              std::size_t tuple_budget = kTupleBudget);
SpectralField xi1_closed_form(const BumpData& bump, const InflationParams& params, double horizon);

struct SandwichReport {
  long long a = 0, b = 0;
  int A = 0;
  double lower_constant = 0.0;  // largest C with C (A+1) chi_{a+b+Q_A} <= conv
  double upper_constant = 0.0;  // smallest C~ with conv <= C~ (A+1) chi_{a+b+Q_2A}
  bool support_ok = false;      // supp conv within a+b+Q_2A
  std::vector<double> values;   // conv on a+b-A .. a+b+A
  bool holds(double C = 0.5, double C_tilde = 1.0) const {
    return support_ok && lower_constant >= C && upper_constant <= C_tilde;
  }
};

SandwichReport convolution_sandwich(long long a, long long b, int A);

}  // namespace gibq
