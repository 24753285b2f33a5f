#include "gibq/construction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "gibq/errors.hpp"

namespace gibq {
namespace {

Frequency next_power_of_two(Frequency v) {
  return static_cast<Frequency>(std::bit_ceil(static_cast<std::uint64_t>(std::max<Frequency>(v, 1))));
}

double horizon_for(Frequency N, int k, double s, double delta) {
  return std::pow(static_cast<double>(N), (k - 1) / 2.0 * (s + delta / 2.0));
}

}  // namespace

double delta_ceiling(double s, int k) { return std::min(1.0, -2.0 * s / (k + 1)); }

InflationParams schedule(int n, int k, double s, double sigma, const ScheduleOptions& options) {
  if (!(s < 0)) throw DomainError(fmt::format("the construction needs s < 0, got {}", s));
  if (k < 2) throw DomainError(fmt::format("arity must be >= 2, got {}", k));
  if (n < 1) throw DomainError(fmt::format("inflation index must be >= 1, got {}", n));
  if (options.A < 2 || options.A % 2 != 0)
    throw DomainError(fmt::format("A must be a positive even integer, got {}", options.A));
  if (!std::isfinite(sigma)) throw DomainError("sigma must be finite");

  InflationParams p;
  p.n = n;
  p.k = k;
  p.s = s;
  p.sigma = sigma;
  p.A = options.A;

  const double ceiling = delta_ceiling(s, k);
  if (options.delta_hint) {
    const double d = *options.delta_hint;
    if (!(d > 0 && d < ceiling))
      throw DomainError(fmt::format("delta {} outside the admissible interval (0, {})", d, ceiling));
    p.delta = d;
  } else {
    p.delta = 0.5 * ceiling;
  }

  if (options.N_override) {
    p.N = *options.N_override;
    if (p.N <= p.A)
      throw DomainError(fmt::format("N = {} does not separate the cubes of width A = {}", p.N, p.A));
    if (p.N < kSeparationFactor * p.A)
      p.adjustments.push_back(fmt::format("explicit N = {} is below {} A = {}; cubes stay disjoint",
                                          p.N, kSeparationFactor, kSeparationFactor * p.A));
  } else {
    const double raw = std::pow(static_cast<double>(n), 2.0 / p.delta);
    const double nearest = std::round(raw);
    const double v = std::abs(raw - nearest) <= 1e-9 * std::max(1.0, raw) ? nearest : std::ceil(raw);
    if (v > 4.0e18) throw DomainError(fmt::format("N = n^(2/delta) = {} does not fit", raw));
    p.N = std::max<Frequency>(1, static_cast<Frequency>(v));
    if (options.enforce_separation && p.N < kSeparationFactor * p.A) {
      const Frequency raised = next_power_of_two(kSeparationFactor * p.A);
      p.adjustments.push_back(
          fmt::format("N raised from {} to {} so that N >= {} A", p.N, raised, kSeparationFactor));
      p.N = raised;
    }
  }

  if (horizon_for(p.N, k, s, p.delta) >= 1.0 / n) {
    Frequency raised = next_power_of_two(p.N + 1);
    while (horizon_for(raised, k, s, p.delta) >= 1.0 / n) raised *= 2;
    p.adjustments.push_back(fmt::format("N raised from {} to {} so that T < 1/n", p.N, raised));
    p.N = raised;
  }

  const double N = static_cast<double>(p.N);
  p.R = std::pow(N, -s - p.delta);
  p.T = horizon_for(p.N, k, s, p.delta);
  return p;
}

BumpData make_bump(const InflationParams& params, const FrequencyLattice& lattice) {
  BumpData b;
  const Frequency N = params.N;
  const Frequency half = params.A / 2;
  b.sigma = {-2 * N, -N, N, 2 * N};
  std::vector<Mode> modes;
  for (Frequency eta : b.sigma)
    for (Frequency d = -half; d <= half; ++d) {
      b.omega.push_back(eta + d);
      modes.push_back({eta + d, Complex(params.R, 0.0)});
    }
  std::sort(b.omega.begin(), b.omega.end());
  if (std::adjacent_find(b.omega.begin(), b.omega.end()) != b.omega.end())
    throw StructuralError(fmt::format("cubes of Omega overlap at N = {}, A = {}", N, params.A));
  b.phi = {SpectralField(lattice, std::move(modes)), SpectralField(lattice)};
  return b;
}

InitialPair sample_base_data(std::uint64_t seed, double decay_rate, double amplitude,
                             const FrequencyLattice& lattice) {
  if (!(decay_rate > 0)) throw DomainError("decay rate must be positive");
  std::mt19937_64 rng(seed);
  auto uniform = [&] {
    // 53 random bits mapped to [-1, 1).
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
  };
  auto component = [&] {
    std::vector<Mode> modes;
    modes.push_back({0, Complex(amplitude * uniform(), 0.0)});
    for (Frequency xi = 1; xi <= kBaseDataBand; ++xi) {
      const double env = amplitude * std::exp(-decay_rate * static_cast<double>(xi));
      const double re = uniform();
      const double im = uniform();
      const Complex c(env * re, env * im);
      modes.push_back({xi, c});
      modes.push_back({-xi, std::conj(c)});
    }
    return SpectralField(lattice, std::move(modes));
  };
  InitialPair pair;
  pair.u0 = component();
  pair.u1 = component();
  return pair;
}

InitialPair perturbed_data(const InitialPair& base, const BumpData& bump) {
  return base + bump.phi;
}

}  // namespace gibq
