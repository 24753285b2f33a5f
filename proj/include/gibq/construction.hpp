#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gibq/flow.hpp"
#include "gibq/lattice.hpp"

namespace gibq {

inline constexpr int kBumpWidth = 10;          // A
inline constexpr int kSeparationFactor = 64;   // N >= 64 A
inline constexpr Frequency kBaseDataBand = 64; // base data lives on |xi| <= 64

struct ScheduleOptions {
  std::optional<double> delta_hint;
  /// Use this N instead of ceil(n^{2/delta}) (slope sweeps). The separation
  /// rule is not applied to an explicit N; the cubes only need N > A.
  std::optional<Frequency> N_override;
  /// Raise an n-derived N to the smallest power of two >= 64 A.
  bool enforce_separation = true;
  int A = kBumpWidth;
};

struct InflationParams {
  int n = 1;
  int k = 2;
  double s = -0.75;
  double sigma = -0.75;
  double delta = 0.25;
  Frequency N = 0;
  double R = 0.0;
  double T = 0.0;
  int A = kBumpWidth;
  std::vector<std::string> adjustments;  // every deviation from the raw formulas
};

/// min(1, -2s/(k+1)); admissible delta lie strictly between 0 and this value.
double delta_ceiling(double s, int k);

InflationParams schedule(int n, int k, double s, double sigma, const ScheduleOptions& options = {});

struct BumpData {
  InitialPair phi;                    // (phi_n, 0) with phi_n^ = R on Omega
  std::vector<Frequency> sigma;       // {-2N, -N, N, 2N}
  std::vector<Frequency> omega;       // Omega on the lattice, sorted
};

BumpData make_bump(const InflationParams& params,
                   const FrequencyLattice& lattice = FrequencyLattice::torus());

/// Random Hermitian pair with coefficients amplitude * exp(-decay |xi|) * U,
/// U uniform in the unit square, on |xi| <= 64. Uniform deviates are built
/// from raw mt19937_64 output so the stream is identical on every platform.
InitialPair sample_base_data(std::uint64_t seed, double decay_rate, double amplitude,
                             const FrequencyLattice& lattice = FrequencyLattice::torus());

InitialPair perturbed_data(const InitialPair& base, const BumpData& bump);

}  // namespace gibq
