#pragma once

// Function-space norms: H^s, FL^{s,q}, W^{s,2,inf}, M^{2,q}_s, W^{2,q}_s and
// their pair versions, with the frequency-band machinery behind the last two.
//
// Bands are the sharp cells Q_n = n + [-1/2, 1/2) in the dual coordinate. The
// band weight is <n>^s. On the unit torus every band holds one integer
// frequency, so M^{2,q}_s and W^{2,q}_s reduce to FL^{s,q}; the structural
// checks are meaningful on a LineApprox lattice, where bands hold `period`
// frequencies each.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gibq/flow.hpp"
#include "gibq/lattice.hpp"

namespace gibq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr int kLinfOversample = 8;

enum class NormFamily {
  Sobolev,
  FourierLebesgue,
  SobolevPair,
  WienerAlgebraPair,
  W_s2inf,
  Modulation,
  WienerAmalgam,
};

struct NormSpec {
  NormFamily family = NormFamily::Sobolev;
  double s = 0.0;
  double q = 2.0;  // kInf for the supremum

  static NormSpec sobolev(double s) { return {NormFamily::Sobolev, s, 2.0}; }
  static NormSpec fourier_lebesgue(double s, double q) { return {NormFamily::FourierLebesgue, s, q}; }
  static NormSpec sobolev_pair(double s) { return {NormFamily::SobolevPair, s, 2.0}; }
  static NormSpec wiener_algebra_pair() { return {NormFamily::WienerAlgebraPair, 0.0, 1.0}; }
  static NormSpec w_s2inf(double s) { return {NormFamily::W_s2inf, s, kInf}; }
  static NormSpec modulation(double s, double q) { return {NormFamily::Modulation, s, q}; }
  static NormSpec wiener_amalgam(double s, double q) { return {NormFamily::WienerAmalgam, s, q}; }

  /// "sobolev,S", "fl,S,Q", "hs-pair,S", "fl1-pair", "ws2inf,S", "mod,S,Q",
  /// "wa,S,Q"; Q may be "inf". Throws ConfigError.
  static NormSpec parse(const std::string& text);
  std::string to_string() const;
  /// The same family and exponent at a different regularity.
  NormSpec with_s(double new_s) const;

  void validate() const;
};

double norm(const SpectralField& f, const NormSpec& spec);
/// Pair norms are the sum of the component norms.
double norm(const InitialPair& pair, const NormSpec& spec);

/// <nu>^s multiplier in the dual coordinate: the Fourier side of <D>^s.
SpectralField bessel_potential(const SpectralField& f, double s);

/// Physical-space norms from synthesis with the given oversampling.
double l_infinity(const SpectralField& f, int oversample = kLinfOversample);
double l_two(const SpectralField& f);

struct Band {
  long long n = 0;
  std::vector<Mode> modes;
  double space_measure = 1.0;
  double l2() const;  // physical L^2 norm of the band piece, via Plancherel
};

struct BandPartition {
  FrequencyLattice lattice;
  std::vector<Band> bands;  // sorted by n, only non-empty bands
};

long long band_index(Frequency xi, const FrequencyLattice& lattice);
BandPartition band_partition(const SpectralField& f);

struct InequalityLine {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs / rhs
  bool holds = false;
};

struct EmbeddingReport {
  std::vector<InequalityLine> lines;
  double linf_over_l2 = 0.0;  // measured constant of the band-limited L^2 -> L^inf step
  bool all_hold() const;
};

/// The M/W embedding chain for q in {1, 2, inf} with constant 1, l^q
/// monotonicity of the modulation norms, and the band-limited L^2 -> L^inf
/// bound ||f||_inf <= |supp f^|^{1/2} ||f||_2.
EmbeddingReport check_embeddings(const SpectralField& f, double s);

struct AlgebraReport {
  InequalityLine fl1;        // ||uv||_{FL^1} <= ||u|| ||v||
  InequalityLine m21;        // ||uv||_{M^{2,1}_0} <= C ||u|| ||v||, holds iff C <= bound
  double m21_constant = 0.0; // measured C
  double m21_bound = 8.0;
};

AlgebraReport check_algebra(const SpectralField& u, const SpectralField& v);

/// g_s(A): 1 for s < -1/2, (log A)^{1/2} at s = -1/2, A^{1/2+s} above.
/// Seeded Hermitian test fields on the line surrogate (period 8) with varied
/// bandwidth and decay, for the embedding and algebra checks.
std::vector<SpectralField> embedding_corpus(std::uint64_t seed, int count);

double g_s(double s, double A);
/// l^q norm of <xi>^s over the integers in [-A/2, A/2].
double f_sq(double s, double q, int A);

}  // namespace gibq
