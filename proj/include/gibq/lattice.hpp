#pragma once

// Sparse Fourier representation of fields on the one-dimensional torus.
//
// A SpectralField stores the nonzero coefficients of a trigonometric
// polynomial, sorted by integer frequency index. Every constructor sorts,
// merges duplicates, enforces the lattice cutoff and prunes coefficients below
// `prune_relative * max|c|`, so stored fields are always canonical.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gibq {

using Frequency = std::int64_t;
using Complex = std::complex<double>;

inline constexpr Frequency kDefaultCutoff = Frequency{1} << 40;
inline constexpr double kDefaultPruneRelative = 1e-14;

enum class Domain { Torus, LineApprox };

/// Dual lattice of the physical domain.
///
/// Torus: dual variable is the integer index itself with counting measure;
/// physical space carries the normalised (unit mass) measure.
/// LineApprox: scaled-torus surrogate for the real line. The dual variable is
/// nu = xi / period with measure 1/period, continuum coefficients are
/// period * c_xi, and physical space carries Lebesgue measure on [0, period).
/// In both cases the multiplier symbol uses omega = 2*pi*xi/period.
struct FrequencyLattice {
  Domain domain = Domain::Torus;
  double period = 1.0;
  Frequency cutoff = kDefaultCutoff;
  double prune_relative = kDefaultPruneRelative;

  static FrequencyLattice torus(double period = 1.0);
  static FrequencyLattice line_approx(double period);
  FrequencyLattice with_cutoff(Frequency c) const;
  FrequencyLattice with_prune(double relative) const;

  void validate() const;
  double angular_frequency(Frequency xi) const;
  double dual_coordinate(Frequency xi) const;
  double dual_measure() const;
  double coefficient_scale() const;
  double space_measure() const;

  bool operator==(const FrequencyLattice&) const = default;
};

/// <v> = (1 + v^2)^{1/2}
double japanese_bracket(double v);

/// |omega| / <omega>, the symbol of |D|/<D>; lies in [0, 1).
double lambda_symbol(Frequency xi, const FrequencyLattice& lattice);

struct Mode {
  Frequency xi;
  Complex value;
  bool operator==(const Mode&) const = default;
};

class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const FrequencyLattice& lattice);
  SpectralField(const FrequencyLattice& lattice, std::vector<Mode> modes);

  static SpectralField delta(const FrequencyLattice& lattice, Frequency xi, Complex value);

  const FrequencyLattice& lattice() const noexcept { return lattice_; }
  std::span<const Mode> modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  bool empty() const noexcept { return modes_.empty(); }

  Complex at(Frequency xi) const;
  Frequency max_abs_frequency() const;
  std::vector<Frequency> support() const;

  double l1() const;
  double l2() const;
  double max_abs() const;

  /// c(-xi) == conj(c(xi)) for every stored xi, up to
  /// relative_tolerance * max|c|.
  bool is_hermitian(double relative_tolerance = 1e-12) const;

  SpectralField scaled(Complex factor) const;

  /// Pointwise Fourier multiplier: coefficient c(xi) becomes symbol(xi) * c(xi).
  template <class Symbol>
  SpectralField multiplied(Symbol&& symbol) const {
    std::vector<Mode> out(modes_);
    for (auto& m : out) m.value *= symbol(m.xi);
    return SpectralField(lattice_, std::move(out));
  }

  template <class Predicate>
  SpectralField restricted(Predicate&& keep) const {
    std::vector<Mode> out;
    for (const auto& m : modes_)
      if (keep(m.xi)) out.push_back(m);
    return SpectralField(lattice_, std::move(out));
  }

  friend SpectralField operator+(const SpectralField& a, const SpectralField& b);
  friend SpectralField operator-(const SpectralField& a, const SpectralField& b);
  SpectralField operator-() const { return scaled(-1.0); }

 private:
  FrequencyLattice lattice_;
  std::vector<Mode> modes_;
};

/// sum_i weights[i] * fields[i]; all fields must share a lattice.
SpectralField linear_combination(std::span<const double> weights,
                                 std::span<const SpectralField* const> fields);

/// Discrete convolution (f*g)(xi) = sum_{a+b=xi} f(a) g(b).
SpectralField convolve(const SpectralField& f, const SpectralField& g);

enum class FoldOrder { Left, Balanced };

/// k-fold convolution power, the Fourier side of u^k.
SpectralField power_k(const SpectralField& f, int k, FoldOrder order = FoldOrder::Left);

struct GridField {
  std::vector<double> samples;
  double period = 1.0;
};

/// Number of equispaced points used to synthesise a field whose largest
/// frequency is max_abs: a power of two at least oversample*(2*max_abs+1) and
/// 2*max_abs+2.
std::size_t synthesis_size(Frequency max_abs, int oversample);

/// Exact trigonometric synthesis at x_m = m*period/M, real part.
GridField synthesize(const SpectralField& f, int oversample);

/// Complex synthesis on a caller-chosen number of points.
std::vector<Complex> synthesize_complex(const SpectralField& f, std::size_t points);

}  // namespace gibq
