#include "gibq/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "gibq/errors.hpp"
#include "gibq/parallel.hpp"

namespace gibq {

FrequencyLattice FrequencyLattice::torus(double period) {
  FrequencyLattice l;
  l.domain = Domain::Torus;
  l.period = period;
  l.validate();
  return l;
}

FrequencyLattice FrequencyLattice::line_approx(double period) {
  FrequencyLattice l;
  l.domain = Domain::LineApprox;
  l.period = period;
  l.validate();
  return l;
}

FrequencyLattice FrequencyLattice::with_cutoff(Frequency c) const {
  FrequencyLattice l = *this;
  l.cutoff = c;
  l.validate();
  return l;
}

FrequencyLattice FrequencyLattice::with_prune(double relative) const {
  FrequencyLattice l = *this;
  l.prune_relative = relative;
  l.validate();
  return l;
}

void FrequencyLattice::validate() const {
  if (!(period > 0) || !std::isfinite(period))
    throw DomainError(fmt::format("lattice period must be positive, got {}", period));
  if (cutoff < 1) throw DomainError(fmt::format("lattice cutoff must be >= 1, got {}", cutoff));
  if (!(prune_relative >= 0) || prune_relative >= 1)
    throw DomainError(fmt::format("prune threshold must lie in [0, 1), got {}", prune_relative));
}

double FrequencyLattice::angular_frequency(Frequency xi) const {
  return 2.0 * std::numbers::pi * static_cast<double>(xi) / period;
}

double FrequencyLattice::dual_coordinate(Frequency xi) const {
  return domain == Domain::Torus ? static_cast<double>(xi) : static_cast<double>(xi) / period;
}

double FrequencyLattice::dual_measure() const {
  return domain == Domain::Torus ? 1.0 : 1.0 / period;
}

double FrequencyLattice::coefficient_scale() const {
  return domain == Domain::Torus ? 1.0 : period;
}

double FrequencyLattice::space_measure() const {
  return domain == Domain::Torus ? 1.0 : period;
}

double japanese_bracket(double v) { return std::hypot(1.0, v); }

double lambda_symbol(Frequency xi, const FrequencyLattice& lattice) {
  const double w = std::abs(lattice.angular_frequency(xi));
  return w / japanese_bracket(w);
}

namespace {

// Keeps modes sorted, drops exact zeros and anything under the relative prune
// threshold, and rejects frequencies beyond the cutoff.
std::vector<Mode> canonicalize_sorted(const FrequencyLattice& lattice, std::vector<Mode> modes) {
  double peak = 0.0;
  for (const auto& m : modes) peak = std::max(peak, std::abs(m.value));
  const double floor = lattice.prune_relative * peak;
  std::size_t w = 0;
  for (std::size_t r = 0; r < modes.size(); ++r) {
    const double mag = std::abs(modes[r].value);
    if (mag == 0.0 || mag < floor) continue;
    if (modes[r].xi > lattice.cutoff || modes[r].xi < -lattice.cutoff)
      throw OverflowError(modes[r].xi, lattice.cutoff);
    modes[w++] = modes[r];
  }
  modes.resize(w);
  return modes;
}

inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

void require_same_lattice(const SpectralField& a, const SpectralField& b, const char* op) {
  if (!(a.lattice() == b.lattice()))
    throw StructuralError(fmt::format("{}: operands live on different lattices", op));
}

}  // namespace

SpectralField::SpectralField(const FrequencyLattice& lattice) : lattice_(lattice) {
  lattice_.validate();
}

SpectralField::SpectralField(const FrequencyLattice& lattice, std::vector<Mode> modes)
    : lattice_(lattice) {
  lattice_.validate();
  std::stable_sort(modes.begin(), modes.end(),
                   [](const Mode& a, const Mode& b) { return a.xi < b.xi; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < modes.size(); ++r) {
    if (w > 0 && modes[w - 1].xi == modes[r].xi)
      modes[w - 1].value += modes[r].value;
    else
      modes[w++] = modes[r];
  }
  modes.resize(w);
  modes_ = canonicalize_sorted(lattice_, std::move(modes));
}

SpectralField SpectralField::delta(const FrequencyLattice& lattice, Frequency xi, Complex value) {
  return SpectralField(lattice, {Mode{xi, value}});
}

Complex SpectralField::at(Frequency xi) const {
  auto it = std::lower_bound(modes_.begin(), modes_.end(), xi,
                             [](const Mode& m, Frequency x) { return m.xi < x; });
  if (it != modes_.end() && it->xi == xi) return it->value;
  return {};
}

Frequency SpectralField::max_abs_frequency() const {
  if (modes_.empty()) return 0;
  return std::max(std::abs(modes_.front().xi), std::abs(modes_.back().xi));
}

std::vector<Frequency> SpectralField::support() const {
  std::vector<Frequency> out;
  out.reserve(modes_.size());
  for (const auto& m : modes_) out.push_back(m.xi);
  return out;
}

double SpectralField::l1() const {
  double s = 0.0;
  for (const auto& m : modes_) s += std::abs(m.value);
  return s;
}

double SpectralField::l2() const {
  double s = 0.0;
  for (const auto& m : modes_) s += std::norm(m.value);
  return std::sqrt(s);
}

double SpectralField::max_abs() const {
  double s = 0.0;
  for (const auto& m : modes_) s = std::max(s, std::abs(m.value));
  return s;
}

bool SpectralField::is_hermitian(double relative_tolerance) const {
  const double tol = relative_tolerance * max_abs();
  for (const auto& m : modes_)
    if (std::abs(at(-m.xi) - std::conj(m.value)) > tol) return false;
  return true;
}

SpectralField SpectralField::scaled(Complex factor) const {
  std::vector<Mode> out(modes_);
  for (auto& m : out) m.value *= factor;
  return SpectralField(lattice_, std::move(out));
}

namespace {

SpectralField merge(const SpectralField& a, const SpectralField& b, double sign) {
  std::vector<Mode> out;
  out.reserve(a.size() + b.size());
  auto ia = a.modes().begin(), ea = a.modes().end();
  auto ib = b.modes().begin(), eb = b.modes().end();
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->xi < ib->xi)) {
      out.push_back(*ia++);
    } else if (ia == ea || ib->xi < ia->xi) {
      out.push_back({ib->xi, sign * ib->value});
      ++ib;
    } else {
      out.push_back({ia->xi, ia->value + sign * ib->value});
      ++ia;
      ++ib;
    }
  }
  return SpectralField(a.lattice(), std::move(out));
}

}  // namespace

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  require_same_lattice(a, b, "add");
  return merge(a, b, 1.0);
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  require_same_lattice(a, b, "subtract");
  return merge(a, b, -1.0);
}

SpectralField linear_combination(std::span<const double> weights,
                                 std::span<const SpectralField* const> fields) {
  if (weights.size() != fields.size())
    throw StructuralError("linear_combination: weight and field counts differ");
  if (fields.empty()) throw StructuralError("linear_combination: no fields");
  const FrequencyLattice& lattice = fields.front()->lattice();
  std::vector<Mode> all;
  std::size_t total = 0;
  for (const auto* f : fields) {
    if (!(f->lattice() == lattice))
      throw StructuralError("linear_combination: operands live on different lattices");
    total += f->size();
  }
  all.reserve(total);
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (const auto& m : fields[i]->modes()) all.push_back({m.xi, weights[i] * m.value});
  return SpectralField(lattice, std::move(all));
}

SpectralField convolve(const SpectralField& f, const SpectralField& g) {
  require_same_lattice(f, g, "convolve");
  const FrequencyLattice& lattice = f.lattice();
  if (f.empty() || g.empty()) return SpectralField(lattice);

  const auto fm = f.modes();
  const auto gm = g.modes();
  const Frequency lo = fm.front().xi + gm.front().xi;
  const Frequency hi = fm.back().xi + gm.back().xi;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t products = static_cast<std::uint64_t>(fm.size()) * gm.size();

  std::vector<Mode> out;
  if (span <= std::max<std::uint64_t>(4 * products, 1u << 16) && span <= (1u << 26)) {
    // Dense accumulation. The output range is cut into contiguous chunks; each
    // chunk sums its frequencies in ascending (i, j) order, which is the same
    // order the serial loop uses, so the result is independent of threading.
    std::vector<Complex> buf(span);
    const std::size_t chunks =
        products > (1u << 20) ? std::min<std::size_t>(thread_count() * 4, span) : 1;
    const std::uint64_t width = (span + chunks - 1) / chunks;
    parallel_for(chunks, [&](std::size_t c) {
      const Frequency a = lo + static_cast<Frequency>(c * width);
      const Frequency b = std::min<Frequency>(hi + 1, a + static_cast<Frequency>(width));
      if (a >= b) return;
      for (const auto& x : fm) {
        auto jb = std::lower_bound(gm.begin(), gm.end(), a - x.xi,
                                   [](const Mode& m, Frequency v) { return m.xi < v; });
        for (auto it = jb; it != gm.end() && x.xi + it->xi < b; ++it)
          buf[static_cast<std::size_t>(x.xi + it->xi - lo)] += mul(x.value, it->value);
      }
    });
    for (std::uint64_t i = 0; i < span; ++i)
      if (buf[i] != Complex{}) out.push_back({lo + static_cast<Frequency>(i), buf[i]});
  } else {
    std::vector<Mode> all;
    all.reserve(products);
    for (const auto& x : fm)
      for (const auto& y : gm) all.push_back({x.xi + y.xi, mul(x.value, y.value)});
    std::stable_sort(all.begin(), all.end(),
                     [](const Mode& a, const Mode& b) { return a.xi < b.xi; });
    for (const auto& m : all) {
      if (!out.empty() && out.back().xi == m.xi)
        out.back().value += m.value;
      else
        out.push_back(m);
    }
  }
  return SpectralField(lattice, std::move(out));
}

SpectralField power_k(const SpectralField& f, int k, FoldOrder order) {
  if (k < 1) throw DomainError(fmt::format("power_k needs k >= 1, got {}", k));
  if (k == 1) return f;
  if (order == FoldOrder::Left) {
    SpectralField acc = convolve(f, f);
    for (int i = 2; i < k; ++i) acc = convolve(acc, f);
    return acc;
  }
  const int left = k / 2;
  return convolve(power_k(f, left, order), power_k(f, k - left, order));
}

std::size_t synthesis_size(Frequency max_abs, int oversample) {
  if (oversample < 1) throw DomainError("synthesis oversample must be >= 1");
  const auto need = std::max<std::uint64_t>(
      {static_cast<std::uint64_t>(oversample) * (2 * static_cast<std::uint64_t>(max_abs) + 1),
       2 * static_cast<std::uint64_t>(max_abs) + 2, 2});
  return std::bit_ceil(need);
}

std::vector<Complex> synthesize_complex(const SpectralField& f, std::size_t points) {
  if (points == 0) throw DomainError("synthesis needs at least one point");
  const auto M = static_cast<std::uint64_t>(points);
  std::vector<Complex> twiddle(points);
  for (std::uint64_t j = 0; j < M; ++j) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(M);
    twiddle[j] = {std::cos(a), std::sin(a)};
  }
  std::vector<std::uint64_t> residue;
  residue.reserve(f.size());
  for (const auto& m : f.modes()) {
    const auto mm = static_cast<std::int64_t>(M);
    residue.push_back(static_cast<std::uint64_t>(((m.xi % mm) + mm) % mm));
  }
  std::vector<Complex> out(points);
  const auto modes = f.modes();
  const std::size_t blocks = std::min<std::size_t>(points, thread_count() * 4);
  const std::size_t width = (points + blocks - 1) / blocks;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t start = b * width;
    const std::size_t stop = std::min(points, start + width);
    for (std::size_t x = start; x < stop; ++x) {
      Complex acc{};
      for (std::size_t i = 0; i < modes.size(); ++i)
        acc += mul(modes[i].value, twiddle[(residue[i] * x) % M]);
      out[x] = acc;
    }
  });
  return out;
}

GridField synthesize(const SpectralField& f, int oversample) {
  const std::size_t M = synthesis_size(f.max_abs_frequency(), oversample);
  const auto z = synthesize_complex(f, M);
  GridField g;
  g.period = f.lattice().period;
  g.samples.reserve(M);
  for (const auto& v : z) g.samples.push_back(v.real());
  return g;
}

}  // namespace gibq
