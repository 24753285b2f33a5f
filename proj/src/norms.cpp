#include "gibq/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "gibq/errors.hpp"
#include "gibq/parallel.hpp"

namespace gibq {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& text, const std::string& whole) {
  if (text == "inf" || text == "infinity") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("norm spec '{}': cannot parse number '{}'", whole, text));
  }
}

std::string format_q(double q) { return std::isinf(q) ? "inf" : fmt::format("{}", q); }

// (sum_i x_i^q)^{1/q}, or max for q = inf, over non-negative values.
double lq(const std::vector<double>& x, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : x) m = std::max(m, v);
    return m;
  }
  if (q == 2.0) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc);
  }
  double acc = 0.0;
  for (double v : x) acc += std::pow(v, q);
  return std::pow(acc, 1.0 / q);
}

double weighted_fl(const SpectralField& f, double s, double q) {
  const auto& L = f.lattice();
  const double scale = L.coefficient_scale();
  const double measure = L.dual_measure();
  std::vector<double> vals;
  vals.reserve(f.size());
  for (const auto& m : f.modes())
    vals.push_back(std::pow(japanese_bracket(L.dual_coordinate(m.xi)), s) * scale *
                   std::abs(m.value));
  if (std::isinf(q)) return lq(vals, q);
  return lq(vals, q) * std::pow(measure, 1.0 / q);
}

double modulation_norm(const SpectralField& f, double s, double q) {
  const auto part = band_partition(f);
  std::vector<double> vals;
  for (const auto& b : part.bands)
    vals.push_back(std::pow(japanese_bracket(static_cast<double>(b.n)), s) * b.l2());
  return lq(vals, q);
}

double wiener_amalgam_norm(const SpectralField& f, double s, double q) {
  if (f.empty()) return 0.0;
  const auto part = band_partition(f);
  const std::size_t M = synthesis_size(f.max_abs_frequency(), 2);
  std::vector<double> acc(M, 0.0);
  for (const auto& b : part.bands) {
    const double w = std::pow(japanese_bracket(static_cast<double>(b.n)), s);
    const auto piece = synthesize_complex(SpectralField(f.lattice(), b.modes), M);
    for (std::size_t x = 0; x < M; ++x) {
      const double v = w * std::abs(piece[x]);
      if (std::isinf(q))
        acc[x] = std::max(acc[x], v);
      else
        acc[x] += std::pow(v, q);
    }
  }
  double total = 0.0;
  for (double a : acc) {
    const double pointwise = std::isinf(q) ? a : std::pow(a, 1.0 / q);
    total += pointwise * pointwise;
  }
  return std::sqrt(total / static_cast<double>(M) * f.lattice().space_measure());
}

}  // namespace

NormSpec NormSpec::parse(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.empty() || parts[0].empty()) throw ConfigError("empty norm spec");
  const std::string& name = parts[0];
  auto need = [&](std::size_t n) {
    if (parts.size() != n)
      throw ConfigError(fmt::format("norm spec '{}': expected {} fields, got {}", text, n,
                                    parts.size()));
  };
  NormSpec spec;
  if (name == "sobolev" || name == "hs") {
    need(2);
    spec = sobolev(parse_number(parts[1], text));
  } else if (name == "fl") {
    need(3);
    spec = fourier_lebesgue(parse_number(parts[1], text), parse_number(parts[2], text));
  } else if (name == "hs-pair") {
    need(2);
    spec = sobolev_pair(parse_number(parts[1], text));
  } else if (name == "fl1-pair") {
    need(1);
    spec = wiener_algebra_pair();
  } else if (name == "ws2inf") {
    need(2);
    spec = w_s2inf(parse_number(parts[1], text));
  } else if (name == "mod") {
    need(3);
    spec = modulation(parse_number(parts[1], text), parse_number(parts[2], text));
  } else if (name == "wa") {
    need(3);
    spec = wiener_amalgam(parse_number(parts[1], text), parse_number(parts[2], text));
  } else {
    throw ConfigError(fmt::format("unknown norm family '{}'", name));
  }
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

std::string NormSpec::to_string() const {
  switch (family) {
    case NormFamily::Sobolev: return fmt::format("sobolev,{}", s);
    case NormFamily::FourierLebesgue: return fmt::format("fl,{},{}", s, format_q(q));
    case NormFamily::SobolevPair: return fmt::format("hs-pair,{}", s);
    case NormFamily::WienerAlgebraPair: return "fl1-pair";
    case NormFamily::W_s2inf: return fmt::format("ws2inf,{}", s);
    case NormFamily::Modulation: return fmt::format("mod,{},{}", s, format_q(q));
    case NormFamily::WienerAmalgam: return fmt::format("wa,{},{}", s, format_q(q));
  }
  return "?";
}

NormSpec NormSpec::with_s(double new_s) const {
  NormSpec out = *this;
  if (family != NormFamily::WienerAlgebraPair) out.s = new_s;
  return out;
}

void NormSpec::validate() const {
  if (!std::isfinite(s)) throw DomainError("norm regularity must be finite");
  if (!(q >= 1.0)) throw DomainError(fmt::format("norm exponent q must lie in [1, inf], got {}", q));
}

SpectralField bessel_potential(const SpectralField& f, double s) {
  const auto& L = f.lattice();
  return f.multiplied(
      [&](Frequency xi) { return std::pow(japanese_bracket(L.dual_coordinate(xi)), s); });
}

double l_infinity(const SpectralField& f, int oversample) {
  if (f.empty()) return 0.0;
  const auto z = synthesize_complex(f, synthesis_size(f.max_abs_frequency(), oversample));
  double m = 0.0;
  for (const auto& v : z) m = std::max(m, std::abs(v));
  return m;
}

double l_two(const SpectralField& f) {
  return f.l2() * std::sqrt(f.lattice().space_measure());
}

double norm(const SpectralField& f, const NormSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case NormFamily::Sobolev:
    case NormFamily::SobolevPair: return weighted_fl(f, spec.s, 2.0);
    case NormFamily::FourierLebesgue: return weighted_fl(f, spec.s, spec.q);
    case NormFamily::WienerAlgebraPair: return weighted_fl(f, 0.0, 1.0);
    case NormFamily::W_s2inf: {
      const auto g = bessel_potential(f, spec.s);
      return std::max(l_two(g), l_infinity(g));
    }
    case NormFamily::Modulation: return modulation_norm(f, spec.s, spec.q);
    case NormFamily::WienerAmalgam: return wiener_amalgam_norm(f, spec.s, spec.q);
  }
  return 0.0;
}

double norm(const InitialPair& pair, const NormSpec& spec) {
  return norm(pair.u0, spec) + norm(pair.u1, spec);
}

double Band::l2() const {
  double acc = 0.0;
  for (const auto& m : modes) acc += std::norm(m.value);
  return std::sqrt(acc * space_measure);
}

long long band_index(Frequency xi, const FrequencyLattice& lattice) {
  if (lattice.domain == Domain::Torus) return xi;
  return static_cast<long long>(std::floor(lattice.dual_coordinate(xi) + 0.5));
}

BandPartition band_partition(const SpectralField& f) {
  BandPartition part{f.lattice(), {}};
  const double measure = f.lattice().space_measure();
  for (const auto& m : f.modes()) {
    const long long n = band_index(m.xi, f.lattice());
    if (part.bands.empty() || part.bands.back().n != n) part.bands.push_back({n, {}, measure});
    part.bands.back().modes.push_back(m);
  }
  return part;
}


namespace {

InequalityLine line(std::string name, double lhs, double rhs, double slack = 1e-12) {
  InequalityLine l{std::move(name), lhs, rhs, 0.0, false};
  l.margin = rhs > 0 ? lhs / rhs : (lhs > 0 ? kInf : 0.0);
  l.holds = lhs <= rhs * (1.0 + slack) + 1e-300;
  return l;
}

}  // namespace

bool EmbeddingReport::all_hold() const {
  return std::all_of(lines.begin(), lines.end(), [](const auto& l) { return l.holds; });
}

EmbeddingReport check_embeddings(const SpectralField& f, double s) {
  EmbeddingReport r;
  const double m1 = norm(f, NormSpec::modulation(s, 1.0));
  const double m2 = norm(f, NormSpec::modulation(s, 2.0));
  const double mi = norm(f, NormSpec::modulation(s, kInf));
  const double w1 = norm(f, NormSpec::wiener_amalgam(s, 1.0));
  const double w2 = norm(f, NormSpec::wiener_amalgam(s, 2.0));
  const double wi = norm(f, NormSpec::wiener_amalgam(s, kInf));
  // l^q monotonicity of the outer sum.
  r.lines.push_back(line("M2,2 <= M2,1", m2, m1));
  r.lines.push_back(line("M2,inf <= M2,2", mi, m2));
  // M^{2,min(2,q)} -> W^{2,q} -> M^{2,max(2,q)}, constant 1 with sharp bands.
  r.lines.push_back(line("W2,1 <= M2,1", w1, m1, 1e-10));
  r.lines.push_back(line("M2,2 <= W2,1", m2, w1, 1e-10));
  r.lines.push_back(line("W2,2 <= M2,2", w2, m2, 1e-10));
  r.lines.push_back(line("M2,2 <= W2,2", m2, w2, 1e-10));
  r.lines.push_back(line("W2,inf <= M2,2", wi, m2, 1e-10));
  r.lines.push_back(line("M2,inf <= W2,inf", mi, wi, 1e-10));
  // Band-limited L^2 -> L^inf: |f(x)| <= ||f^||_{L^1} <= |supp|^{1/2} ||f||_{L^2}.
  const double linf = l_infinity(f);
  const double l2 = l_two(f);
  const double supp = static_cast<double>(f.size()) * f.lattice().dual_measure();
  r.linf_over_l2 = l2 > 0 ? linf / l2 : 0.0;
  r.lines.push_back(line("Linf <= |supp|^1/2 L2", linf, std::sqrt(supp) * l2, 1e-10));
  return r;
}

AlgebraReport check_algebra(const SpectralField& u, const SpectralField& v) {
  AlgebraReport r;
  const auto uv = convolve(u, v);
  const NormSpec fl1 = NormSpec::fourier_lebesgue(0.0, 1.0);
  const NormSpec m21 = NormSpec::modulation(0.0, 1.0);
  r.fl1 = line("FL1 algebra", norm(uv, fl1), norm(u, fl1) * norm(v, fl1));
  const double denom = norm(u, m21) * norm(v, m21);
  const double lhs = norm(uv, m21);
  r.m21_constant = denom > 0 ? lhs / denom : 0.0;
  r.m21 = line("M2,1_0 algebra", lhs, r.m21_bound * denom);
  return r;
}

std::vector<SpectralField> embedding_corpus(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0; };
  const auto lattice = FrequencyLattice::line_approx(8.0);
  std::vector<SpectralField> corpus;
  for (int i = 0; i < count; ++i) {
    const Frequency band = 8 + static_cast<Frequency>(rng() % 57);
    const double decay = 1.0 + uniform();  // power of <nu>, in [0, 2)
    std::vector<Mode> modes{{0, Complex(uniform(), 0.0)}};
    for (Frequency xi = 1; xi <= band; ++xi) {
      const double env = std::pow(japanese_bracket(lattice.dual_coordinate(xi)), -decay);
      const Complex c(env * uniform(), env * uniform());
      modes.push_back({xi, c});
      modes.push_back({-xi, std::conj(c)});
    }
    corpus.emplace_back(lattice, std::move(modes));
  }
  return corpus;
}

double g_s(double s, double A) {
  if (s < -0.5) return 1.0;
  if (s == -0.5) return std::sqrt(std::log(A));
  return std::pow(A, 0.5 + s);
}

double f_sq(double s, double q, int A) {
  std::vector<double> vals;
  for (int xi = -A / 2; xi <= A / 2; ++xi)
    vals.push_back(std::pow(japanese_bracket(static_cast<double>(xi)), s));
  return lq(vals, q);
}

}  // namespace gibq
