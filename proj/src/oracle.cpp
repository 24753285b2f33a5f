#include "gibq/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include <fftw3.h>
#include <fmt/format.h>

#include "gibq/chebyshev.hpp"
#include "gibq/errors.hpp"

namespace gibq {
namespace {

std::vector<Frequency> sumset(const std::vector<Frequency>& a, const std::vector<Frequency>& b) {
  std::vector<Frequency> out;
  out.reserve(a.size() * b.size());
  for (Frequency x : a)
    for (Frequency y : b) out.push_back(x + y);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Frequency> set_union(const std::vector<Frequency>& a, const std::vector<Frequency>& b) {
  std::vector<Frequency> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Pseudospectral evaluation of u^k on an alias-free grid of M points.
class PowerEvaluator {
 public:
  PowerEvaluator(std::size_t M, int k) : M_(M), k_(k) {
    buf_ = fftw_alloc_complex(M_);
    std::lock_guard lock(fftw_planner_mutex());
    backward_ = fftw_plan_dft_1d(static_cast<int>(M_), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    forward_ = fftw_plan_dft_1d(static_cast<int>(M_), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~PowerEvaluator() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(backward_);
    fftw_destroy_plan(forward_);
    fftw_free(buf_);
  }
  PowerEvaluator(const PowerEvaluator&) = delete;
  PowerEvaluator& operator=(const PowerEvaluator&) = delete;

  std::size_t bin(Frequency xi) const {
    const auto m = static_cast<Frequency>(M_);
    return static_cast<std::size_t>(((xi % m) + m) % m);
  }

  // Fills `out` with [u^k]^ on the closure and returns the energy of [u^k]^
  // outside it. `potential`, when requested, receives mean(u^{k+1}).
  double evaluate(const std::vector<std::size_t>& bins, const std::vector<Complex>& u,
                  std::vector<Complex>& out, Complex& zero_mode, double* potential) {
    for (std::size_t x = 0; x < M_; ++x) buf_[x][0] = buf_[x][1] = 0.0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      buf_[bins[i]][0] = u[i].real();
      buf_[bins[i]][1] = u[i].imag();
    }
    fftw_execute(backward_);
    double pot = 0.0;
    for (std::size_t x = 0; x < M_; ++x) {
      const Complex g(buf_[x][0], buf_[x][1]);
      Complex p = g;
      for (int i = 1; i < k_; ++i) p *= g;
      if (potential) pot += (p * g).real();
      buf_[x][0] = p.real();
      buf_[x][1] = p.imag();
    }
    if (potential) *potential = pot / static_cast<double>(M_);
    fftw_execute(forward_);
    const double inv = 1.0 / static_cast<double>(M_);
    out.resize(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) {
      out[i] = Complex(buf_[bins[i]][0], buf_[bins[i]][1]) * inv;
      // Clear the bin so the remaining energy is exactly the outside part;
      // subtracting inside from total would leave only rounding noise.
      buf_[bins[i]][0] = buf_[bins[i]][1] = 0.0;
    }
    zero_mode = Complex(0.0);
    for (std::size_t i = 0; i < bins.size(); ++i)
      if (bins[i] == 0) zero_mode = out[i];
    double outside = 0.0;
    for (std::size_t x = 0; x < M_; ++x) outside += buf_[x][0] * buf_[x][0] + buf_[x][1] * buf_[x][1];
    return outside * inv * inv;
  }

 private:
  std::size_t M_;
  int k_;
  fftw_complex* buf_;
  fftw_plan backward_;
  fftw_plan forward_;
};

struct Rk4Attempt {
  Rk4Result result;
  bool tail_breached = false;
};

Rk4Attempt rk4_attempt(const InitialPair& pair, int k, double horizon, const Rk4Options& opt,
                       int depth) {
  const FrequencyLattice& lattice = pair.lattice();
  Rk4Attempt attempt;
  Rk4Result& r = attempt.result;
  r.closure_depth = depth;
  r.closure = opt.nonlinear ? support_closure(pair, k, depth) : support_closure(pair, k, 0);
  const std::size_t S = r.closure.size();
  const int p = opt.output_degree;
  const auto nodes = lobatto_nodes(p, 0.0, horizon);
  r.dt = opt.dt > 0 ? opt.dt : horizon / 2000.0;

  if (S == 0) {
    r.trajectory = Trajectory::zero(lattice, horizon, p);
    return attempt;
  }

  std::vector<double> lam2(S);
  std::vector<Complex> u(S), v(S);
  std::ptrdiff_t zero_index = -1;
  for (std::size_t i = 0; i < S; ++i) {
    const double l = lambda_symbol(r.closure[i], lattice);
    lam2[i] = l * l;
    u[i] = pair.u0.at(r.closure[i]);
    v[i] = pair.u1.at(r.closure[i]);
    if (r.closure[i] == 0) zero_index = static_cast<std::ptrdiff_t>(i);
  }

  Frequency K = 0;
  for (Frequency xi : r.closure) K = std::max(K, xi < 0 ? -xi : xi);
  const std::size_t M =
      std::max<std::size_t>(16, std::bit_ceil(static_cast<std::uint64_t>(2 * k * K + 1)));
  std::unique_ptr<PowerEvaluator> power;
  std::vector<std::size_t> bins(S);
  if (opt.nonlinear) {
    power = std::make_unique<PowerEvaluator>(M, k);
    for (std::size_t i = 0; i < S; ++i) bins[i] = power->bin(r.closure[i]);
  }

  std::vector<Complex> nl(S);
  Complex nl_zero;
  double potential = 0.0;
  const double tail_scale = 0.5 * horizon * horizon;

  // Forcing at (uu, vv); returns the flux term Re(N(0) conj v(0)).
  auto force = [&](const std::vector<Complex>& uu, const std::vector<Complex>& vv,
                   std::vector<Complex>& du, std::vector<Complex>& dv, bool monitor) -> double {
    double flux = 0.0;
    if (power) {
      const double outside = power->evaluate(bins, uu, nl, nl_zero, monitor ? &potential : nullptr);
      if (monitor) {
        double norm_u = 0.0;
        for (const auto& c : uu) norm_u += std::norm(c);
        const double ratio = tail_scale * std::sqrt(outside) / std::max(std::sqrt(norm_u), 1e-300);
        r.tail = std::max(r.tail, ratio);
      }
      const Complex vz = zero_index >= 0 ? vv[zero_index] : Complex{};
      flux = (nl_zero * std::conj(vz)).real();
    }
    for (std::size_t i = 0; i < S; ++i) {
      du[i] = vv[i];
      dv[i] = -lam2[i] * uu[i] + (power ? lam2[i] * nl[i] : Complex{});
    }
    return flux;
  };

  auto quadratic_energy = [&] {
    double e = 0.0;
    for (std::size_t i = 0; i < S; ++i)
      if (lam2[i] > 0) e += 0.5 * (std::norm(v[i]) / lam2[i] + std::norm(u[i]));
    return e;
  };

  std::vector<Complex> k1u(S), k1v(S), k2u(S), k2v(S), k3u(S), k3v(S), k4u(S), k4v(S);
  std::vector<Complex> tu(S), tv(S);
  double flux_integral = 0.0;

  auto snapshot = [&] {
    std::vector<Mode> modes;
    modes.reserve(S);
    for (std::size_t i = 0; i < S; ++i)
      if (u[i] != Complex{}) modes.push_back({r.closure[i], u[i]});
    return SpectralField(lattice, std::move(modes));
  };

  std::vector<SpectralField> values;
  values.push_back(snapshot());
  bool first = true;
  for (int m = 0; m < p; ++m) {
    const double h = nodes[m + 1] - nodes[m];
    const long long nsub = std::max<long long>(1, static_cast<long long>(std::ceil(h / r.dt - 1e-9)));
    const double dt = h / static_cast<double>(nsub);
    for (long long st = 0; st < nsub; ++st) {
      const double f1 = force(u, v, k1u, k1v, true);
      if (first) {
        r.energy_initial = quadratic_energy() - potential / (k + 1);
        first = false;
      } else if (power) {
        const double e = quadratic_energy() - potential / (k + 1) + flux_integral;
        r.energy_drift = std::max(
            r.energy_drift, std::abs(e - r.energy_initial) / std::max(std::abs(r.energy_initial), 1e-300));
      }
      for (std::size_t i = 0; i < S; ++i) {
        tu[i] = u[i] + 0.5 * dt * k1u[i];
        tv[i] = v[i] + 0.5 * dt * k1v[i];
      }
      const double f2 = force(tu, tv, k2u, k2v, false);
      for (std::size_t i = 0; i < S; ++i) {
        tu[i] = u[i] + 0.5 * dt * k2u[i];
        tv[i] = v[i] + 0.5 * dt * k2v[i];
      }
      const double f3 = force(tu, tv, k3u, k3v, false);
      for (std::size_t i = 0; i < S; ++i) {
        tu[i] = u[i] + dt * k3u[i];
        tv[i] = v[i] + dt * k3v[i];
      }
      const double f4 = force(tu, tv, k4u, k4v, false);
      for (std::size_t i = 0; i < S; ++i) {
        u[i] += dt / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
        v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
      }
      flux_integral += dt / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
      ++r.steps;
      for (std::size_t i = 0; i < S; ++i)
        if (!std::isfinite(u[i].real()) || !std::isfinite(u[i].imag()))
          throw DivergenceError(
              fmt::format("rk4 solution became non-finite at t = {:.6g}",
                          nodes[m] + dt * static_cast<double>(st + 1)),
              r.tail);
    }
    values.push_back(snapshot());
  }
  r.tail_ok = r.tail <= opt.tail_tolerance;
  attempt.tail_breached = !r.tail_ok;
  r.trajectory = Trajectory(horizon, std::move(values));
  return attempt;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

}  // namespace

std::vector<Frequency> support_closure(const InitialPair& pair, int k, int depth) {
  std::vector<Frequency> base = set_union(pair.u0.support(), pair.u1.support());
  if (base.empty()) return base;
  std::vector<Frequency> step = base;
  for (int i = 2; i < k; ++i) step = sumset(step, base);
  std::vector<Frequency> level = base;
  std::vector<Frequency> closure = base;
  for (int j = 1; j <= depth; ++j) {
    level = sumset(level, step);
    closure = set_union(closure, level);
  }
  return closure;
}

Rk4Result rk4_solve(const InitialPair& pair, int k, double horizon, const Rk4Options& options) {
  if (k < 2) throw DomainError(fmt::format("arity must be >= 2, got {}", k));
  if (!(horizon > 0)) throw DomainError("rk4 horizon must be positive");
  if (options.dt < 0 || options.dt > horizon / 100.0)
    throw DomainError(fmt::format("rk4 step {} must lie in (0, T/100]", options.dt));
  auto attempt = rk4_attempt(pair, k, horizon, options, options.closure_depth);
  if (attempt.tail_breached && options.nonlinear) {
    attempt = rk4_attempt(pair, k, horizon, options, options.closure_depth + 3);
    if (attempt.tail_breached && options.fail_on_tail)
      throw DivergenceError(
          fmt::format("rk4 truncation tail {:.3g} exceeds {:.3g} after enlarging the closure to "
                      "depth {}",
                      attempt.result.tail, options.tail_tolerance, attempt.result.closure_depth),
          attempt.result.tail);
  }
  return std::move(attempt.result);
}

double cosine_kernel(double lambda, double b, double T) {
  return 0.5 * lambda * lambda * T * T * sinc(0.5 * (lambda + b) * T) * sinc(0.5 * (lambda - b) * T);
}

SpectralField xi1_closed_form(const InitialPair& pair, int k, double horizon,
                              std::size_t tuple_budget) {
  if (k < 2) throw DomainError(fmt::format("arity must be >= 2, got {}", k));
  if (!pair.u1.empty())
    throw DomainError("the closed form needs a pair with zero second component");
  const FrequencyLattice& lattice = pair.lattice();
  const auto modes = pair.u0.modes();
  const std::size_t n = modes.size();
  if (n == 0) return SpectralField(lattice);
  double tuples = std::pow(static_cast<double>(n), k);
  if (tuples > static_cast<double>(tuple_budget))
    throw CapacityError(fmt::format("{} frequency tuples exceed the budget of {}", tuples, tuple_budget));

  std::vector<double> lam(n);
  for (std::size_t i = 0; i < n; ++i) lam[i] = lambda_symbol(modes[i].xi, lattice);
  const double sign_weight = std::ldexp(1.0, -(k - 1));
  const std::size_t signs = std::size_t{1} << (k - 1);

  std::map<Frequency, Complex> acc;
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    Frequency xi = 0;
    Complex coeff = 1.0;
    for (int j = 0; j < k; ++j) {
      xi += modes[idx[j]].xi;
      coeff *= modes[idx[j]].value;
    }
    const double l = lambda_symbol(xi, lattice);
    double kernel = 0.0;
    for (std::size_t mask = 0; mask < signs; ++mask) {
      double b = lam[idx[0]];
      for (int j = 1; j < k; ++j) b += ((mask >> (j - 1)) & 1u) ? -lam[idx[j]] : lam[idx[j]];
      kernel += cosine_kernel(l, b, horizon);
    }
    acc[xi] += coeff * (sign_weight * kernel);
    int pos = k - 1;
    while (pos >= 0 && ++idx[pos] == n) idx[pos--] = 0;
    if (pos < 0) break;
  }
  std::vector<Mode> out;
  out.reserve(acc.size());
  for (const auto& [xi, c] : acc) out.push_back({xi, c});
  return SpectralField(lattice, std::move(out));
}

SpectralField xi1_closed_form(const BumpData& bump, const InflationParams& params, double horizon) {
  return xi1_closed_form(bump.phi, params.k, horizon);
}

SandwichReport convolution_sandwich(long long a, long long b, int A) {
  if (A < 2 || A % 2 != 0) throw DomainError(fmt::format("A must be a positive even integer, got {}", A));
  const auto lattice = FrequencyLattice::torus();
  auto cube = [&](long long c) {
    std::vector<Mode> modes;
    for (long long d = -A / 2; d <= A / 2; ++d) modes.push_back({c + d, Complex(1.0)});
    return SpectralField(lattice, std::move(modes));
  };
  const auto conv = convolve(cube(a), cube(b));
  SandwichReport r;
  r.a = a;
  r.b = b;
  r.A = A;
  const long long c = a + b;
  const double norm = A + 1.0;
  r.support_ok = true;
  for (const auto& m : conv.modes())
    if (m.xi < c - A || m.xi > c + A) r.support_ok = false;
  double lower = std::numeric_limits<double>::infinity();
  double upper = 0.0;
  for (long long xi = c - A; xi <= c + A; ++xi) {
    const double v = conv.at(xi).real();
    r.values.push_back(v);
    upper = std::max(upper, v / norm);
    if (xi >= c - A / 2 && xi <= c + A / 2) lower = std::min(lower, v / norm);
  }
  r.lower_constant = lower;
  r.upper_constant = r.support_ok ? upper : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace gibq
