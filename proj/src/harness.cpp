#include "gibq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "gibq/errors.hpp"
#include "gibq/oracle.hpp"
#include "gibq/parallel.hpp"

namespace gibq {
namespace {

ConditionMargin condition(std::string name, double lhs, double rhs, double shorthand) {
  ConditionMargin c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = rhs > 0 ? lhs / rhs : (lhs > 0 ? kInf : 0.0);
  c.shorthand = shorthand;
  c.holds = c.margin < 1.0;
  return c;
}

InequalityLine measured_line(std::string name, double lhs, double rhs) {
  InequalityLine l;
  l.name = std::move(name);
  l.lhs = lhs;
  l.rhs = rhs;
  l.margin = rhs > 0 ? lhs / rhs : (lhs > 0 ? kInf : 0.0);
  l.holds = std::isfinite(l.margin);
  return l;
}

double inverse_q(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

double family_q(const NormSpec& spec) {
  switch (spec.family) {
    case NormFamily::Sobolev:
    case NormFamily::SobolevPair: return 2.0;
    case NormFamily::WienerAlgebraPair: return 1.0;
    case NormFamily::W_s2inf: return kInf;
    default: return spec.q;
  }
}

}  // namespace

ResonantSplit resonant_split(const BumpData& bump, const InflationParams& params, double horizon,
                             int degree) {
  const FrequencyLattice& lattice = bump.phi.lattice();
  const int k = params.k;
  const Frequency half = params.A / 2;
  std::vector<Trajectory> flows;
  for (Frequency eta : bump.sigma) {
    std::vector<Mode> modes;
    for (Frequency d = -half; d <= half; ++d) modes.push_back({eta + d, Complex(1.0)});
    flows.push_back(linear_flow({SpectralField(lattice, std::move(modes)), SpectralField(lattice)},
                                horizon, degree));
  }
  const std::size_t cubes = bump.sigma.size();
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) total *= cubes;

  std::vector<SpectralField> parts(total);
  std::vector<std::vector<Frequency>> tuples(total);
  parallel_for(total, [&](std::size_t t) {
    std::size_t code = t;
    std::vector<std::size_t> idx(k);
    for (int i = k - 1; i >= 0; --i) {
      idx[i] = code % cubes;
      code /= cubes;
    }
    std::vector<const Trajectory*> args;
    for (int i = 0; i < k; ++i) {
      args.push_back(&flows[idx[i]]);
      tuples[t].push_back(bump.sigma[idx[i]]);
    }
    parts[t] = duhamel(args, horizon);
  });

  ResonantSplit split;
  std::vector<Mode> m1, m2;
  for (std::size_t t = 0; t < total; ++t) {
    const Frequency sum = std::accumulate(tuples[t].begin(), tuples[t].end(), Frequency{0});
    auto& dest = sum == 0 ? m1 : m2;
    (sum == 0 ? split.sigma1 : split.sigma2).push_back(tuples[t]);
    for (const auto& m : parts[t].modes()) dest.push_back(m);
  }
  if (split.sigma1.empty())
    throw StructuralError(fmt::format("no zero-sum tuple in Sigma^{} for N = {}", k, params.N));
  split.I1 = SpectralField(lattice, std::move(m1));
  split.I2 = SpectralField(lattice, std::move(m2));
  return split;
}

bool EstimateLedger::all_hold() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.holds; });
}

const ConditionMargin& EstimateLedger::condition(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw StructuralError(fmt::format("no condition named '{}'", name));
}

EstimateLedger check_conditions(const InflationParams& params, const InitialPair& base,
                                std::optional<std::pair<double, double>> xi1_phi_T) {
  const BumpData bump = make_bump(params, base.lattice());
  const int k = params.k;
  const double s = params.s;
  const double A = params.A;
  const double R = params.R;
  const double T = params.T;
  const double N = static_cast<double>(params.N);
  const double n = params.n;

  EstimateLedger L;
  L.sigma_variant = params.sigma < s;
  const double s_eff = L.sigma_variant ? params.sigma : s;
  L.g_s_of_A = g_s(s, A);
  L.f_sq_of_A = f_sq(s, 2.0, params.A);

  if (!xi1_phi_T) {
    const auto xi1 = xi1_closed_form(bump.phi, k, T);
    xi1_phi_T = {norm(xi1, NormSpec::sobolev(s)), norm(xi1, NormSpec::sobolev(params.sigma))};
  }
  const double xi1_s = xi1_phi_T->first;
  const double xi1_sigma = xi1_phi_T->second;
  const double xi1_eff = L.sigma_variant ? xi1_sigma : xi1_s;

  const double pert = norm(bump.phi, NormSpec::sobolev_pair(s));
  const double M = norm(bump.phi, NormSpec::wiener_algebra_pair());
  const double base_h0 = norm(base, NormSpec::sobolev_pair(0.0));
  const double base_fl1 = norm(base, NormSpec::wiener_algebra_pair());
  const double main_shorthand = T * T * std::pow(R, k) * std::pow(A, k - 0.5 + s_eff);

  L.conditions.push_back(
      condition("i", pert, 1.0 / n, R * std::sqrt(A) * std::pow(N, s) * n));
  L.conditions.push_back(condition("ii", T * T * std::pow(M, k - 1.0), 1.0,
                                   T * T * std::pow(R * A, k - 1.0)));
  L.conditions.push_back(condition("iii.a", base_h0, R * std::pow(A, 0.5 + s_eff),
                                   base_h0 / (R * std::pow(A, 0.5 + s_eff))));
  L.conditions.push_back(condition("iii.b", base_fl1, M, base_fl1 / (R * A)));
  const double tail_bound = std::pow(T, 4) * std::pow(M, 2.0 * (k - 1)) * R * L.g_s_of_A;
  L.conditions.push_back(condition(
      "iv", tail_bound, xi1_eff,
      std::pow(T, 4) * std::pow(R * A, 2.0 * (k - 1)) * R * L.g_s_of_A / main_shorthand));
  L.conditions.push_back(condition("v", n, xi1_eff, n / main_shorthand));
  L.conditions.push_back(condition("vi", kSeparationFactor * A, N, kSeparationFactor * A / N));

  L.xi1_lower_ratio =
      xi1_sigma / (std::pow(R, k) * T * T * std::pow(A, k - 0.5 + params.sigma));
  return L;
}

SolveMethod parse_method(const std::string& text) {
  if (text == "series") return SolveMethod::Series;
  if (text == "fixed-point") return SolveMethod::FixedPoint;
  if (text == "rk4") return SolveMethod::Rk4;
  throw ConfigError(fmt::format("unknown method '{}' (series, fixed-point, rk4)", text));
}

std::string to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::Series: return "series";
    case SolveMethod::FixedPoint: return "fixed-point";
    case SolveMethod::Rk4: return "rk4";
  }
  return "?";
}

double decomposition_identity_error(const InitialPair& base, const InitialPair& phi, int k,
                                    double horizon, int degree) {
  SeriesBuilder full(base + phi, k, horizon, degree);
  SeriesBuilder bump_only(phi, k, horizon, degree);
  const Trajectory direct = full.term(1) - bump_only.term(1);

  const Trajectory sb = linear_flow(base, horizon, degree);
  const Trajectory sp = linear_flow(phi, horizon, degree);
  std::optional<Trajectory> mixed;
  for (unsigned mask = 0; mask + 1 < (1u << k); ++mask) {
    // bit i set: slot i takes S(t)phi; mask = all ones is the pure-bump tuple.
    std::vector<const Trajectory*> args;
    for (int i = 0; i < k; ++i) args.push_back(((mask >> i) & 1u) ? &sp : &sb);
    Trajectory term = duhamel_trajectory(args);
    mixed = mixed ? *mixed + term : term;
  }
  const double scale = direct.sup_l1();
  const double gap = sup_l1_distance(direct, *mixed);
  return scale > 0 ? gap / scale : gap;
}

std::vector<InflationReport> run_inflation(const InflationParams& params, const RunOptions& options,
                                           const std::vector<NormSpec>& families) {
  if (families.empty()) throw ConfigError("at least one norm family is required");
  if (options.max_generation < 1) throw DomainError("the run needs J >= 1");
  const auto lattice = FrequencyLattice::torus();
  const int k = params.k;
  const double T = params.T;
  const double s = params.s;
  const double sigma = params.sigma;
  const double A = params.A;
  const double R = params.R;
  const int p = options.time_degree;

  const BumpData bump = make_bump(params, lattice);
  const InitialPair base =
      options.base_seed
          ? sample_base_data(*options.base_seed, options.base_decay, options.base_amplitude, lattice)
          : InitialPair::zero(lattice);
  const InitialPair data = perturbed_data(base, bump);
  const bool base_is_zero = base.u0.empty() && base.u1.empty();

  InflationReport common;
  common.params = params;
  common.method = to_string(options.method);
  common.seed = options.base_seed;
  common.max_generation = options.max_generation;

  const InitialPair perturbation = data - base;
  common.perturbation_hs = norm(perturbation, NormSpec::sobolev_pair(s));
  common.perturbation_sigma = norm(perturbation, NormSpec::sobolev_pair(sigma));
  common.perturbation_ws2inf = norm(perturbation, NormSpec::w_s2inf(s));
  common.sup_weight_ratio = l_infinity(bessel_potential(bump.phi.u0, s)) /
                          norm(bump.phi.u0, NormSpec::sobolev(s));

  SeriesBuilder builder(data, k, T, p);
  const SeriesAccumulator acc = partial_sum(builder, options.max_generation);
  const NormSpec hs = NormSpec::sobolev(s);
  for (const auto& term : acc.terms) common.xi_hs.push_back(norm(term.trajectory.final_value(), hs));
  common.ledger = acc.ledger;
  common.ratios = acc.ratios;
  for (std::size_t j = 2; j < common.xi_hs.size(); ++j) common.tail_sum += common.xi_hs[j];

  std::optional<SeriesBuilder> phi_builder;
  if (!base_is_zero) phi_builder.emplace(bump.phi, k, T, p);
  const SpectralField xi1_phi =
      base_is_zero ? builder.term(1).final_value() : phi_builder->term(1).final_value();
  const SpectralField xi1_data = builder.term(1).final_value();
  common.xi1_phi_hs = norm(xi1_phi, hs);
  common.xi1_phi_sigma = norm(xi1_phi, NormSpec::sobolev(sigma));
  common.lower_bound_ratio =
      common.xi1_phi_sigma / (std::pow(R, k) * T * T * std::pow(A, k - 0.5 + sigma));

  const ResonantSplit split = resonant_split(bump, params, T, p);
  common.i1_hs = norm(split.I1, hs);
  common.i2_hs = norm(split.I2, hs);

  common.estimates =
      check_conditions(params, base, std::make_pair(common.xi1_phi_hs, common.xi1_phi_sigma));
  {
    auto& lines = common.estimates.lemma_lines;
    const double N = static_cast<double>(params.N);
    const double base_h0 = norm(base, NormSpec::sobolev_pair(0.0));
    lines.push_back(measured_line("est1", common.perturbation_hs, R * std::pow(N, s) * std::sqrt(A)));
    lines.push_back(measured_line("est2", common.xi_hs[0], 1.0 + R * std::sqrt(A) * std::pow(N, s)));
    lines.push_back(measured_line("est3", norm(xi1_data - xi1_phi, hs),
                                  T * T * std::pow(R * A, k - 1.0) * base_h0));
    for (int j = 2; j <= options.max_generation; ++j)
      lines.push_back(measured_line(
          fmt::format("est4.{}", j), common.xi_hs[j],
          std::pow(T, 2.0 * j) * std::pow(R * A, (k - 1.0) * j) * (base_h0 + R * g_s(s, A))));
  }

  double worst_ratio = 0.0;
  for (std::size_t j = 1; j < acc.ratios.size(); ++j) worst_ratio = std::max(worst_ratio, acc.ratios[j]);
  const bool series_decays = worst_ratio < 1.0;
  if (!series_decays)
    common.diagnostics.push_back(
        fmt::format("series ledger ratio reaches {:.6g}; the Picard series does not decay", worst_ratio));
  common.series_tail_residual = tail_residual(acc, data);

  std::optional<SpectralField> solution;
  std::optional<Trajectory> series_traj;
  if (series_decays) series_traj = acc.sum();
  std::string failure = series_decays ? "" : "series-divergent";
  try {
    switch (options.method) {
      case SolveMethod::Series:
        if (series_decays) solution = acc.sum().final_value();
        break;
      case SolveMethod::FixedPoint: {
        FixedPointOptions fo;
        fo.degree = p;
        solution = fixed_point(data, k, T, options.fixed_point_tol, fo).solution.final_value();
        break;
      }
      case SolveMethod::Rk4: {
        Rk4Options ro;
        ro.dt = T * options.rk4_dt_fraction;
        ro.output_degree = p;
        ro.fail_on_tail = options.rk4_fail_on_tail;
        const Rk4Result rk = rk4_solve(data, k, T, ro);
        common.diagnostics.push_back(fmt::format("rk4 tail {:.3g}, energy drift {:.3g}", rk.tail, rk.energy_drift));
        solution = rk.trajectory.final_value();
        break;
      }
    }
  } catch (const ComputationError& e) {
    common.diagnostics.push_back(fmt::format("{} solver failed: {}", to_string(options.method), e.what()));
    failure = "solver-failed";
  }
  if (options.cross_check_fixed_point && series_traj) {
    FixedPointOptions fo;
    fo.degree = p;
    try {
      const auto fp = fixed_point(data, k, T, options.fixed_point_tol, fo);
      common.fixed_point_distance = sup_l1_distance(fp.solution, *series_traj);
    } catch (const ComputationError& e) {
      common.diagnostics.push_back(fmt::format("fixed-point cross-check failed: {}", e.what()));
    }
  }

  std::vector<InflationReport> reports;
  for (const auto& family : families) {
    InflationReport r = common;
    r.family = family.to_string();
    const double q = family_q(family);
    const double fs = family.family == NormFamily::WienerAlgebraPair ? 0.0 : family.s;
    r.perturbation_family = norm(perturbation, family);
    r.xi1_phi_family = norm(xi1_phi, family);
    r.family_lower_bound_ratio =
        r.xi1_phi_family / (std::pow(R, k) * T * T * std::pow(A, k - 1.0 + inverse_q(q) + fs));
    if (solution) {
      r.solution_hs = norm(*solution, hs);
      r.solution_sigma = norm(*solution, NormSpec::sobolev(sigma));
      r.solution_family = norm(*solution, family);
    } else {
      r.status = failure;
      r.solution_hs = r.solution_sigma = r.solution_family = std::nan("");
    }
    reports.push_back(std::move(r));
  }
  if (!solution)
    throw InflationAborted(common.diagnostics.back(), worst_ratio, std::move(reports));
  return reports;
}

InflationReport run_inflation(const InflationParams& params, const RunOptions& options,
                              const NormSpec& family) {
  return run_inflation(params, options, std::vector<NormSpec>{family}).front();
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "n", "N", "k", "s", "sigma", "delta", "R", "T", "A", "family", "method", "seed", "J",
      "status", "perturbation_hs", "perturbation_sigma", "perturbation_family",
      "xi1_phi_hs", "xi1_phi_sigma", "xi1_phi_family", "lower_bound_ratio",
      "family_lower_bound_ratio", "solution_hs", "solution_sigma", "solution_family", "tail_sum",
      "i1_hs", "i2_hs", "cond_i", "cond_ii", "cond_iii_a", "cond_iii_b", "cond_iv", "cond_v",
      "cond_vi", "max_ledger_ratio", "tail_residual", "sup_weight_ratio", "adjustments"};
  return cols;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", v);
}

std::string csv_quote(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string csv_row(const InflationReport& r) {
  const auto& P = r.params;
  auto cond = [&](const char* name) -> std::string {
    for (const auto& c : r.estimates.conditions)
      if (c.name == name) return num(c.margin);
    return "";
  };
  double worst = 0.0;
  for (std::size_t j = 1; j < r.ratios.size(); ++j) worst = std::max(worst, r.ratios[j]);
  std::string adjustments;
  for (const auto& a : P.adjustments) adjustments += (adjustments.empty() ? "" : "; ") + a;
  const std::vector<std::string> cells = {
      std::to_string(P.n), std::to_string(P.N), std::to_string(P.k), num(P.s), num(P.sigma),
      num(P.delta), num(P.R), num(P.T), std::to_string(P.A), csv_quote(r.family), r.method,
      r.seed ? std::to_string(*r.seed) : "", std::to_string(r.max_generation), csv_quote(r.status),
      num(r.perturbation_hs), num(r.perturbation_sigma), num(r.perturbation_family),
      num(r.xi1_phi_hs), num(r.xi1_phi_sigma), num(r.xi1_phi_family), num(r.lower_bound_ratio),
      num(r.family_lower_bound_ratio), num(r.solution_hs), num(r.solution_sigma),
      num(r.solution_family), num(r.tail_sum), num(r.i1_hs), num(r.i2_hs), cond("i"), cond("ii"),
      cond("iii.a"), cond("iii.b"), cond("iv"), cond("v"), cond("vi"), num(worst),
      num(r.series_tail_residual), num(r.sup_weight_ratio), csv_quote(adjustments)};
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
  return line;
}

SweepResult sweep(const SweepConfig& config) {
  struct Point {
    int n;
    std::optional<Frequency> N;
  };
  std::vector<Point> points;
  if (!config.N_list.empty()) {
    const std::vector<int> ns = config.n_list.empty() ? std::vector<int>{1} : config.n_list;
    for (int n : ns)
      for (Frequency N : config.N_list) points.push_back({n, N});
  } else {
    for (int n : config.n_list) points.push_back({n, std::nullopt});
  }

  RunOptions options;
  options.base_seed = config.seed;
  options.max_generation = config.J;
  options.time_degree = config.p;
  options.method = config.method;

  std::vector<std::vector<InflationReport>> per_point(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    ScheduleOptions so;
    so.delta_hint = config.delta;
    so.N_override = points[i].N;
    so.enforce_separation = config.enforce_separation;
    InflationParams params;
    try {
      params = schedule(points[i].n, config.k, config.s, config.sigma, so);
      per_point[i] = run_inflation(params, options, config.families);
    } catch (const InflationAborted& e) {
      per_point[i] = e.partial();
    } catch (const std::exception& e) {
      for (const auto& family : config.families) {
        InflationReport r;
        r.params = params;
        r.params.n = points[i].n;
        r.params.k = config.k;
        r.params.s = config.s;
        r.params.sigma = config.sigma;
        if (points[i].N) r.params.N = *points[i].N;
        r.family = family.to_string();
        r.method = to_string(config.method);
        r.seed = config.seed;
        r.max_generation = config.J;
        r.status = fmt::format("error: {}", e.what());
        per_point[i].push_back(std::move(r));
      }
    }
  });

  SweepResult result;
  std::string header;
  for (const auto& c : csv_columns()) header += (header.empty() ? "" : ",") + c;
  result.csv = header + "\n";
  for (auto& reports : per_point)
    for (auto& r : reports) {
      result.csv += csv_row(r) + "\n";
      result.reports.push_back(std::move(r));
    }
  return result;
}

}  // namespace gibq
