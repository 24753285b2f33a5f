#include "gibq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "gibq/construction.hpp"
#include "gibq/errors.hpp"
#include "gibq/harness.hpp"
#include "gibq/ktree.hpp"
#include "gibq/norms.hpp"
#include "gibq/oracle.hpp"
#include "gibq/parallel.hpp"
#include "gibq/series.hpp"

namespace gibq {
namespace {

constexpr int kSweepArity = 2;
constexpr double kSweepS = -0.75;
constexpr double kSweepDelta = 0.25;

std::string g(double v) { return fmt::format("{:.6g}", v); }

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(y[i] > 0) || !std::isfinite(y[i])) return std::nan("");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

bool slope_line(CriterionResult& r, const std::string& what, const std::vector<double>& N,
                const std::vector<double>& values, double expected, double tol) {
  const double slope = log_slope(N, values);
  const bool ok = std::isfinite(slope) && std::abs(slope - expected) <= tol;
  r.details.push_back(fmt::format("{} slope {} (expected {} +- {}) {}", what, g(slope), g(expected),
                                  g(tol), ok ? "ok" : "FAIL"));
  return ok;
}

double relative_distance(const Trajectory& a, const Trajectory& b) {
  const double scale = std::max(a.sup_l1(), b.sup_l1());
  return scale > 0 ? sup_l1_distance(a, b) / scale : 0.0;
}

double relative_l1(const SpectralField& a, const SpectralField& b) {
  const double scale = std::max(a.l1(), b.l1());
  return scale > 0 ? (a - b).l1() / scale : 0.0;
}

/// A Hermitian pair with u1 = 0 on |xi| <= band.
InitialPair small_field_pair(std::uint64_t seed, Frequency band, double amplitude) {
  InitialPair full = sample_base_data(seed, 0.4, amplitude);
  full.u0 = full.u0.restricted([band](Frequency xi) { return xi >= -band && xi <= band; });
  full.u1 = SpectralField(full.u0.lattice());
  return full;
}

std::vector<NormSpec> sweep_families() {
  return {NormSpec::sobolev(kSweepS), NormSpec::fourier_lebesgue(kSweepS, 1.0),
          NormSpec::fourier_lebesgue(kSweepS, kInf), NormSpec::modulation(kSweepS, 1.0),
          NormSpec::wiener_amalgam(kSweepS, 2.0)};
}

struct SweepPoint {
  Frequency N = 0;
  InflationParams params;
  std::vector<InflationReport> reports;  // one per family, empty on error
  std::string error;
};

std::vector<SweepPoint> run_sweep(const std::vector<Frequency>& Ns, double sigma, int J,
                                  SolveMethod method, double dt_fraction) {
  std::vector<SweepPoint> points(Ns.size());
  parallel_for(Ns.size(), [&](std::size_t i) {
    SweepPoint& pt = points[i];
    pt.N = Ns[i];
    try {
      ScheduleOptions so;
      so.delta_hint = kSweepDelta;
      so.N_override = Ns[i];
      pt.params = schedule(1, kSweepArity, kSweepS, sigma, so);
      RunOptions ro;
      ro.max_generation = J;
      ro.method = method;
      ro.rk4_dt_fraction = dt_fraction;
      ro.rk4_fail_on_tail = false;
      try {
        pt.reports = run_inflation(pt.params, ro, sweep_families());
      } catch (const InflationAborted& e) {
        pt.reports = e.partial();
      }
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
  });
  return points;
}

class Suite {
 public:
  explicit Suite(const VerifyOptions& o) : opt_(o) {}

  CriterionResult trees() {
    CriterionResult r{"1", "tree counts, enumeration and the generation bound", true, {}};
    for (int k : {2, 3}) {
      const auto table = count_trees(k, 8);
      bool counts = true, enumerated = true, identities = true;
      for (int j = 0; j <= 8; ++j) {
        counts = counts && table.counts[j] == fuss_catalan(k, j);
        const auto trees = enumerate_trees(k, j);
        enumerated = enumerated && BigInt(trees.size()) == table.counts[j];
        for (const auto& t : trees)
          identities = identities && t.node_count() == k * j + 1 &&
                       t.terminal_count() == (k - 1) * j + 1 && t.generation() == j;
      }
      const auto bound = verify_count_bound(k, 8);
      const bool holds = std::all_of(bound.holds.begin(), bound.holds.end(), [](bool b) { return b; });
      r.details.push_back(fmt::format("k={} counts {} enumeration {} identities {} C0={} bound {}", k,
                                      counts ? "ok" : "FAIL", enumerated ? "ok" : "FAIL",
                                      identities ? "ok" : "FAIL", g(bound.c0), holds ? "ok" : "FAIL"));
      r.pass = r.pass && counts && enumerated && identities && holds;
    }
    return r;
  }

  CriterionResult series_identity() {
    CriterionResult r{"2", "sum over trees equals the generation term", true, {}};
    const InitialPair pair = sample_base_data(opt_.seed, 0.5, 0.3);
    const double T = 0.7;
    for (auto [k, J] : {std::pair{2, 3}, std::pair{3, 2}}) {
      for (int j = 1; j <= J; ++j) {
        const auto xi = xi_term(pair, k, j, T).trajectory;
        std::optional<Trajectory> total;
        for (const auto& tree : enumerate_trees(k, j)) {
          Trajectory t = psi_tree(pair, tree, T);
          total = total ? *total + t : t;
        }
        const double err = relative_distance(*total, xi);
        const bool ok = err <= tolerance::kSeriesIdentity;
        r.details.push_back(fmt::format("k={} j={} relative sup-l1 gap {} {}", k, j, g(err), ok ? "ok" : "FAIL"));
        r.pass = r.pass && ok;
      }
    }
    return r;
  }

  CriterionResult oracle_agreement() {
    CriterionResult r{"3", "series, fixed point and RK4 agree on the scheduled k=2, n=1 run", false, {}};
    ScheduleOptions so;
    so.delta_hint = kSweepDelta;
    if (opt_.quick) so.N_override = 256;
    const InflationParams P = schedule(1, 2, kSweepS, kSweepS, so);
    const BumpData bump = make_bump(P);
    const InitialPair data = perturbed_data(sample_base_data(opt_.seed, 0.5, 1.0), bump);
    r.details.push_back(fmt::format("N={} T={} R={} FL1 of data {} T^2*FL1 {}", P.N, g(P.T), g(P.R),
                                    g(pair_fl1(data)), g(P.T * P.T * pair_fl1(data))));
    r.details.push_back(three_way(r, data, P.k, P.T, opt_.quick ? 500.0 : 2000.0));
    return r;
  }

  CriterionResult closed_form() {
    CriterionResult r{"4", "closed-form first Picard term matches the Duhamel path", true, {}};
    struct Case {
      int k;
      double T;
      std::optional<Frequency> N;
    };
    const std::vector<Case> cases = {{2, 0.3, {}},  {2, 0.7, {}},  {2, 1.0, {}}, {3, 0.3, {}},
                                     {3, 0.7, {}},  {3, 1.0, {}},  {2, 0.0, 256}, {2, 0.0, 512},
                                     {3, 0.0, 256}, {2, 0.0, 1024}};
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const Case& c = cases[i];
      SpectralField direct, closed;
      std::string label;
      if (!c.N) {
        const InitialPair pair = small_field_pair(opt_.seed + i, 12, 0.5);
        direct = xi_term(pair, c.k, 1, c.T).trajectory.final_value();
        closed = xi1_closed_form(pair, c.k, c.T);
        label = fmt::format("random k={} T={}", c.k, g(c.T));
      } else {
        ScheduleOptions so;
        so.delta_hint = kSweepDelta;
        so.N_override = *c.N;
        const InflationParams P = schedule(1, c.k, kSweepS, kSweepS, so);
        const BumpData bump = make_bump(P);
        direct = xi_term(bump.phi, c.k, 1, P.T).trajectory.final_value();
        closed = xi1_closed_form(bump, P, P.T);
        label = fmt::format("bump k={} N={}", c.k, *c.N);
      }
      const double err = relative_l1(direct, closed);
      const bool ok = err <= tolerance::kClosedForm;
      r.details.push_back(fmt::format("{} relative l1 gap {} {}", label, g(err), ok ? "ok" : "FAIL"));
      r.pass = r.pass && ok;
    }
    return r;
  }

  CriterionResult sandwich() {
    CriterionResult r{"5", "discrete convolution sandwich", true, {}};
    const std::vector<long long> offsets = {-200, -73, 0, 59, 200};
    for (int A : {2, 10, 50}) {
      double lo = kInf, hi = 0;
      bool all = true;
      for (long long a : offsets)
        for (long long b : offsets) {
          const auto rep = convolution_sandwich(a, b, A);
          lo = std::min(lo, rep.lower_constant);
          hi = std::max(hi, rep.upper_constant);
          all = all && rep.holds(tolerance::kSandwichLower, tolerance::kSandwichUpper);
        }
      r.details.push_back(fmt::format("A={} min lower constant {} max upper constant {} {}", A, g(lo),
                                      g(hi), all ? "ok" : "FAIL"));
      r.pass = r.pass && all;
    }
    return r;
  }

  CriterionResult exponents() {
    CriterionResult r{"6", "exponent slopes and tail domination over the N sweep", true, {}};
    const auto& pts = main_sweep();
    if (!sweep_ok(r, pts)) return r;
    std::vector<double> N, pert, xi1, cond2;
    for (const auto& pt : pts) {
      const auto& rep = pt.reports.front();
      N.push_back(static_cast<double>(pt.N));
      pert.push_back(rep.perturbation_hs);
      xi1.push_back(rep.xi1_phi_hs);
      cond2.push_back(rep.estimates.condition("ii").lhs);
    }
    const double s = kSweepS, d = kSweepDelta, k = kSweepArity;
    bool ok = slope_line(r, "perturbation H^s", N, pert, -d, tolerance::kSlopePerturbation);
    ok = slope_line(r, "Xi_1(phi) H^s", N, xi1, -s - (k + 1) * d / 2, tolerance::kSlopeXi1) && ok;
    ok = slope_line(r, "condition (ii)", N, cond2, -(k - 1) * d / 2, tolerance::kSlopeCondition) && ok;
    ok = tail_lines(r, pts, 0) && ok;
    for (const auto& pt : pts) {
      const auto& rep = pt.reports.front();
      std::string lemma;
      for (const auto& l : rep.estimates.lemma_lines)
        if (l.name == "est1" || l.name == "est2" || l.name == "est4.2")
          lemma += fmt::format(" {}={}", l.name, g(l.margin));
      r.details.push_back(fmt::format("N={} measured/bound{} max ledger ratio {}", pt.N, lemma,
                                      g(*std::max_element(rep.ratios.begin(), rep.ratios.end()))));
    }
    r.pass = ok;
    return r;
  }

  CriterionResult transfer() {
    CriterionResult r{"7", "high-to-low transfer ratio I2/I1", true, {}};
    const auto& pts = main_sweep();
    if (!sweep_ok(r, pts)) return r;
    std::vector<double> N, ratio;
    for (const auto& pt : pts) {
      const auto& rep = pt.reports.front();
      N.push_back(static_cast<double>(pt.N));
      ratio.push_back(rep.i2_hs / rep.i1_hs);
      r.details.push_back(fmt::format("N={} |I1|={} |I2|={} ratio {}", pt.N, g(rep.i1_hs), g(rep.i2_hs),
                                      g(ratio.back())));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < ratio.size(); ++i) monotone = monotone && ratio[i] < ratio[i - 1];
    r.details.push_back(fmt::format("monotone decrease {}", monotone ? "ok" : "FAIL"));
    const bool slope = slope_line(r, "I2/I1", N, ratio, kSweepS, tolerance::kSlopeTransfer);
    r.pass = monotone && slope;
    return r;
  }

  CriterionResult loss_of_regularity() {
    CriterionResult r{"8", "lower-bound ratio in H^sigma, sigma = s - 3", true, {}};
    const double sigma = kSweepS - 3.0;
    const auto& base = main_sweep();
    if (!sweep_ok(r, base)) return r;
    // Only Xi_1 and the data enter this criterion, so one generation suffices.
    const auto pts = run_sweep(sweep_Ns(), sigma, 1, SolveMethod::Series, 1.0);
    if (!sweep_ok(r, pts)) return r;
    const InflationParams& P0 = pts.front().params;
    const double reference = resonant_limit(P0, sigma);
    const double lo = tolerance::kWindowLow * reference, hi = tolerance::kWindowHigh * reference;
    r.details.push_back(fmt::format("T->0 resonant limit {} window [{}, {}]", g(reference), g(lo), g(hi)));
    bool ok = reference > 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& rep = pts[i].reports.front();
      const double ratio = rep.lower_bound_ratio;
      const double pert_gap = std::abs(rep.perturbation_hs - base[i].reports.front().perturbation_hs) /
                              base[i].reports.front().perturbation_hs;
      const bool in = ratio >= lo && ratio <= hi;
      const bool same = pert_gap <= tolerance::kPerturbationUnchanged;
      r.details.push_back(fmt::format("N={} ratio {} {} perturbation change {} {}", pts[i].N, g(ratio),
                                      in ? "ok" : "FAIL", g(pert_gap), same ? "ok" : "FAIL"));
      ok = ok && in && same;
    }
    r.pass = ok;
    for (const auto& pt : pts) sigma_bumps_.push_back(pt.reports.front().sup_weight_ratio);
    return r;
  }

  CriterionResult families() {
    CriterionResult r{"9", "norm-family slopes and the embedding/algebra corpus", true, {}};
    const auto& pts = main_sweep();
    if (!sweep_ok(r, pts)) return r;
    const double s = kSweepS, d = kSweepDelta, k = kSweepArity;
    bool ok = true;
    for (std::size_t f = 1; f < pts.front().reports.size(); ++f) {
      std::vector<double> N, pert, xi1;
      for (const auto& pt : pts) {
        N.push_back(static_cast<double>(pt.N));
        pert.push_back(pt.reports[f].perturbation_family);
        xi1.push_back(pt.reports[f].xi1_phi_family);
      }
      const std::string name = pts.front().reports[f].family;
      ok = slope_line(r, name + " perturbation", N, pert, -d, tolerance::kSlopePerturbation) && ok;
      ok = slope_line(r, name + " Xi_1(phi)", N, xi1, -s - (k + 1) * d / 2, tolerance::kSlopeXi1) && ok;
      ok = tail_lines(r, pts, f) && ok;
    }
    const int count = opt_.quick ? 20 : 100;
    const auto corpus = embedding_corpus(opt_.seed, count);
    const std::vector<double> regularities = {-0.75, -0.25, 0.0, 0.5};
    int embed_fail = 0, algebra_fail = 0;
    double worst_embed = 0, worst_m21 = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto rep = check_embeddings(corpus[i], regularities[i % regularities.size()]);
      if (!rep.all_hold()) ++embed_fail;
      for (const auto& l : rep.lines) worst_embed = std::max(worst_embed, l.margin);
      const auto alg = check_algebra(corpus[i], corpus[(i + 1) % corpus.size()]);
      if (!alg.fl1.holds || !alg.m21.holds) ++algebra_fail;
      worst_m21 = std::max(worst_m21, alg.m21_constant);
    }
    r.details.push_back(fmt::format("corpus of {} fields: embedding failures {} (worst margin {}), "
                                    "algebra failures {} (largest M2,1 constant {})",
                                    count, embed_fail, g(worst_embed), algebra_fail, g(worst_m21)));
    r.pass = ok && embed_fail == 0 && algebra_fail == 0;
    return r;
  }

  CriterionResult sup_weight() {
    CriterionResult r{"10", "sup norm of <D>^s phi against its H^s norm", true, {}};
    const auto& pts = main_sweep();
    if (!sweep_ok(r, pts)) return r;
    std::vector<double> ratios = sigma_bumps_;
    for (const auto& pt : pts) ratios.push_back(pt.reports.front().sup_weight_ratio);
    const double A = pts.front().params.A;
    const double bound = 2.0 * std::sqrt(A + 1.0);
    const double worst = *std::max_element(ratios.begin(), ratios.end());
    r.pass = worst <= bound;
    r.details.push_back(fmt::format("{} bumps, largest ratio {} against 2(A+1)^(1/2) = {} (2A^(1/2) = {})",
                                    ratios.size(), g(worst), g(bound), g(2.0 * std::sqrt(A))));
    return r;
  }

  CriterionResult small_amplitude() {
    CriterionResult r{"S1", "three-way agreement at small amplitude", false, {}};
    const InitialPair data = sample_base_data(opt_.seed + 1, 0.5, 0.05);
    r.details.push_back(fmt::format("FL1 of data {}", g(pair_fl1(data))));
    r.details.push_back(three_way(r, data, 2, 1.0, 2000.0));
    return r;
  }

  CriterionResult decomposition() {
    CriterionResult r{"S2", "decomposition of Xi_1 over mixed argument tuples", true, {}};
    ScheduleOptions so;
    so.delta_hint = kSweepDelta;
    so.N_override = 256;
    const InflationParams P = schedule(1, 2, kSweepS, kSweepS, so);
    const InitialPair base = sample_base_data(opt_.seed, 0.5, 1.0);
    const double err = decomposition_identity_error(base, make_bump(P).phi, P.k, P.T);
    r.pass = err <= tolerance::kDecomposition;
    r.details.push_back(fmt::format("relative sup-l1 gap {}", g(err)));
    return r;
  }

 private:
  std::vector<Frequency> sweep_Ns() const {
    return opt_.quick ? std::vector<Frequency>{128, 256, 512} : std::vector<Frequency>{256, 1024, 4096};
  }

  const std::vector<SweepPoint>& main_sweep() {
    if (!main_)
      main_ = run_sweep(sweep_Ns(), kSweepS, 8, SolveMethod::Rk4, opt_.quick ? 1.0 / 500 : 1.0 / 2000);
    return *main_;
  }

  static bool sweep_ok(CriterionResult& r, const std::vector<SweepPoint>& pts) {
    for (const auto& pt : pts)
      if (!pt.error.empty() || pt.reports.empty()) {
        r.pass = false;
        r.details.push_back(fmt::format("N={} run failed: {}", pt.N, pt.error));
        return false;
      }
    return true;
  }

  static bool tail_lines(CriterionResult& r, const std::vector<SweepPoint>& pts, std::size_t family) {
    bool ok = true;
    for (const auto& pt : pts) {
      const auto& rep = pt.reports[family];
      const double ratio = rep.solution_family / rep.xi1_phi_family;
      const bool in = std::isfinite(ratio) && ratio <= tolerance::kTailFactor &&
                      ratio >= 1.0 / tolerance::kTailFactor;
      r.details.push_back(fmt::format("N={} {} |u_n(T)| / |Xi_1(phi)(T)| = {} {}", pt.N, rep.family,
                                      g(ratio), in ? "ok" : "FAIL"));
      if (!std::isfinite(ratio) && family == 0)
        for (const auto& d : rep.diagnostics) r.details.push_back("  " + d);
      ok = ok && in;
    }
    return ok;
  }

  /// lim_{T->0} ||Xi_1(phi)(T)||_{H^sigma} / (R^k T^2 A^{k-1/2+sigma}); the
  /// first Picard term is (T^2/2) lambda^2 [phi^k]^ to leading order.
  static double resonant_limit(const InflationParams& P, double sigma) {
    const BumpData bump = make_bump(P);
    const SpectralField leading = power_k(bump.phi.u0, P.k).multiplied([&](Frequency xi) {
      const double l = lambda_symbol(xi, bump.phi.lattice());
      return Complex(0.5 * l * l, 0.0);
    });
    return norm(leading, NormSpec::sobolev(sigma)) /
           (std::pow(P.R, P.k) * std::pow(P.A, P.k - 0.5 + sigma));
  }

  std::string three_way(CriterionResult& r, const InitialPair& data, int k, double T, double steps) {
    std::optional<Trajectory> series, fixed, rk4;
    try {
      SeriesBuilder builder(data, k, T);
      const auto acc = partial_sum(builder, 8);
      series = acc.sum();
      r.details.push_back(fmt::format("series ledger ratios j=1..8: {}",
                                      fmt::format("{:.4g}", fmt::join(acc.ratios.begin() + 1, acc.ratios.end(), " "))));
    } catch (const ComputationError& e) {
      r.details.push_back(fmt::format("series failed: {}", e.what()));
    }
    try {
      const auto fp = fixed_point(data, k, T, 1e-9);
      fixed = fp.solution;
      r.details.push_back(fmt::format("fixed point converged in {} iterations", fp.iterations));
    } catch (const ComputationError& e) {
      r.details.push_back(fmt::format("fixed point failed: {}", e.what()));
    }
    try {
      Rk4Options ro;
      ro.dt = T / steps;
      ro.fail_on_tail = false;
      const auto res = rk4_solve(data, k, T, ro);
      rk4 = res.trajectory;
      r.details.push_back(fmt::format("rk4 closure {} modes, tail {} {}", res.closure.size(), g(res.tail),
                                      res.tail_ok ? "within tolerance" : "above tolerance"));
    } catch (const ComputationError& e) {
      r.details.push_back(fmt::format("rk4 failed: {}", e.what()));
    }
    auto dist = [](const std::optional<Trajectory>& a, const std::optional<Trajectory>& b) {
      return a && b ? sup_l1_distance(*a, *b) : std::nan("");
    };
    const double sf = dist(series, fixed), sr = dist(series, rk4), fr = dist(fixed, rk4);
    auto within = [](double d) { return std::isfinite(d) && d <= tolerance::kOracleAgreement; };
    r.pass = within(sf) && within(sr) && within(fr);
    return fmt::format("sup-l1 distances: series/fixed {} series/rk4 {} fixed/rk4 {}", g(sf), g(sr), g(fr));
  }

  VerifyOptions opt_;
  std::optional<std::vector<SweepPoint>> main_;
  std::vector<double> sigma_bumps_;
};

}  // namespace

std::vector<CriterionResult> verify_all(const VerifyOptions& options,
                                        const std::function<void(const CriterionResult&)>& on_result) {
  Suite suite(options);
  std::vector<CriterionResult> out;
  auto run = [&](const char* id, const char* title, auto method) {
    CriterionResult r;
    try {
      r = (suite.*method)();
    } catch (const std::exception& e) {
      r = CriterionResult{id, title, false, {}};
      r.details.push_back(fmt::format("aborted: {}", e.what()));
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  };
  run("1", "tree counts, enumeration and the generation bound", &Suite::trees);
  run("2", "sum over trees equals the generation term", &Suite::series_identity);
  run("3", "series, fixed point and RK4 agree on the scheduled k=2, n=1 run", &Suite::oracle_agreement);
  run("4", "closed-form first Picard term matches the Duhamel path", &Suite::closed_form);
  run("5", "discrete convolution sandwich", &Suite::sandwich);
  run("6", "exponent slopes and tail domination over the N sweep", &Suite::exponents);
  run("7", "high-to-low transfer ratio I2/I1", &Suite::transfer);
  run("8", "lower-bound ratio in H^sigma, sigma = s - 3", &Suite::loss_of_regularity);
  run("9", "norm-family slopes and the embedding/algebra corpus", &Suite::families);
  run("10", "sup norm of <D>^s phi against its H^s norm", &Suite::sup_weight);
  run("S1", "three-way agreement at small amplitude", &Suite::small_amplitude);
  run("S2", "decomposition of Xi_1 over mixed argument tuples", &Suite::decomposition);
  return out;
}

std::string render(const CriterionResult& r) {
  std::string out = fmt::format("{} {} {}\n", r.pass ? "PASS" : "FAIL", r.id, r.title);
  for (const auto& d : r.details) out += "    " + d + "\n";
  return out;
}

}  // namespace gibq
