#pragma once

// Norm-inflation experiments: resonant split of the first Picard term, the
// (i)-(vi) condition ledger, single runs and deterministic sweeps.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gibq/construction.hpp"
#include "gibq/errors.hpp"
#include "gibq/norms.hpp"
#include "gibq/series.hpp"

namespace gibq {

inline constexpr const char* kReportSchemaVersion = "gibq.report/1";

struct ResonantSplit {
  std::vector<std::vector<Frequency>> sigma1;  // zero-sum tuples of Sigma^k
  std::vector<std::vector<Frequency>> sigma2;  // the rest
  SpectralField I1;                            // resonant part of Xi_1(phi)(T) / R^k
  SpectralField I2;
};

/// Splits Xi_1(phi_n)(T) by the cube tuple each contribution comes from. One
/// Duhamel evaluation per tuple (4^k of them).
ResonantSplit resonant_split(const BumpData& bump, const InflationParams& params, double horizon,
                             int degree = kDefaultTimeDegree);

struct ConditionMargin {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;     // lhs / rhs; the condition holds iff margin < 1
  double shorthand = 0.0;  // the same margin with A in place of measured norms
  bool holds = false;
};

struct EstimateLedger {
  double g_s_of_A = 0.0;
  double f_sq_of_A = 0.0;
  bool sigma_variant = false;
  std::vector<ConditionMargin> conditions;   // i, ii, iii.a, iii.b, iv, v, vi
  std::vector<InequalityLine> lemma_lines;   // measured sides of the multilinear estimates
  double xi1_lower_ratio = 0.0;
  bool all_hold() const;
  const ConditionMargin& condition(const std::string& name) const;
};

/// Evaluates (i)-(vi) with measured norms. xi1_phi_T is ||Xi_1(phi_n)(T)|| in
/// H^s and H^sigma; when absent it is computed from the closed form.
EstimateLedger check_conditions(const InflationParams& params, const InitialPair& base,
                                std::optional<std::pair<double, double>> xi1_phi_T = std::nullopt);

enum class SolveMethod { Series, FixedPoint, Rk4 };
SolveMethod parse_method(const std::string& text);
std::string to_string(SolveMethod method);

struct RunOptions {
  std::optional<std::uint64_t> base_seed;  // absent: u0 = 0
  double base_decay = 0.5;
  double base_amplitude = 1.0;
  int max_generation = 8;
  int time_degree = kDefaultTimeDegree;
  SolveMethod method = SolveMethod::Series;
  bool cross_check_fixed_point = false;
  double fixed_point_tol = 1e-9;
  double rk4_dt_fraction = 1.0 / 2000.0;
  bool rk4_fail_on_tail = true;  // false: a closure-tail breach is reported, not raised
};

struct InflationReport {
  std::string schema = kReportSchemaVersion;
  InflationParams params;
  std::string family;
  std::string method;
  std::optional<std::uint64_t> seed;
  int max_generation = 0;
  std::string status = "ok";

  double perturbation_hs = 0.0;      // ||u_{0,n} - u_0|| in H^s x H^s
  double perturbation_sigma = 0.0;   // same in H^sigma x H^sigma
  double perturbation_family = 0.0;  // same in the family, regularity s
  double perturbation_ws2inf = 0.0;  // in W^{s,2,inf} x W^{s,2,inf}

  std::vector<double> xi_hs;         // ||Xi_j(u_{0,n})(T)||_{H^s}
  std::vector<double> ledger;        // sup-in-time l1 norms of Xi_j(u_{0,n})
  std::vector<double> ratios;
  double tail_sum = 0.0;             // sum_{j=2..J} xi_hs[j]
  double series_tail_residual = -1.0;

  double xi1_phi_hs = 0.0;
  double xi1_phi_sigma = 0.0;
  double xi1_phi_family = 0.0;
  double lower_bound_ratio = 0.0;         // H^sigma, exponent k - 1/2 + sigma
  double family_lower_bound_ratio = 0.0;  // family, exponent k - 1 + 1/q + s

  double solution_hs = 0.0;  // ||u_n(T)||_{H^s} by the chosen method
  double solution_sigma = 0.0;
  double solution_family = 0.0;
  double fixed_point_distance = -1.0;

  double i1_hs = 0.0;
  double i2_hs = 0.0;

  double sup_weight_ratio = 0.0;  // ||<D>^s phi||_inf / ||phi||_{H^s}

  EstimateLedger estimates;
  std::vector<std::string> diagnostics;
};

/// Raised when the series does not decay; carries everything measured so far.
class InflationAborted : public DivergenceError {
 public:
  InflationAborted(const std::string& what, double factor, std::vector<InflationReport> partial)
      : DivergenceError(what, factor), partial_(std::move(partial)) {}
  const std::vector<InflationReport>& partial() const noexcept { return partial_; }

 private:
  std::vector<InflationReport> partial_;
};

/// One run per family sharing the series computation. Throws InflationAborted
/// when no solution is available: the method is Series and the Picard series
/// does not decay (some ledger ratio >= 1), or the fixed-point or RK4 solve
/// failed. The partial reports then carry every other measurement.
std::vector<InflationReport> run_inflation(const InflationParams& params, const RunOptions& options,
                                           const std::vector<NormSpec>& families);
InflationReport run_inflation(const InflationParams& params, const RunOptions& options,
                              const NormSpec& family);

/// Relative sup-l1 gap between Xi_1(u0 + phi) - Xi_1(phi) and the sum of
/// I_k over mixed argument tuples containing at least one S(t)u0.
double decomposition_identity_error(const InitialPair& base, const InitialPair& phi, int k,
                                    double horizon, int degree = kDefaultTimeDegree);

struct SweepConfig {
  int k = 2;
  double s = -0.75;
  double sigma = -0.75;
  std::optional<double> delta;
  std::vector<int> n_list;
  std::vector<Frequency> N_list;
  std::vector<NormSpec> families{NormSpec::sobolev(-0.75)};
  std::optional<std::uint64_t> seed;
  int J = 8;
  int p = kDefaultTimeDegree;
  SolveMethod method = SolveMethod::Series;
  bool enforce_separation = true;
};

struct SweepResult {
  std::vector<InflationReport> reports;  // config order: points outer, families inner
  std::string csv;
};

SweepResult sweep(const SweepConfig& config);

/// Column header of runs.csv.
const std::vector<std::string>& csv_columns();
std::string csv_row(const InflationReport& report);

}  // namespace gibq
