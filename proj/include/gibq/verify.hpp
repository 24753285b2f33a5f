#pragma once

// The invariant suite behind `gibq verify-all` and the acceptance binary.
// Every tolerance and window is pinned here; the detail lines carry the
// measured values so failures can be diagnosed from the output alone.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gibq {

namespace tolerance {
inline constexpr double kSeriesIdentity = 1e-10;
inline constexpr double kOracleAgreement = 1e-6;
inline constexpr double kClosedForm = 1e-10;
inline constexpr double kSandwichLower = 0.5;
inline constexpr double kSandwichUpper = 1.0;
inline constexpr double kSlopePerturbation = 0.03;
inline constexpr double kSlopeXi1 = 0.05;
inline constexpr double kSlopeCondition = 0.03;
inline constexpr double kTailFactor = 2.0;
inline constexpr double kSlopeTransfer = 0.1;
inline constexpr double kWindowLow = 0.9;   // times the T -> 0 resonant limit
inline constexpr double kWindowHigh = 1.1;
inline constexpr double kPerturbationUnchanged = 1e-12;
inline constexpr double kDecomposition = 1e-10;
}  // namespace tolerance

struct VerifyOptions {
  bool quick = false;
  std::uint64_t seed = 20250101;
};

struct CriterionResult {
  std::string id;  // "1".."10", or "S1".. for supplementary checks
  std::string title;
  bool pass = false;
  std::vector<std::string> details;
};

/// Runs criteria 1-10 and the supplementary checks in order, calling
/// on_result after each one. Output is a pure function of the options.
std::vector<CriterionResult> verify_all(const VerifyOptions& options,
                                        const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS 3 title" followed by indented detail lines.
std::string render(const CriterionResult& result);

}  // namespace gibq
