#include "gibq/errors.hpp"

#include <fmt/format.h>

namespace gibq {

OverflowError::OverflowError(long long frequency, long long cutoff)
    : ComputationError(fmt::format("frequency {} exceeds lattice cutoff {}", frequency, cutoff)),
      frequency_(frequency) {}

DivergenceError::DivergenceError(const std::string& what, double measured_factor)
    : ComputationError(fmt::format("{} (measured factor {:.6g})", what, measured_factor)),
      factor_(measured_factor) {}

}  // namespace gibq
