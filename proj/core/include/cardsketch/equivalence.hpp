#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cardsketch/element.hpp"

namespace cardsketch {

/// Projection sketch V_j and maximal-term sketch M_j = max_i X_ij^alpha built
/// in one pass from the same stable variates X_ij.
struct CoupledResult {
  std::vector<double> residuals;  // V_j^-alpha - 1 / M_j, i.e. V_j^-alpha + log G(M_j)
  std::vector<double> ratios;     // V_j^alpha / M_j at the end of the stream
  double median_abs_residual = 0.0;
  double max_abs_residual = 0.0;
  std::uint64_t sandwich_checks = 0;
  std::uint64_t sandwich_violations = 0;  // a_min^alpha <= V^alpha / M <= (sum a)^alpha
};

/// Throws UnsupportedDeletion on d <= 0. The sandwich is checked for every
/// stream after every element with relative tolerance 1e-12.
CoupledResult coupled_residuals(std::span<const StreamElement> stream, std::uint32_t m,
                                double alpha, std::uint64_t salt);

}  // namespace cardsketch
