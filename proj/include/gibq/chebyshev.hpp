#pragma once

#include <vector>

namespace gibq {

/// Chebyshev-Gauss-Lobatto points on [a, b] in ascending order:
/// t_m = a + (b - a)(1 - cos(pi m / p)) / 2, m = 0..p.
std::vector<double> lobatto_nodes(int p, double a, double b);

/// Barycentric weights for the Lobatto points: (-1)^m, halved at both ends.
std::vector<double> barycentric_weights(int p);

/// Clenshaw-Curtis weights for the Lobatto points on [a, b].
std::vector<double> clenshaw_curtis_weights(int p, double a, double b);

/// Row r with sum_m r[m] f(t_m) equal to the degree-p interpolant at t.
std::vector<double> interpolation_row(const std::vector<double>& nodes,
                                      const std::vector<double>& weights, double t);

}  // namespace gibq
