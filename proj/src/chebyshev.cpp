#include "gibq/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "gibq/errors.hpp"

namespace gibq {

std::vector<double> lobatto_nodes(int p, double a, double b) {
  if (p < 1) throw DomainError("Chebyshev degree must be >= 1");
  std::vector<double> t(p + 1);
  for (int m = 0; m <= p; ++m)
    t[m] = a + (b - a) * 0.5 * (1.0 - std::cos(std::numbers::pi * m / p));
  t[0] = a;
  t[p] = b;
  return t;
}

std::vector<double> barycentric_weights(int p) {
  if (p < 1) throw DomainError("Chebyshev degree must be >= 1");
  std::vector<double> w(p + 1);
  for (int m = 0; m <= p; ++m) w[m] = (m % 2 == 0) ? 1.0 : -1.0;
  w[0] *= 0.5;
  w[p] *= 0.5;
  return w;
}

std::vector<double> clenshaw_curtis_weights(int p, double a, double b) {
  if (p < 1) throw DomainError("Chebyshev degree must be >= 1");
  std::vector<double> w(p + 1, 0.0);
  const double pi = std::numbers::pi;
  if (p == 1) {
    w[0] = w[1] = 1.0;
  } else {
    for (int m = 1; m < p; ++m) {
      const double theta = pi * m / p;
      double v = 1.0;
      if (p % 2 == 0) {
        for (int j = 1; j < p / 2; ++j) v -= 2.0 * std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
        v -= std::cos(p * theta) / (static_cast<double>(p) * p - 1.0);
      } else {
        for (int j = 1; j <= (p - 1) / 2; ++j)
          v -= 2.0 * std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
      }
      w[m] = 2.0 * v / p;
    }
    const double end = (p % 2 == 0) ? 1.0 / (static_cast<double>(p) * p - 1.0)
                                    : 1.0 / (static_cast<double>(p) * p);
    w[0] = w[p] = end;
  }
  for (auto& x : w) x *= 0.5 * (b - a);
  return w;
}

std::vector<double> interpolation_row(const std::vector<double>& nodes,
                                      const std::vector<double>& weights, double t) {
  std::vector<double> row(nodes.size(), 0.0);
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    if (t == nodes[m]) {
      row[m] = 1.0;
      return row;
    }
  }
  double denom = 0.0;
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    row[m] = weights[m] / (t - nodes[m]);
    denom += row[m];
  }
  for (auto& r : row) r /= denom;
  return row;
}

}  // namespace gibq
