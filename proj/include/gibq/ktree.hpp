#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gibq {

using BigInt = boost::multiprecision::cpp_int;

/// Ordered k-ary tree. A node is terminal when it has no children, otherwise it
/// has exactly `arity` children.
class KTree {
 public:
  static KTree terminal(int arity);
  static KTree node(std::vector<KTree> children);

  int arity() const noexcept { return arity_; }
  bool is_terminal() const noexcept { return children_.empty(); }
  const std::vector<KTree>& children() const noexcept { return children_; }

  /// Number of non-terminal nodes.
  int generation() const noexcept { return generation_; }
  int node_count() const;
  int terminal_count() const;

  /// Parenthesised preorder form, "." for a terminal, e.g. "(.(..))".
  std::string to_string() const;

  bool operator==(const KTree& other) const;

 private:
  int arity_ = 2;
  int generation_ = 0;
  std::vector<KTree> children_;
};

struct TreeCountTable {
  int arity = 2;
  std::vector<BigInt> counts;  // counts[j] = |T(j)|
};

/// |T(0)| = 1 and |T(j)| = sum over compositions j1+...+jk = j-1 of the
/// product |T(j1)|...|T(jk)|.
TreeCountTable count_trees(int k, int max_generation);

/// binom(kj, j) / ((k-1)j + 1)
BigInt fuss_catalan(int k, int j);

inline constexpr std::size_t kEnumerationLimit = 1'000'000;

/// All ordered k-ary trees with j internal nodes, in a canonical order
/// (lexicographic in the root-children generation vector, then recursively).
std::vector<KTree> enumerate_trees(int k, int j);

struct CountBound {
  double c0 = 0.0;                  // smallest C0 with |T(j)|(1+j)^2 <= C0^j, 1 <= j <= J
  std::vector<bool> holds;          // per j = 0..J
  std::vector<double> per_j_root;   // (|T(j)|(1+j)^2)^{1/j}, 0 for j = 0
};

CountBound verify_count_bound(int k, int max_generation);

/// Ordered compositions j1+...+jk = total with every part >= 0, in
/// lexicographic order.
std::vector<std::vector<int>> compositions(int total, int parts);

}  // namespace gibq
