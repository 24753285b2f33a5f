#include "gibq/ktree.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gibq/errors.hpp"

namespace gibq {

KTree KTree::terminal(int arity) {
  if (arity < 2) throw DomainError(fmt::format("tree arity must be >= 2, got {}", arity));
  KTree t;
  t.arity_ = arity;
  return t;
}

KTree KTree::node(std::vector<KTree> children) {
  if (children.size() < 2) throw StructuralError("a non-terminal node needs at least 2 children");
  KTree t;
  t.arity_ = static_cast<int>(children.size());
  t.generation_ = 1;
  for (const auto& c : children) {
    if (c.arity_ != t.arity_) throw StructuralError("children disagree on arity");
    t.generation_ += c.generation_;
  }
  t.children_ = std::move(children);
  return t;
}

int KTree::node_count() const {
  int n = 1;
  for (const auto& c : children_) n += c.node_count();
  return n;
}

int KTree::terminal_count() const {
  if (is_terminal()) return 1;
  int n = 0;
  for (const auto& c : children_) n += c.terminal_count();
  return n;
}

std::string KTree::to_string() const {
  if (is_terminal()) return ".";
  std::string s = "(";
  for (const auto& c : children_) s += c.to_string();
  return s + ")";
}

bool KTree::operator==(const KTree& other) const {
  return arity_ == other.arity_ && generation_ == other.generation_ &&
         children_ == other.children_;
}

std::vector<std::vector<int>> compositions(int total, int parts) {
  std::vector<std::vector<int>> out;
  if (parts <= 0 || total < 0) return out;
  std::vector<int> cur(parts, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == parts - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

TreeCountTable count_trees(int k, int max_generation) {
  if (k < 2) throw DomainError(fmt::format("tree arity must be >= 2, got {}", k));
  if (max_generation < 0) throw DomainError("max generation must be >= 0");
  TreeCountTable table{k, {}};
  auto& c = table.counts;
  c.push_back(1);
  for (int j = 1; j <= max_generation; ++j) {
    // Sum over compositions of j-1 into k parts, via repeated polynomial
    // multiplication truncated at degree j-1.
    std::vector<BigInt> poly(c.begin(), c.end());
    for (int m = 1; m < k; ++m) {
      std::vector<BigInt> next(j, 0);
      for (int a = 0; a < j; ++a) {
        if (poly[a] == 0) continue;
        for (int b = 0; a + b < j; ++b) next[a + b] += poly[a] * c[b];
      }
      poly = std::move(next);
    }
    c.push_back(poly[j - 1]);
  }
  return table;
}

BigInt fuss_catalan(int k, int j) {
  // binom(kj, j) computed exactly, then divided by (k-1)j+1.
  BigInt binom = 1;
  for (int i = 1; i <= j; ++i) {
    binom *= (k * j - j + i);
    binom /= i;
  }
  return binom / ((k - 1) * j + 1);
}

namespace {

std::vector<KTree> enumerate_rec(int k, int j, std::vector<std::vector<KTree>>& memo) {
  if (!memo[j].empty()) return memo[j];
  std::vector<KTree> out;
  if (j == 0) {
    out.push_back(KTree::terminal(k));
  } else {
    for (const auto& comp : compositions(j - 1, k)) {
      std::vector<std::vector<KTree>> options;
      options.reserve(k);
      for (int part : comp) options.push_back(enumerate_rec(k, part, memo));
      std::vector<std::size_t> idx(k, 0);
      while (true) {
        std::vector<KTree> children;
        children.reserve(k);
        for (int i = 0; i < k; ++i) children.push_back(options[i][idx[i]]);
        out.push_back(KTree::node(std::move(children)));
        int pos = k - 1;
        while (pos >= 0 && ++idx[pos] == options[pos].size()) idx[pos--] = 0;
        if (pos < 0) break;
      }
    }
  }
  memo[j] = out;
  return out;
}

}  // namespace

std::vector<KTree> enumerate_trees(int k, int j) {
  if (j < 0) throw DomainError("generation must be >= 0");
  const auto table = count_trees(k, j);
  if (table.counts[j] > BigInt(kEnumerationLimit))
    throw CapacityError(fmt::format("{} trees of arity {} and generation {} exceed the limit of {}",
                                    table.counts[j].str(), k, j, kEnumerationLimit));
  std::vector<std::vector<KTree>> memo(j + 1);
  return enumerate_rec(k, j, memo);
}

CountBound verify_count_bound(int k, int max_generation) {
  const auto table = count_trees(k, max_generation);
  CountBound out;
  out.per_j_root.assign(max_generation + 1, 0.0);
  for (int j = 1; j <= max_generation; ++j) {
    const double lhs = table.counts[j].convert_to<double>() * (1.0 + j) * (1.0 + j);
    out.per_j_root[j] = std::pow(lhs, 1.0 / j);
    out.c0 = std::max(out.c0, out.per_j_root[j]);
  }
  out.holds.assign(max_generation + 1, true);
  for (int j = 1; j <= max_generation; ++j) {
    const double lhs = table.counts[j].convert_to<double>() * (1.0 + j) * (1.0 + j);
    // relative slack for the floating-point j-th root
    out.holds[j] = lhs <= std::pow(out.c0, j) * (1.0 + 1e-12);
  }
  return out;
}

}  // namespace gibq
