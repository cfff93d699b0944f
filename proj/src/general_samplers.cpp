#include "rr/general_samplers.hpp"

#include <cassert>

#include "rr/errors.hpp"

namespace rr {

using u128 = unsigned __int128;

size_t inversion(UniformState& st, const DiscreteDistribution& dist,
                 UniformMethod method, size_t linear_max) {
  uint64_t u = uniform_with(method, st, dist.total());
  size_t x = dist.find(u, linear_max);
  recycle_with(method, st, u - dist.prefix_before(x), dist.weight(x));
  return x;
}

LookupTable lookup_build(const DiscreteDistribution& dist, uint64_t max_entries) {
  if (dist.total() > max_entries) {
    throw TableTooLarge("lookup table would exceed the entry cap");
  }
  LookupTable t{dist, {}};
  t.table.reserve(dist.total());
  for (size_t i = 0; i < dist.size(); ++i) t.table.insert(t.table.end(), dist.weight(i), uint32_t(i));
  return t;
}

size_t lookup_sample(UniformState& st, const LookupTable& t, UniformMethod method) {
  uint64_t u = uniform_with(method, st, t.dist.total());
  size_t x = t.table[u];
  recycle_with(method, st, u - t.dist.prefix_before(x), t.dist.weight(x));
  return x;
}

AliasTable alias_build(const DiscreteDistribution& dist) {
  const size_t n = dist.size();
  const uint64_t a_total = dist.total();
  if (u128(a_total) * n > ~uint64_t{0}) throw InvalidRange("alias table: n*A overflows 64 bits");

  AliasTable t{dist, std::vector<uint32_t>(n), std::vector<uint64_t>(n),
               std::vector<uint64_t>(n, 0)};
  // Column capacity is A; label j needs n*a_j cells in total.
  std::vector<uint64_t> need(n);
  std::vector<size_t> small, large;
  for (size_t j = 0; j < n; ++j) {
    need[j] = n * dist.weight(j);
    t.alias[j] = uint32_t(j);
    (need[j] < a_total ? small : large).push_back(j);
  }
  while (!small.empty() && !large.empty()) {
    size_t s = small.back();
    small.pop_back();
    size_t l = large.back();
    large.pop_back();
    t.no_alias[s] = need[s];
    t.alias[s] = uint32_t(l);
    need[l] -= a_total - need[s];
    (need[l] < a_total ? small : large).push_back(l);
  }
  for (size_t l : large) {
    assert(need[l] == a_total);
    t.no_alias[l] = a_total;
  }
  for (size_t s : small) {
    assert(need[s] == a_total);
    t.no_alias[s] = a_total;
  }

  std::vector<uint64_t> cnt(t.no_alias);
  for (size_t q = 0; q < n; ++q) {
    if (!t.has_alias(q)) continue;
    size_t z = t.alias[q];
    t.offset[q] = cnt[z] - t.no_alias[q];
    cnt[z] += a_total - t.no_alias[q];
  }
  return t;
}

size_t alias_sample(UniformState& st, const AliasTable& t, UniformMethod method) {
  const uint64_t a_total = t.dist.total();
  const uint64_t n = t.dist.size();
  uint64_t u = uniform_with(method, st, a_total * n);
  uint64_t q = u / a_total, r = u % a_total;
  if (r < t.no_alias[q]) {
    recycle_with(method, st, r, n * t.dist.weight(q));
    return q;
  }
  size_t z = t.alias[q];
  recycle_with(method, st, r + t.offset[q], n * t.dist.weight(z));
  return z;
}

DdgTree ddg_build(const DiscreteDistribution& dist, unsigned depth) {
  const uint64_t a_total = dist.total();
  unsigned k = depth;
  if (k == 0) k = a_total <= 1 ? 0 : bit_length(a_total - 1);
  if (k > 63 || (uint64_t{1} << k) < a_total) {
    throw InvalidDepth("ddg_build: 2^k must be at least A and k at most 63");
  }
  DdgTree tree;
  tree.dist = dist;
  tree.depth = k;
  tree.leaf_count.assign(k + 1, 0);
  tree.internal_count.assign(k + 1, 0);
  tree.reject_leaf.assign(k + 1, 0);
  tree.labels.assign(k + 1, {});
  const uint64_t reject = (uint64_t{1} << k) - a_total;
  uint64_t nodes = 1;
  for (unsigned d = 0; d <= k; ++d) {
    const unsigned bit = k - d;
    for (size_t i = 0; i < dist.size(); ++i) {
      if ((dist.weight(i) >> bit) & 1) tree.labels[d].push_back(uint32_t(i));
    }
    tree.leaf_count[d] = tree.labels[d].size();
    tree.reject_leaf[d] = uint8_t((reject >> bit) & 1);
    const uint64_t leaves = tree.leaf_count[d] + tree.reject_leaf[d];
    if (leaves > nodes) throw CorruptTree("ddg_build: more leaves than nodes");
    tree.internal_count[d] = nodes - leaves;
    nodes = 2 * tree.internal_count[d];
  }
  if (nodes != 0) throw CorruptTree("ddg_build: tree does not terminate at depth k");
  return tree;
}

size_t ddg_sample(UniformState& st, const DdgTree& tree, UniformMethod method) {
  const unsigned k = tree.depth;
  uint64_t u = uniform_with(method, st, tree.dist.total());
  uint64_t v = 0;
  for (unsigned d = 0; d <= k; ++d) {
    if (v < tree.leaf_count[d]) {
      size_t x = tree.labels[d][v];
      uint64_t a = tree.dist.weight(x);
      // Leaves of label x at shallower levels cover a - (a mod 2^(k+1-d)).
      uint64_t above = k + 1 - d >= 64 ? 0 : a - (a & ((uint64_t{1} << (k + 1 - d)) - 1));
      uint64_t within = u & ((uint64_t{1} << (k - d)) - 1);
      recycle_with(method, st, above + within, a);
      return x;
    }
    if (d == k) break;
    v = 2 * (v - tree.leaf_count[d]) + ((u >> (k - 1 - d)) & 1);
  }
  throw CorruptTree("ddg_sample: walk left the level table");
}

size_t ddg_sample_fresh(BitSource& src, const DdgTree& tree) {
  const unsigned k = tree.depth;
  for (;;) {
    uint64_t v = 0;
    for (unsigned d = 0;; ++d) {
      if (v < tree.leaf_count[d]) return tree.labels[d][v];
      if (v >= tree.leaf_count[d] + tree.internal_count[d]) break;  // reject leaf
      if (d == k) throw CorruptTree("ddg_sample_fresh: walk left the level table");
      v = 2 * (v - tree.leaf_count[d]) + src.flip(1);
    }
  }
}

}  // namespace rr
