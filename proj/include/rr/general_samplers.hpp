#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rr/bit_source.hpp"
#include "rr/distribution.hpp"
#include "rr/uniform_samplers.hpp"
#include "rr/uniform_state.hpp"

namespace rr {

// Inversion: U = Uniform(A), X = min{i : U < A_i}, then recycle
// (U - A_{X-1}, a_X).
size_t inversion(UniformState& st, const DiscreteDistribution& dist,
                 UniformMethod method = UniformMethod::division,
                 size_t linear_max = 16);

inline constexpr uint64_t kDefaultLookupCap = uint64_t{1} << 24;

// T holds label i exactly a_i times, in prefix-sum order.
struct LookupTable {
  DiscreteDistribution dist;
  std::vector<uint32_t> table;
};

LookupTable lookup_build(const DiscreteDistribution& dist,
                         uint64_t max_entries = kDefaultLookupCap);
size_t lookup_sample(UniformState& st, const LookupTable& t,
                     UniformMethod method = UniformMethod::division);

// Column q keeps its own label on [0, w_q) and sends [w_q, A) to alias z_q.
// Offsets c_q place the alias cells of column q inside [0, n*a_{z_q}).
struct AliasTable {
  DiscreteDistribution dist;
  std::vector<uint32_t> alias;
  std::vector<uint64_t> no_alias;
  std::vector<uint64_t> offset;

  bool has_alias(size_t q) const { return no_alias[q] < dist.total(); }
};

AliasTable alias_build(const DiscreteDistribution& dist);
size_t alias_sample(UniformState& st, const AliasTable& t,
                    UniformMethod method = UniformMethod::division);

// Left-packed DDG tree for (a_0..a_{n-1}, 2^k - A) / 2^k. Each level lists
// its non-reject leaves first, then internal nodes, then the reject leaf if
// any. Only non-reject labels are stored.
struct DdgTree {
  DiscreteDistribution dist;
  unsigned depth = 0;
  std::vector<uint64_t> leaf_count;      // non-reject leaves per level
  std::vector<uint64_t> internal_count;  // internal nodes per level
  std::vector<uint8_t> reject_leaf;      // 1 if the level has a reject leaf
  std::vector<std::vector<uint32_t>> labels;

  uint64_t reject_weight() const {
    return (uint64_t{1} << depth) - dist.total();
  }
};

// depth = 0 picks ceil(log2 A).
DdgTree ddg_build(const DiscreteDistribution& dist, unsigned depth = 0);
size_t ddg_sample(UniformState& st, const DdgTree& tree,
                  UniformMethod method = UniformMethod::division);
// Walks the tree with fresh coins and restarts on a reject leaf. No
// recycling.
size_t ddg_sample_fresh(BitSource& src, const DdgTree& tree);

}  // namespace rr
