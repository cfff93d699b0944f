#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rr/bit_source.hpp"
#include "rr/distribution.hpp"
#include "rr/general_samplers.hpp"
#include "rr/uniform_state.hpp"

namespace rr {

using Outcome = std::vector<int64_t>;

inline constexpr unsigned kDefaultDepthCap = 48;

// Exact output law of a tape-driven program. `flip_mass` is the sum over
// halting prefixes of (probability * prefix length); it equals the expected
// number of flips when residual is 0.
struct ExactLaw {
  std::map<Outcome, mpq_class> masses;
  mpq_class residual = 0;
  mpq_class flip_mass = 0;
  // Tape prefixes visited; a search shared between histories counts once.
  uint64_t leaves = 0;

  mpq_class mass(const Outcome& o) const;
  // Masses plus residual; exactly 1 for a sound enumeration.
  mpq_class total() const;
};

// Deterministic function of the tape. Must draw all randomness from `src`.
using TapeProgram = std::function<Outcome(BitSource& src)>;

// Prefix DFS over the tape: a program that halts after reading l bits
// contributes 2^-l; a branch that would read past depth_cap goes to the
// residual.
ExactLaw enumerate_law(const TapeProgram& program,
                       unsigned depth_cap = kDefaultDepthCap);

// One round of a multi-round recycling program. Gets the outputs of the
// earlier rounds and returns this round's output.
using RoundProgram = std::function<int64_t(UniformState& st, const Outcome& history)>;

using StateKey = std::pair<Outcome, StateSnapshot>;

struct RoundLaw {
  ExactLaw law;
  // Mass of each (outputs, final state) pair over halting runs.
  std::map<StateKey, mpq_class> finals;
};

// What a round program reads from its history. With `length_only` one
// tape search per (round, start state) is shared by every history.
enum class HistoryUse { full, length_only };

// Enumerates `rounds` rounds starting from `start`. Runs that reach the same
// outputs and state are merged between rounds, and the depth cap applies to
// each round separately.
RoundLaw enumerate_rounds(const RoundProgram& program, unsigned word_size,
                          size_t rounds, unsigned depth_cap = kDefaultDepthCap,
                          const StateSnapshot& start = {}, HistoryUse use = HistoryUse::full);

// Z given (outputs, M) packed with the pending pushback words into one
// uniform value.
struct StatePosterior {
  struct Key {
    Outcome outcome;
    uint64_t m;
    std::vector<unsigned> widths;  // pushback widths, first served first
    friend auto operator<=>(const Key&, const Key&) = default;
  };
  std::map<Key, std::map<mpz_class, mpq_class>> table;
};

StatePosterior posterior_of(const RoundLaw& r);

class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(StatePosterior::Key key, std::map<mpz_class, mpq_class> histogram);
  const StatePosterior::Key& key() const { return key_; }
  const std::map<mpz_class, mpq_class>& histogram() const { return histogram_; }

 private:
  StatePosterior::Key key_;
  std::map<mpz_class, mpq_class> histogram_;
};

struct InvariantReport {
  size_t keys = 0;
  mpq_class residual = 0;
  // Largest max-min spread of mass over Z within one key.
  mpq_class max_spread = 0;
  uint64_t leaves = 0;
};

// Checks that Z is uniform given (outputs, M) for every reachable key, up
// to the residual. Throws InvariantViolation otherwise.
InvariantReport check_invariant_I(const RoundProgram& program, unsigned word_size,
                                  size_t rounds, unsigned depth_cap = kDefaultDepthCap,
                                  HistoryUse use = HistoryUse::full);

// Same check on an already enumerated law.
InvariantReport check_invariant_I(const RoundLaw& r);

using StateSampler = std::function<size_t(UniformState&, const DiscreteDistribution&)>;

// Round i draws from dists[min(i, size-1)].
InvariantReport check_invariant_I(const StateSampler& sampler,
                                  const std::vector<DiscreteDistribution>& dists,
                                  size_t rounds, unsigned word_size,
                                  unsigned depth_cap = kDefaultDepthCap);

// Output law and expected flips of a fresh-coin walk of the tree, with the
// reject leaves sending the walk back to the root.
ExactLaw ddg_law(const DdgTree& tree);
mpq_class ddg_expected_tosses(const DdgTree& tree);

// Expected flips of a single Knuth-Yao draw: sum over i and j of
// j * bit_j(a_i / A) * 2^-j, in closed form.
mpq_class ky_expected_flips(const DiscreteDistribution& dist);
// The same sum restricted to j <= depth.
mpq_class ky_expected_flips_truncated(const DiscreteDistribution& dist, unsigned depth);

struct ChiSquareResult {
  double statistic = 0;
  size_t dof = 0;
  double p_value = 1;
  size_t bins = 0;
};

// Pearson test of counts against probabilities. Adjacent bins are merged
// until every expected count is at least 5.
ChiSquareResult chi_square_gof(const std::vector<uint64_t>& counts,
                               const std::vector<double>& probs);
ChiSquareResult chi_square_gof(const std::vector<uint64_t>& counts,
                               const DiscreteDistribution& dist);

std::string to_string(const Outcome& o);

}  // namespace rr
