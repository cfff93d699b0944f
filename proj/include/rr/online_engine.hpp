#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rr/bit_source.hpp"
#include "rr/distribution.hpp"
#include "rr/general_samplers.hpp"
#include "rr/uniform_samplers.hpp"
#include "rr/uniform_state.hpp"

namespace rr {

// Yields the next target distribution from the outputs emitted so far. It
// never sees the sampler state or the coins.
class DistributionOracle {
 public:
  using Fn = std::function<DiscreteDistribution(const std::vector<size_t>& history)>;

  DistributionOracle(Fn next, uint64_t denom_bound);

  static DistributionOracle constant(const DiscreteDistribution& dist);
  // Round 1 draws from `initial`; afterwards the draw uses
  // after_output[previous output].
  static DistributionOracle markov(const DiscreteDistribution& initial,
                                   std::vector<DiscreteDistribution> after_output);
  static DistributionOracle cycle(std::vector<DiscreteDistribution> dists);
  // Markov oracle from a file: the first line is the initial distribution,
  // line i+2 the distribution after output i.
  static DistributionOracle markov_file(const std::string& path);
  // "const:<dist>", "markov:<file>" or "cycle:<dist>;<dist>;...".
  static DistributionOracle parse(const std::string& spec);

  // Throws DenominatorExceeded if the distribution breaks the declared bound.
  DiscreteDistribution next(const std::vector<size_t>& history) const;
  uint64_t denom_bound() const { return denom_bound_; }

 private:
  Fn next_;
  uint64_t denom_bound_;
};

enum class RecyclingSampler { inversion, lookup, alias, ddg };

RecyclingSampler parse_recycling_sampler(const std::string& name);
const char* to_string(RecyclingSampler s);

// Draws one round with any recycling sampler, building and caching the
// tables it needs.
class RoundSampler {
 public:
  explicit RoundSampler(RecyclingSampler kind = RecyclingSampler::inversion,
                        UniformMethod method = UniformMethod::division)
      : kind_(kind), method_(method) {}

  size_t operator()(UniformState& st, const DiscreteDistribution& dist);

  RecyclingSampler kind() const { return kind_; }
  UniformMethod method() const { return method_; }

 private:
  RecyclingSampler kind_;
  UniformMethod method_;
  std::map<std::vector<uint64_t>, LookupTable> lookup_;
  std::map<std::vector<uint64_t>, AliasTable> alias_;
  std::map<std::vector<uint64_t>, DdgTree> ddg_;
};

struct SequenceResult {
  std::vector<size_t> outputs;
  EntropyReport report;
};

// Round i asks the oracle for P_i and draws X_i ~ P_i with the recycling
// sampler, sharing one uniform state across rounds.
SequenceResult random_sequence(UniformState& st, const DistributionOracle& oracle,
                               size_t rounds, RoundSampler sampler = RoundSampler());

double shannon_entropy(const DiscreteDistribution& dist);
double surprisal(const DiscreteDistribution& dist, size_t x);
double binary_entropy(double delta);

// Upper bound on the expected entropy loss of one recycled Uniform(n) call
// at word size W: M/(M-n+1) * H_b((n-1)/M) with M = 2^(W-1).
double entropy_loss_bound(uint64_t n, unsigned word_size);

// Smallest W of the form 1 + ceil(log2((d-1)/delta)) where delta solves
// H_b(delta)/(1-delta) = eps. delta is clamped to 1/2 when eps >= 2.
unsigned required_word_size(uint64_t d, double eps);

}  // namespace rr
