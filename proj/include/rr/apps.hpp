#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rr/bit_source.hpp"
#include "rr/uniform_samplers.hpp"
#include "rr/uniform_state.hpp"

namespace rr {

// Uniform sampler used by the shuffle. The last two ignore the uniform state
// and read the source directly.
enum class ShuffleStrategy { division, widening, lemire_recycled, batch_recycled, fdr, lemire };

ShuffleStrategy parse_shuffle_strategy(const std::string& name);
const char* to_string(ShuffleStrategy s);

// Durstenfeld shuffle of [0, k): for i = k-1 down to 1 swap i with
// Uniform(i+1). The batched strategy draws two consecutive indices per word
// when their product fits.
std::vector<size_t> shuffle(UniformState& st, size_t k, ShuffleStrategy strategy);

// Coin-level primitives of the discrete Gaussian sampler.
class GaussianPrimitives {
 public:
  virtual ~GaussianPrimitives() = default;
  virtual uint64_t uniform(uint64_t n) = 0;
  // Bernoulli(num/den), 0 <= num <= den.
  virtual bool bernoulli(uint64_t num, uint64_t den) = 0;
  virtual uint64_t max_denominator() const = 0;
};

// Uniform by the division recycler and Bernoulli by inversion over the
// weights (den - num, num), both sharing one uniform state.
class RecycledPrimitives : public GaussianPrimitives {
 public:
  explicit RecycledPrimitives(UniformState& st) : st_(&st) {}
  uint64_t uniform(uint64_t n) override;
  bool bernoulli(uint64_t num, uint64_t den) override;
  uint64_t max_denominator() const override;

 private:
  UniformState* st_;
};

// Fast Dice Roller for both, no state kept between calls.
class FreshPrimitives : public GaussianPrimitives {
 public:
  explicit FreshPrimitives(BitSource& src) : src_(&src) {}
  uint64_t uniform(uint64_t n) override;
  bool bernoulli(uint64_t num, uint64_t den) override;
  uint64_t max_denominator() const override { return ~uint64_t{0}; }

 private:
  BitSource* src_;
};

// Largest numerator or denominator accepted for sigma^2.
inline constexpr uint64_t kGaussianParamCap = uint64_t{1} << 20;

// Exact sample from the discrete Gaussian on Z with variance parameter
// sigma^2 = num/den, by rejection from a discrete Laplace.
int64_t discrete_gaussian(GaussianPrimitives& prim, uint64_t sigma2_num, uint64_t sigma2_den);
int64_t discrete_gaussian(UniformState& st, uint64_t sigma2_num, uint64_t sigma2_den);

// Bernoulli(exp(-num/den)).
bool bernoulli_exp(GaussianPrimitives& prim, uint64_t num, uint64_t den);
// Discrete Laplace with scale t: P(y) proportional to exp(-|y|/t).
int64_t discrete_laplace(GaussianPrimitives& prim, uint64_t t);

}  // namespace rr
