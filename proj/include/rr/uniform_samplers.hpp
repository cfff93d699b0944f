#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rr/bit_source.hpp"
#include "rr/uniform_state.hpp"

namespace rr {

// Quotient and remainder of 2^W by n, computed in one word. Requires
// 2 <= n <= 2^W (n = 1 would need a quotient of 2^W).
struct WordDivMod {
  uint64_t q;
  uint64_t r;
};
WordDivMod divmod_word_range(unsigned word_size, uint64_t n);

// Division recycler. n in [1, 2^(W-1)].
uint64_t uniform(UniformState& st, uint64_t n);

// Widening-multiplication recycler drawing whole words. n in [1, 2^W].
uint64_t uniform_widening(UniformState& st, uint64_t n);

// Lemire's multiply-shift method with both branches recycled. n in [1, 2^W).
uint64_t uniform_lemire_recycled(UniformState& st, uint64_t n);

// Several uniforms peeled off one word. The product of ranges must be
// below 2^W.
std::vector<uint64_t> uniform_batch_recycled(UniformState& st,
                                             std::span<const uint64_t> ranges);

// Fast Dice Roller. No recycled state.
uint64_t fdr(BitSource& src, uint64_t n);

// Lemire's method without recycling: one fresh W-bit word per attempt.
// n in [1, 2^W].
uint64_t lemire_plain(BitSource& src, uint64_t n, unsigned word_size);

// Which recycling uniform sampler a higher-level sampler should call.
enum class UniformMethod { division, widening, lemire_recycled, batch_recycled };

UniformMethod parse_uniform_method(const std::string& name);
const char* to_string(UniformMethod m);

uint64_t uniform_with(UniformMethod method, UniformState& st, uint64_t n);

// Recycle using the primitive matched to `method`: the widening samplers
// leave M anywhere below 2^W, so they need the widening merge.
void recycle_with(UniformMethod method, UniformState& st, uint64_t z, uint64_t m);

// Largest n accepted by uniform_with for this method.
uint64_t max_range(UniformMethod method, unsigned word_size);

namespace detail {
// The division recycler without the power-of-two shortcut.
uint64_t uniform_division_general(UniformState& st, uint64_t n);
}  // namespace detail

}  // namespace rr
