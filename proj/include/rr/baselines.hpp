#pragma once

#include <gmpxx.h>

#include <cstddef>

#include "rr/bit_source.hpp"
#include "rr/distribution.hpp"

namespace rr {

// Knuth-Yao sampling for a single draw, walking the DDG tree level by level
// from the binary expansions of the weights.
size_t ky_ddg(BitSource& src, const DiscreteDistribution& dist);

// State of the online entropy-optimal refinement: depth D, numerator C and
// denominator B of the path so far.
struct KyDgState {
  mpz_class depth = 0;
  mpz_class numer = 1;
  mpz_class denom = 1;
};

size_t ky_dg(KyDgState& state, BitSource& src, const DiscreteDistribution& dist);

// Interval [L/B, R/B) of the unread part of the coin stream, renormalized
// after every draw.
struct IntervalState {
  mpz_class left = 0;
  mpz_class right = 1;
  mpz_class denom = 1;
};

size_t hh_interval(IntervalState& state, BitSource& src,
                   const DiscreteDistribution& dist);

}  // namespace rr
