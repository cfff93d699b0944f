#include "rr/baselines.hpp"

#include <vector>

namespace rr {

using u128 = unsigned __int128;

namespace {
mpz_class big(uint64_t v) { return mpz_class(static_cast<unsigned long>(v)); }
}  // namespace

size_t ky_ddg(BitSource& src, const DiscreteDistribution& dist) {
  const size_t k = dist.size();
  const u128 a_total = dist.total();
  std::vector<u128> b(dist.weights().begin(), dist.weights().end());
  uint64_t z = 0;
  for (;;) {
    for (size_t i = 0; i < k; ++i) {
      if (b[i] >= a_total) {
        if (z == 0) return i;
        --z;
        b[i] -= a_total;
      }
      b[i] <<= 1;
    }
    z = 2 * z + src.flip(1);
  }
}

size_t ky_dg(KyDgState& s, BitSource& src, const DiscreteDistribution& dist) {
  const size_t k = dist.size();
  s.denom *= big(dist.total());
  const mpz_class two_b = 2 * s.denom;
  mpz_class pow2;
  mpz_powm(pow2.get_mpz_t(), mpz_class(2).get_mpz_t(), s.depth.get_mpz_t(),
           two_b.get_mpz_t());
  const mpz_class scale = pow2 * s.numer;
  std::vector<mpz_class> b(k);
  mpz_class sum = 0;
  for (size_t i = 0; i < k; ++i) {
    b[i] = scale * big(dist.weight(i));
    b[i] %= two_b;
    sum += b[i];
  }
  mpz_class z = sum / s.denom - 1;
  for (;;) {
    for (size_t i = 0; i < k; ++i) {
      if (b[i] >= s.denom) {
        if (z == 0) {
          s.numer *= big(dist.weight(i));
          return i;
        }
        --z;
        b[i] -= s.denom;
      }
      b[i] *= 2;
    }
    z = 2 * z + static_cast<unsigned long>(src.flip(1));
    ++s.depth;
  }
}

size_t hh_interval(IntervalState& s, BitSource& src, const DiscreteDistribution& dist) {
  const size_t k = dist.size();
  const mpz_class a_total = big(dist.total());
  auto prefix = [&](size_t i) { return big(dist.prefix_before(i)); };
  size_t i = 0, j = k;
  while (j - i > 1) {
    size_t m = (i + j) / 2;
    mpz_class am_b = prefix(m) * s.denom;
    if (am_b <= s.left * a_total) {
      i = m;
    } else if (am_b >= s.right * a_total) {
      j = m;
    } else {
      mpz_class width = s.right - s.left;
      s.left *= 2;
      s.right *= 2;
      s.denom *= 2;
      if (src.flip(1)) {
        s.left += width;
      } else {
        s.right -= width;
      }
    }
  }
  const mpz_class ai_b = prefix(i) * s.denom;
  s.left = s.left * a_total - ai_b;
  s.right = s.right * a_total - ai_b;
  s.denom *= big(dist.weight(i));
  return i;
}

}  // namespace rr
