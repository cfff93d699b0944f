#include "rr/uniform_samplers.hpp"

#include <cassert>

#include "rr/errors.hpp"

namespace rr {

using u128 = unsigned __int128;

namespace {

inline bool is_pow2(uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline uint64_t hi(u128 x, unsigned w) { return uint64_t(x >> w); }

inline uint64_t lo(u128 x, uint64_t mask) { return uint64_t(x) & mask; }

void check_division_range(const UniformState& st, uint64_t n) {
  if (n == 0 || n > (uint64_t{1} << (st.word_size() - 1))) {
    throw InvalidRange("uniform: n must lie in [1, 2^(W-1)]");
  }
}

template <bool kFastPow2>
uint64_t uniform_division(UniformState& st, uint64_t n) {
  check_division_range(st, n);
  if (n == 1) return 0;
  const bool pow2 = kFastPow2 && is_pow2(n);
  const unsigned shift = pow2 ? unsigned(__builtin_ctzll(n)) : 0;
  for (;;) {
    st.refill();
    uint64_t z = st.value(), m = st.bound();
    uint64_t qz, rz, qm, rm;
    if (pow2) {
      qz = z >> shift;
      rz = z & (n - 1);
      qm = m >> shift;
      rm = m & (n - 1);
    } else {
      qz = z / n;
      rz = z % n;
      qm = m / n;
      rm = m % n;
    }
    if (qz < qm) {
      st.set(qz, qm);
      return rz;
    }
    st.note_rejection();
    st.set(rz, rm);
  }
}

}  // namespace

WordDivMod divmod_word_range(unsigned word_size, uint64_t n) {
  assert(n >= 2);
  const uint64_t max = word_size == 64 ? ~uint64_t{0} : (uint64_t{1} << word_size) - 1;
  uint64_t q = max / n;
  uint64_t r = max % n + 1;
  if (r == n) {
    ++q;
    r = 0;
  }
  return {q, r};
}

uint64_t uniform(UniformState& st, uint64_t n) {
  return uniform_division<true>(st, n);
}

namespace detail {
uint64_t uniform_division_general(UniformState& st, uint64_t n) {
  return uniform_division<false>(st, n);
}
}  // namespace detail

uint64_t uniform_widening(UniformState& st, uint64_t n) {
  const unsigned w = st.word_size();
  if (n == 0 || (w < 64 && n > (uint64_t{1} << w))) {
    throw InvalidRange("uniform_widening: n must lie in [1, 2^W]");
  }
  if (n == 1) return 0;
  const auto [qb, rb] = divmod_word_range(w, n);
  for (;;) {
    uint64_t x = st.source().flip(w);
    uint64_t qx = x / n, rx = x % n;
    if (qx < qb) {
      st.recycle_widening(qx, qb);
      return rx;
    }
    st.note_rejection();
    st.recycle_widening(rx, rb);
  }
}

uint64_t uniform_lemire_recycled(UniformState& st, uint64_t n) {
  const unsigned w = st.word_size();
  const uint64_t mask = st.max_word();
  if (n == 0 || n > mask) {
    throw InvalidRange("uniform_lemire_recycled: n must lie in [1, 2^W)");
  }
  if (n == 1) return 0;
  const auto [q, t] = divmod_word_range(w, n);
  for (;;) {
    uint64_t x = st.source().flip(w);
    u128 xn = u128(x) * n;
    uint64_t u = hi(xn, w), r = lo(xn, mask);
    u128 qr = u128(q) * r;
    if (lo(qr, mask) >= t) {
      st.recycle_widening(hi(qr, w), q);
      return u;
    }
    st.note_rejection();
    // n*q = 2^W - t fits in a word because t > 0 here.
    uint64_t u2 = hi(u128(x) * (n * q), w);
    st.recycle_widening(x - u2, t);
  }
}

std::vector<uint64_t> uniform_batch_recycled(UniformState& st,
                                             std::span<const uint64_t> ranges) {
  const unsigned w = st.word_size();
  const uint64_t mask = st.max_word();
  u128 prod = 1;
  for (uint64_t ni : ranges) {
    if (ni == 0) throw InvalidRange("uniform_batch_recycled: ranges must be positive");
    prod *= ni;
    if (prod > mask) throw BatchOverflow("uniform_batch_recycled: product of ranges must be below 2^W");
  }
  std::vector<uint64_t> out(ranges.size(), 0);
  const uint64_t n = uint64_t(prod);
  if (n == 1) return out;
  const auto [n_last, t] = divmod_word_range(w, n);
  const u128 big_n = u128(n) * n_last;
  // Recycling the reject branch needs N in (2^(W-1), 2^W].
  if (!(big_n > (u128(1) << (w - 1)) && big_n <= (u128(1) << w))) {
    throw BatchOverflow("uniform_batch_recycled: reject recycling precondition violated");
  }
  for (;;) {
    uint64_t x = st.source().flip(w);
    uint64_t r = x;
    for (size_t i = 0; i < ranges.size(); ++i) {
      u128 p = u128(r) * ranges[i];
      out[i] = hi(p, w);
      r = lo(p, mask);
    }
    u128 p = u128(r) * n_last;
    uint64_t u_last = hi(p, w);
    r = lo(p, mask);
    if (r >= t) {
      st.recycle_widening(u_last, n_last);
      return out;
    }
    st.note_rejection();
    uint64_t u = hi(u128(x) * uint64_t(big_n), w);
    st.recycle_widening(x - u, t);
  }
}

uint64_t fdr(BitSource& src, uint64_t n) {
  if (n == 0) throw InvalidRange("fdr: n must be positive");
  if (n == 1) return 0;
  u128 v = 1, c = 0;
  for (;;) {
    v <<= 1;
    c = (c << 1) | src.flip(1);
    if (v >= n) {
      if (c < n) return uint64_t(c);
      v -= n;
      c -= n;
    }
  }
}

uint64_t lemire_plain(BitSource& src, uint64_t n, unsigned word_size) {
  const unsigned w = word_size;
  if (w < 2 || w > 64) throw InvalidRange("lemire_plain: word size must lie in [2, 64]");
  const uint64_t mask = w == 64 ? ~uint64_t{0} : (uint64_t{1} << w) - 1;
  if (n == 0 || (w < 64 && n > (uint64_t{1} << w))) {
    throw InvalidRange("lemire_plain: n must lie in [1, 2^W]");
  }
  // Threshold 2^W mod n; n = 1 and n = 2^W give 0.
  const uint64_t t = n == 1 ? 0 : divmod_word_range(w, n).r;
  for (;;) {
    uint64_t x = src.flip(w);
    u128 p = u128(x) * n;
    if (lo(p, mask) >= t) return hi(p, w);
  }
}

UniformMethod parse_uniform_method(const std::string& name) {
  if (name == "div" || name == "division") return UniformMethod::division;
  if (name == "widening") return UniformMethod::widening;
  if (name == "lemire-rec") return UniformMethod::lemire_recycled;
  if (name == "batch-rec") return UniformMethod::batch_recycled;
  throw std::invalid_argument("unknown uniform method: " + name);
}

const char* to_string(UniformMethod m) {
  switch (m) {
    case UniformMethod::division: return "div";
    case UniformMethod::widening: return "widening";
    case UniformMethod::lemire_recycled: return "lemire-rec";
    case UniformMethod::batch_recycled: return "batch-rec";
  }
  return "?";
}

uint64_t uniform_with(UniformMethod method, UniformState& st, uint64_t n) {
  switch (method) {
    case UniformMethod::division:
      return uniform(st, n);
    case UniformMethod::widening:
      return uniform_widening(st, n);
    case UniformMethod::lemire_recycled:
      return uniform_lemire_recycled(st, n);
    case UniformMethod::batch_recycled: {
      const uint64_t r[1] = {n};
      return uniform_batch_recycled(st, r)[0];
    }
  }
  throw std::logic_error("unreachable");
}

void recycle_with(UniformMethod method, UniformState& st, uint64_t z, uint64_t m) {
  if (method == UniformMethod::division) {
    st.recycle(z, m);
  } else {
    st.recycle_widening(z, m);
  }
}

uint64_t max_range(UniformMethod method, unsigned word_size) {
  const uint64_t mask = word_size == 64 ? ~uint64_t{0} : (uint64_t{1} << word_size) - 1;
  switch (method) {
    case UniformMethod::division:
      return uint64_t{1} << (word_size - 1);
    case UniformMethod::widening:
    case UniformMethod::lemire_recycled:
    case UniformMethod::batch_recycled:
      return mask;
  }
  return 0;
}

}  // namespace rr
