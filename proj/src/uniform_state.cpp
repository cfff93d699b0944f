#include "rr/uniform_state.hpp"

#include <cassert>

#include "rr/errors.hpp"

namespace rr {

using u128 = unsigned __int128;

UniformState::UniformState(BitSource& src, unsigned word_size)
    : UniformState(src, word_size, 0, 1) {}

UniformState::UniformState(BitSource& src, unsigned word_size, uint64_t z,
                           uint64_t m)
    : src_(&src), w_(word_size) {
  if (word_size < 2 || word_size > 64) {
    throw InvalidRange("word size must lie in [2, 64]");
  }
  mask_ = word_size == 64 ? ~uint64_t{0} : (uint64_t{1} << word_size) - 1;
  set(z, m);
}

void UniformState::set(uint64_t z, uint64_t m) {
  if (m == 0 || z >= m || m > mask_) {
    throw InvalidRange("uniform state requires 0 <= Z < M < 2^W");
  }
  z_ = z;
  m_ = m;
}

void UniformState::recycle(uint64_t z, uint64_t m) {
  assert(z < m);
  assert(u128(m_) * m <= mask_ && "recycle overflows the word size");
  z_ += z * m_;
  m_ *= m;
}

void UniformState::refill() {
  assert(m_ >= 1);
  unsigned k = w_ - bit_length(m_);
  if (k == 0) return;
  uint64_t fresh = src_->flip(k);
  z_ += fresh * m_;
  m_ <<= k;
}

void UniformState::recycle_widening(uint64_t z, uint64_t m) {
  assert(z < m && m <= mask_);
  u128 zf = u128(z_) + u128(z) * m_;
  u128 mf = u128(m_) * m;
  uint64_t z_hi = uint64_t(zf >> w_), z_lo = uint64_t(zf) & mask_;
  uint64_t m_hi = uint64_t(mf >> w_), m_lo = uint64_t(mf) & mask_;
  if (z_hi == m_hi) {
    z_ = z_lo;
    m_ = m_lo;
  } else {
    z_ = z_hi;
    m_ = m_hi;
    src_->pushback_word(z_lo, w_);
  }
}

StateSnapshot UniformState::snapshot() const {
  return {z_, m_, src_->pushback()};
}

void UniformState::restore(const StateSnapshot& s) {
  set(s.z, s.m);
  src_->set_pushback(s.pushback);
}

}  // namespace rr
