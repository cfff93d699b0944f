#pragma once

#include <cstdint>
#include <vector>

#include "rr/bit_source.hpp"

namespace rr {

// Everything needed to resume a sampling context: the uniform state and
// the words pending in the source's pushback stack.
struct StateSnapshot {
  uint64_t z = 0;
  uint64_t m = 1;
  std::vector<PushbackEntry> pushback;

  friend bool operator==(const StateSnapshot&, const StateSnapshot&) = default;
  friend auto operator<=>(const StateSnapshot&, const StateSnapshot&) = default;
};

// The pair (Z, M) with Z uniform on [0, M) given M, and M < 2^W.
class UniformState {
 public:
  UniformState(BitSource& src, unsigned word_size);
  UniformState(BitSource& src, unsigned word_size, uint64_t z, uint64_t m);

  uint64_t value() const { return z_; }
  uint64_t bound() const { return m_; }
  unsigned word_size() const { return w_; }
  // 2^W - 1.
  uint64_t max_word() const { return mask_; }
  BitSource& source() { return *src_; }

  // Z <- Z + z*M, M <- M*m. Requires M*m < 2^W.
  void recycle(uint64_t z, uint64_t m);
  // Tops M up to [2^(W-1), 2^W) with W - bitlen(M) fresh bits.
  void refill();
  // Recycle with a 2W-bit product; on a high-word mismatch keeps the high
  // words and pushes the low word of Z back into the source.
  void recycle_widening(uint64_t z, uint64_t m);

  void set(uint64_t z, uint64_t m);
  StateSnapshot snapshot() const;
  void restore(const StateSnapshot& s);

  // Count of reject branches taken by the uniform samplers.
  uint64_t rejections() const { return rejections_; }
  void note_rejection() { ++rejections_; }

 private:
  BitSource* src_;
  unsigned w_;
  uint64_t mask_;
  uint64_t z_ = 0;
  uint64_t m_ = 1;
  uint64_t rejections_ = 0;
};

inline unsigned bit_length(uint64_t x) {
  return x == 0 ? 0 : 64 - unsigned(__builtin_clzll(x));
}

}  // namespace rr
