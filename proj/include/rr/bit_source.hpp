#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rr {

// A word pushed back into a source: `bits` low bits of `value`, served
// LSB-first.
struct PushbackEntry {
  uint64_t value = 0;
  unsigned bits = 0;

  friend bool operator==(const PushbackEntry&, const PushbackEntry&) = default;
  friend auto operator<=>(const PushbackEntry&, const PushbackEntry&) = default;
};

// Supplies raw bits to a BitSource. take(k) returns k fresh bits, the first
// bit in position 0.
class BitBackend {
 public:
  virtual ~BitBackend() = default;
  virtual uint64_t take(unsigned k) = 0;
  virtual std::unique_ptr<BitBackend> clone() const = 0;
};

// Fair-coin stream with a LIFO pushback stack and a counter of bits drawn
// from the backend. Pushback bits are served first and are not counted.
class BitSource {
 public:
  explicit BitSource(std::unique_ptr<BitBackend> backend);

  BitSource(const BitSource& other);
  BitSource& operator=(const BitSource& other);
  BitSource(BitSource&&) noexcept = default;
  BitSource& operator=(BitSource&&) noexcept = default;

  // std::mt19937_64 seeded with `seed`.
  static BitSource fast(uint64_t seed);
  // ChaCha20 keystream; the key is the seed expanded to 256 bits.
  static BitSource csprng(uint64_t seed);
  // getrandom(2), read in 256-byte blocks.
  static BitSource os();
  // Deterministic tape of 0/1 values. Reading past the end throws
  // TapeExhausted.
  static BitSource tape(std::vector<uint8_t> bits);
  // Tape file: one ASCII '0' or '1' per bit; whitespace ignored.
  static BitSource tape_file(const std::string& path);
  // Parses "fast", "csprng", "os" or "tape:<path>".
  static BitSource from_spec(const std::string& spec, uint64_t seed);

  // Returns k bits (k <= 64); the first bit served is the least significant.
  uint64_t flip(unsigned k);

  void pushback_word(uint64_t value, unsigned bits);

  uint64_t raw_bits_consumed() const { return raw_bits_; }
  void reset_counter() { raw_bits_ = 0; }

  // Pending pushback, bottom of the stack first.
  const std::vector<PushbackEntry>& pushback() const { return pushback_; }
  void set_pushback(std::vector<PushbackEntry> entries);
  unsigned pushback_bits() const;

 private:
  std::unique_ptr<BitBackend> backend_;
  std::vector<PushbackEntry> pushback_;
  uint64_t raw_bits_ = 0;
};

// Raw-bit accounting for a run of samples.
struct EntropyReport {
  uint64_t samples = 0;
  uint64_t raw_bits = 0;
  double bits_per_sample = 0;
  // Information content of the emitted outputs (sum of surprisals).
  double target_entropy_bits = 0;
  // Sample variance of the raw bits charged to each sample.
  double bits_variance = 0;
};

}  // namespace rr
