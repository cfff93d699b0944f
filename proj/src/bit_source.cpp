#include "rr/bit_source.hpp"

#include <sodium.h>
#include <sys/random.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <random>
#include <system_error>

#include "rr/errors.hpp"

namespace rr {
namespace {

inline uint64_t low_bits(uint64_t x, unsigned k) {
  return k >= 64 ? x : (x & ((uint64_t{1} << k) - 1));
}

inline uint64_t shift_right(uint64_t x, unsigned k) {
  return k >= 64 ? 0 : x >> k;
}

// Serves bits out of a 64-bit reservoir refilled one word at a time.
class WordBackend : public BitBackend {
 public:
  uint64_t take(unsigned k) override {
    if (k == 0) return 0;
    if (k <= avail_) {
      uint64_t r = low_bits(buf_, k);
      buf_ = shift_right(buf_, k);
      avail_ -= k;
      return r;
    }
    uint64_t r = buf_;
    unsigned have = avail_;
    unsigned need = k - have;
    uint64_t w = next_word();
    r |= low_bits(w, need) << have;
    buf_ = shift_right(w, need);
    avail_ = 64 - need;
    return r;
  }

 protected:
  virtual uint64_t next_word() = 0;

 private:
  uint64_t buf_ = 0;
  unsigned avail_ = 0;
};

class Mt64Backend : public WordBackend {
 public:
  explicit Mt64Backend(uint64_t seed) : eng_(seed) {}
  std::unique_ptr<BitBackend> clone() const override {
    return std::make_unique<Mt64Backend>(*this);
  }

 protected:
  uint64_t next_word() override { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Reads 256-byte blocks from a byte producer and hands out 64-bit words.
class BlockBackend : public WordBackend {
 public:
  static constexpr size_t kBlockBytes = 256;

 protected:
  virtual void fill_block(uint8_t* out) = 0;

  uint64_t next_word() override {
    if (pos_ == kBlockBytes) {
      fill_block(block_.data());
      pos_ = 0;
    }
    uint64_t w;
    std::memcpy(&w, block_.data() + pos_, sizeof w);
    pos_ += sizeof w;
    return w;
  }

 private:
  std::array<uint8_t, kBlockBytes> block_{};
  size_t pos_ = kBlockBytes;
};

class ChaChaBackend : public BlockBackend {
 public:
  explicit ChaChaBackend(uint64_t seed) {
    if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
    uint8_t seed_bytes[8];
    for (int i = 0; i < 8; ++i) seed_bytes[i] = uint8_t(seed >> (8 * i));
    crypto_generichash(key_.data(), key_.size(), seed_bytes, sizeof seed_bytes,
                       nullptr, 0);
  }
  std::unique_ptr<BitBackend> clone() const override {
    return std::make_unique<ChaChaBackend>(*this);
  }

 protected:
  void fill_block(uint8_t* out) override {
    static const std::array<uint8_t, kBlockBytes> zeros{};
    crypto_stream_chacha20_xor_ic(out, zeros.data(), kBlockBytes, nonce_.data(),
                                  counter_, key_.data());
    counter_ += kBlockBytes / 64;
  }

 private:
  std::array<uint8_t, crypto_stream_chacha20_KEYBYTES> key_{};
  std::array<uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce_{};
  uint64_t counter_ = 0;
};

class OsBackend : public BlockBackend {
 public:
  std::unique_ptr<BitBackend> clone() const override {
    return std::make_unique<OsBackend>();
  }

 protected:
  void fill_block(uint8_t* out) override {
    size_t got = 0;
    while (got < kBlockBytes) {
      ssize_t r = getrandom(out + got, kBlockBytes - got, 0);
      if (r < 0) {
        if (errno == EINTR) continue;
        throw std::system_error(errno, std::generic_category(), "getrandom");
      }
      got += size_t(r);
    }
  }
};

class TapeBackend : public BitBackend {
 public:
  explicit TapeBackend(std::vector<uint8_t> bits) : bits_(std::move(bits)) {}

  uint64_t take(unsigned k) override {
    if (pos_ + k > bits_.size()) throw TapeExhausted(unsigned(pos_ + k - bits_.size()));
    uint64_t r = 0;
    for (unsigned i = 0; i < k; ++i) r |= uint64_t(bits_[pos_ + i] & 1) << i;
    pos_ += k;
    return r;
  }
  std::unique_ptr<BitBackend> clone() const override {
    return std::make_unique<TapeBackend>(*this);
  }

 private:
  std::vector<uint8_t> bits_;
  size_t pos_ = 0;
};

}  // namespace

BitSource::BitSource(std::unique_ptr<BitBackend> backend)
    : backend_(std::move(backend)) {}

BitSource::BitSource(const BitSource& other)
    : backend_(other.backend_->clone()),
      pushback_(other.pushback_),
      raw_bits_(other.raw_bits_) {}

BitSource& BitSource::operator=(const BitSource& other) {
  if (this != &other) {
    backend_ = other.backend_->clone();
    pushback_ = other.pushback_;
    raw_bits_ = other.raw_bits_;
  }
  return *this;
}

BitSource BitSource::fast(uint64_t seed) {
  return BitSource(std::make_unique<Mt64Backend>(seed));
}

BitSource BitSource::csprng(uint64_t seed) {
  return BitSource(std::make_unique<ChaChaBackend>(seed));
}

BitSource BitSource::os() { return BitSource(std::make_unique<OsBackend>()); }

BitSource BitSource::tape(std::vector<uint8_t> bits) {
  return BitSource(std::make_unique<TapeBackend>(std::move(bits)));
}

BitSource BitSource::tape_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open tape file: " + path);
  std::vector<uint8_t> bits;
  char c;
  while (in.get(c)) {
    if (c == '0' || c == '1') {
      bits.push_back(uint8_t(c - '0'));
    } else if (c != '\n' && c != '\r' && c != ' ' && c != '\t') {
      throw std::invalid_argument("tape file contains a character other than 0/1");
    }
  }
  return tape(std::move(bits));
}

BitSource BitSource::from_spec(const std::string& spec, uint64_t seed) {
  if (spec == "fast") return fast(seed);
  if (spec == "csprng") return csprng(seed);
  if (spec == "os") return os();
  if (spec.rfind("tape:", 0) == 0) return tape_file(spec.substr(5));
  throw std::invalid_argument("unknown source: " + spec);
}

uint64_t BitSource::flip(unsigned k) {
  if (k > 64) throw InvalidRange("flip width exceeds 64 bits");
  uint64_t out = 0;
  unsigned filled = 0;
  while (filled < k && !pushback_.empty()) {
    PushbackEntry& top = pushback_.back();
    unsigned n = std::min(k - filled, top.bits);
    out |= low_bits(top.value, n) << filled;
    top.value = shift_right(top.value, n);
    top.bits -= n;
    filled += n;
    if (top.bits == 0) pushback_.pop_back();
  }
  if (filled < k) {
    unsigned rest = k - filled;
    out |= backend_->take(rest) << filled;
    raw_bits_ += rest;
  }
  return out;
}

void BitSource::pushback_word(uint64_t value, unsigned bits) {
  if (bits > 64 || (bits < 64 && (value >> bits) != 0)) {
    throw InvalidRange("pushback value does not fit in the given width");
  }
  if (bits == 0) return;
  pushback_.push_back({value, bits});
}

void BitSource::set_pushback(std::vector<PushbackEntry> entries) {
  pushback_ = std::move(entries);
}

unsigned BitSource::pushback_bits() const {
  unsigned total = 0;
  for (const auto& e : pushback_) total += e.bits;
  return total;
}

}  // namespace rr
