#include "rr/apps.hpp"

#include <numeric>
#include <utility>

#include "rr/errors.hpp"

namespace rr {

using u128 = unsigned __int128;

ShuffleStrategy parse_shuffle_strategy(const std::string& name) {
  if (name == "div") return ShuffleStrategy::division;
  if (name == "widening") return ShuffleStrategy::widening;
  if (name == "lemire-rec") return ShuffleStrategy::lemire_recycled;
  if (name == "batch-rec") return ShuffleStrategy::batch_recycled;
  if (name == "fdr") return ShuffleStrategy::fdr;
  if (name == "lemire") return ShuffleStrategy::lemire;
  throw std::invalid_argument("unknown shuffle strategy: " + name);
}

const char* to_string(ShuffleStrategy s) {
  switch (s) {
    case ShuffleStrategy::division: return "div";
    case ShuffleStrategy::widening: return "widening";
    case ShuffleStrategy::lemire_recycled: return "lemire-rec";
    case ShuffleStrategy::batch_recycled: return "batch-rec";
    case ShuffleStrategy::fdr: return "fdr";
    case ShuffleStrategy::lemire: return "lemire";
  }
  return "?";
}

std::vector<size_t> shuffle(UniformState& st, size_t k, ShuffleStrategy strategy) {
  if (k == 0) throw InvalidRange("shuffle: length must be positive");
  std::vector<size_t> perm(k);
  std::iota(perm.begin(), perm.end(), size_t{0});
  auto draw = [&](uint64_t n) -> uint64_t {
    switch (strategy) {
      case ShuffleStrategy::division: return uniform_with(UniformMethod::division, st, n);
      case ShuffleStrategy::widening: return uniform_with(UniformMethod::widening, st, n);
      case ShuffleStrategy::lemire_recycled:
        return uniform_with(UniformMethod::lemire_recycled, st, n);
      case ShuffleStrategy::batch_recycled:
        return uniform_with(UniformMethod::batch_recycled, st, n);
      case ShuffleStrategy::fdr: return fdr(st.source(), n);
      case ShuffleStrategy::lemire: return lemire_plain(st.source(), n, st.word_size());
    }
    throw std::logic_error("unreachable");
  };
  size_t i = k - 1;
  while (i >= 1) {
    if (strategy == ShuffleStrategy::batch_recycled && i >= 2 &&
        u128(i + 1) * i <= st.max_word()) {
      const uint64_t ranges[2] = {i + 1, i};
      auto u = uniform_batch_recycled(st, ranges);
      std::swap(perm[i], perm[u[0]]);
      std::swap(perm[i - 1], perm[u[1]]);
      i -= 2;
      continue;
    }
    std::swap(perm[i], perm[draw(i + 1)]);
    --i;
  }
  return perm;
}

uint64_t RecycledPrimitives::uniform(uint64_t n) { return rr::uniform(*st_, n); }

bool RecycledPrimitives::bernoulli(uint64_t num, uint64_t den) {
  if (num == 0) return false;
  if (num >= den) return true;
  const uint64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
  // Inversion over the two weights (den - num, num).
  const uint64_t miss = den - num;
  uint64_t u = rr::uniform(*st_, den);
  if (u >= miss) {
    st_->recycle(u - miss, num);
    return true;
  }
  st_->recycle(u, miss);
  return false;
}

uint64_t RecycledPrimitives::max_denominator() const {
  return uint64_t{1} << (st_->word_size() - 1);
}

uint64_t FreshPrimitives::uniform(uint64_t n) { return fdr(*src_, n); }

bool FreshPrimitives::bernoulli(uint64_t num, uint64_t den) {
  if (num == 0) return false;
  if (num >= den) return true;
  const uint64_t g = std::gcd(num, den);
  return fdr(*src_, den / g) < num / g;
}

namespace {

// Bernoulli(num/(den*k)) with the product checked against the primitive's
// range.
bool bernoulli_scaled(GaussianPrimitives& prim, uint64_t num, uint64_t den, uint64_t k) {
  const uint64_t g = std::gcd(num, k);
  const u128 d = u128(den) * (k / g);
  if (d > prim.max_denominator()) {
    throw ParameterTooLarge("discrete_gaussian: Bernoulli denominator exceeds the sampler range");
  }
  return prim.bernoulli(num / g, uint64_t(d));
}

// Bernoulli(exp(-num/den)) for num <= den.
bool bernoulli_exp_unit(GaussianPrimitives& prim, uint64_t num, uint64_t den) {
  uint64_t k = 1;
  while (bernoulli_scaled(prim, num, den, k)) ++k;
  return k % 2 == 1;
}

uint64_t isqrt_floor(uint64_t num, uint64_t den) {
  // Largest s with s^2 * den <= num.
  uint64_t lo = 0, hi = uint64_t{1} << 32;
  while (hi - lo > 1) {
    uint64_t mid = lo + (hi - lo) / 2;
    if (u128(mid) * mid * den <= num) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

bool bernoulli_exp(GaussianPrimitives& prim, uint64_t num, uint64_t den) {
  if (den == 0) throw DomainError("bernoulli_exp: zero denominator");
  for (uint64_t whole = num / den; whole > 0; --whole) {
    if (!bernoulli_exp_unit(prim, 1, 1)) return false;
  }
  return bernoulli_exp_unit(prim, num % den, den);
}

int64_t discrete_laplace(GaussianPrimitives& prim, uint64_t t) {
  for (;;) {
    uint64_t u = prim.uniform(t);
    if (!bernoulli_exp(prim, u, t)) continue;
    uint64_t v = 0;
    while (bernoulli_exp(prim, 1, 1)) ++v;
    bool negative = prim.bernoulli(1, 2);
    if (negative && u == 0 && v == 0) continue;
    int64_t x = int64_t(u + t * v);
    return negative ? -x : x;
  }
}

int64_t discrete_gaussian(GaussianPrimitives& prim, uint64_t sigma2_num, uint64_t sigma2_den) {
  if (sigma2_num == 0 || sigma2_den == 0) throw DomainError("discrete_gaussian: sigma^2 must be positive");
  if (sigma2_num > kGaussianParamCap || sigma2_den > kGaussianParamCap) {
    throw ParameterTooLarge("discrete_gaussian: sigma^2 numerator or denominator above the cap");
  }
  const uint64_t n = sigma2_num, d = sigma2_den;
  const uint64_t t = isqrt_floor(n, d) + 1;
  for (;;) {
    int64_t y = discrete_laplace(prim, t);
    uint64_t ay = uint64_t(y < 0 ? -y : y);
    // gamma = (|y| - sigma^2/t)^2 / (2 sigma^2) = (|y| d t - n)^2 / (2 n d t^2)
    u128 ydt = u128(ay) * d * t;
    u128 diff = ydt >= n ? ydt - n : n - ydt;
    if (diff >> 64) throw ParameterTooLarge("discrete_gaussian: intermediate exceeds 128 bits");
    u128 num = diff * diff;
    u128 den = u128(2) * n * d * t * t;
    u128 a = num, b = den;
    while (b) {
      u128 r = a % b;
      a = b;
      b = r;
    }
    num /= a;
    den /= a;
    if ((num >> 64) || (den >> 64)) {
      throw ParameterTooLarge("discrete_gaussian: acceptance exponent does not fit in 64 bits");
    }
    if (bernoulli_exp(prim, uint64_t(num), uint64_t(den))) return y;
  }
}

int64_t discrete_gaussian(UniformState& st, uint64_t sigma2_num, uint64_t sigma2_den) {
  RecycledPrimitives prim(st);
  return discrete_gaussian(prim, sigma2_num, sigma2_den);
}

}  // namespace rr
