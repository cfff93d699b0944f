#include "rr/validation.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <sstream>

#include "rr/errors.hpp"

namespace rr {
namespace {

using u128 = unsigned __int128;

mpz_class to_mpz(u128 v) {
  mpz_class hi(static_cast<unsigned long>(uint64_t(v >> 64)));
  mpz_class lo(static_cast<unsigned long>(uint64_t(v)));
  return (hi << 64) + lo;
}

// 2^-e as a rational.
mpq_class pow2_inv(unsigned e) {
  mpz_class den = 1;
  den <<= e;
  return mpq_class(mpz_class(1), den);
}

// value / 2^e, canonicalized.
mpq_class scaled(u128 value, unsigned e) {
  mpz_class den = 1;
  den <<= e;
  mpq_class q(to_mpz(value), den);
  q.canonicalize();
  return q;
}

// value / 2^e for an arbitrary-size value.
mpq_class as_rational(const mpz_class& value, unsigned e) {
  mpz_class den = 1;
  den <<= e;
  mpq_class q(value, den);
  q.canonicalize();
  return q;
}

// Serves bits from a prefix owned by the DFS.
class PrefixBackend : public BitBackend {
 public:
  explicit PrefixBackend(const std::vector<uint8_t>& bits) : bits_(&bits) {}
  uint64_t take(unsigned k) override {
    if (pos_ + k > bits_->size()) throw TapeExhausted(unsigned(pos_ + k - bits_->size()));
    uint64_t r = 0;
    for (unsigned i = 0; i < k; ++i) r |= uint64_t((*bits_)[pos_ + i]) << i;
    pos_ += k;
    return r;
  }
  std::unique_ptr<BitBackend> clone() const override {
    return std::make_unique<PrefixBackend>(*this);
  }

 private:
  const std::vector<uint8_t>* bits_;
  size_t pos_ = 0;
};

// Replays `run` on every tape prefix. `leaf(result, length)` is called for
// each halting prefix; the residual is returned scaled by 2^cap.
template <class Run, class Leaf>
class PrefixDfs {
 public:
  PrefixDfs(const Run& run, Leaf& leaf, unsigned cap) : run_(run), leaf_(leaf), cap_(cap) {}

  u128 explore() {
    prefix_.clear();
    residual_ = 0;
    visit();
    return residual_;
  }

 private:
  void visit() {
    unsigned needed = 0;
    {
      BitSource src(std::make_unique<PrefixBackend>(prefix_));
      try {
        auto result = run_(src);
        leaf_(result, unsigned(prefix_.size()));
        return;
      } catch (const TapeExhausted& e) {
        needed = e.needed();
      }
    }
    const size_t len = prefix_.size();
    if (len + needed > cap_) {
      residual_ += u128(1) << (cap_ - len);
      return;
    }
    prefix_.resize(len + needed);
    const u128 children = u128(1) << needed;
    for (u128 v = 0; v < children; ++v) {
      for (unsigned i = 0; i < needed; ++i) prefix_[len + i] = uint8_t((v >> i) & 1);
      visit();
    }
    prefix_.resize(len);
  }

  const Run& run_;
  Leaf& leaf_;
  unsigned cap_;
  std::vector<uint8_t> prefix_;
  u128 residual_ = 0;
};

void check_cap(unsigned cap) {
  if (cap > 64) throw InvalidRange("depth cap must be at most 64");
}

struct Tally {
  u128 count = 0;  // sum of 2^(cap - len)
  u128 flips = 0;  // sum of len * 2^(cap - len)
};

}  // namespace

mpq_class ExactLaw::mass(const Outcome& o) const {
  auto it = masses.find(o);
  return it == masses.end() ? mpq_class(0) : it->second;
}

mpq_class ExactLaw::total() const {
  mpq_class t = residual;
  for (const auto& [o, m] : masses) t += m;
  return t;
}

ExactLaw enumerate_law(const TapeProgram& program, unsigned depth_cap) {
  check_cap(depth_cap);
  std::map<Outcome, Tally> tallies;
  uint64_t leaves = 0;
  auto leaf = [&](const Outcome& o, unsigned len) {
    Tally& t = tallies[o];
    u128 w = u128(1) << (depth_cap - len);
    t.count += w;
    t.flips += w * len;
    ++leaves;
  };
  auto run = [&](BitSource& src) { return program(src); };
  PrefixDfs<decltype(run), decltype(leaf)> dfs(run, leaf, depth_cap);
  u128 residual = dfs.explore();

  ExactLaw law;
  law.leaves = leaves;
  law.residual = scaled(residual, depth_cap);
  u128 flips = 0;
  for (const auto& [o, t] : tallies) {
    law.masses[o] = scaled(t.count, depth_cap);
    flips += t.flips;
  }
  law.flip_mass = scaled(flips, depth_cap);
  return law;
}

RoundLaw enumerate_rounds(const RoundProgram& program, unsigned word_size,
                          size_t rounds, unsigned depth_cap, const StateSnapshot& start,
                          HistoryUse use) {
  check_cap(depth_cap);
  struct Node {
    mpz_class mass;
    mpz_class flips;  // sum of mass * bits read so far
  };
  // One round from a fixed start: tallies per (output, end state).
  struct End {
    int64_t x;
    StateSnapshot state;
    mpz_class count, flips;
  };
  struct Search {
    std::vector<End> ends;
    u128 residual = 0;
    uint64_t leaves = 0;
  };
  auto search = [&](const Outcome& history, const StateSnapshot& snap) {
    Search s;
    std::map<std::pair<int64_t, StateSnapshot>, Tally> tallies;
    auto run = [&](BitSource& src) {
      src.set_pushback(snap.pushback);
      UniformState st(src, word_size, snap.z, snap.m);
      int64_t x = program(st, history);
      return std::pair<int64_t, StateSnapshot>{x, st.snapshot()};
    };
    auto leaf = [&](const std::pair<int64_t, StateSnapshot>& k, unsigned len) {
      Tally& t = tallies[k];
      u128 w = u128(1) << (depth_cap - len);
      t.count += w;
      t.flips += w * len;
      ++s.leaves;
    };
    PrefixDfs<decltype(run), decltype(leaf)> dfs(run, leaf, depth_cap);
    s.residual = dfs.explore();
    s.ends.reserve(tallies.size());
    for (auto& [k, t] : tallies) s.ends.push_back({k.first, k.second, to_mpz(t.count), to_mpz(t.flips)});
    return s;
  };

  // Every mass is dyadic: after r rounds the numerators below are over
  // 2^(r * cap), which keeps the merge in integers.
  std::map<StateKey, Node> frontier;
  frontier[{Outcome{}, start}] = {1, 0};
  RoundLaw out;
  unsigned scale = 0;
  for (size_t r = 0; r < rounds; ++r) {
    std::map<StateKey, Node> next;
    std::map<StateSnapshot, Search> cache;
    mpz_class residual = 0;
    for (const auto& [key, node] : frontier) {
      const Outcome& history = key.first;
      const StateSnapshot& snap = key.second;
      Search fresh;
      const Search* s = &fresh;
      if (use == HistoryUse::length_only) {
        auto it = cache.find(snap);
        if (it == cache.end()) {
          it = cache.emplace(snap, search(history, snap)).first;
          out.law.leaves += it->second.leaves;
        }
        s = &it->second;
      } else {
        fresh = search(history, snap);
        out.law.leaves += fresh.leaves;
      }
      if (s->residual != 0) residual += node.mass * to_mpz(s->residual);
      for (const End& e : s->ends) {
        Outcome h = history;
        h.push_back(e.x);
        Node& n2 = next[{std::move(h), e.state}];
        mpz_addmul(n2.mass.get_mpz_t(), node.mass.get_mpz_t(), e.count.get_mpz_t());
        mpz_addmul(n2.flips.get_mpz_t(), node.flips.get_mpz_t(), e.count.get_mpz_t());
        mpz_addmul(n2.flips.get_mpz_t(), node.mass.get_mpz_t(), e.flips.get_mpz_t());
      }
    }
    scale += depth_cap;
    out.law.residual += as_rational(residual, scale);
    frontier = std::move(next);
  }
  for (const auto& [key, node] : frontier) {
    const mpq_class mass = as_rational(node.mass, scale);
    out.finals[key] = mass;
    out.law.masses[key.first] += mass;
    out.law.flip_mass += as_rational(node.flips, scale);
  }
  return out;
}

StatePosterior posterior_of(const RoundLaw& r) {
  StatePosterior post;
  for (const auto& [key, mass] : r.finals) {
    const StateSnapshot& s = key.second;
    StatePosterior::Key pk{key.first, s.m, {}};
    mpz_class packed = 0;
    unsigned offset = 0;
    for (auto it = s.pushback.rbegin(); it != s.pushback.rend(); ++it) {
      packed += mpz_class(static_cast<unsigned long>(it->value)) << offset;
      offset += it->bits;
      pk.widths.push_back(it->bits);
    }
    mpz_class z = mpz_class(static_cast<unsigned long>(s.z)) +
                  mpz_class(static_cast<unsigned long>(s.m)) * packed;
    post.table[pk][z] += mass;
  }
  return post;
}

InvariantViolation::InvariantViolation(StatePosterior::Key key,
                                       std::map<mpz_class, mpq_class> histogram)
    : std::runtime_error("invariant violated: Z not uniform given outputs " +
                         to_string(key.outcome) + " and M = " + std::to_string(key.m)),
      key_(std::move(key)),
      histogram_(std::move(histogram)) {}

InvariantReport check_invariant_I(const RoundLaw& r) {
  InvariantReport rep;
  rep.residual = r.law.residual;
  rep.leaves = r.law.leaves;
  StatePosterior post = posterior_of(r);
  for (const auto& [key, hist] : post.table) {
    ++rep.keys;
    unsigned bits = 0;
    for (unsigned w : key.widths) bits += w;
    mpz_class m_total = mpz_class(static_cast<unsigned long>(key.m)) << bits;
    mpq_class hi = 0, lo = hist.begin()->second;
    for (const auto& [z, mass] : hist) {
      if (z >= m_total) throw InvariantViolation(key, hist);
      hi = std::max(hi, mass);
      lo = std::min(lo, mass);
    }
    if (mpz_class(static_cast<unsigned long>(hist.size())) < m_total) lo = 0;
    mpq_class spread = hi - lo;
    if (spread > rep.max_spread) rep.max_spread = spread;
    if (spread > rep.residual) throw InvariantViolation(key, hist);
  }
  return rep;
}

InvariantReport check_invariant_I(const RoundProgram& program, unsigned word_size,
                                  size_t rounds, unsigned depth_cap, HistoryUse use) {
  return check_invariant_I(enumerate_rounds(program, word_size, rounds, depth_cap, {}, use));
}

InvariantReport check_invariant_I(const StateSampler& sampler,
                                  const std::vector<DiscreteDistribution>& dists,
                                  size_t rounds, unsigned word_size, unsigned depth_cap) {
  if (dists.empty() && rounds > 0) throw InvalidRange("no distributions given");
  RoundProgram program = [&](UniformState& st, const Outcome& history) {
    const auto& d = dists[std::min(history.size(), dists.size() - 1)];
    return int64_t(sampler(st, d));
  };
  return check_invariant_I(program, word_size, rounds, depth_cap, HistoryUse::length_only);
}

ExactLaw ddg_law(const DdgTree& tree) {
  ExactLaw law;
  mpq_class reject = 0, flips = 0;
  for (unsigned d = 0; d <= tree.depth; ++d) {
    mpq_class leaf = pow2_inv(d);
    for (uint32_t label : tree.labels[d]) {
      law.masses[{int64_t(label)}] += leaf;
      flips += leaf * d;
    }
    if (tree.reject_leaf[d]) {
      reject += leaf;
      flips += leaf * d;
    }
  }
  mpq_class accept = 1 - reject;
  for (auto& [o, m] : law.masses) m /= accept;
  law.flip_mass = flips / accept;
  return law;
}

mpq_class ddg_expected_tosses(const DdgTree& tree) { return ddg_law(tree).flip_mass; }

mpq_class ky_expected_flips(const DiscreteDistribution& dist) {
  const u128 a_total = dist.total();
  mpq_class total = 0;
  for (uint64_t a : dist.weights()) {
    if (a == a_total) continue;  // leaf at the root, zero flips
    // Bits of a/A past the binary point come from doubling the remainder;
    // the remainder sequence is eventually periodic.
    std::map<u128, unsigned> seen;
    std::vector<uint8_t> bits{0};  // bits[j] for j >= 1
    u128 r = a;
    unsigned j = 0;
    while (!seen.count(r)) {
      seen[r] = j;
      r <<= 1;
      ++j;
      uint8_t b = r >= a_total;
      if (b) r -= a_total;
      bits.push_back(b);
    }
    // Remainder after bit j repeats the one after bit `start`, so bits
    // start+1.. repeat with period p.
    const unsigned start = seen[r], p = j - start;
    for (unsigned t = 1; t <= start; ++t) {
      if (bits[t]) total += mpq_class(t) * pow2_inv(t);
    }
    const mpq_class x = pow2_inv(p);
    const mpq_class one_minus = 1 - x;
    for (unsigned t = start + 1; t <= j; ++t) {
      if (!bits[t]) continue;
      mpq_class c = pow2_inv(t);
      total += c * (mpq_class(t) / one_minus + mpq_class(p) * x / (one_minus * one_minus));
    }
  }
  return total;
}

mpq_class ky_expected_flips_truncated(const DiscreteDistribution& dist, unsigned depth) {
  const u128 a_total = dist.total();
  mpq_class total = 0;
  for (uint64_t a : dist.weights()) {
    if (a == a_total) continue;
    u128 r = a;
    for (unsigned j = 1; j <= depth; ++j) {
      r <<= 1;
      if (r >= a_total) {
        r -= a_total;
        total += mpq_class(j) * pow2_inv(j);
      }
    }
  }
  return total;
}

ChiSquareResult chi_square_gof(const std::vector<uint64_t>& counts,
                               const std::vector<double>& probs) {
  if (counts.size() != probs.size()) throw DegenerateBins("counts and probabilities differ in length");
  double n = 0;
  for (uint64_t c : counts) n += double(c);
  std::vector<double> obs, exp;
  double o_acc = 0, e_acc = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    o_acc += double(counts[i]);
    e_acc += probs[i] * n;
    if (e_acc >= 5) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0;
    }
  }
  if (e_acc > 0 || o_acc > 0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  if (exp.size() < 2) throw DegenerateBins("fewer than two bins with expected count >= 5");
  ChiSquareResult res;
  res.bins = exp.size();
  for (size_t i = 0; i < exp.size(); ++i) {
    double d = obs[i] - exp[i];
    res.statistic += d * d / exp[i];
  }
  res.dof = exp.size() - 1;
  res.p_value = boost::math::gamma_q(double(res.dof) / 2, res.statistic / 2);
  return res;
}

ChiSquareResult chi_square_gof(const std::vector<uint64_t>& counts,
                               const DiscreteDistribution& dist) {
  std::vector<double> p(dist.size());
  for (size_t i = 0; i < dist.size(); ++i) p[i] = dist.probability(i);
  return chi_square_gof(counts, p);
}

std::string to_string(const Outcome& o) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < o.size(); ++i) os << (i ? "," : "") << o[i];
  os << ')';
  return os.str();
}

}  // namespace rr
