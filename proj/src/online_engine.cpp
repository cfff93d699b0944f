#include "rr/online_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rr/errors.hpp"

namespace rr {

DistributionOracle::DistributionOracle(Fn next, uint64_t denom_bound)
    : next_(std::move(next)), denom_bound_(denom_bound) {}

DistributionOracle DistributionOracle::constant(const DiscreteDistribution& dist) {
  return DistributionOracle([dist](const std::vector<size_t>&) { return dist; },
                            dist.total());
}

DistributionOracle DistributionOracle::markov(const DiscreteDistribution& initial,
                                              std::vector<DiscreteDistribution> after) {
  uint64_t bound = initial.total();
  for (const auto& d : after) bound = std::max(bound, d.total());
  return DistributionOracle(
      [initial, after = std::move(after)](const std::vector<size_t>& h) {
        if (h.empty()) return initial;
        if (h.back() >= after.size()) {
          throw InvalidRange("markov oracle has no row for output " + std::to_string(h.back()));
        }
        return after[h.back()];
      },
      bound);
}

DistributionOracle DistributionOracle::cycle(std::vector<DiscreteDistribution> dists) {
  if (dists.empty()) throw InvalidRange("cycle oracle needs a distribution");
  uint64_t bound = 0;
  for (const auto& d : dists) bound = std::max(bound, d.total());
  return DistributionOracle(
      [dists = std::move(dists)](const std::vector<size_t>& h) {
        return dists[h.size() % dists.size()];
      },
      bound);
}

DistributionOracle DistributionOracle::markov_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidRange("cannot open markov file: " + path);
  std::vector<DiscreteDistribution> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(DiscreteDistribution::parse(line));
  }
  if (rows.empty()) throw InvalidRange("markov file is empty: " + path);
  DiscreteDistribution initial = rows.front();
  rows.erase(rows.begin());
  return markov(initial, std::move(rows));
}

DistributionOracle DistributionOracle::parse(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw InvalidRange("oracle spec needs a kind prefix: " + spec);
  std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (kind == "const") return constant(DiscreteDistribution::parse(arg));
  if (kind == "markov") return markov_file(arg);
  if (kind == "cycle") {
    std::vector<DiscreteDistribution> ds;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ';')) ds.push_back(DiscreteDistribution::parse(tok));
    return cycle(std::move(ds));
  }
  throw InvalidRange("unknown oracle kind: " + kind);
}

DiscreteDistribution DistributionOracle::next(const std::vector<size_t>& history) const {
  DiscreteDistribution d = next_(history);
  if (d.total() > denom_bound_) {
    throw DenominatorExceeded("oracle produced denominator " + std::to_string(d.total()) +
                              " above the declared bound " + std::to_string(denom_bound_));
  }
  return d;
}

RecyclingSampler parse_recycling_sampler(const std::string& name) {
  if (name == "inv" || name == "inversion") return RecyclingSampler::inversion;
  if (name == "lookup") return RecyclingSampler::lookup;
  if (name == "alias") return RecyclingSampler::alias;
  if (name == "ddg") return RecyclingSampler::ddg;
  throw std::invalid_argument("unknown sampler: " + name);
}

const char* to_string(RecyclingSampler s) {
  switch (s) {
    case RecyclingSampler::inversion: return "inv";
    case RecyclingSampler::lookup: return "lookup";
    case RecyclingSampler::alias: return "alias";
    case RecyclingSampler::ddg: return "ddg";
  }
  return "?";
}

size_t RoundSampler::operator()(UniformState& st, const DiscreteDistribution& dist) {
  switch (kind_) {
    case RecyclingSampler::inversion:
      return inversion(st, dist, method_);
    case RecyclingSampler::lookup: {
      auto it = lookup_.find(dist.weights());
      if (it == lookup_.end()) it = lookup_.emplace(dist.weights(), lookup_build(dist)).first;
      return lookup_sample(st, it->second, method_);
    }
    case RecyclingSampler::alias: {
      auto it = alias_.find(dist.weights());
      if (it == alias_.end()) it = alias_.emplace(dist.weights(), alias_build(dist)).first;
      return alias_sample(st, it->second, method_);
    }
    case RecyclingSampler::ddg: {
      auto it = ddg_.find(dist.weights());
      if (it == ddg_.end()) it = ddg_.emplace(dist.weights(), ddg_build(dist)).first;
      return ddg_sample(st, it->second, method_);
    }
  }
  throw std::logic_error("unreachable");
}

SequenceResult random_sequence(UniformState& st, const DistributionOracle& oracle,
                               size_t rounds, RoundSampler sampler) {
  SequenceResult res;
  res.outputs.reserve(rounds);
  BitSource& src = st.source();
  const uint64_t start_bits = src.raw_bits_consumed();
  double mean = 0, m2 = 0;
  for (size_t i = 0; i < rounds; ++i) {
    DiscreteDistribution p = oracle.next(res.outputs);
    uint64_t before = src.raw_bits_consumed();
    size_t x = sampler(st, p);
    double used = double(src.raw_bits_consumed() - before);
    res.outputs.push_back(x);
    res.report.target_entropy_bits += surprisal(p, x);
    double delta = used - mean;
    mean += delta / double(i + 1);
    m2 += delta * (used - mean);
  }
  res.report.samples = rounds;
  res.report.raw_bits = src.raw_bits_consumed() - start_bits;
  res.report.bits_per_sample = rounds ? double(res.report.raw_bits) / double(rounds) : 0;
  res.report.bits_variance = rounds > 1 ? m2 / double(rounds - 1) : 0;
  return res;
}

double shannon_entropy(const DiscreteDistribution& dist) {
  double h = 0;
  for (size_t i = 0; i < dist.size(); ++i) {
    double p = dist.probability(i);
    h -= p * std::log2(p);
  }
  return h;
}

double surprisal(const DiscreteDistribution& dist, size_t x) {
  return std::log2(double(dist.total())) - std::log2(double(dist.weight(x)));
}

namespace {

long double binary_entropy_l(long double d) {
  if (d <= 0 || d >= 1) return 0;
  return -d * std::log2(d) - (1 - d) * std::log1p(-d) / std::log(2.0L);
}

long double loss_ratio(long double d) { return binary_entropy_l(d) / (1 - d); }

}  // namespace

double binary_entropy(double delta) {
  if (delta < 0 || delta > 1) throw DomainError("binary_entropy: delta must lie in [0, 1]");
  return double(binary_entropy_l(delta));
}

double entropy_loss_bound(uint64_t n, unsigned word_size) {
  if (word_size < 2 || word_size > 64) throw DomainError("entropy_loss_bound: W must lie in [2, 64]");
  const long double m_min = std::ldexp(1.0L, int(word_size) - 1);
  if (n < 1 || (long double)n > m_min) throw DomainError("entropy_loss_bound: n must lie in [1, 2^(W-1)]");
  const long double delta = (long double)(n - 1) / m_min;
  return double(loss_ratio(delta));
}

unsigned required_word_size(uint64_t d, double eps) {
  if (d < 2) throw DomainError("required_word_size: d must be at least 2");
  if (!(eps > 0)) throw DomainError("required_word_size: eps must be positive");
  long double delta = 0.5L;
  if ((long double)eps < loss_ratio(0.5L)) {
    // h is increasing on (0, 1/2]; keep h(lo) <= eps < h(hi).
    long double lo = 0, hi = 0.5L;
    for (int it = 0; it < 4000 && hi - lo > 1e-12L * hi; ++it) {
      long double mid = lo + (hi - lo) / 2;
      if (loss_ratio(mid) <= eps) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    delta = lo;
  }
  const long double bits = std::log2((long double)(d - 1) / delta);
  return 1 + unsigned(std::ceil(bits));
}

}  // namespace rr
