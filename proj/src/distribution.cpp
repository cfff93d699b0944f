#include "rr/distribution.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rr/errors.hpp"

namespace rr {
namespace {

uint64_t parse_weight(const std::string& tok) {
  size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &used);
  } catch (const std::exception&) {
    throw InvalidRange("bad weight: '" + tok + "'");
  }
  if (used != tok.size() || tok.find('-') != std::string::npos) {
    throw InvalidRange("bad weight: '" + tok + "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<uint64_t> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidRange("distribution needs at least one weight");
  prefix_.reserve(weights_.size());
  uint64_t acc = 0;
  for (uint64_t a : weights_) {
    if (a == 0) throw InvalidRange("weights must be positive");
    if (__builtin_add_overflow(acc, a, &acc)) throw InvalidRange("weight total overflows 64 bits");
    prefix_.push_back(acc);
  }
}

DiscreteDistribution DiscreteDistribution::parse(const std::string& spec) {
  std::vector<uint64_t> w;
  std::string s = trim(spec);
  bool inline_list = !s.empty() && s.find_first_not_of("0123456789, ") == std::string::npos;
  if (inline_list) {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) w.push_back(parse_weight(trim(tok)));
  } else {
    std::ifstream in(s);
    if (!in) throw InvalidRange("cannot read distribution: " + spec);
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (!line.empty()) w.push_back(parse_weight(line));
    }
  }
  return DiscreteDistribution(std::move(w));
}

size_t DiscreteDistribution::find(uint64_t u, size_t linear_max) const {
  if (weights_.size() <= linear_max) {
    size_t i = 0;
    while (prefix_[i] <= u) ++i;
    return i;
  }
  return size_t(std::upper_bound(prefix_.begin(), prefix_.end(), u) - prefix_.begin());
}

std::string DiscreteDistribution::to_string() const {
  std::string out;
  for (size_t i = 0; i < weights_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(weights_[i]);
  }
  return out;
}

}  // namespace rr
