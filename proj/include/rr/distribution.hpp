#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rr {

// Positive integer weights a_0..a_{n-1}; P(i) = a_i / A.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;
  explicit DiscreteDistribution(std::vector<uint64_t> weights);

  // "4,3,3,1" inline, or a path to a file with one weight per line.
  static DiscreteDistribution parse(const std::string& spec);

  size_t size() const { return weights_.size(); }
  uint64_t weight(size_t i) const { return weights_[i]; }
  uint64_t total() const { return prefix_.back(); }
  const std::vector<uint64_t>& weights() const { return weights_; }
  // Inclusive prefix sums: prefix()[i] = a_0 + ... + a_i.
  const std::vector<uint64_t>& prefix() const { return prefix_; }
  // Sum of the weights before i.
  uint64_t prefix_before(size_t i) const { return i == 0 ? 0 : prefix_[i - 1]; }
  double probability(size_t i) const { return double(weights_[i]) / double(total()); }

  // Smallest i with u < prefix()[i]. Scans linearly when size() <= linear_max.
  size_t find(uint64_t u, size_t linear_max = 16) const;

  std::string to_string() const;

  friend bool operator==(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    return a.weights_ == b.weights_;
  }

 private:
  std::vector<uint64_t> weights_;
  std::vector<uint64_t> prefix_;
};

}  // namespace rr
