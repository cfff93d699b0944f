#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rr/distribution.hpp"

namespace rr {

// One benchmark cell. Uniform samplers (div, widening, lemire-rec,
// batch-rec, fdr, lemire) read `n`; the others (inv, lookup, alias, ddg,
// ky-ddg, ky-dg, interval) read `dist`.
struct BenchJob {
  std::string sampler;
  uint64_t n = 0;
  std::optional<DiscreteDistribution> dist;
  std::string dist_id;
  uint64_t samples = 0;
};

struct BenchConfig {
  std::vector<BenchJob> jobs;
  unsigned word_size = 64;
  std::string source = "fast";
  uint64_t seed = 1;
  unsigned repeats = 5;
  uint64_t warmup = 1000;
};

struct BenchRow {
  std::string sampler;
  std::string dist_id;
  uint64_t n = 0;
  uint64_t samples = 0;
  uint64_t raw_bits = 0;
  double bits_per_sample = 0;
  double shannon_bits = 0;
  double wall_ns_per_sample = 0;
  double preprocess_ns = 0;
};

bool is_uniform_sampler(const std::string& name);
bool is_known_sampler(const std::string& name);

// Raw bits come from the first repeat; wall time is the median over repeats.
std::vector<BenchRow> run_bench(const BenchConfig& config);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace rr
