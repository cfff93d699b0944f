#include "rr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>

#include "rr/baselines.hpp"
#include "rr/errors.hpp"
#include "rr/general_samplers.hpp"
#include "rr/online_engine.hpp"
#include "rr/uniform_samplers.hpp"

namespace rr {
namespace {

using Clock = std::chrono::steady_clock;

const std::vector<std::string> kUniform = {"div", "widening", "lemire-rec", "batch-rec", "fdr", "lemire"};
const std::vector<std::string> kGeneral = {"inv", "lookup", "alias", "ddg", "ky-ddg", "ky-dg", "interval"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

// Owns the source, state and tables of one run.
struct Runner {
  std::unique_ptr<BitSource> src;
  std::unique_ptr<UniformState> st;
  std::function<uint64_t()> draw;
  // Tables are built inside make_runner; kept alive here.
  std::shared_ptr<void> tables;
  KyDgState ky_state;
  IntervalState interval_state;
};

std::unique_ptr<Runner> make_runner(const BenchJob& job, const BenchConfig& cfg) {
  auto r = std::make_unique<Runner>();
  r->src = std::make_unique<BitSource>(BitSource::from_spec(cfg.source, cfg.seed));
  r->st = std::make_unique<UniformState>(*r->src, cfg.word_size);
  BitSource& src = *r->src;
  UniformState& st = *r->st;
  const unsigned w = cfg.word_size;
  const std::string& s = job.sampler;
  if (is_uniform_sampler(s)) {
    const uint64_t n = job.n;
    if (s == "fdr") {
      r->draw = [&src, n] { return fdr(src, n); };
    } else if (s == "lemire") {
      r->draw = [&src, n, w] { return lemire_plain(src, n, w); };
    } else {
      UniformMethod m = parse_uniform_method(s);
      r->draw = [&st, n, m] { return uniform_with(m, st, n); };
    }
    return r;
  }
  const DiscreteDistribution& dist = *job.dist;
  if (s == "inv") {
    r->draw = [&st, &dist] { return inversion(st, dist); };
  } else if (s == "lookup") {
    auto t = std::make_shared<LookupTable>(lookup_build(dist));
    r->tables = t;
    r->draw = [&st, t] { return lookup_sample(st, *t); };
  } else if (s == "alias") {
    auto t = std::make_shared<AliasTable>(alias_build(dist));
    r->tables = t;
    r->draw = [&st, t] { return alias_sample(st, *t); };
  } else if (s == "ddg") {
    auto t = std::make_shared<DdgTree>(ddg_build(dist));
    r->tables = t;
    r->draw = [&st, t] { return ddg_sample(st, *t); };
  } else if (s == "ky-ddg") {
    r->draw = [&src, &dist] { return ky_ddg(src, dist); };
  } else if (s == "ky-dg") {
    Runner* self = r.get();
    r->draw = [self, &src, &dist] { return ky_dg(self->ky_state, src, dist); };
  } else if (s == "interval") {
    Runner* self = r.get();
    r->draw = [self, &src, &dist] { return hh_interval(self->interval_state, src, dist); };
  } else {
    throw std::invalid_argument("unknown sampler: " + s);
  }
  return r;
}

double time_preprocess(const BenchJob& job, unsigned repeats) {
  if (is_uniform_sampler(job.sampler)) return 0;
  const DiscreteDistribution& dist = *job.dist;
  std::vector<double> ns;
  for (unsigned i = 0; i < repeats; ++i) {
    auto t0 = Clock::now();
    if (job.sampler == "lookup") {
      auto t = lookup_build(dist);
      (void)t;
    } else if (job.sampler == "alias") {
      auto t = alias_build(dist);
      (void)t;
    } else if (job.sampler == "ddg") {
      auto t = ddg_build(dist);
      (void)t;
    } else {
      return 0;
    }
    ns.push_back(std::chrono::duration<double, std::nano>(Clock::now() - t0).count());
  }
  return median(ns);
}

double job_shannon_bits(const BenchJob& job) {
  if (is_uniform_sampler(job.sampler)) return std::log2(double(job.n));
  return shannon_entropy(*job.dist);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

bool is_uniform_sampler(const std::string& name) { return contains(kUniform, name); }

bool is_known_sampler(const std::string& name) {
  return contains(kUniform, name) || contains(kGeneral, name);
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  std::vector<BenchRow> rows;
  const unsigned repeats = std::max(1u, cfg.repeats);
  for (const BenchJob& job : cfg.jobs) {
    if (!is_known_sampler(job.sampler)) throw std::invalid_argument("unknown sampler: " + job.sampler);
    if (is_uniform_sampler(job.sampler) ? job.n == 0 : !job.dist) {
      throw std::invalid_argument("benchmark job for " + job.sampler + " lacks its range or distribution");
    }
    BenchRow row;
    row.sampler = job.sampler;
    row.dist_id = job.dist_id;
    row.n = is_uniform_sampler(job.sampler) ? job.n : job.dist->size();
    row.samples = job.samples;
    row.shannon_bits = job_shannon_bits(job);
    row.preprocess_ns = time_preprocess(job, repeats);
    std::vector<double> wall;
    uint64_t sink = 0;
    for (unsigned rep = 0; rep < repeats; ++rep) {
      auto runner = make_runner(job, cfg);
      for (uint64_t i = 0; i < cfg.warmup; ++i) sink += runner->draw();
      runner->src->reset_counter();
      auto t0 = Clock::now();
      for (uint64_t i = 0; i < job.samples; ++i) sink += runner->draw();
      auto t1 = Clock::now();
      if (rep == 0) row.raw_bits = runner->src->raw_bits_consumed();
      wall.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
    }
    static volatile uint64_t keep;
    keep = sink;
    row.bits_per_sample = job.samples ? double(row.raw_bits) / double(job.samples) : 0;
    row.wall_ns_per_sample = job.samples ? median(wall) / double(job.samples) : 0;
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "sampler,dist_id,n,samples,raw_bits,bits_per_sample,shannon_bits,"
         "wall_ns_per_sample,preprocess_ns\n";
  auto old_prec = out.precision(17);
  for (const auto& r : rows) {
    out << csv_field(r.sampler) << ',' << csv_field(r.dist_id) << ',' << r.n << ',' << r.samples << ','
        << r.raw_bits << ',' << r.bits_per_sample << ',' << r.shannon_bits << ','
        << r.wall_ns_per_sample << ',' << r.preprocess_ns << '\n';
  }
  out.precision(old_prec);
}

}  // namespace rr
