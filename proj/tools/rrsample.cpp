// rrsample: command-line front end for the randomness-recycling samplers.
//
//   rrsample bench    --sampler div,lemire --n 6 --samples 100000
//   rrsample oracle   --sampler inv --dist 4,3,3,1 --word-size 8 --rounds 2
//   rrsample run      --oracle const:4,3,3,1 --rounds 1000 --epsilon 0.01
//   rrsample shuffle  --k 10 --strategy div
//   rrsample gaussian --sigma2 1 --samples 10
//   rrsample sample   --sampler alias --dist 5,4,2,1 --samples 10
//
// Exit status 0 on success, 2 on bad input or a failed validation.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "rr/apps.hpp"
#include "rr/baselines.hpp"
#include "rr/bench.hpp"
#include "rr/errors.hpp"
#include "rr/general_samplers.hpp"
#include "rr/online_engine.hpp"
#include "rr/uniform_samplers.hpp"
#include "rr/validation.hpp"

using json = nlohmann::json;

namespace {

struct Globals {
  unsigned word_size = 0;  // 0: command default
  std::string source = "fast";
  uint64_t seed = 1;
  uint64_t samples = 0;
  std::string output;
  bool json = false;
};

// Writes to --output when given, otherwise stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw rr::InvalidRange("cannot open output file: " + path);
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::pair<uint64_t, uint64_t> parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return {std::stoull(s), 1};
    return {std::stoull(s.substr(0, slash)), std::stoull(s.substr(slash + 1))};
  } catch (const std::exception&) {
    throw rr::InvalidRange("bad rational: " + s);
  }
}

json rational_json(const mpq_class& q) {
  return {{"numerator", q.get_num().get_str()}, {"denominator", q.get_den().get_str()}};
}

unsigned word_size_or(const Globals& g, unsigned fallback) {
  return g.word_size ? g.word_size : fallback;
}

// Samples one draw of a named sampler; returns the output as an integer.
class NamedSampler {
 public:
  NamedSampler(const std::string& name, const std::optional<rr::DiscreteDistribution>& dist,
               uint64_t n, rr::UniformState& st)
      : name_(name), dist_(dist), n_(n), st_(st) {
    if (rr::is_uniform_sampler(name)) {
      if (n_ == 0) throw rr::InvalidRange(name + " needs --n (or --dist to use its total)");
    } else if (!dist_) {
      throw rr::InvalidRange(name + " needs --dist");
    }
    if (name == "lookup") lookup_ = rr::lookup_build(*dist_);
    if (name == "alias") alias_ = rr::alias_build(*dist_);
    if (name == "ddg") ddg_ = rr::ddg_build(*dist_);
  }

  int64_t operator()() {
    rr::BitSource& src = st_.source();
    if (name_ == "fdr") return int64_t(rr::fdr(src, n_));
    if (name_ == "lemire") return int64_t(rr::lemire_plain(src, n_, st_.word_size()));
    if (rr::is_uniform_sampler(name_)) {
      return int64_t(rr::uniform_with(rr::parse_uniform_method(name_), st_, n_));
    }
    if (name_ == "inv") return int64_t(rr::inversion(st_, *dist_));
    if (name_ == "lookup") return int64_t(rr::lookup_sample(st_, *lookup_));
    if (name_ == "alias") return int64_t(rr::alias_sample(st_, *alias_));
    if (name_ == "ddg") return int64_t(rr::ddg_sample(st_, *ddg_));
    if (name_ == "ky-ddg") return int64_t(rr::ky_ddg(src, *dist_));
    if (name_ == "ky-dg") return int64_t(rr::ky_dg(ky_, src, *dist_));
    if (name_ == "interval") return int64_t(rr::hh_interval(interval_, src, *dist_));
    throw rr::InvalidRange("unknown sampler: " + name_);
  }

 private:
  std::string name_;
  std::optional<rr::DiscreteDistribution> dist_;
  uint64_t n_;
  rr::UniformState& st_;
  std::optional<rr::LookupTable> lookup_;
  std::optional<rr::AliasTable> alias_;
  std::optional<rr::DdgTree> ddg_;
  rr::KyDgState ky_;
  rr::IntervalState interval_;
};

bool uses_uniform_state(const std::string& name) {
  return name == "div" || name == "widening" || name == "lemire-rec" || name == "batch-rec" ||
         name == "inv" || name == "lookup" || name == "alias" || name == "ddg";
}

int cmd_bench(const Globals& g, const std::string& samplers, uint64_t n,
              const std::string& dist_spec, unsigned repeats) {
  rr::BenchConfig cfg;
  cfg.word_size = word_size_or(g, 64);
  cfg.source = g.source;
  cfg.seed = g.seed;
  cfg.repeats = repeats;
  std::optional<rr::DiscreteDistribution> dist;
  if (!dist_spec.empty()) dist = rr::DiscreteDistribution::parse(dist_spec);
  for (const auto& s : split(samplers, ',')) {
    rr::BenchJob job;
    job.sampler = s;
    job.samples = g.samples ? g.samples : 100000;
    if (rr::is_uniform_sampler(s)) {
      job.n = n ? n : (dist ? dist->total() : 0);
      job.dist_id = "uniform-" + std::to_string(job.n);
    } else {
      job.dist = dist;
      job.dist_id = dist ? dist->to_string() : "";
    }
    cfg.jobs.push_back(job);
  }
  auto rows = rr::run_bench(cfg);
  Sink sink(g.output);
  rr::write_bench_csv(sink.out(), rows);
  return 0;
}

int cmd_oracle(const Globals& g, const std::string& sampler, uint64_t n,
               const std::string& dist_spec, unsigned depth_cap, size_t rounds) {
  const unsigned w = word_size_or(g, 8);
  std::optional<rr::DiscreteDistribution> dist;
  if (!dist_spec.empty()) dist = rr::DiscreteDistribution::parse(dist_spec);
  if (n == 0 && dist) n = dist->total();
  rr::ExactLaw law;
  if (uses_uniform_state(sampler)) {
    // Tables are rebuilt per round; the enumeration restores the state between rounds.
    rr::RoundProgram program = [&](rr::UniformState& st, const rr::Outcome&) {
      NamedSampler s(sampler, dist, n, st);
      return s();
    };
    law = rr::enumerate_rounds(program, w, rounds, depth_cap).law;
  } else {
    rr::TapeProgram program = [&](rr::BitSource& src) {
      rr::UniformState st(src, w);
      NamedSampler s(sampler, dist, n, st);
      rr::Outcome out;
      for (size_t i = 0; i < rounds; ++i) out.push_back(s());
      return out;
    };
    law = rr::enumerate_law(program, depth_cap);
  }
  json j;
  j["sampler"] = sampler;
  j["word_size"] = w;
  j["depth_cap"] = depth_cap;
  j["rounds"] = rounds;
  j["law"] = json::array();
  for (const auto& [o, m] : law.masses) {
    json row = rational_json(m);
    row["outcome"] = o;
    j["law"].push_back(row);
  }
  j["residual"] = rational_json(law.residual);
  j["flip_mass"] = rational_json(law.flip_mass);
  j["leaves"] = law.leaves;
  Sink sink(g.output);
  sink.out() << j.dump(2) << '\n';
  return 0;
}

int cmd_run(const Globals& g, const std::string& oracle_spec, size_t rounds, double eps,
            uint64_t denom_bound, const std::string& sampler) {
  rr::DistributionOracle base = rr::DistributionOracle::parse(oracle_spec);
  uint64_t bound = denom_bound ? denom_bound : base.denom_bound();
  rr::DistributionOracle oracle(
      [&base](const std::vector<size_t>& h) { return base.next(h); }, bound);
  unsigned w = g.word_size;
  if (w == 0) w = rr::required_word_size(std::max<uint64_t>(bound, 2), eps);
  if (w > 64) throw rr::InvalidRange("required word size " + std::to_string(w) + " exceeds 64");
  rr::BitSource src = rr::BitSource::from_spec(g.source, g.seed);
  rr::UniformState st(src, w);
  rr::RoundSampler rs(rr::parse_recycling_sampler(sampler));
  auto res = rr::random_sequence(st, oracle, rounds, rs);
  Sink sink(g.output);
  if (g.json) {
    json j{{"word_size", w},
           {"rounds", rounds},
           {"raw_bits", res.report.raw_bits},
           {"bits_per_sample", res.report.bits_per_sample},
           {"target_entropy_bits", res.report.target_entropy_bits},
           {"outputs", res.outputs}};
    sink.out() << j.dump(2) << '\n';
  } else {
    sink.out() << "round,output\n";
    for (size_t i = 0; i < res.outputs.size(); ++i) sink.out() << i << ',' << res.outputs[i] << '\n';
    std::cerr << "word_size=" << w << " raw_bits=" << res.report.raw_bits
              << " surprisal_bits=" << res.report.target_entropy_bits << '\n';
  }
  return 0;
}

int cmd_shuffle(const Globals& g, size_t k, const std::string& strategy) {
  rr::BitSource src = rr::BitSource::from_spec(g.source, g.seed);
  rr::UniformState st(src, word_size_or(g, 64));
  const auto strat = rr::parse_shuffle_strategy(strategy);
  const uint64_t count = g.samples ? g.samples : 1;
  Sink sink(g.output);
  std::vector<std::vector<size_t>> perms;
  for (uint64_t i = 0; i < count; ++i) {
    auto p = rr::shuffle(st, k, strat);
    if (g.json) {
      perms.push_back(std::move(p));
    } else {
      for (size_t j = 0; j < p.size(); ++j) sink.out() << (j ? " " : "") << p[j];
      sink.out() << '\n';
    }
  }
  if (g.json) {
    json j{{"k", k},
           {"strategy", strategy},
           {"shuffles", count},
           {"raw_bits", src.raw_bits_consumed()},
           {"bits_per_shuffle", double(src.raw_bits_consumed()) / double(count)},
           {"permutations", perms}};
    sink.out() << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_gaussian(const Globals& g, const std::string& sigma2, const std::string& primitives) {
  auto [num, den] = parse_rational(sigma2);
  rr::BitSource src = rr::BitSource::from_spec(g.source, g.seed);
  rr::UniformState st(src, word_size_or(g, 64));
  std::unique_ptr<rr::GaussianPrimitives> prim;
  if (primitives == "recycled") {
    prim = std::make_unique<rr::RecycledPrimitives>(st);
  } else if (primitives == "fresh") {
    prim = std::make_unique<rr::FreshPrimitives>(src);
  } else {
    throw rr::InvalidRange("primitives must be recycled or fresh");
  }
  const uint64_t count = g.samples ? g.samples : 1;
  Sink sink(g.output);
  std::vector<int64_t> xs;
  for (uint64_t i = 0; i < count; ++i) {
    int64_t x = rr::discrete_gaussian(*prim, num, den);
    if (g.json) {
      xs.push_back(x);
    } else {
      sink.out() << x << '\n';
    }
  }
  if (g.json) {
    json j{{"sigma2", sigma2},
           {"primitives", primitives},
           {"samples", count},
           {"raw_bits", src.raw_bits_consumed()},
           {"values", xs}};
    sink.out() << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_sample(const Globals& g, const std::string& sampler, uint64_t n,
               const std::string& dist_spec) {
  std::optional<rr::DiscreteDistribution> dist;
  if (!dist_spec.empty()) dist = rr::DiscreteDistribution::parse(dist_spec);
  if (n == 0 && dist) n = dist->total();
  rr::BitSource src = rr::BitSource::from_spec(g.source, g.seed);
  rr::UniformState st(src, word_size_or(g, 64));
  NamedSampler s(sampler, dist, n, st);
  const uint64_t count = g.samples ? g.samples : 1;
  Sink sink(g.output);
  std::vector<int64_t> xs;
  for (uint64_t i = 0; i < count; ++i) {
    int64_t x = s();
    if (g.json) {
      xs.push_back(x);
    } else {
      sink.out() << x << '\n';
    }
  }
  if (g.json) {
    json j{{"sampler", sampler},
           {"samples", count},
           {"raw_bits", src.raw_bits_consumed()},
           {"bits_per_sample", double(src.raw_bits_consumed()) / double(count)},
           {"values", xs}};
    sink.out() << j.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact discrete sampling with randomness recycling"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--word-size", g.word_size, "Word size W in bits")->check(CLI::Range(2u, 64u));
  app.add_option("--source", g.source, "fast | csprng | os | tape:<path>");
  app.add_option("--seed", g.seed, "Seed for the fast and csprng sources");
  app.add_option("--samples", g.samples, "Number of samples");
  app.add_option("--output", g.output, "Write results to this file");
  app.add_flag("--json", g.json, "JSON output");

  std::string sampler = "div", dist_spec, oracle_spec, strategy = "div", sigma2 = "1",
              primitives = "recycled", run_sampler = "inv";
  uint64_t n = 0, denom_bound = 0;
  unsigned depth_cap = rr::kDefaultDepthCap, repeats = 5;
  size_t rounds = 1, k = 4;
  double eps = 0.01;

  auto* bench = app.add_subcommand("bench", "Entropy and timing benchmark as CSV");
  bench->add_option("--sampler", sampler, "Comma-separated sampler names")->required();
  bench->add_option("--n", n, "Range for uniform samplers");
  bench->add_option("--dist", dist_spec, "Weights \"4,3,3,1\" or a weights file");
  bench->add_option("--repeats", repeats, "Timed repeats (median reported)");

  auto* oracle = app.add_subcommand("oracle", "Exact output law by tape enumeration, as JSON");
  oracle->add_option("--sampler", sampler)->required();
  oracle->add_option("--n", n);
  oracle->add_option("--dist", dist_spec);
  oracle->add_option("--depth-cap", depth_cap)->check(CLI::Range(1u, 64u));
  oracle->add_option("--rounds", rounds);

  auto* run = app.add_subcommand("run", "Online sampling against a distribution oracle, as CSV");
  run->add_option("--oracle", oracle_spec, "const:<dist> | markov:<file> | cycle:<dist>;<dist>")->required();
  run->add_option("--rounds", rounds)->required();
  run->add_option("--epsilon", eps, "Target amortized entropy loss per round");
  run->add_option("--denom-bound", denom_bound, "Declared bound on the denominators");
  run->add_option("--sampler", run_sampler, "inv | lookup | alias | ddg");

  auto* shuf = app.add_subcommand("shuffle", "Random permutations of [0, k)");
  shuf->add_option("--k", k)->check(CLI::PositiveNumber);
  shuf->add_option("--strategy", strategy, "div | widening | lemire-rec | batch-rec | fdr | lemire");

  auto* gauss = app.add_subcommand("gaussian", "Discrete Gaussian samples");
  gauss->add_option("--sigma2", sigma2, "Variance as n or n/d");
  gauss->add_option("--primitives", primitives, "recycled | fresh");

  auto* sample = app.add_subcommand("sample", "Draw samples from one sampler");
  sample->add_option("--sampler", sampler)->required();
  sample->add_option("--n", n);
  sample->add_option("--dist", dist_spec);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*bench) return cmd_bench(g, sampler, n, dist_spec, repeats);
    if (*oracle) return cmd_oracle(g, sampler, n, dist_spec, depth_cap, rounds);
    if (*run) return cmd_run(g, oracle_spec, rounds, eps, denom_bound, run_sampler);
    if (*shuf) return cmd_shuffle(g, k, strategy);
    if (*gauss) return cmd_gaussian(g, sigma2, primitives);
    if (*sample) return cmd_sample(g, sampler, n, dist_spec);
  } catch (const std::exception& e) {
    std::cerr << "rrsample: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
