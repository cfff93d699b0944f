// Shared fixtures for the unit tests and the acceptance binary.
#pragma once

#include <gmpxx.h>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rr/baselines.hpp"
#include "rr/distribution.hpp"
#include "rr/errors.hpp"
#include "rr/general_samplers.hpp"
#include "rr/uniform_samplers.hpp"
#include "rr/uniform_state.hpp"
#include "rr/validation.hpp"

namespace rr::testing {

inline std::vector<DiscreteDistribution> battery() {
  return {DiscreteDistribution({1, 1}), DiscreteDistribution({1, 3}),
          DiscreteDistribution({2, 3, 5}), DiscreteDistribution({4, 3, 3, 1}),
          DiscreteDistribution({5, 4, 2, 1})};
}

inline mpq_class pow2_inv(unsigned e) {
  mpz_class den = 1;
  den <<= e;
  return mpq_class(mpz_class(1), den);
}

inline mpq_class ratio(uint64_t num, uint64_t den) {
  mpq_class q{mpz_class(static_cast<unsigned long>(num)), mpz_class(static_cast<unsigned long>(den))};
  q.canonicalize();
  return q;
}

// Every mass lies in [target - residual, target], nothing lands outside the
// support, and masses plus residual sum to one.
inline bool law_matches(const ExactLaw& law, const std::map<Outcome, mpq_class>& target,
                        std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (law.total() != 1) return fail("masses and residual do not sum to 1");
  for (const auto& [o, m] : law.masses) {
    if (!target.count(o)) return fail("unexpected outcome " + to_string(o));
  }
  for (const auto& [o, p] : target) {
    mpq_class gap = p - law.mass(o);
    if (gap < 0 || gap > law.residual) {
      return fail("outcome " + to_string(o) + " mass " + law.mass(o).get_str() + " vs " + p.get_str());
    }
  }
  return true;
}

inline std::map<Outcome, mpq_class> single_round_target(const DiscreteDistribution& d) {
  std::map<Outcome, mpq_class> t;
  for (size_t i = 0; i < d.size(); ++i) t[{int64_t(i)}] = ratio(d.weight(i), d.total());
  return t;
}

inline std::map<Outcome, mpq_class> uniform_target(uint64_t n) {
  std::map<Outcome, mpq_class> t;
  for (uint64_t i = 0; i < n; ++i) t[{int64_t(i)}] = ratio(1, n);
  return t;
}

// Sampler ids used by the exact-law suites. Uniform samplers draw
// Uniform(A) for the distribution's total A.
inline const std::vector<std::string>& exact_law_samplers() {
  static const std::vector<std::string> ids = {"div",   "inv",   "widening", "lemire-rec",
                                               "batch-rec", "lookup", "alias", "ddg",
                                               "ky-ddg", "ky-dg", "interval"};
  return ids;
}

inline bool is_uniform_id(const std::string& s) {
  return s == "div" || s == "widening" || s == "lemire-rec" || s == "batch-rec";
}

// One draw from a fresh context, as a tape program.
inline TapeProgram single_draw(const std::string& id, const DiscreteDistribution& dist,
                               unsigned w) {
  if (is_uniform_id(id)) {
    const UniformMethod m = parse_uniform_method(id);
    const uint64_t n = dist.total();
    return [=](BitSource& src) {
      UniformState st(src, w);
      return Outcome{int64_t(uniform_with(m, st, n))};
    };
  }
  if (id == "inv") {
    return [=](BitSource& src) {
      UniformState st(src, w);
      return Outcome{int64_t(inversion(st, dist))};
    };
  }
  if (id == "lookup") {
    auto t = std::make_shared<LookupTable>(lookup_build(dist));
    return [=](BitSource& src) {
      UniformState st(src, w);
      return Outcome{int64_t(lookup_sample(st, *t))};
    };
  }
  if (id == "alias") {
    auto t = std::make_shared<AliasTable>(alias_build(dist));
    return [=](BitSource& src) {
      UniformState st(src, w);
      return Outcome{int64_t(alias_sample(st, *t))};
    };
  }
  if (id == "ddg") {
    auto t = std::make_shared<DdgTree>(ddg_build(dist));
    return [=](BitSource& src) {
      UniformState st(src, w);
      return Outcome{int64_t(ddg_sample(st, *t))};
    };
  }
  if (id == "ky-ddg") {
    return [=](BitSource& src) { return Outcome{int64_t(ky_ddg(src, dist))}; };
  }
  if (id == "ky-dg") {
    return [=](BitSource& src) {
      KyDgState s;
      return Outcome{int64_t(ky_dg(s, src, dist))};
    };
  }
  if (id == "interval") {
    return [=](BitSource& src) {
      IntervalState s;
      return Outcome{int64_t(hh_interval(s, src, dist))};
    };
  }
  throw std::invalid_argument("unknown sampler id " + id);
}

// The general recycling samplers as state samplers for the invariant check.
inline std::vector<std::pair<std::string, StateSampler>> recycling_state_samplers() {
  return {
      {"inv", [](UniformState& st, const DiscreteDistribution& d) { return inversion(st, d); }},
      {"lookup",
       [](UniformState& st, const DiscreteDistribution& d) {
         return lookup_sample(st, lookup_build(d));
       }},
      {"alias",
       [](UniformState& st, const DiscreteDistribution& d) {
         return alias_sample(st, alias_build(d));
       }},
      {"ddg",
       [](UniformState& st, const DiscreteDistribution& d) {
         return ddg_sample(st, ddg_build(d));
       }},
  };
}

// Bernoulli(1/4) with a broken recycler: U in [0,1) is read bit by bit and
// X = 1 iff U < 1/4. When X = 0 is settled by the tape 0,1 the rescaled
// leftover (U - 1/4) / (3/4) lies in [0, 1/3), so its first bit is known to
// be 0, and that bit is pushed back. A bit is recycled only when it is 0.
inline int64_t leaky_bernoulli_quarter(BitSource& src) {
  if (src.flip(1) == 1) return 0;
  if (src.flip(1) == 0) return 1;
  src.pushback_word(0, 1);
  return 0;
}

inline RoundProgram leaky_round() {
  return [](UniformState& st, const Outcome&) { return leaky_bernoulli_quarter(st.source()); };
}

}  // namespace rr::testing
