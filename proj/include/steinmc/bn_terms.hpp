#pragma once

#include <string>
#include <vector>

#include "steinmc/gamma.hpp"

namespace steinmc {

// A recombination pattern for one role vector: sources for the touched
// slots plus a fill source for every other slot.  Random search patterns
// may instead carry a full per-slot assignment.
struct RolePattern {
  std::vector<Source> head;  // sources for slots 0..head.size()-1
  Source tail = Source::base;
  std::vector<Source> full;  // when non-empty, overrides head/tail

  Source at(std::size_t slot) const {
    if (!full.empty()) return full[slot];
    return slot < head.size() ? head[slot] : tail;
  }
  std::string label() const;
};

struct BnOptions {
  std::size_t frozen_draws = 512;    // common random numbers for the search
  std::size_t random_patterns = 24;  // per role, on top of the structured set
  std::size_t search_top_k = 16;     // per-role shortlist for the joint max
  unsigned workers = 1;
  double zero_tolerance = 0.0;
  // Restricts the magnitude roles (Z, Z') to the three uniform fills; used
  // when comparing against the exhaustive oracle, whose magnitude roles
  // are restricted the same way.
  bool magnitude_roles_uniform_only = false;
  // Structured set: all source choices on the touched slots {0,1,2}
  // crossed with all fill sources.
};

struct BnTerms {
  ValueWithError bn;
  ValueWithError bn_prime;
  ValueWithError delta1_fourth;  // E||Delta_1 f(X)||^4
  double lemma_bound = 0.0;      // 4 sqrt(n)(sqrt(n Bn)+sqrt(n^2 Bn')+sqrt(E||D1 f||^4))
  std::string argmax_bn;
  std::string argmax_bn_prime;
};

// Estimates the two recombination suprema by maximizing the defining
// expectations over the structured pattern family plus random full
// patterns, all on one frozen set of coordinate draws.  Requires a
// symmetric functional.
BnTerms estimate_bn_terms(const Functional& f, const BatchSampler& sampler,
                          std::size_t n, const BnOptions& opts, RngStream rng);

// Exhaustive variant for small n: the indicator role ranges over all 3^n
// recombinations (test oracle; same frozen draws given the same rng).
BnTerms estimate_bn_terms_exhaustive_y(const Functional& f,
                                       const BatchSampler& sampler,
                                       std::size_t n, const BnOptions& opts,
                                       RngStream rng);

}  // namespace steinmc
