#pragma once

#include <limits>
#include <vector>

#include "lpcheck/enumerate.hpp"
#include "lpcheck/parallel.hpp"
#include "lpcheck/term.hpp"

namespace lpcheck {

// Result of iterating the immediate-consequence operator over ground
// clause instances whose atoms all stay within a depth bound. The set
// under-approximates the least model: an atom of depth d is missed when
// all its derivations pass through atoms deeper than d, so callers must
// present results as "up to bound".
struct BoundedModel {
  std::vector<Atom> atoms;     // sorted, deduplicated
  std::vector<Atom> censored;  // atoms first derived on the final wave
                               // when iteration stopped at the cap
  bool saturated = false;      // a wave added nothing, genuine fixpoint
  int waves = 0;               // consequence steps actually run

  bool contains(const Atom& a) const;
  // atoms minus censored: the part safe to compare against other sets
  std::vector<Atom> settled() const;
};

inline constexpr int kNoIterationCap = std::numeric_limits<int>::max();

// Clauses are read as definite clauses; cut positions are ignored.
BoundedModel bounded_least_model(const Program& p, int depth, GroundUniverse& u,
                                 int iteration_cap = kNoIterationCap,
                                 ExecMode mode = default_exec_mode());

// Naive rederivation of the same set from the definition: enumerate
// bindings up to the depth, keep instances whose atoms all fit, iterate
// until nothing changes. Deliberately shares no fixpoint machinery with
// bounded_least_model so the two can cross-check each other in tests.
std::vector<Atom> reference_least_model(const Program& p, int depth, GroundUniverse& u);

}  // namespace lpcheck
