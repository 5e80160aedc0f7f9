#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lpcheck/enumerate.hpp"
#include "lpcheck/spec.hpp"
#include "lpcheck/term.hpp"

namespace lpcheck {

// One culprit located by a diagnosis sweep: for incompleteness a spec
// atom no clause instance covers, for incorrectness a ground clause
// instance whose body the spec accepts while rejecting the head.
struct Culprit {
  Atom atom;                           // the uncovered atom, or the bad head
  std::optional<Clause> instance;      // the violating instance (incorrectness)
  std::optional<size_t> clause_index;  // locus in the program, when one exists
  bool definitive = false;             // the failure survives any larger bound
};

// Culprits of one predicate, in enumeration order.
struct CulpritGroup {
  std::string predicate;  // name/arity
  std::vector<Culprit> culprits;
};

struct Diagnosis {
  enum class Kind { incompleteness, incorrectness };
  Kind kind = Kind::incompleteness;
  int bound = 0;
  std::vector<CulpritGroup> groups;
  size_t total = 0;        // culprits across all groups
  bool truncated = false;  // the cap cut the listing short; more exist
  std::string open_note;   // nonempty when part of the sweep could not settle

  // Empty means the sweep settled everything and found nothing, which is
  // exactly when the corresponding check verifies up to the bound.
  bool empty() const { return total == 0 && open_note.empty(); }
};

// Every spec atom within depth that no clause instance covers (body
// within the atom's depth plus delta, all body atoms in s). The listing
// is exhaustive up to cap, grouped by predicate; the suggested locus is
// the first clause whose head matches the atom, absent when the
// procedure has no candidate clause at all.
Diagnosis diagnose_incompleteness(const Program& p, const Specification& s, int depth,
                                  GroundUniverse& u, int delta = 2, size_t cap = 50);

// Every ground clause instance within depth whose body s accepts while
// rejecting the head, with the clause it instantiates. Exhaustive up to
// cap, grouped by the head predicate.
Diagnosis diagnose_incorrectness(const Program& p, const Specification& s, int depth,
                                 GroundUniverse& u, size_t cap = 50);

std::string to_text(const Diagnosis& d);
nlohmann::json to_json(const Diagnosis& d);

}  // namespace lpcheck
