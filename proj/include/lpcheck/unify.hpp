#pragma once

#include <optional>

#include "lpcheck/term.hpp"

namespace lpcheck {

// Most general unifier with occurs check, idempotent and relevant (only
// variables of the inputs appear in it). Variable-to-variable conflicts
// bind left to right, so unify(pattern, target) keeps target's names.
std::optional<Subst> unify(const Term& a, const Term& b);
std::optional<Subst> unify(const Atom& a, const Atom& b);

// One-way matching: theta with general*theta == specific, touching only
// variables of general. Repeated variables must match consistently.
std::optional<Subst> match(const Term& general, const Term& specific);
std::optional<Subst> match(const Atom& general, const Atom& specific);

// instance_of(a, b): a is an instance of b
bool instance_of(const Atom& a, const Atom& b);

// Variant of c whose variables avoid the given set. Only colliding
// variables are renamed, by appending the smallest free numeric suffix.
Clause rename_apart(const Clause& c, const std::vector<std::string>& avoid);

// Fresh-name source for derivations; never hands out a name in avoid().
class VarNamer {
public:
  void avoid(const std::vector<std::string>& names);
  std::string fresh();
  // clause variant with every variable renamed fresh
  Clause rename_clause(const Clause& c);

private:
  std::set<std::string> avoid_;
  unsigned long counter_ = 0;
};

// Canonical renaming V0, V1, ... in order of first occurrence; two
// objects are variants iff their canonical forms are equal.
Atom canonical(const Atom& a);
std::vector<Atom> canonical(const std::vector<Atom>& q);
bool variants(const std::vector<Atom>& a, const std::vector<Atom>& b);

}  // namespace lpcheck
