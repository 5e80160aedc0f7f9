#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "lpcheck/term.hpp"

namespace lpcheck {

// Verdicts are three-valued on purpose: bounded enumeration can prove a
// refutation outright, but a pass only holds up to the explored bound,
// and exhausted budgets leave the question open.
enum class Verdict { verified_up_to_bound, refuted, inconclusive };

const char* verdict_name(Verdict v);

struct Counterexample {
  enum class Kind {
    uncovered_atom,
    bad_clause_instance,
    level_violation,
    unsuitable_selection,
    adjustable_cover_failure,
    missing_answer,
  };
  Kind kind;
  std::vector<Atom> atoms;                 // the offending ground objects
  std::vector<Atom> query;                 // derivation or query context
  std::optional<Clause> instance;          // offending clause instance
  std::optional<size_t> clause_index;      // index into the checked program
  std::vector<std::pair<std::string, Subst>> substs;  // named substitutions
  std::vector<std::pair<std::string, std::string>> details;

  static const char* kind_name(Kind k);
};

struct Report {
  std::string check;  // which check produced this report
  Verdict verdict = Verdict::inconclusive;
  std::optional<Counterexample> witness;
  int bound = 0;
  long instances_enumerated = 0;
  long atoms_checked = 0;
  std::string note;  // human context: budget exhaustion, evidence used, ...

  bool verified() const { return verdict == Verdict::verified_up_to_bound; }
  bool refuted() const { return verdict == Verdict::refuted; }
};

std::string to_text(const Report& r);
nlohmann::json to_json(const Report& r);

}  // namespace lpcheck
