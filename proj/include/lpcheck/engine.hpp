#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "lpcheck/enumerate.hpp"
#include "lpcheck/report.hpp"
#include "lpcheck/spec.hpp"
#include "lpcheck/term.hpp"

namespace lpcheck {

struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A goal is an atom to resolve, or the cut barrier a clause body leaves
// behind. A barrier remembers which node's alternatives the cut discards
// and how many truncation events had happened when it was introduced, so
// a commit can tell whether its guard search was exhaustive.
struct Goal {
  enum class Kind { atom, barrier };
  Kind kind = Kind::atom;
  Atom atom;
  size_t token = 0;
  long trunc_mark = 0;

  explicit Goal(Atom a) : atom(std::move(a)) {}
  static Goal barrier(size_t token, long trunc_mark) {
    Goal g{Atom("!", {})};
    g.kind = Kind::barrier;
    g.token = token;
    g.trunc_mark = trunc_mark;
    return g;
  }
};

using Query = std::vector<Goal>;

Query make_query(const std::vector<Atom>& atoms);
std::string query_str(const Query& q);

struct SldNode {
  enum class Leaf { inner, success, failure, budget, pruned };

  Query query;
  std::optional<size_t> in_program;  // program supplying the incoming clause
  std::optional<size_t> in_clause;   // clause index within that program
  Subst in_mgu;
  std::optional<size_t> selected;        // selected goal position
  std::optional<size_t> chosen_program;  // program the children come from
  bool empty_choice = false;             // the rule declined to choose one
  Leaf leaf = Leaf::inner;
  std::vector<std::unique_ptr<SldNode>> children;
};

struct Answer {
  std::vector<Atom> instance;  // root query under the branch substitution
  Subst theta;                 // restricted to the root query variables
};

struct SldTree {
  std::unique_ptr<SldNode> root;
  std::vector<Atom> root_query;
  std::vector<Answer> answers;  // deduplicated up to variance, in search order
  long nodes = 0;
  bool budget_exhausted = false;
  // a cut committed although its guard search had been truncated, so the
  // committed path may not be the genuine first success
  bool unsafe_prune = false;

  bool finite() const { return !budget_exhausted; }
};

inline const std::vector<Answer>& answers(const SldTree& t) { return t.answers; }

// Returns the position of the goal to select; must point at an atom.
using SelectionRule = std::function<size_t(const Query&)>;

SelectionRule leftmost_selection();

// A c-selection rule picks an atom and a program to resolve it with, or
// no program at all, which turns the node into a leaf.
struct CsChoice {
  size_t position = 0;
  std::optional<size_t> program;
};

using CSelectionRule = std::function<CsChoice(const Query& q, size_t depth)>;

CSelectionRule cs_fixed(size_t program_index);
CSelectionRule cs_alternating(size_t program_count);

// Chooses the first program whose paired spec part admits every ground
// instance of the selected atom that the whole spec admits, checking
// instances up to the given depth. Atoms too deep to enumerate count as
// vacuously admitted, in line with the bounded reading of every check.
CSelectionRule cs_suitability(Specification whole, std::vector<Specification> parts,
                              int depth, GroundUniverse& u);

struct CsTableEntry {
  Atom pattern;
  std::optional<size_t> program;
};

// First entry whose pattern the selected atom instantiates wins; no
// matching entry means no program is chosen.
CSelectionRule cs_table(std::vector<CsTableEntry> entries);

// Cut positions are ignored by both of these: they build the unpruned
// tree of the program read as a definite program.
SldTree build_sld_tree(const Program& p, const std::vector<Atom>& query, long budget,
                       const SelectionRule& rule = leftmost_selection());
SldTree build_cssld_tree(const std::vector<Program>& programs, const std::vector<Atom>& query,
                         const CSelectionRule& rule, long budget);

// Leftmost selection with last-clause cut pruning: a commit keeps the
// first guard success found and discards the remaining alternatives of
// the node that applied the cut clause. A truncated guard search flips
// unsafe_prune instead of silently committing.
SldTree build_pruned_ld_tree(const Program& p, const std::vector<Atom>& query, long budget);

// Monitors every LD-derivation of each query (cut read as control only,
// so the unpruned derivation space): each selected atom must lie in pre,
// each call's computed answer in post. Queries must lie in pre.
Report check_cs_correct_runtime(const Program& p, const CallSuccessSpec& cs,
                                const std::vector<Atom>& queries, long budget);

std::string tree_text(const SldTree& t);
nlohmann::json tree_json(const SldTree& t);

}  // namespace lpcheck
