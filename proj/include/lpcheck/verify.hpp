#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lpcheck/engine.hpp"
#include "lpcheck/enumerate.hpp"
#include "lpcheck/parallel.hpp"
#include "lpcheck/report.hpp"
#include "lpcheck/spec.hpp"
#include "lpcheck/term.hpp"

namespace lpcheck {

// A decomposition of program and specification used by clause-selection
// pruning: programs[i] answers for atoms admitted by parts[i], and the
// whole specification is the union of the parts.
struct Split {
  std::vector<Program> programs;
  std::vector<Specification> parts;
  Specification whole;
};

// Checks the split invariants: every clause of every part program occurs
// in p (syntactically, up to variable renaming), and the union of the
// part specs equals the whole up to the depth bound.
Report validate_split(const Split& split, const Program& p, int depth, GroundUniverse& u);

// The termination-flavoured half of a completeness argument. Coverage
// alone only gives completeness for queries with finite SLD-trees; the
// evidence closes that gap in one of three ways.
struct CompletenessEvidence {
  enum class Kind { finite_trees, recurrent, acceptable };
  Kind kind = Kind::finite_trees;
  std::vector<Atom> queries;  // finite_trees: queries covering the spec atoms
  LevelMapping lm;            // recurrent and acceptable
  Specification s_prime;      // acceptable

  static CompletenessEvidence finite(std::vector<Atom> queries);
  static CompletenessEvidence recurrent(LevelMapping lm);
  static CompletenessEvidence acceptable(LevelMapping lm, Specification s_prime);
};

// The shared single-atom coverage probe. Searches ground instances of c
// with head a and body atoms within body_bound for one accepted by the
// callback (which sees the ground body). The status separates a search
// that exhausted all possible instances (head mismatch, or every body
// variable forced by the head) from one that only exhausted the bound.
enum class CoverStatus { not_unifiable, covered, failed_exhaustive, failed_bounded };

struct CoverResult {
  CoverStatus status = CoverStatus::not_unifiable;
  std::optional<Clause> instance;  // the covering instance on success
  long tried = 0;
};

using BodyAccept = std::function<bool(const Atom& head, const std::vector<Atom>& body)>;

CoverResult probe_cover(const Clause& c, const Atom& a, int body_bound, GroundUniverse& u,
                        const BodyAccept& accept);

// Every ground instance of every clause (all atoms within depth) must
// map an S-true body to an S-true head.
Report check_correctness(const Program& p, const Specification& s, int depth, GroundUniverse& u,
                         ExecMode mode = default_exec_mode());

// Every spec atom within depth must be the head of a clause instance
// whose body atoms are all in s. Bodies are searched up to the atom's
// own depth plus delta; a miss within that margin is only inconclusive
// unless the search was exhaustive for every clause.
Report check_covered(const Program& p, const Specification& s, int depth, GroundUniverse& u,
                     int delta = 2);

// Strict level decrease from head to every body atom, over all clause
// instances within depth. An instance with an undefined level blocks
// verification (inconclusive) but never refutes.
Report check_recurrent(const Program& p, const LevelMapping& lm, int depth, GroundUniverse& u,
                       ExecMode mode = default_exec_mode());

// Like check_recurrent, but the decrease to body atom i is only required
// when s_prime holds for the body prefix before i. Includes the
// correctness check of p against s_prime that the definition assumes.
Report check_acceptable(const Program& p, const LevelMapping& lm, const Specification& s_prime,
                        int depth, GroundUniverse& u);

// Coverage under its completeness-theorem reading: the same check as
// check_covered, reported under the semi-completeness heading.
Report check_semi_completeness(const Program& p, const Specification& s, int depth,
                               GroundUniverse& u, int delta = 2);

// Completeness of p w.r.t. s, via the chosen evidence. With finite-tree
// evidence this is a direct test: each spec atom must be an instance of
// a supplied query whose SLD-tree is finite within budget, and must then
// appear among that tree's answers (a finite tree enumerates all of
// them, so a missing atom is a genuine refutation). With recurrence or
// acceptability evidence it is coverage plus the decrease check.
Report check_completeness(const Program& p, const Specification& s, int depth,
                          const CompletenessEvidence& ev, GroundUniverse& u,
                          long budget = 200000, int delta = 2);

// Every spec atom must have a covering instance that also strictly
// decreases a (possibly partial) level mapping into the body.
Report check_recurrently_covered(const Program& p, const Specification& s, const LevelMapping& lm,
                                 int depth, GroundUniverse& u, int delta = 2);

// Is part i admissible for the atom: no ground instance of a within
// depth may lie in the whole spec but outside parts[i].
Report check_suitable(const Split& split, const Atom& a, size_t i, int depth, GroundUniverse& u);

// Completeness of a clause-selection tree: per-part coverage of each
// parts[i] by programs[i] w.r.t. the whole spec, suitability of the
// chosen program at every node that selected one (and no node left
// without a program), and the evidence (tree finiteness, recurrence, or
// acceptability under leftmost selection). The direct oracle
// tree_complete_wrt runs afterwards as a cross-check.
Report check_cssld_completeness(const Program& p, const Split& split, const SldTree& tree,
                                const CompletenessEvidence& ev, int depth, GroundUniverse& u,
                                int delta = 2);

// The brute-force completeness oracle: every ground instance of the
// root query within depth that s satisfies must be an instance of one
// of the tree's answers. Requires a finite tree.
Report tree_complete_wrt(const SldTree& tree, const Specification& s, int depth,
                         GroundUniverse& u);

// One head-generalization candidate for the cut-clause coverage
// conditions: head_rho = head of the clause under rho, with the ground
// eta bindings enumerated for the guard atoms before the cut.
// etas_exhaustive is false when that enumeration had to stop early, so
// the eta list may be missing members.
struct AdjustCandidate {
  size_t clause_index = 0;
  Subst rho;
  Atom head_rho;
  std::vector<Subst> etas;
  bool etas_exhaustive = true;
};

// The rho/eta candidate space for one atom: maximally general
// pre-instances of each cut clause head that a instantiates (sharing
// between head variables explored at whole-variable granularity), and
// for each, the ground guard instantiations whose atoms all lie in
// post. rho_exhaustive is false when the candidate cap was hit.
struct AdjustCandidates {
  std::vector<AdjustCandidate> list;
  bool rho_exhaustive = true;
};

AdjustCandidates adjust_candidates(const Program& p, const CallSuccessSpec& cs, const Atom& a,
                                   int depth, GroundUniverse& u, int delta = 2,
                                   long rho_cap = 4096);

// Cut-aware coverage: each spec atom must be covered by a cut-free
// clause, or satisfy the three cut-clause conditions (prefix coverage,
// and residual coverage under every rho/eta candidate). Also checks the
// side condition that the spec lies within post. Cuts must sit in the
// last clause of their procedure.
Report check_adjustably_covered(const Program& p, const Specification& s,
                                const CallSuccessSpec& cs, int depth, GroundUniverse& u,
                                int delta = 2, long rho_cap = 4096);

// Completeness of the pruned LD-tree for an atomic query: conjunction
// of tree finiteness within budget, the call-success runtime check,
// spec-within-post, and adjustable coverage, cross-checked against the
// direct oracle on the pruned tree. Throws std::invalid_argument when
// the query is not in pre.
Report check_cut_completeness(const Program& p, const Specification& s, const CallSuccessSpec& cs,
                              const Atom& query, int depth, long budget, GroundUniverse& u,
                              int delta = 2);

// Everything a refutation witness may need to be re-checked against the
// inputs of its originating check. Only the fields that check used must
// be set; revalidate_witness throws std::invalid_argument on a missing
// required field.
struct RevalidateContext {
  const Program* program = nullptr;
  const Specification* spec = nullptr;
  const LevelMapping* lm = nullptr;
  const Specification* s_prime = nullptr;
  const CallSuccessSpec* cs = nullptr;
  const Split* split = nullptr;
  const SldTree* tree = nullptr;
  GroundUniverse* universe = nullptr;
  int depth = 0;
  long budget = 200000;
  int delta = 2;
};

// Recomputes the violated condition on the witness payload alone.
// Returns false when the witness no longer demonstrates a violation.
// Reports without a refuted verdict revalidate trivially.
bool revalidate_witness(const Report& r, const RevalidateContext& ctx);

}  // namespace lpcheck
