#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpcheck/enumerate.hpp"
#include "lpcheck/parser.hpp"
#include "lpcheck/term.hpp"

namespace lpcheck {

class SpecError : public std::runtime_error {
 public:
  explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
};

// A guard is either relational (solved by bounded SLD, usable as a
// generator during enumeration) or a filter (a syntactic check on
// already-bound arguments).
enum class GuardClass { relational, filter };

GuardClass classify_guard(const Atom& g, const Program& aux);

// Filter check on possibly non-ground terms. Every filter builtin is
// closed under instantiation except diff/2; see closed_under_instantiation.
bool eval_filter_guard(const Atom& g);

bool guard_closed_under_instantiation(const Atom& g);

struct SpecTemplateResolved {
  Atom pattern;
  std::vector<Atom> relational;  // aux predicates + list/nat/member/concat/listlen
  std::vector<Atom> filters;     // term/ground/diff/nonlist/eqfunctor + ground uses of the above
};

struct SpecNode {
  enum class Kind { leaf, set_union, set_intersect, set_diff };
  Kind kind = Kind::leaf;
  std::vector<SpecTemplateResolved> templates;
  std::shared_ptr<const SpecNode> lhs, rhs;
};

// A specification is a set of atoms given by pattern comprehensions and
// set algebra over them. It supports two readings:
//  - contains(): membership of a ground atom (a Herbrand interpretation);
//  - pattern_member(): membership of an arbitrary atom, used for
//    call-success specifications, where the set must be closed under
//    substitution.
class Specification {
 public:
  Specification();  // the empty specification

  bool contains(const Atom& a) const;  // a must be ground
  bool pattern_member(const Atom& a) const;

  // All members of depth <= depth over the universe, sorted and deduped.
  std::vector<Atom> enumerate(int depth, GroundUniverse& u) const;

  // All ground instances of a (depth <= depth) that are members, reported
  // as bindings of a's variables. Unlike enumerate() this instantiates the
  // templates against the atom, so open positions matched by ground parts
  // of a cost nothing. Returns nullopt when the scan could not be made
  // exhaustive (universe cap, or too many open positions); callers that
  // need the full set must treat that as inconclusive.
  std::optional<std::vector<Subst>> completions(const Atom& a, int depth,
                                                GroundUniverse& u) const;

  // True when every guard in every template is closed under
  // instantiation (aux guards qualify only if the template's pattern
  // variables are all covered by ground/1 guards). Required of pre/post.
  bool substitution_closed() const;

  std::set<std::pair<std::string, size_t>> predicates() const;
  void extend_signature(Signature& sig) const;

  const Program& aux() const { return *aux_; }
  bool empty_syntax() const;  // no templates anywhere

 private:
  friend class SpecLibrary;
  std::shared_ptr<const SpecNode> root_;
  std::shared_ptr<const Program> aux_;
  int solver_budget_ = 200000;
};

// Resolves the named definitions of a parsed spec file into
// Specification values sharing one auxiliary program.
class SpecLibrary {
 public:
  static SpecLibrary from_file(const SpecFile& f, int solver_budget = 200000);

  const Specification& get(const std::string& name) const;
  bool has(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Specification> specs_;
  std::vector<std::string> order_;
};

struct ApproximateSpec {
  Specification s_compl;
  Specification s_corr;
};

struct CallSuccessSpec {
  Specification pre;
  Specification post;
};

bool atom_in_pre(const CallSuccessSpec& cs, const Atom& a);
bool atom_in_post(const CallSuccessSpec& cs, const Atom& a);

// True iff every conjunct of the ground query is in s. Throws
// std::invalid_argument on a non-ground conjunct.
bool models(const Specification& s, const std::vector<Atom>& ground_query);

// Level mapping: per-predicate measure expressions tried in file order;
// eval returns nullopt where the mapping is undefined (partial mappings
// are legitimate).
class LevelMapping {
 public:
  LevelMapping() = default;
  static LevelMapping from_file(const LevelFile& f);

  std::optional<long> eval(const Atom& ground_atom) const;

  // Metadata-only evaluation over universe cells; falls back to
  // materializing terms when a table lookup or when-guard needs them.
  std::optional<long> eval_cells(const GroundUniverse& u, const std::string& pred,
                                 const std::vector<size_t>& args) const;

  bool empty() const { return entries_.empty(); }

 private:
  std::optional<long> eval_expr(const MeasureExpr& e, const Subst& bind) const;
  std::optional<long> eval_expr_cells(const MeasureExpr& e, const GroundUniverse& u,
                                      const std::map<std::string, size_t>& bind) const;

  std::vector<LevelEntry> entries_;
  std::map<std::string, LevelTable> tables_;
};

// Listlen in the sense used by level mappings and guards: the length of
// the cons spine, with a non-list tail contributing nothing.
long spine_length(const Term& t);

// Bounded SLD over a definite program used to solve guard conjunctions.
// Solutions are substitutions over the query's variables; bindings may
// contain fresh variables (partial solutions), which enumeration fills
// by an odometer afterwards. Throws SpecError when the budget runs out.
class GuardSolver {
 public:
  GuardSolver(const Program& aux, int budget);

  // depth_bounds: optional per-variable caps; a branch that binds a
  // capped variable to a deeper term is pruned (sound: instantiation
  // only deepens terms).
  std::vector<Subst> solve(const std::vector<Atom>& goals,
                           const std::map<std::string, int>* depth_bounds = nullptr);

  // Decision form for ground goals.
  bool provable(const std::vector<Atom>& goals);

 private:
  const Program& aux_;
  int budget_;
};

}  // namespace lpcheck
