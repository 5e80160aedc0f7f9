#include "lpcheck/spec.hpp"

#include <algorithm>
#include <cassert>

#include "lpcheck/unify.hpp"

namespace lpcheck {

namespace {

bool is_relational_builtin(const std::string& p, size_t n) {
  return (p == "list" && n == 1) || (p == "nat" && n == 1) || (p == "member" && n == 2) ||
         (p == "concat" && n == 3) || (p == "listlen" && n == 2);
}

bool is_filter_builtin(const std::string& p, size_t n) {
  return (p == "term" && n == 1) || (p == "ground" && n == 1) || (p == "diff" && n == 2) ||
         (p == "nonlist" && n == 1) || (p == "eqfunctor" && n == 2);
}

bool is_builtin_guard(const std::string& p, size_t n) {
  return is_relational_builtin(p, n) || is_filter_builtin(p, n);
}

// Clause encodings of the relational builtins, used when a guard acts
// as a generator during enumeration. listlen/2 is handled natively by
// the solver because its second argument is an integer literal.
const Program& builtin_guard_program() {
  static const Program p = parse_program(
      "list([]).\n"
      "list([_|T]) :- list(T).\n"
      "nat(0).\n"
      "nat(s(X)) :- nat(X).\n"
      "member(X, [X|_]).\n"
      "member(X, [_|T]) :- member(X, T).\n"
      "concat([], L, L).\n"
      "concat([H|T], L, [H|M]) :- concat(T, L, M).\n");
  return p;
}

// Walk a cons spine; reports how it ends.
enum class SpineEnd { nil, var, other };

SpineEnd spine_end(const Term& t, std::vector<const Term*>* elems = nullptr) {
  const Term* cur = &t;
  while (cur->is_fun() && cur->name() == kConsFunctor && cur->args().size() == 2) {
    if (elems) elems->push_back(&cur->args()[0]);
    cur = &cur->args()[1];
  }
  if (cur->is_var()) return SpineEnd::var;
  if (cur->is_fun() && cur->name() == "[]" && cur->args().empty()) return SpineEnd::nil;
  return SpineEnd::other;
}

bool is_ground_nat(const Term& t) {
  const Term* cur = &t;
  while (cur->is_fun() && cur->name() == "s" && cur->args().size() == 1) cur = &cur->args()[0];
  return cur->is_fun() && cur->name() == "0" && cur->args().empty();
}

std::optional<long> int_literal(const Term& t) {
  if (!t.is_const()) return std::nullopt;
  const std::string& s = t.name();
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return isdigit((unsigned char)c); }))
    return std::nullopt;
  return std::stol(s);
}

}  // namespace

long spine_length(const Term& t) { return t.spine_len(); }

bool eval_filter_guard(const Atom& g) {
  const auto& a = g.args;
  if (g.pred == "term") return true;
  if (g.pred == "ground") return a[0].ground();
  if (g.pred == "diff") return !(a[0] == a[1]);
  if (g.pred == "eqfunctor")
    return a[0].is_fun() && a[1].is_fun() && a[0].name() == a[1].name() &&
           a[0].args().size() == a[1].args().size();
  if (g.pred == "list") return spine_end(a[0]) == SpineEnd::nil;
  if (g.pred == "nonlist") return spine_end(a[0]) == SpineEnd::other;
  if (g.pred == "nat") return is_ground_nat(a[0]);
  if (g.pred == "member") {
    std::vector<const Term*> elems;
    spine_end(a[1], &elems);
    for (const Term* e : elems)
      if (*e == a[0]) return true;
    return false;
  }
  if (g.pred == "concat") {
    std::vector<const Term*> ks;
    if (spine_end(a[0], &ks) != SpineEnd::nil) return false;
    const Term* m = &a[2];
    for (const Term* k : ks) {
      if (!(m->is_fun() && m->name() == kConsFunctor)) return false;
      if (!(m->args()[0] == *k)) return false;
      m = &m->args()[1];
    }
    return *m == a[1];
  }
  if (g.pred == "listlen") {
    std::vector<const Term*> elems;
    if (spine_end(a[0], &elems) != SpineEnd::nil) return false;
    auto n = int_literal(a[1]);
    return n && *n == (long)elems.size();
  }
  throw SpecError("guard '" + g.pred + "/" + std::to_string(a.size()) +
                  "' has no syntactic evaluation");
}

GuardClass classify_guard(const Atom& g, const Program& aux) {
  size_t n = g.args.size();
  if (is_filter_builtin(g.pred, n)) return GuardClass::filter;
  if (is_relational_builtin(g.pred, n)) return GuardClass::relational;
  for (const Clause& c : aux.clauses)
    if (c.head.pred == g.pred && c.head.args.size() == n) return GuardClass::relational;
  throw SpecError("unknown builtin guard '" + g.pred + "/" + std::to_string(n) + "'");
}

bool guard_closed_under_instantiation(const Atom& g) {
  // diff/2 can be falsified by instantiating two distinct open terms to
  // the same ground term; every other builtin only ever gains instances.
  return is_builtin_guard(g.pred, g.args.size()) && g.pred != "diff";
}

// ---- guard solver ----

GuardSolver::GuardSolver(const Program& aux, int budget) : aux_(aux), budget_(budget) {}

namespace {

struct SolveCtx {
  const Program& aux;
  const std::map<std::string, int>* bounds;
  long budget;
  VarNamer namer;
  const std::function<bool(const Subst&)>* emit;  // false = stop search
};

bool bounds_ok(const SolveCtx& ctx, const Subst& acc) {
  if (!ctx.bounds) return true;
  for (const auto& [v, cap] : *ctx.bounds) {
    const Term* t = acc.lookup(v);
    if (t && t->depth() > cap) return false;
  }
  return true;
}

// Returns false when the emit callback asked to stop.
bool solve_rec(SolveCtx& ctx, const std::vector<Atom>& goals, const Subst& acc) {
  if (goals.empty()) return (*ctx.emit)(acc);
  if (--ctx.budget < 0) throw SpecError("guard solver budget exhausted");

  const Atom& g = goals.front();
  std::vector<Atom> rest(goals.begin() + 1, goals.end());

  if (g.pred == "listlen" && g.args.size() == 2) {
    // native: relate a cons spine to an integer literal
    std::vector<const Term*> elems;
    SpineEnd end = spine_end(g.args[0], &elems);
    auto n = int_literal(g.args[1]);
    if (end == SpineEnd::nil) {
      if (g.args[1].is_var()) {
        Subst theta;
        theta.bind(g.args[1].name(), Term::fun(std::to_string(elems.size())));
        Subst nacc = acc.compose(theta);
        if (!bounds_ok(ctx, nacc)) return true;
        return solve_rec(ctx, theta.apply(rest), nacc);
      }
      if (n && *n == (long)elems.size()) return solve_rec(ctx, rest, acc);
      return true;
    }
    if (end == SpineEnd::var && n) {
      long need = *n - (long)elems.size();
      if (need < 0) return true;
      std::vector<Term> fresh;
      for (long i = 0; i < need; i++) fresh.push_back(Term::var(ctx.namer.fresh()));
      auto theta = unify(g.args[0], mk_list(std::move(fresh), mk_nil()));
      if (!theta) return true;
      Subst nacc = acc.compose(*theta);
      if (!bounds_ok(ctx, nacc)) return true;
      return solve_rec(ctx, theta->apply(rest), nacc);
    }
    return true;  // unresolvable or a non-list: fails
  }

  const Program& defs =
      is_relational_builtin(g.pred, g.args.size()) ? builtin_guard_program() : ctx.aux;
  for (size_t ci : defs.clauses_for(g)) {
    Clause var = ctx.namer.rename_clause(defs.clauses[ci]);
    auto theta = unify(g, var.head);
    if (!theta) continue;
    Subst nacc = acc.compose(*theta);
    if (!bounds_ok(ctx, nacc)) continue;
    std::vector<Atom> ngoals;
    ngoals.reserve(var.body.size() + rest.size());
    for (const Atom& b : var.body) ngoals.push_back(theta->apply(b));
    for (const Atom& r : rest) ngoals.push_back(theta->apply(r));
    if (!solve_rec(ctx, ngoals, nacc)) return false;
  }
  return true;
}

}  // namespace

std::vector<Subst> GuardSolver::solve(const std::vector<Atom>& goals,
                                      const std::map<std::string, int>* depth_bounds) {
  std::vector<Subst> out;
  std::vector<std::string> qvars = vars_of(goals);
  std::function<bool(const Subst&)> emit = [&](const Subst& acc) {
    out.push_back(acc.restricted_to(qvars));
    return true;
  };
  SolveCtx ctx{aux_, depth_bounds, budget_, VarNamer{}, &emit};
  ctx.namer.avoid(qvars);
  solve_rec(ctx, goals, Subst{});
  return out;
}

bool GuardSolver::provable(const std::vector<Atom>& goals) {
  bool found = false;
  std::function<bool(const Subst&)> emit = [&](const Subst&) {
    found = true;
    return false;
  };
  SolveCtx ctx{aux_, nullptr, budget_, VarNamer{}, &emit};
  ctx.namer.avoid(vars_of(goals));
  solve_rec(ctx, goals, Subst{});
  return found;
}

// ---- specifications ----

Specification::Specification()
    : root_(std::make_shared<SpecNode>()), aux_(std::make_shared<Program>()) {}

namespace {

// Evaluate one guard under a completed match. Ground relational guards
// reduce to their syntactic reading; aux guards need a proof.
bool eval_guard_under(const Atom& g, const Subst& theta, const Program& aux, int budget) {
  Atom inst = theta.apply(g);
  if (is_builtin_guard(inst.pred, inst.args.size())) return eval_filter_guard(inst);
  if (!inst.ground()) return false;
  return GuardSolver(aux, budget).provable({inst});
}

bool template_admits(const SpecTemplateResolved& t, const Atom& a, const Program& aux,
                     int budget) {
  auto theta = match(t.pattern, a);
  if (!theta) return false;
  for (const Atom& g : t.relational)
    if (!eval_guard_under(g, *theta, aux, budget)) return false;
  for (const Atom& g : t.filters)
    if (!eval_guard_under(g, *theta, aux, budget)) return false;
  return true;
}

bool node_member(const SpecNode& n, const Atom& a, const Program& aux, int budget) {
  switch (n.kind) {
    case SpecNode::Kind::leaf:
      for (const auto& t : n.templates)
        if (template_admits(t, a, aux, budget)) return true;
      return false;
    case SpecNode::Kind::set_union:
      return node_member(*n.lhs, a, aux, budget) || node_member(*n.rhs, a, aux, budget);
    case SpecNode::Kind::set_intersect:
      return node_member(*n.lhs, a, aux, budget) && node_member(*n.rhs, a, aux, budget);
    case SpecNode::Kind::set_diff:
      return node_member(*n.lhs, a, aux, budget) && !node_member(*n.rhs, a, aux, budget);
  }
  return false;
}

}  // namespace

bool Specification::contains(const Atom& a) const {
  if (!a.ground())
    throw std::invalid_argument("specification membership asked for non-ground atom " + a.str());
  return node_member(*root_, a, *aux_, solver_budget_);
}

bool Specification::pattern_member(const Atom& a) const {
  return node_member(*root_, a, *aux_, solver_budget_);
}

namespace {

void enum_template(const SpecTemplateResolved& t, const Program& aux, int budget, int depth,
                   GroundUniverse& u, std::set<Atom>& out) {
  auto bounds = var_depth_bounds(t.pattern, depth);
  if (!bounds) return;

  std::vector<Subst> sols;
  if (t.relational.empty()) {
    sols.emplace_back();
  } else {
    sols = GuardSolver(aux, budget).solve(t.relational, &*bounds);
  }

  for (const Subst& sigma : sols) {
    Atom pat = sigma.apply(t.pattern);
    auto b2 = var_depth_bounds(pat, depth);
    if (!b2) continue;
    std::vector<std::string> vars = vars_of(pat);
    VarSpace vs = make_var_space(vars, *b2, u);
    std::vector<size_t> cells;
    for (size_t idx = 0; idx < vs.total; idx++) {
      vs.decode(idx, cells);
      Subst delta;
      for (size_t k = 0; k < vars.size(); k++) delta.bind(vars[k], u.term(cells[k]));
      Atom cand = delta.apply(pat);
      auto theta = match(t.pattern, cand);
      bool ok = theta.has_value();
      for (size_t gi = 0; ok && gi < t.filters.size(); gi++)
        ok = eval_filter_guard(theta->apply(t.filters[gi]));
      if (ok) out.insert(std::move(cand));
    }
  }
}

void node_enumerate(const SpecNode& n, const Program& aux, int budget, int depth,
                    GroundUniverse& u, std::set<Atom>& out) {
  switch (n.kind) {
    case SpecNode::Kind::leaf:
      for (const auto& t : n.templates) enum_template(t, aux, budget, depth, u, out);
      return;
    case SpecNode::Kind::set_union:
      node_enumerate(*n.lhs, aux, budget, depth, u, out);
      node_enumerate(*n.rhs, aux, budget, depth, u, out);
      return;
    case SpecNode::Kind::set_intersect:
    case SpecNode::Kind::set_diff: {
      std::set<Atom> left;
      node_enumerate(*n.lhs, aux, budget, depth, u, left);
      bool want = n.kind == SpecNode::Kind::set_intersect;
      for (const Atom& a : left)
        if (node_member(*n.rhs, a, aux, budget) == want) out.insert(a);
      return;
    }
  }
}

}  // namespace

std::vector<Atom> Specification::enumerate(int depth, GroundUniverse& u) const {
  u.ensure_depth(depth);
  std::set<Atom> out;
  node_enumerate(*root_, *aux_, solver_budget_, depth, u, out);
  return {out.begin(), out.end()};
}

namespace {

// Largest leftover odometer completions() will scan per template solution.
constexpr size_t kCompletionScan = size_t{1} << 20;

// Like enum_template, but instantiated against a query atom: unify the
// (renamed-apart) pattern with the atom first, then solve the guards and
// sweep only the variables that survive. Returns false when the sweep had
// to be cut short, in which case `out` may be missing members.
bool template_completions(const SpecTemplateResolved& t, const Atom& a, const Program& aux,
                          int budget, int depth, GroundUniverse& u, std::set<Atom>& out) {
  VarNamer namer;
  namer.avoid(vars_of(a));
  Clause shell;
  shell.head = t.pattern;
  shell.body = t.relational;
  shell.body.insert(shell.body.end(), t.filters.begin(), t.filters.end());
  Clause rn = namer.rename_clause(shell);
  auto fil_begin = rn.body.begin() + (std::ptrdiff_t)t.relational.size();
  std::vector<Atom> rel(rn.body.begin(), fil_begin);
  std::vector<Atom> fil(fil_begin, rn.body.end());

  auto theta0 = unify(rn.head, a);
  if (!theta0) return true;  // no members from this template; still exhaustive
  Atom pat = theta0->apply(rn.head);
  auto bounds = var_depth_bounds(pat, depth);
  if (!bounds) return true;

  std::vector<Subst> sols;
  if (rel.empty()) {
    sols.emplace_back();
  } else {
    std::vector<Atom> goals;
    goals.reserve(rel.size());
    for (const Atom& g : rel) goals.push_back(theta0->apply(g));
    sols = GuardSolver(aux, budget).solve(goals, &*bounds);
  }

  for (const Subst& sigma : sols) {
    Atom pat2 = sigma.apply(pat);
    auto b2 = var_depth_bounds(pat2, depth);
    if (!b2) continue;
    std::vector<std::string> vars = vars_of(pat2);
    int need = 0;
    for (const std::string& v : vars) need = std::max(need, b2->at(v));
    if (u.ensure_depth(need) < need) return false;
    VarSpace vs = make_var_space(vars, *b2, u);
    if (vs.total > kCompletionScan) return false;
    std::vector<size_t> cells;
    for (size_t idx = 0; idx < vs.total; idx++) {
      vs.decode(idx, cells);
      Subst delta;
      for (size_t k = 0; k < vars.size(); k++) delta.bind(vars[k], u.term(cells[k]));
      Atom cand = delta.apply(pat2);
      auto theta = match(rn.head, cand);
      bool ok = theta.has_value();
      for (size_t gi = 0; ok && gi < fil.size(); gi++)
        ok = eval_filter_guard(theta->apply(fil[gi]));
      if (ok) out.insert(std::move(cand));
    }
  }
  return true;
}

bool node_completions(const SpecNode& n, const Atom& a, const Program& aux, int budget,
                      int depth, GroundUniverse& u, std::set<Atom>& out) {
  switch (n.kind) {
    case SpecNode::Kind::leaf: {
      bool full = true;
      for (const auto& t : n.templates)
        full = template_completions(t, a, aux, budget, depth, u, out) && full;
      return full;
    }
    case SpecNode::Kind::set_union: {
      bool l = node_completions(*n.lhs, a, aux, budget, depth, u, out);
      bool r = node_completions(*n.rhs, a, aux, budget, depth, u, out);
      return l && r;
    }
    case SpecNode::Kind::set_intersect:
    case SpecNode::Kind::set_diff: {
      std::set<Atom> left;
      bool full = node_completions(*n.lhs, a, aux, budget, depth, u, left);
      bool want = n.kind == SpecNode::Kind::set_intersect;
      for (const Atom& x : left)
        if (node_member(*n.rhs, x, aux, budget) == want) out.insert(x);
      return full;
    }
  }
  return false;
}

}  // namespace

std::optional<std::vector<Subst>> Specification::completions(const Atom& a, int depth,
                                                             GroundUniverse& u) const {
  std::vector<Subst> out;
  if (a.ground()) {
    if (contains(a)) out.emplace_back();
    return out;
  }
  std::set<Atom> got;
  if (!node_completions(*root_, a, *aux_, solver_budget_, depth, u, got)) return std::nullopt;
  for (const Atom& g : got) {
    auto theta = match(a, g);
    if (theta) out.push_back(std::move(*theta));
  }
  return out;
}

namespace {

bool template_ground_only(const SpecTemplateResolved& t) {
  std::set<std::string> grounded;
  for (const Atom& g : t.filters)
    if (g.pred == "ground" && g.args.size() == 1 && g.args[0].is_var())
      grounded.insert(g.args[0].name());
  // nat forces groundness too
  for (const Atom& g : t.relational)
    if (g.pred == "nat" && g.args.size() == 1 && g.args[0].is_var())
      grounded.insert(g.args[0].name());
  for (const std::string& v : vars_of(t.pattern))
    if (!grounded.count(v)) return false;
  return true;
}

bool node_ground_only(const SpecNode& n) {
  switch (n.kind) {
    case SpecNode::Kind::leaf:
      return std::all_of(n.templates.begin(), n.templates.end(), template_ground_only);
    case SpecNode::Kind::set_intersect:
      // an intersection is ground-only as soon as one side is
      return node_ground_only(*n.lhs) || node_ground_only(*n.rhs);
    default:
      return node_ground_only(*n.lhs) && node_ground_only(*n.rhs);
  }
}

bool node_closed(const SpecNode& n) {
  switch (n.kind) {
    case SpecNode::Kind::leaf:
      for (const auto& t : n.templates) {
        if (template_ground_only(t)) continue;
        for (const Atom& g : t.relational)
          if (!guard_closed_under_instantiation(g)) return false;
        for (const Atom& g : t.filters)
          if (!guard_closed_under_instantiation(g)) return false;
      }
      return true;
    case SpecNode::Kind::set_union:
      return node_closed(*n.lhs) && node_closed(*n.rhs);
    case SpecNode::Kind::set_intersect:
      // if one side only holds ground atoms the intersection does too,
      // and a set of ground atoms is trivially closed
      return node_ground_only(*n.lhs) || node_ground_only(*n.rhs) ||
             (node_closed(*n.lhs) && node_closed(*n.rhs));
    case SpecNode::Kind::set_diff:
      // instantiation could move an atom into the subtracted set, so a
      // difference is closed only when the left side is ground-only
      return node_ground_only(*n.lhs);
  }
  return false;
}

void node_predicates(const SpecNode& n, std::set<std::pair<std::string, size_t>>& out) {
  if (n.kind == SpecNode::Kind::leaf) {
    for (const auto& t : n.templates) out.emplace(t.pattern.pred, t.pattern.args.size());
    return;
  }
  node_predicates(*n.lhs, out);
  node_predicates(*n.rhs, out);
}

void node_signature(const SpecNode& n, Signature& sig) {
  if (n.kind == SpecNode::Kind::leaf) {
    for (const auto& t : n.templates) {
      sig.add_atom(t.pattern);
      auto handle_guard = [&](const Atom& g) {
        size_t arity = g.args.size();
        for (const Term& arg : g.args) sig.add_term(arg);
        if ((g.pred == "list" || g.pred == "member" || g.pred == "concat" ||
             g.pred == "listlen") &&
            is_relational_builtin(g.pred, arity)) {
          sig.add_functor("[]", 0);
          sig.add_functor(kConsFunctor, 2);
        }
        if (g.pred == "nat" && arity == 1) {
          sig.add_functor("0", 0);
          sig.add_functor("s", 1);
        }
      };
      for (const Atom& g : t.relational) handle_guard(g);
      for (const Atom& g : t.filters) handle_guard(g);
    }
    return;
  }
  node_signature(*n.lhs, sig);
  node_signature(*n.rhs, sig);
}

}  // namespace

bool Specification::substitution_closed() const { return node_closed(*root_); }

std::set<std::pair<std::string, size_t>> Specification::predicates() const {
  std::set<std::pair<std::string, size_t>> out;
  node_predicates(*root_, out);
  return out;
}

void Specification::extend_signature(Signature& sig) const {
  node_signature(*root_, sig);
  for (const Clause& c : aux_->clauses) sig.add_clause(c);
}

bool Specification::empty_syntax() const {
  std::function<bool(const SpecNode&)> rec = [&](const SpecNode& n) {
    if (n.kind == SpecNode::Kind::leaf) return n.templates.empty();
    return rec(*n.lhs) && rec(*n.rhs);
  };
  return rec(*root_);
}

// ---- library resolution ----

namespace {

using NodeMap = std::map<std::string, std::shared_ptr<const SpecNode>>;

std::shared_ptr<const SpecNode> resolve_expr(const SpecExpr& e, const NodeMap& known,
                                             const Program& aux) {
  auto node = std::make_shared<SpecNode>();
  switch (e.kind) {
    case SpecExpr::Kind::templates: {
      node->kind = SpecNode::Kind::leaf;
      for (const SpecTemplate& t : e.templates) {
        SpecTemplateResolved r;
        r.pattern = t.pattern;
        std::vector<std::string> pv = vars_of(t.pattern);
        for (const Atom& g : t.guards) {
          for (const std::string& v : vars_of(g))
            if (std::find(pv.begin(), pv.end(), v) == pv.end())
              throw SpecError("guard variable " + v + " does not occur in pattern " +
                              t.pattern.str());
          if (classify_guard(g, aux) == GuardClass::relational)
            r.relational.push_back(g);
          else
            r.filters.push_back(g);
        }
        node->templates.push_back(std::move(r));
      }
      return node;
    }
    case SpecExpr::Kind::ref: {
      auto it = known.find(e.ref);
      if (it == known.end()) throw SpecError("reference to unknown spec '" + e.ref + "'");
      return it->second;
    }
    case SpecExpr::Kind::set_union:
    case SpecExpr::Kind::set_intersect:
    case SpecExpr::Kind::set_diff:
      node->kind = e.kind == SpecExpr::Kind::set_union       ? SpecNode::Kind::set_union
                   : e.kind == SpecExpr::Kind::set_intersect ? SpecNode::Kind::set_intersect
                                                             : SpecNode::Kind::set_diff;
      node->lhs = resolve_expr(*e.lhs, known, aux);
      node->rhs = resolve_expr(*e.rhs, known, aux);
      return node;
  }
  throw SpecError("malformed spec expression");
}

}  // namespace

SpecLibrary SpecLibrary::from_file(const SpecFile& f, int solver_budget) {
  for (const Clause& c : f.aux)
    if (is_builtin_guard(c.head.pred, c.head.args.size()))
      throw SpecError("auxiliary clause redefines builtin guard '" + c.head.pred + "'");
  auto aux = std::make_shared<Program>();
  aux->clauses = f.aux;

  SpecLibrary lib;
  NodeMap roots;
  for (const auto& [name, expr] : f.specs) {
    Specification s;
    s.root_ = resolve_expr(expr, roots, *aux);
    s.aux_ = aux;
    s.solver_budget_ = solver_budget;
    roots.emplace(name, s.root_);
    lib.specs_.emplace(name, std::move(s));
    lib.order_.push_back(name);
  }
  return lib;
}

const Specification& SpecLibrary::get(const std::string& name) const {
  auto it = specs_.find(name);
  if (it == specs_.end()) throw SpecError("no spec named '" + name + "'");
  return it->second;
}

bool SpecLibrary::has(const std::string& name) const { return specs_.count(name) > 0; }

std::vector<std::string> SpecLibrary::names() const { return order_; }

bool atom_in_pre(const CallSuccessSpec& cs, const Atom& a) { return cs.pre.pattern_member(a); }
bool atom_in_post(const CallSuccessSpec& cs, const Atom& a) { return cs.post.pattern_member(a); }

bool models(const Specification& s, const std::vector<Atom>& ground_query) {
  for (const Atom& a : ground_query) {
    if (!a.ground())
      throw std::invalid_argument("models: query atom " + a.str() + " is not ground");
    if (!s.contains(a)) return false;
  }
  return true;
}

// ---- level mappings ----

LevelMapping LevelMapping::from_file(const LevelFile& f) {
  LevelMapping m;
  m.entries_ = f.entries;
  for (const LevelTable& t : f.tables) {
    if (m.tables_.count(t.name)) throw SpecError("duplicate level table '" + t.name + "'");
    m.tables_.emplace(t.name, t);
  }
  return m;
}

std::optional<long> LevelMapping::eval_expr(const MeasureExpr& e, const Subst& bind) const {
  switch (e.kind) {
    case MeasureExpr::Kind::constant:
      return e.value;
    case MeasureExpr::Kind::listlen: {
      const Term* t = bind.lookup(e.var);
      return t ? std::optional<long>(t->spine_len()) : std::nullopt;
    }
    case MeasureExpr::Kind::termsize: {
      const Term* t = bind.lookup(e.var);
      return t ? std::optional<long>(t->node_count()) : std::nullopt;
    }
    case MeasureExpr::Kind::add:
    case MeasureExpr::Kind::mul:
    case MeasureExpr::Kind::maxof: {
      auto a = eval_expr(e.kids[0], bind);
      auto b = eval_expr(e.kids[1], bind);
      if (!a || !b) return std::nullopt;
      if (e.kind == MeasureExpr::Kind::add) return *a + *b;
      if (e.kind == MeasureExpr::Kind::mul) return *a * *b;
      return std::max(*a, *b);
    }
    case MeasureExpr::Kind::table: {
      auto it = tables_.find(e.table);
      if (it == tables_.end()) throw SpecError("no level table named '" + e.table + "'");
      std::vector<Term> key;
      for (const std::string& v : e.table_args) {
        const Term* t = bind.lookup(v);
        if (!t) return std::nullopt;
        key.push_back(*t);
      }
      for (const auto& [rk, rv] : it->second.rows)
        if (rk == key) return rv;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<long> LevelMapping::eval(const Atom& ground_atom) const {
  for (const LevelEntry& e : entries_) {
    auto theta = match(e.pattern, ground_atom);
    if (!theta) continue;
    bool guards_ok = true;
    for (const Atom& g : e.when_guards) {
      if (!is_builtin_guard(g.pred, g.args.size()))
        throw SpecError("level mapping guard '" + g.pred + "' is not a builtin");
      if (!eval_filter_guard(theta->apply(g))) {
        guards_ok = false;
        break;
      }
    }
    if (!guards_ok) continue;
    return eval_expr(e.expr, *theta);
  }
  return std::nullopt;
}

std::optional<long> LevelMapping::eval_expr_cells(const MeasureExpr& e, const GroundUniverse& u,
                                                  const std::map<std::string, size_t>& bind) const {
  switch (e.kind) {
    case MeasureExpr::Kind::constant:
      return e.value;
    case MeasureExpr::Kind::listlen: {
      auto it = bind.find(e.var);
      return it == bind.end() ? std::nullopt : std::optional<long>(u.spine_len_of(it->second));
    }
    case MeasureExpr::Kind::termsize: {
      auto it = bind.find(e.var);
      return it == bind.end() ? std::nullopt : std::optional<long>(u.node_count_of(it->second));
    }
    case MeasureExpr::Kind::add:
    case MeasureExpr::Kind::mul:
    case MeasureExpr::Kind::maxof: {
      auto a = eval_expr_cells(e.kids[0], u, bind);
      auto b = eval_expr_cells(e.kids[1], u, bind);
      if (!a || !b) return std::nullopt;
      if (e.kind == MeasureExpr::Kind::add) return *a + *b;
      if (e.kind == MeasureExpr::Kind::mul) return *a * *b;
      return std::max(*a, *b);
    }
    case MeasureExpr::Kind::table: {
      auto it = tables_.find(e.table);
      if (it == tables_.end()) throw SpecError("no level table named '" + e.table + "'");
      std::vector<Term> key;
      for (const std::string& v : e.table_args) {
        auto b = bind.find(v);
        if (b == bind.end()) return std::nullopt;
        key.push_back(u.term(b->second));
      }
      for (const auto& [rk, rv] : it->second.rows)
        if (rk == key) return rv;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<long> LevelMapping::eval_cells(const GroundUniverse& u, const std::string& pred,
                                             const std::vector<size_t>& args) const {
  for (const LevelEntry& e : entries_) {
    if (e.pattern.pred != pred || e.pattern.args.size() != args.size()) continue;
    // level patterns have distinct variable arguments (parser-enforced)
    std::map<std::string, size_t> bind;
    for (size_t k = 0; k < args.size(); k++) bind.emplace(e.pattern.args[k].name(), args[k]);
    bool guards_ok = true;
    bool need_terms = false;
    for (const Atom& g : e.when_guards) {
      if (g.pred == "term") continue;
      if (g.pred == "ground") continue;  // universe cells are ground
      if (g.pred == "list" && g.args.size() == 1 && g.args[0].is_var()) {
        auto it = bind.find(g.args[0].name());
        if (it == bind.end() || !u.is_list_of(it->second)) guards_ok = false;
        continue;
      }
      need_terms = true;  // uncommon guard: fall back to materialized eval
    }
    if (need_terms) break;
    if (!guards_ok) continue;
    return eval_expr_cells(e.expr, u, bind);
  }
  // slow path: materialize the atom once and share the general evaluator
  std::vector<Term> ts;
  ts.reserve(args.size());
  for (size_t c : args) ts.push_back(u.term(c));
  return eval(Atom(pred, std::move(ts)));
}

}  // namespace lpcheck
