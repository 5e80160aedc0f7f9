#include "lpcheck/unify.hpp"

#include <algorithm>

namespace lpcheck {

namespace {

bool occurs(const std::string& var, const Term& t) {
  if (t.is_var()) return t.name() == var;
  for (const Term& a : t.args())
    if (occurs(var, a)) return true;
  return false;
}

// Extends theta with var -> t (t already under theta), applying the new
// binding to the existing ranges so theta stays idempotent.
bool extend(Subst& theta, const std::string& var, const Term& t) {
  if (t.is_var() && t.name() == var) return true;
  if (occurs(var, t)) return false;
  Subst one;
  one.bind(var, t);
  Subst next;
  for (const auto& [v, r] : theta.bindings()) next.bind(v, one.apply(r));
  next.bind(var, t);
  theta = std::move(next);
  return true;
}

bool unify_rec(const Term& a, const Term& b, Subst& theta) {
  Term s = theta.apply(a);
  Term t = theta.apply(b);
  if (s.is_var()) return extend(theta, s.name(), t);
  if (t.is_var()) return extend(theta, t.name(), s);
  if (s.name() != t.name() || s.arity() != t.arity()) return false;
  for (size_t i = 0; i < s.arity(); i++)
    if (!unify_rec(s.args()[i], t.args()[i], theta)) return false;
  return true;
}

bool match_rec(const Term& g, const Term& s, Subst& theta) {
  if (g.is_var()) {
    if (const Term* bound = theta.lookup(g.name())) return *bound == s;
    theta.bind(g.name(), s);
    return true;
  }
  if (s.is_var() || g.name() != s.name() || g.arity() != s.arity()) return false;
  for (size_t i = 0; i < g.arity(); i++)
    if (!match_rec(g.args()[i], s.args()[i], theta)) return false;
  return true;
}

}  // namespace

std::optional<Subst> unify(const Term& a, const Term& b) {
  Subst theta;
  if (!unify_rec(a, b, theta)) return std::nullopt;
  return theta;
}

std::optional<Subst> unify(const Atom& a, const Atom& b) {
  if (a.pred != b.pred || a.arity() != b.arity()) return std::nullopt;
  Subst theta;
  for (size_t i = 0; i < a.arity(); i++)
    if (!unify_rec(a.args[i], b.args[i], theta)) return std::nullopt;
  return theta;
}

std::optional<Subst> match(const Term& general, const Term& specific) {
  Subst theta;
  if (!match_rec(general, specific, theta)) return std::nullopt;
  return theta;
}

std::optional<Subst> match(const Atom& general, const Atom& specific) {
  if (general.pred != specific.pred || general.arity() != specific.arity()) return std::nullopt;
  Subst theta;
  for (size_t i = 0; i < general.arity(); i++)
    if (!match_rec(general.args[i], specific.args[i], theta)) return std::nullopt;
  return theta;
}

bool instance_of(const Atom& a, const Atom& b) { return match(b, a).has_value(); }

Clause rename_apart(const Clause& c, const std::vector<std::string>& avoid) {
  std::vector<std::string> cvars = vars_of(c);
  std::set<std::string> taken(avoid.begin(), avoid.end());
  taken.insert(cvars.begin(), cvars.end());
  Subst ren;
  for (const std::string& v : cvars) {
    if (std::find(avoid.begin(), avoid.end(), v) == avoid.end()) continue;
    for (unsigned long k = 1;; k++) {
      std::string cand = v + std::to_string(k);
      if (!taken.count(cand)) {
        taken.insert(cand);
        ren.bind(v, Term::var(cand));
        break;
      }
    }
  }
  return ren.apply(c);
}

void VarNamer::avoid(const std::vector<std::string>& names) { avoid_.insert(names.begin(), names.end()); }

std::string VarNamer::fresh() {
  for (;;) {
    std::string cand = "_R" + std::to_string(counter_++);
    if (!avoid_.count(cand)) return cand;
  }
}

Clause VarNamer::rename_clause(const Clause& c) {
  Subst ren;
  for (const std::string& v : vars_of(c)) ren.bind(v, Term::var(fresh()));
  return ren.apply(c);
}

namespace {

void canon_term(const Term& t, Subst& ren, size_t& next, std::vector<Term>& dummy) {
  (void)dummy;
  if (t.is_var()) {
    if (!ren.lookup(t.name())) ren.bind(t.name(), Term::var("V" + std::to_string(next++)));
    return;
  }
  for (const Term& a : t.args()) canon_term(a, ren, next, dummy);
}

}  // namespace

Atom canonical(const Atom& a) {
  Subst ren;
  size_t next = 0;
  std::vector<Term> dummy;
  for (const Term& t : a.args) canon_term(t, ren, next, dummy);
  return ren.apply(a);
}

std::vector<Atom> canonical(const std::vector<Atom>& q) {
  Subst ren;
  size_t next = 0;
  std::vector<Term> dummy;
  for (const Atom& a : q)
    for (const Term& t : a.args) canon_term(t, ren, next, dummy);
  return ren.apply(q);
}

bool variants(const std::vector<Atom>& a, const std::vector<Atom>& b) {
  return canonical(a) == canonical(b);
}

}  // namespace lpcheck
