#include "lpcheck/term.hpp"

#include <algorithm>
#include <sstream>

namespace lpcheck {

bool Term::ground() const {
  if (var_) return false;
  for (const Term& a : args_)
    if (!a.ground()) return false;
  return true;
}

int Term::depth() const {
  if (var_ || args_.empty()) return 0;
  int m = 0;
  for (const Term& a : args_) m = std::max(m, a.depth());
  return 1 + m;
}

long Term::spine_len() const {
  const Term* t = this;
  long n = 0;
  while (t->is_fun() && t->name_ == kConsFunctor && t->args_.size() == 2) {
    n++;
    t = &t->args_[1];
  }
  return n;
}

long Term::node_count() const {
  long n = 1;
  for (const Term& a : args_) n += a.node_count();
  return n;
}

bool Term::is_proper_list() const {
  const Term* t = this;
  while (t->is_fun() && t->name_ == kConsFunctor && t->args_.size() == 2)
    t = &t->args_[1];
  return t->is_const() && t->name_ == "[]";
}

void Term::collect_vars(std::vector<std::string>& out) const {
  if (var_) {
    if (std::find(out.begin(), out.end(), name_) == out.end()) out.push_back(name_);
    return;
  }
  for (const Term& a : args_) a.collect_vars(out);
}

std::strong_ordering Term::operator<=>(const Term& o) const {
  if (var_ != o.var_) return var_ ? std::strong_ordering::less : std::strong_ordering::greater;
  if (auto c = name_ <=> o.name_; c != 0) return c;
  if (auto c = args_.size() <=> o.args_.size(); c != 0) return c;
  for (size_t i = 0; i < args_.size(); i++)
    if (auto c = args_[i] <=> o.args_[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

namespace {

void print_term(std::ostream& os, const Term& t) {
  if (t.is_var()) {
    os << t.name();
    return;
  }
  if (t.name() == kConsFunctor && t.arity() == 2) {
    os << '[';
    const Term* cur = &t;
    bool first = true;
    while (cur->is_fun() && cur->name() == kConsFunctor && cur->arity() == 2) {
      if (!first) os << ',';
      print_term(os, cur->args()[0]);
      first = false;
      cur = &cur->args()[1];
    }
    if (!(cur->is_const() && cur->name() == "[]")) {
      os << '|';
      print_term(os, *cur);
    }
    os << ']';
    return;
  }
  if (t.name() == "-" && t.arity() == 2) {
    // pair syntax, printed without spaces: a-b, a-b-c
    print_term(os, t.args()[0]);
    os << '-';
    const Term& rhs = t.args()[1];
    bool paren = rhs.is_fun() && rhs.name() == "-" && rhs.arity() == 2;
    if (paren) os << '(';
    print_term(os, rhs);
    if (paren) os << ')';
    return;
  }
  os << t.name();
  if (!t.args().empty()) {
    os << '(';
    for (size_t i = 0; i < t.args().size(); i++) {
      if (i) os << ',';
      print_term(os, t.args()[i]);
    }
    os << ')';
  }
}

}  // namespace

std::string Term::str() const {
  std::ostringstream os;
  print_term(os, *this);
  return os.str();
}

Term mk_list(std::vector<Term> elems, Term tail) {
  Term t = std::move(tail);
  for (auto it = elems.rbegin(); it != elems.rend(); ++it) t = mk_cons(std::move(*it), std::move(t));
  return t;
}

bool Atom::ground() const {
  for (const Term& a : args)
    if (!a.ground()) return false;
  return true;
}

int Atom::depth() const {
  if (args.empty()) return 0;
  int m = 0;
  for (const Term& a : args) m = std::max(m, a.depth());
  return 1 + m;
}

void Atom::collect_vars(std::vector<std::string>& out) const {
  for (const Term& a : args) a.collect_vars(out);
}

std::strong_ordering Atom::operator<=>(const Atom& o) const {
  if (auto c = pred <=> o.pred; c != 0) return c;
  if (auto c = args.size() <=> o.args.size(); c != 0) return c;
  for (size_t i = 0; i < args.size(); i++)
    if (auto c = args[i] <=> o.args[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::string Atom::str() const {
  if (pred == "=" && args.size() == 2) return args[0].str() + "=" + args[1].str();
  std::ostringstream os;
  os << pred;
  if (!args.empty()) {
    os << '(';
    for (size_t i = 0; i < args.size(); i++) {
      if (i) os << ',';
      os << args[i].str();
    }
    os << ')';
  }
  return os.str();
}

void Clause::collect_vars(std::vector<std::string>& out) const {
  head.collect_vars(out);
  for (const Atom& b : body) b.collect_vars(out);
}

std::string Clause::str() const {
  std::ostringstream os;
  os << head.str();
  if (!body.empty() || has_cut()) {
    os << " :- ";
    bool first = true;
    for (size_t i = 0; i <= body.size(); i++) {
      if (cut_index && *cut_index == i) {
        if (!first) os << ", ";
        os << '!';
        first = false;
      }
      if (i < body.size()) {
        if (!first) os << ", ";
        os << body[i].str();
        first = false;
      }
    }
  }
  os << '.';
  return os.str();
}

bool Program::has_cuts() const {
  for (const Clause& c : clauses)
    if (c.has_cut()) return true;
  return false;
}

Program Program::without_cuts() const {
  Program p = *this;
  for (Clause& c : p.clauses) c.cut_index.reset();
  return p;
}

std::vector<std::vector<size_t>> Program::procedures() const {
  std::vector<std::pair<std::string, size_t>> keys;
  std::vector<std::vector<size_t>> groups;
  for (size_t i = 0; i < clauses.size(); i++) {
    std::pair<std::string, size_t> k{clauses[i].head.pred, clauses[i].head.arity()};
    size_t gi = 0;
    for (; gi < keys.size(); gi++)
      if (keys[gi] == k) break;
    if (gi == keys.size()) {
      keys.push_back(k);
      groups.emplace_back();
    }
    groups[gi].push_back(i);
  }
  return groups;
}

std::vector<size_t> Program::clauses_for(const Atom& a) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < clauses.size(); i++)
    if (clauses[i].head.pred == a.pred && clauses[i].head.arity() == a.arity()) out.push_back(i);
  return out;
}

std::string Program::str() const {
  std::string s;
  for (const Clause& c : clauses) {
    s += c.str();
    s += '\n';
  }
  return s;
}

std::vector<std::string> vars_of(const Term& t) {
  std::vector<std::string> v;
  t.collect_vars(v);
  return v;
}
std::vector<std::string> vars_of(const Atom& a) {
  std::vector<std::string> v;
  a.collect_vars(v);
  return v;
}
std::vector<std::string> vars_of(const Clause& c) {
  std::vector<std::string> v;
  c.collect_vars(v);
  return v;
}
std::vector<std::string> vars_of(const std::vector<Atom>& q) {
  std::vector<std::string> v;
  for (const Atom& a : q) a.collect_vars(v);
  return v;
}

void Subst::bind(const std::string& var, Term t) { b_[var] = std::move(t); }

Term Subst::apply(const Term& t) const {
  if (t.is_var()) {
    const Term* r = lookup(t.name());
    return r ? *r : t;
  }
  if (t.is_const() || b_.empty()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(apply(a));
  return Term::fun(t.name(), std::move(args));
}

Atom Subst::apply(const Atom& a) const {
  Atom r;
  r.pred = a.pred;
  r.args.reserve(a.args.size());
  for (const Term& t : a.args) r.args.push_back(apply(t));
  return r;
}

Clause Subst::apply(const Clause& c) const {
  Clause r;
  r.head = apply(c.head);
  r.body.reserve(c.body.size());
  for (const Atom& b : c.body) r.body.push_back(apply(b));
  r.cut_index = c.cut_index;
  return r;
}

std::vector<Atom> Subst::apply(const std::vector<Atom>& q) const {
  std::vector<Atom> r;
  r.reserve(q.size());
  for (const Atom& a : q) r.push_back(apply(a));
  return r;
}

Subst Subst::compose(const Subst& other) const {
  Subst r;
  for (const auto& [v, t] : b_) r.b_[v] = other.apply(t);
  for (const auto& [v, t] : other.b_)
    if (!b_.count(v)) r.b_[v] = t;
  return r;
}

Subst Subst::restricted_to(const std::vector<std::string>& vars) const {
  Subst r;
  for (const std::string& v : vars) {
    auto it = b_.find(v);
    if (it != b_.end()) r.b_.emplace(*it);
  }
  return r;
}

bool Subst::is_idempotent() const {
  for (const auto& [v, t] : b_) {
    (void)v;
    if (apply(t) != t) return false;
  }
  return true;
}

std::string Subst::str() const {
  std::string s = "{";
  bool first = true;
  for (const auto& [v, t] : b_) {
    if (!first) s += ", ";
    s += v + " -> " + t.str();
    first = false;
  }
  s += "}";
  return s;
}

}  // namespace lpcheck
