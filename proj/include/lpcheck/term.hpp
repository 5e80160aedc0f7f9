#pragma once

#include <cassert>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lpcheck {

// First-order terms over free constructors. A constant is a functor of
// arity 0; variables are identified by name. Value semantics throughout:
// terms at desk scale are small, and copying keeps ownership trivial.
class Term {
public:
  Term() : var_(false) {}
  static Term var(std::string name) {
    Term t;
    t.var_ = true;
    t.name_ = std::move(name);
    return t;
  }
  static Term fun(std::string functor, std::vector<Term> args = {}) {
    Term t;
    t.var_ = false;
    t.name_ = std::move(functor);
    t.args_ = std::move(args);
    return t;
  }

  bool is_var() const { return var_; }
  bool is_fun() const { return !var_; }
  bool is_const() const { return !var_ && args_.empty(); }
  const std::string& name() const { return name_; }
  const std::vector<Term>& args() const { return args_; }
  size_t arity() const { return args_.size(); }

  bool ground() const;
  // depth of a constant or variable is 0; depth(f(t1..tn)) = 1 + max depth(ti)
  int depth() const;
  // spine length: len([h|t]) = 1 + len(t), 0 for anything that is not a cons
  long spine_len() const;
  // node count: 1 for constants/variables, 1 + sum over args otherwise
  long node_count() const;
  bool is_proper_list() const;

  void collect_vars(std::vector<std::string>& out) const;

  std::strong_ordering operator<=>(const Term& o) const;
  bool operator==(const Term& o) const { return (*this <=> o) == 0; }

  std::string str() const;

private:
  bool var_;
  std::string name_;
  std::vector<Term> args_;
};

// Reserved functor name for list cells; [] is the ordinary constant "[]".
inline const std::string kConsFunctor = "[|]";

inline Term mk_nil() { return Term::fun("[]"); }
inline Term mk_cons(Term h, Term t) {
  std::vector<Term> a;
  a.push_back(std::move(h));
  a.push_back(std::move(t));
  return Term::fun(kConsFunctor, std::move(a));
}
Term mk_list(std::vector<Term> elems, Term tail = mk_nil());

struct Atom {
  std::string pred;
  std::vector<Term> args;

  Atom() = default;
  Atom(std::string p, std::vector<Term> a) : pred(std::move(p)), args(std::move(a)) {}

  size_t arity() const { return args.size(); }
  bool ground() const;
  // 0 for propositional atoms, else 1 + max arg depth (an atom nests its
  // arguments exactly like a compound term does)
  int depth() const;
  void collect_vars(std::vector<std::string>& out) const;

  std::strong_ordering operator<=>(const Atom& o) const;
  bool operator==(const Atom& o) const { return (*this <=> o) == 0; }

  std::string str() const;
};

// H :- B1, ..., Bn with an optional cut after the first cut_index body
// atoms: cut_index = k encodes  H :- B1, ..., Bk, !, Bk+1, ..., Bn.
struct Clause {
  Atom head;
  std::vector<Atom> body;
  std::optional<size_t> cut_index;

  Clause() = default;
  Clause(Atom h, std::vector<Atom> b, std::optional<size_t> cut = std::nullopt)
      : head(std::move(h)), body(std::move(b)), cut_index(cut) {
    assert(!cut_index || *cut_index <= body.size());
  }

  bool has_cut() const { return cut_index.has_value(); }
  void collect_vars(std::vector<std::string>& out) const;
  std::string str() const;
};

struct Program {
  std::vector<Clause> clauses;

  bool has_cuts() const;
  Program without_cuts() const;
  // clause indices per procedure (predicate/arity), in source order
  std::vector<std::vector<size_t>> procedures() const;
  // indices of the clauses whose head predicate/arity matches a
  std::vector<size_t> clauses_for(const Atom& a) const;
  std::string str() const;
};

// Variables of a syntactic object in order of first occurrence,
// without duplicates.
std::vector<std::string> vars_of(const Term& t);
std::vector<std::string> vars_of(const Atom& a);
std::vector<std::string> vars_of(const Clause& c);
std::vector<std::string> vars_of(const std::vector<Atom>& q);

// Finite substitution var -> term. Stored ordered so printing and
// iteration are deterministic.
class Subst {
public:
  Subst() = default;

  bool empty() const { return b_.empty(); }
  size_t size() const { return b_.size(); }
  const std::map<std::string, Term>& bindings() const { return b_; }

  const Term* lookup(const std::string& var) const {
    auto it = b_.find(var);
    return it == b_.end() ? nullptr : &it->second;
  }
  void bind(const std::string& var, Term t);

  Term apply(const Term& t) const;
  Atom apply(const Atom& a) const;
  Clause apply(const Clause& c) const;
  std::vector<Atom> apply(const std::vector<Atom>& q) const;

  // this, then other: apply(compose(s1,s2), t) == apply(s2, apply(s1, t))
  Subst compose(const Subst& other) const;
  Subst restricted_to(const std::vector<std::string>& vars) const;

  bool is_idempotent() const;
  bool operator==(const Subst& o) const { return b_ == o.b_; }

  std::string str() const;

private:
  std::map<std::string, Term> b_;
};

}  // namespace lpcheck
