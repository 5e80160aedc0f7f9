#include "lpcheck/enumerate.hpp"

#include <algorithm>

namespace lpcheck {

void Signature::add_functor(const std::string& name, int arity) {
  functors.emplace_back(name, arity);
}
void Signature::add_predicate(const std::string& name, int arity) {
  predicates.emplace_back(name, arity);
}

void Signature::add_term(const Term& t) {
  if (t.is_var()) return;
  add_functor(t.name(), (int)t.arity());
  for (const Term& a : t.args()) add_term(a);
}

void Signature::add_atom(const Atom& a) {
  add_predicate(a.pred, (int)a.arity());
  for (const Term& t : a.args) add_term(t);
}

void Signature::add_clause(const Clause& c) {
  add_atom(c.head);
  for (const Atom& b : c.body) add_atom(b);
}

void Signature::add_program(const Program& p) {
  for (const Clause& c : p.clauses) add_clause(c);
}

void Signature::add_fresh_constants(int n) {
  for (int i = 1; i <= n; i++) add_functor("$" + std::to_string(i), 0);
}

bool Signature::has_constant() const {
  for (const auto& [n, a] : functors) {
    (void)n;
    if (a == 0) return true;
  }
  return false;
}

namespace {
void sort_dedupe_check(std::vector<std::pair<std::string, int>>& v, const char* what) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  for (size_t i = 1; i < v.size(); i++)
    if (v[i].first == v[i - 1].first)
      throw SignatureError(std::string(what) + " '" + v[i].first + "' used with arities " +
                           std::to_string(v[i - 1].second) + " and " + std::to_string(v[i].second));
}
}  // namespace

void Signature::finalize() {
  sort_dedupe_check(functors, "functor");
  sort_dedupe_check(predicates, "predicate");
}

std::string Signature::str() const {
  std::string s = "functors:";
  for (const auto& [n, a] : functors) s += " " + n + "/" + std::to_string(a);
  s += " predicates:";
  for (const auto& [n, a] : predicates) s += " " + n + "/" + std::to_string(a);
  return s;
}

GroundUniverse::GroundUniverse(const Signature& sig, size_t entry_cap)
    : cap_(entry_cap), ftab_(sig.functors) {
  // level 0: the constants, already sorted by name
  for (size_t f = 0; f < ftab_.size(); f++)
    if (ftab_[f].second == 0) add_entry((int)f, nullptr, 0);
  max_depth_ = 0;
  level_end_.push_back(funcs_.size());
  rebuild_index();
}

int GroundUniverse::functor_id(const std::string& name, int arity) const {
  auto it = std::lower_bound(ftab_.begin(), ftab_.end(), std::make_pair(name, arity));
  if (it == ftab_.end() || it->first != name || it->second != arity) return -1;
  return (int)(it - ftab_.begin());
}

size_t GroundUniverse::count_up_to(int depth) const {
  if (depth < 0) return 0;
  size_t d = std::min<size_t>((size_t)depth, level_end_.size() - 1);
  return level_end_[d];
}

uint64_t GroundUniverse::hash_cell(int func, const int32_t* args, int arity) const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ull;
    h *= 1099511628211ull;
  };
  mix((uint64_t)func);
  for (int i = 0; i < arity; i++) mix((uint64_t)(uint32_t)args[i]);
  return h;
}

void GroundUniverse::index_insert(int32_t id) {
  size_t mask = index_.size() - 1;
  size_t pos = hash_cell(funcs_[id], arg_pool_.data() + arg_ofs_[id], ftab_[funcs_[id]].second) & mask;
  while (index_[pos] >= 0) pos = (pos + 1) & mask;
  index_[pos] = id;
}

void GroundUniverse::rebuild_index() {
  size_t want = 16;
  while (want < funcs_.size() * 2) want <<= 1;
  index_.assign(want, -1);
  for (size_t i = 0; i < funcs_.size(); i++) index_insert((int32_t)i);
}

int32_t GroundUniverse::add_entry(int func, const int32_t* args, int arity) {
  int32_t id = (int32_t)funcs_.size();
  funcs_.push_back(func);
  arg_ofs_.push_back((uint32_t)arg_pool_.size());
  for (int i = 0; i < arity; i++) arg_pool_.push_back(args[i]);

  int d = 0;
  for (int i = 0; i < arity; i++) d = std::max(d, depths_[args[i]] + 1);
  depths_.push_back(d);

  long nodes = 1;
  for (int i = 0; i < arity; i++) nodes += nodes_[args[i]];
  nodes_.push_back(nodes);

  bool cons = ftab_[func].first == kConsFunctor && arity == 2;
  plens_.push_back(cons ? plens_[args[1]] + 1 : 0);
  bool nil = arity == 0 && ftab_[func].first == "[]";
  proper_.push_back(nil || (cons && proper_[args[1]]));
  return id;
}

int GroundUniverse::ensure_depth(int d) {
  while (max_depth_ < d && !capped_) {
    size_t prev = level_end_.back();
    size_t before = funcs_.size();
    int lvl = max_depth_ + 1;
    bool overflow = false;
    for (size_t f = 0; f < ftab_.size() && !overflow; f++) {
      int n = ftab_[f].second;
      if (n == 0) continue;
      // odometer over argument tuples drawn from depth < lvl, keeping
      // only tuples whose max depth is exactly lvl-1
      std::vector<int32_t> tup(n, 0);
      for (;;) {
        int dmax = 0;
        for (int i = 0; i < n; i++) dmax = std::max(dmax, depths_[tup[i]]);
        if (dmax == lvl - 1) {
          if (funcs_.size() >= cap_) {
            overflow = true;
            break;
          }
          add_entry((int)f, tup.data(), n);
        }
        int i = n - 1;
        while (i >= 0 && (size_t)(tup[i] + 1) >= prev) tup[i--] = 0;
        if (i < 0) break;
        tup[i]++;
      }
    }
    if (overflow) {
      // roll the partial level back; the universe stays a complete
      // enumeration up to max_depth_
      funcs_.resize(before);
      arg_ofs_.resize(before);
      depths_.resize(before);
      plens_.resize(before);
      nodes_.resize(before);
      proper_.resize(before);
      arg_pool_.resize(before ? arg_ofs_[before - 1] + ftab_[funcs_[before - 1]].second : 0);
      capped_ = true;
      break;
    }
    max_depth_ = lvl;
    level_end_.push_back(funcs_.size());
    rebuild_index();
  }
  return max_depth_;
}

Term GroundUniverse::term(size_t i) const {
  int f = funcs_[i];
  int n = ftab_[f].second;
  std::vector<Term> args;
  args.reserve(n);
  const int32_t* a = arg_pool_.data() + arg_ofs_[i];
  for (int k = 0; k < n; k++) args.push_back(term(a[k]));
  return Term::fun(ftab_[f].first, std::move(args));
}

std::optional<size_t> GroundUniverse::find_cell(int func, const int32_t* args, int arity) const {
  size_t mask = index_.size() - 1;
  size_t pos = hash_cell(func, args, arity) & mask;
  while (index_[pos] >= 0) {
    int32_t id = index_[pos];
    if (funcs_[id] == func) {
      const int32_t* ia = arg_pool_.data() + arg_ofs_[id];
      bool eq = true;
      for (int i = 0; i < arity; i++)
        if (ia[i] != args[i]) {
          eq = false;
          break;
        }
      if (eq) return (size_t)id;
    }
    pos = (pos + 1) & mask;
  }
  return std::nullopt;
}

std::optional<size_t> GroundUniverse::find(const Term& t) const {
  if (t.is_var()) return std::nullopt;
  int f = functor_id(t.name(), (int)t.arity());
  if (f < 0) return std::nullopt;
  std::vector<int32_t> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) {
    auto id = find(a);
    if (!id) return std::nullopt;
    args.push_back((int32_t)*id);
  }
  return find_cell(f, args.data(), (int)args.size());
}

VarSpace make_var_space(const std::vector<std::string>& vars,
                        const std::map<std::string, int>& bounds, const GroundUniverse& u) {
  VarSpace s;
  s.vars = vars;
  s.total = 1;
  for (const std::string& v : vars) {
    auto it = bounds.find(v);
    int b = it == bounds.end() ? u.max_depth() : it->second;
    size_t r = u.count_up_to(b);
    s.radix.push_back(r);
    if (r == 0) {
      s.total = 0;
      continue;
    }
    if (s.total > std::numeric_limits<size_t>::max() / r)
      throw std::overflow_error("ground instance space too large to index");
    s.total *= r;
  }
  return s;
}

namespace {

bool bound_walk(const Term& t, int avail, std::map<std::string, int>& bounds) {
  if (avail < 0) return false;
  if (t.is_var()) {
    auto [it, fresh] = bounds.emplace(t.name(), avail);
    if (!fresh) it->second = std::min(it->second, avail);
    return true;
  }
  if (t.args().empty()) return true;
  if (avail < 1) return false;
  for (const Term& a : t.args())
    if (!bound_walk(a, avail - 1, bounds)) return false;
  return true;
}

bool bound_walk_atom(const Atom& a, int bound, std::map<std::string, int>& bounds) {
  if (a.args.empty()) return bound >= 0;
  if (bound < 1) return false;
  for (const Term& t : a.args)
    if (!bound_walk(t, bound - 1, bounds)) return false;
  return true;
}

}  // namespace

std::optional<std::map<std::string, int>> var_depth_bounds(const std::vector<const Atom*>& atoms,
                                                           int bound) {
  std::map<std::string, int> r;
  for (const Atom* a : atoms)
    if (!bound_walk_atom(*a, bound, r)) return std::nullopt;
  return r;
}

std::optional<std::map<std::string, int>> var_depth_bounds(const Clause& c, int bound) {
  std::vector<const Atom*> atoms{&c.head};
  for (const Atom& b : c.body) atoms.push_back(&b);
  return var_depth_bounds(atoms, bound);
}

std::optional<std::map<std::string, int>> var_depth_bounds(const Atom& a, int bound) {
  return var_depth_bounds(std::vector<const Atom*>{&a}, bound);
}

std::vector<Clause> ground_instances(const Clause& c, int depth, GroundUniverse& u) {
  if (u.count_up_to(0) == 0)
    throw SignatureError("cannot enumerate ground instances: signature has no constants");
  u.ensure_depth(depth);
  std::vector<std::string> vars = vars_of(c);
  std::map<std::string, int> bounds;
  for (const std::string& v : vars) bounds[v] = depth;
  VarSpace space = make_var_space(vars, bounds, u);
  std::vector<Clause> out;
  std::vector<size_t> pick;
  for (size_t i = 0; i < space.total; i++) {
    space.decode(i, pick);
    Subst theta;
    for (size_t k = 0; k < vars.size(); k++) theta.bind(vars[k], u.term(pick[k]));
    out.push_back(theta.apply(c));
  }
  return out;
}

void for_each_bounded_instance(const Atom& pattern, int bound, GroundUniverse& u,
                               const std::function<void(const Atom&)>& fn) {
  auto bounds = var_depth_bounds(pattern, bound);
  if (!bounds) return;
  u.ensure_depth(bound);
  std::vector<std::string> vars = vars_of(pattern);
  VarSpace space = make_var_space(vars, *bounds, u);
  std::vector<size_t> pick;
  for (size_t i = 0; i < space.total; i++) {
    space.decode(i, pick);
    Subst theta;
    for (size_t k = 0; k < vars.size(); k++) theta.bind(vars[k], u.term(pick[k]));
    fn(theta.apply(pattern));
  }
}

std::vector<Atom> all_ground_atoms(const std::vector<std::pair<std::string, int>>& preds,
                                   int bound, GroundUniverse& u) {
  std::vector<Atom> out;
  for (const auto& [name, arity] : preds) {
    std::vector<Term> args;
    for (int i = 0; i < arity; i++) args.push_back(Term::var("V" + std::to_string(i)));
    for_each_bounded_instance(Atom(name, args), bound, u, [&](const Atom& a) { out.push_back(a); });
  }
  return out;
}

}  // namespace lpcheck
