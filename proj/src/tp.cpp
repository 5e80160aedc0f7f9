#include "lpcheck/tp.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace lpcheck {

bool BoundedModel::contains(const Atom& a) const {
  return std::binary_search(atoms.begin(), atoms.end(), a);
}

std::vector<Atom> BoundedModel::settled() const {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  std::set_difference(atoms.begin(), atoms.end(), censored.begin(), censored.end(),
                      std::back_inserter(out));
  return out;
}

namespace {

// Ground instances interned to dense ids so the fixpoint loop runs on
// plain integers instead of structural term comparisons.
struct InstanceTable {
  std::vector<Atom> atom_of;
  std::map<Atom, int> id_of;
  struct Inst {
    int head;
    std::vector<int> body;
  };
  std::vector<Inst> insts;

  int intern(Atom a) {
    auto [it, fresh] = id_of.emplace(std::move(a), (int)atom_of.size());
    if (fresh) atom_of.push_back(it->first);
    return it->second;
  }
};

// Every instance whose atoms (head and body alike) have depth <= depth.
// The per-variable bounds derived from occurrence positions make the
// enumeration exact: a binding within its bound can push no atom past
// the depth, and any instance fitting the depth satisfies the bounds.
void materialize(const Program& p, int depth, GroundUniverse& u, InstanceTable& t) {
  for (const Clause& c : p.clauses) {
    auto bounds = var_depth_bounds(c, depth);
    if (!bounds) continue;
    std::vector<std::string> vars = vars_of(c);
    VarSpace vs = make_var_space(vars, *bounds, u);
    std::vector<size_t> cells;
    for (size_t idx = 0; idx < vs.total; idx++) {
      vs.decode(idx, cells);
      Subst delta;
      for (size_t k = 0; k < vars.size(); k++) delta.bind(vars[k], u.term(cells[k]));
      InstanceTable::Inst inst;
      inst.head = t.intern(delta.apply(c.head));
      inst.body.reserve(c.body.size());
      for (const Atom& b : c.body) inst.body.push_back(t.intern(delta.apply(b)));
      t.insts.push_back(std::move(inst));
    }
  }
}

}  // namespace

BoundedModel bounded_least_model(const Program& p, int depth, GroundUniverse& u,
                                 int iteration_cap, ExecMode mode) {
  u.ensure_depth(depth);
  InstanceTable t;
  materialize(p, depth, u, t);

  std::vector<char> in_model(t.atom_of.size(), 0);
  std::vector<char> fired(t.insts.size(), 0);

  BoundedModel out;
  std::vector<int> last_wave;
  while (out.waves < iteration_cap) {
    std::vector<size_t> ready = collect_indices(t.insts.size(), mode, [&](size_t i) {
      if (fired[i]) return false;
      for (int b : t.insts[i].body)
        if (!in_model[b]) return false;
      return true;
    });
    std::vector<int> added;
    for (size_t i : ready) {
      fired[i] = 1;
      int h = t.insts[i].head;
      if (!in_model[h]) {
        in_model[h] = 1;
        added.push_back(h);
      }
    }
    if (added.empty()) {
      out.saturated = true;
      break;
    }
    out.waves++;
    last_wave = std::move(added);
  }

  for (size_t id = 0; id < t.atom_of.size(); id++)
    if (in_model[id]) out.atoms.push_back(t.atom_of[id]);
  std::sort(out.atoms.begin(), out.atoms.end());
  if (!out.saturated) {
    for (int id : last_wave) out.censored.push_back(t.atom_of[id]);
    std::sort(out.censored.begin(), out.censored.end());
  }
  return out;
}

std::vector<Atom> reference_least_model(const Program& p, int depth, GroundUniverse& u) {
  u.ensure_depth(depth);
  std::set<Atom> model;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause& c : p.clauses) {
      std::vector<std::string> vars = vars_of(c);
      // uniform bounds plus an explicit depth filter on the built atoms,
      // restating the definition rather than reusing the bounds analysis
      std::map<std::string, int> caps;
      for (const std::string& v : vars) caps.emplace(v, depth);
      VarSpace vs = make_var_space(vars, caps, u);
      std::vector<size_t> cells;
      for (size_t idx = 0; idx < vs.total; idx++) {
        vs.decode(idx, cells);
        Subst delta;
        for (size_t k = 0; k < vars.size(); k++) delta.bind(vars[k], u.term(cells[k]));
        Atom head = delta.apply(c.head);
        if (head.depth() > depth) continue;
        bool ok = true;
        for (const Atom& b : c.body) {
          Atom inst = delta.apply(b);
          if (inst.depth() > depth || !model.count(inst)) {
            ok = false;
            break;
          }
        }
        if (ok && model.insert(std::move(head)).second) changed = true;
      }
    }
  }
  return {model.begin(), model.end()};
}

}  // namespace lpcheck
