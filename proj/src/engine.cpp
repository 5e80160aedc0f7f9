#include "lpcheck/engine.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "lpcheck/unify.hpp"

namespace lpcheck {

Query make_query(const std::vector<Atom>& atoms) {
  Query q;
  q.reserve(atoms.size());
  for (const Atom& a : atoms) q.emplace_back(a);
  return q;
}

std::string query_str(const Query& q) {
  if (q.empty()) return "true";
  std::string s;
  for (size_t i = 0; i < q.size(); i++) {
    if (i) s += ", ";
    s += q[i].kind == Goal::Kind::barrier ? "!" : q[i].atom.str();
  }
  return s;
}

namespace {

Goal applied(const Goal& g, const Subst& theta) {
  if (g.kind == Goal::Kind::barrier) return g;
  return Goal(theta.apply(g.atom));
}

size_t first_atom_pos(const Query& q) {
  for (size_t i = 0; i < q.size(); i++)
    if (q[i].kind == Goal::Kind::atom) return i;
  throw EngineError("query has no selectable atom");
}

// Answer bookkeeping shared by all tree builders.
struct AnswerSink {
  SldTree* tree;
  std::vector<std::string> root_vars;
  std::set<std::vector<Atom>> seen;

  explicit AnswerSink(SldTree* t) : tree(t), root_vars(vars_of(t->root_query)) {}

  void record(const Subst& acc) {
    Answer a;
    a.theta = acc.restricted_to(root_vars);
    a.instance = a.theta.apply(tree->root_query);
    if (seen.insert(canonical(a.instance)).second) tree->answers.push_back(std::move(a));
  }
};

struct BuildCx {
  const std::vector<Program>* programs;
  const SelectionRule* srule = nullptr;
  const CSelectionRule* csrule = nullptr;
  long budget;
  VarNamer namer;
  AnswerSink sink;
};

void expand(SldNode& node, const Subst& acc, size_t depth, BuildCx& cx) {
  cx.sink.tree->nodes++;
  if (node.query.empty()) {
    node.leaf = SldNode::Leaf::success;
    cx.sink.record(acc);
    return;
  }
  if (cx.budget-- <= 0) {
    node.leaf = SldNode::Leaf::budget;
    cx.sink.tree->budget_exhausted = true;
    return;
  }

  size_t pos;
  std::optional<size_t> prog;
  if (cx.csrule) {
    CsChoice c = (*cx.csrule)(node.query, depth);
    if (c.position >= node.query.size() ||
        node.query[c.position].kind != Goal::Kind::atom)
      throw EngineError("selection rule chose an invalid position");
    pos = c.position;
    node.selected = pos;
    if (!c.program) {
      node.leaf = SldNode::Leaf::pruned;
      node.empty_choice = true;
      return;
    }
    if (*c.program >= cx.programs->size())
      throw EngineError("selection rule chose a program out of range");
    prog = *c.program;
  } else {
    pos = (*cx.srule)(node.query);
    if (pos >= node.query.size() ||
        node.query[pos].kind != Goal::Kind::atom)
      throw EngineError("selection rule chose an invalid position");
    node.selected = pos;
    prog = 0;
  }
  node.chosen_program = prog;

  const Program& pr = (*cx.programs)[*prog];
  const Atom sel = node.query[pos].atom;
  for (size_t ci : pr.clauses_for(sel)) {
    Clause cv = cx.namer.rename_clause(pr.clauses[ci]);
    auto mgu = unify(sel, cv.head);
    if (!mgu) continue;
    auto child = std::make_unique<SldNode>();
    child->in_program = prog;
    child->in_clause = ci;
    child->in_mgu = *mgu;
    child->query.reserve(node.query.size() - 1 + cv.body.size());
    for (size_t i = 0; i < pos; i++) child->query.push_back(applied(node.query[i], *mgu));
    for (const Atom& b : cv.body) child->query.emplace_back(mgu->apply(b));
    for (size_t i = pos + 1; i < node.query.size(); i++)
      child->query.push_back(applied(node.query[i], *mgu));
    expand(*child, acc.compose(*mgu), depth + 1, cx);
    node.children.push_back(std::move(child));
  }
  node.leaf = node.children.empty() ? SldNode::Leaf::failure : SldNode::Leaf::inner;
}

SldTree build_tree_common(const std::vector<Program>& programs,
                          const std::vector<Atom>& query, const SelectionRule* srule,
                          const CSelectionRule* csrule, long budget) {
  SldTree t;
  t.root_query = query;
  t.root = std::make_unique<SldNode>();
  t.root->query = make_query(query);
  BuildCx cx{&programs, srule, csrule, budget, VarNamer{}, AnswerSink(&t)};
  cx.namer.avoid(vars_of(query));
  expand(*t.root, Subst{}, 0, cx);
  return t;
}

}  // namespace

SelectionRule leftmost_selection() {
  return [](const Query& q) { return first_atom_pos(q); };
}

SldTree build_sld_tree(const Program& p, const std::vector<Atom>& query, long budget,
                       const SelectionRule& rule) {
  std::vector<Program> ps{p};
  return build_tree_common(ps, query, &rule, nullptr, budget);
}

SldTree build_cssld_tree(const std::vector<Program>& programs, const std::vector<Atom>& query,
                         const CSelectionRule& rule, long budget) {
  if (programs.empty()) throw EngineError("csSLD-tree needs at least one program");
  return build_tree_common(programs, query, nullptr, &rule, budget);
}

// ---- pruned LD construction ----

namespace {

struct PrunedCx {
  const Program* p;
  long budget;
  long trunc_events = 0;
  size_t next_id = 0;
  VarNamer namer;
  AnswerSink sink;
};

// Returns the node id a fired cut still needs to unwind to, or 0. Node
// ids grow along every path, so a smaller id is the more ancestral cut
// and wins when two are pending.
size_t pexpand(SldNode& node, const Subst& acc, PrunedCx& cx) {
  size_t my_id = ++cx.next_id;
  cx.sink.tree->nodes++;

  if (node.query.empty()) {
    node.leaf = SldNode::Leaf::success;
    cx.sink.record(acc);
    return 0;
  }

  if (node.query.front().kind == Goal::Kind::barrier) {
    const Goal barrier = node.query.front();
    // the guard search for this cut ends here; a truncation since the
    // barrier was introduced means the commit may be premature
    if (cx.trunc_events > barrier.trunc_mark) cx.sink.tree->unsafe_prune = true;
    auto child = std::make_unique<SldNode>();
    child->query.assign(node.query.begin() + 1, node.query.end());
    size_t tok = pexpand(*child, acc, cx);
    node.children.push_back(std::move(child));
    node.leaf = SldNode::Leaf::inner;
    return tok != 0 && tok < barrier.token ? tok : barrier.token;
  }

  if (cx.budget-- <= 0) {
    node.leaf = SldNode::Leaf::budget;
    cx.sink.tree->budget_exhausted = true;
    cx.trunc_events++;
    return 0;
  }

  node.selected = 0;
  node.chosen_program = 0;
  const Atom sel = node.query.front().atom;
  size_t pending = 0;
  for (size_t ci : cx.p->clauses_for(sel)) {
    Clause cv = cx.namer.rename_clause(cx.p->clauses[ci]);
    auto mgu = unify(sel, cv.head);
    if (!mgu) continue;
    auto child = std::make_unique<SldNode>();
    child->in_program = 0;
    child->in_clause = ci;
    child->in_mgu = *mgu;
    child->query.reserve(node.query.size() + cv.body.size());
    for (size_t k = 0; k <= cv.body.size(); k++) {
      if (cv.cut_index && *cv.cut_index == k)
        child->query.push_back(Goal::barrier(my_id, cx.trunc_events));
      if (k < cv.body.size()) child->query.emplace_back(mgu->apply(cv.body[k]));
    }
    for (size_t i = 1; i < node.query.size(); i++)
      child->query.push_back(applied(node.query[i], *mgu));
    size_t tok = pexpand(*child, acc.compose(*mgu), cx);
    node.children.push_back(std::move(child));
    if (tok != 0) {
      // a cut fired: my remaining clauses are discarded either way, and
      // a token for a node above me keeps unwinding
      if (tok != my_id) pending = tok;
      break;
    }
  }
  node.leaf = node.children.empty() ? SldNode::Leaf::failure : SldNode::Leaf::inner;
  return pending;
}

}  // namespace

SldTree build_pruned_ld_tree(const Program& p, const std::vector<Atom>& query, long budget) {
  SldTree t;
  t.root_query = query;
  t.root = std::make_unique<SldNode>();
  t.root->query = make_query(query);
  PrunedCx cx{&p, budget, 0, 0, VarNamer{}, AnswerSink(&t)};
  cx.namer.avoid(vars_of(query));
  pexpand(*t.root, Subst{}, cx);
  return t;
}

// ---- c-selection rules ----

CSelectionRule cs_fixed(size_t program_index) {
  return [program_index](const Query& q, size_t) -> CsChoice {
    return {first_atom_pos(q), program_index};
  };
}

CSelectionRule cs_alternating(size_t program_count) {
  if (program_count == 0) throw EngineError("alternating rule needs at least one program");
  return [program_count](const Query& q, size_t depth) -> CsChoice {
    return {first_atom_pos(q), depth % program_count};
  };
}

namespace {

// ground(a) restricted to the depth: every instance admitted by the
// whole spec must be admitted by the part
bool part_suits(const Specification& whole, const Specification& part, const Atom& a,
                int depth, GroundUniverse& u) {
  auto bounds = var_depth_bounds(a, depth);
  if (!bounds) return true;  // no instance to check within the bound
  std::vector<std::string> vars = vars_of(a);
  VarSpace vs = make_var_space(vars, *bounds, u);
  std::vector<size_t> cells;
  for (size_t idx = 0; idx < vs.total; idx++) {
    vs.decode(idx, cells);
    Subst delta;
    for (size_t k = 0; k < vars.size(); k++) delta.bind(vars[k], u.term(cells[k]));
    Atom g = delta.apply(a);
    if (whole.contains(g) && !part.contains(g)) return false;
  }
  return true;
}

}  // namespace

CSelectionRule cs_suitability(Specification whole, std::vector<Specification> parts,
                              int depth, GroundUniverse& u) {
  u.ensure_depth(depth);
  return [whole = std::move(whole), parts = std::move(parts), depth,
          &u](const Query& q, size_t) -> CsChoice {
    size_t pos = first_atom_pos(q);
    const Atom& a = q[pos].atom;
    for (size_t i = 0; i < parts.size(); i++)
      if (part_suits(whole, parts[i], a, depth, u)) return {pos, i};
    return {pos, std::nullopt};
  };
}

CSelectionRule cs_table(std::vector<CsTableEntry> entries) {
  return [entries = std::move(entries)](const Query& q, size_t) -> CsChoice {
    size_t pos = first_atom_pos(q);
    const Atom& a = q[pos].atom;
    for (const CsTableEntry& e : entries)
      if (instance_of(a, e.pattern)) return {pos, e.program};
    return {pos, std::nullopt};
  };
}

// ---- call-success runtime monitoring ----

namespace {

struct CsGoal {
  bool marker = false;  // marker goals carry a call being answered
  Atom atom;
};

struct MonCx {
  const Program* p;
  const CallSuccessSpec* cs;
  long budget;
  bool exhausted = false;
  VarNamer namer;
  long selections = 0;
  long expansions = 0;
  std::vector<Atom> prefix;  // selected atoms from the root to here
  std::optional<Counterexample> bad;
};

// false once a violation is found
bool monitor(std::vector<CsGoal> goals, MonCx& cx) {
  size_t at = 0;
  while (at < goals.size() && goals[at].marker) {
    if (!atom_in_post(*cx.cs, goals[at].atom)) {
      Counterexample w;
      w.kind = Counterexample::Kind::unsuitable_selection;
      w.atoms = {goals[at].atom};
      w.query = cx.prefix;
      w.details.emplace_back("violation", "computed answer not in post");
      cx.bad = std::move(w);
      return false;
    }
    at++;
  }
  if (at == goals.size()) return true;
  if (cx.budget-- <= 0) {
    cx.exhausted = true;
    return true;
  }

  const Atom sel = goals[at].atom;
  cx.selections++;
  cx.prefix.push_back(sel);
  if (!atom_in_pre(*cx.cs, sel)) {
    Counterexample w;
    w.kind = Counterexample::Kind::unsuitable_selection;
    w.atoms = {sel};
    w.query = cx.prefix;
    w.details.emplace_back("violation", "selected atom not in pre");
    cx.bad = std::move(w);
    return false;
  }
  for (size_t ci : cx.p->clauses_for(sel)) {
    Clause cv = cx.namer.rename_clause(cx.p->clauses[ci]);
    auto mgu = unify(sel, cv.head);
    if (!mgu) continue;
    cx.expansions++;
    std::vector<CsGoal> next;
    next.reserve(goals.size() - at + cv.body.size());
    for (const Atom& b : cv.body) next.push_back({false, mgu->apply(b)});
    next.push_back({true, mgu->apply(sel)});
    for (size_t i = at + 1; i < goals.size(); i++)
      next.push_back({goals[i].marker, mgu->apply(goals[i].atom)});
    if (!monitor(std::move(next), cx)) return false;
  }
  cx.prefix.pop_back();
  return true;
}

}  // namespace

Report check_cs_correct_runtime(const Program& p, const CallSuccessSpec& cs,
                                const std::vector<Atom>& queries, long budget) {
  Report r;
  r.check = "cs_correct_runtime";
  r.bound = (int)std::min<long>(budget, std::numeric_limits<int>::max());
  MonCx cx{&p, &cs, budget, false, VarNamer{}, 0, 0, {}, std::nullopt};
  for (const Atom& q : queries) {
    if (!atom_in_pre(cs, q))
      throw std::invalid_argument("query " + q.str() + " is not in pre");
    cx.namer.avoid(vars_of(q));
    if (!monitor({{false, q}}, cx)) break;
    cx.prefix.clear();
  }
  r.atoms_checked = cx.selections;
  r.instances_enumerated = cx.expansions;
  if (cx.bad) {
    r.verdict = Verdict::refuted;
    r.witness = std::move(cx.bad);
  } else if (cx.exhausted) {
    r.verdict = Verdict::inconclusive;
    r.note = "budget exhausted before all derivations were explored";
  } else {
    r.verdict = Verdict::verified_up_to_bound;
  }
  return r;
}

// ---- dumps ----

namespace {

void dump_node(const SldNode& n, int indent, std::ostringstream& os) {
  os << std::string(indent * 2, ' ');
  if (n.in_clause) {
    os << "via ";
    if (n.in_program) os << "P" << (*n.in_program + 1) << ".";
    os << "c" << (*n.in_clause + 1) << " " << n.in_mgu.str() << ": ";
  }
  os << query_str(n.query);
  switch (n.leaf) {
    case SldNode::Leaf::success:
      os << "  [success]";
      break;
    case SldNode::Leaf::failure:
      os << "  [failure]";
      break;
    case SldNode::Leaf::budget:
      os << "  [budget]";
      break;
    case SldNode::Leaf::pruned:
      os << (n.empty_choice ? "  [no program chosen]" : "  [pruned]");
      break;
    case SldNode::Leaf::inner:
      break;
  }
  os << "\n";
  for (const auto& c : n.children) dump_node(*c, indent + 1, os);
}

const char* leaf_name(SldNode::Leaf l) {
  switch (l) {
    case SldNode::Leaf::inner:
      return "inner";
    case SldNode::Leaf::success:
      return "success";
    case SldNode::Leaf::failure:
      return "failure";
    case SldNode::Leaf::budget:
      return "budget";
    case SldNode::Leaf::pruned:
      return "pruned";
  }
  return "?";
}

nlohmann::json node_json(const SldNode& n) {
  nlohmann::json j;
  j["query"] = query_str(n.query);
  j["leaf"] = leaf_name(n.leaf);
  if (n.in_clause) j["clause"] = *n.in_clause;
  if (n.in_program) j["program"] = *n.in_program;
  if (!n.in_mgu.empty()) j["mgu"] = n.in_mgu.str();
  if (n.selected) j["selected"] = *n.selected;
  if (n.chosen_program) j["chosen_program"] = *n.chosen_program;
  if (n.empty_choice) j["empty_choice"] = true;
  if (!n.children.empty()) {
    j["children"] = nlohmann::json::array();
    for (const auto& c : n.children) j["children"].push_back(node_json(*c));
  }
  return j;
}

}  // namespace

std::string tree_text(const SldTree& t) {
  std::ostringstream os;
  dump_node(*t.root, 0, os);
  os << "answers (" << t.answers.size() << "):";
  for (const Answer& a : t.answers) {
    os << "\n  ";
    for (size_t i = 0; i < a.instance.size(); i++)
      os << (i ? ", " : "") << a.instance[i].str();
  }
  if (t.budget_exhausted) os << "\nbudget exhausted";
  if (t.unsafe_prune) os << "\nunsafe prune: a cut committed after a truncated guard search";
  return os.str();
}

nlohmann::json tree_json(const SldTree& t) {
  nlohmann::json j;
  j["format_version"] = 1;
  nlohmann::json rq = nlohmann::json::array();
  for (const Atom& a : t.root_query) rq.push_back(a.str());
  j["root_query"] = std::move(rq);
  j["nodes"] = t.nodes;
  j["budget_exhausted"] = t.budget_exhausted;
  j["unsafe_prune"] = t.unsafe_prune;
  nlohmann::json ans = nlohmann::json::array();
  for (const Answer& a : t.answers) {
    nlohmann::json one = nlohmann::json::array();
    for (const Atom& x : a.instance) one.push_back(x.str());
    ans.push_back(std::move(one));
  }
  j["answers"] = std::move(ans);
  j["tree"] = node_json(*t.root);
  return j;
}

}  // namespace lpcheck
