#include "lpcheck/verify.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <stdexcept>

#include "lpcheck/unify.hpp"

namespace lpcheck {

CompletenessEvidence CompletenessEvidence::finite(std::vector<Atom> queries) {
  CompletenessEvidence ev;
  ev.kind = Kind::finite_trees;
  ev.queries = std::move(queries);
  return ev;
}

CompletenessEvidence CompletenessEvidence::recurrent(LevelMapping lm) {
  CompletenessEvidence ev;
  ev.kind = Kind::recurrent;
  ev.lm = std::move(lm);
  return ev;
}

CompletenessEvidence CompletenessEvidence::acceptable(LevelMapping lm, Specification s_prime) {
  CompletenessEvidence ev;
  ev.kind = Kind::acceptable;
  ev.lm = std::move(lm);
  ev.s_prime = std::move(s_prime);
  return ev;
}

namespace {

Report make_report(const char* check, int depth) {
  Report r;
  r.check = check;
  r.bound = depth;
  return r;
}

void note_add(Report& r, const std::string& line) {
  if (line.empty()) return;
  if (!r.note.empty()) r.note += "; ";
  r.note += line;
}

int verdict_rank(Verdict v) {
  switch (v) {
    case Verdict::refuted: return 2;
    case Verdict::inconclusive: return 1;
    case Verdict::verified_up_to_bound: return 0;
  }
  return 0;
}

// Fold a sub-check into a conjunction report: the worse verdict wins,
// the first refutation keeps its witness, and anything short of a pass
// leaves a note naming the stage.
void fold(Report& r, const Report& sub, const std::string& stage) {
  r.instances_enumerated += sub.instances_enumerated;
  r.atoms_checked += sub.atoms_checked;
  if (verdict_rank(sub.verdict) > verdict_rank(r.verdict)) {
    r.verdict = sub.verdict;
    r.witness = sub.witness;
  }
  if (sub.verdict != Verdict::verified_up_to_bound)
    note_add(r, stage + ": " + (sub.note.empty() ? verdict_name(sub.verdict) : sub.note));
}

void mark_open(Report& r, const std::string& why) {
  if (r.verdict == Verdict::verified_up_to_bound) r.verdict = Verdict::inconclusive;
  note_add(r, why);
}

bool universe_reaches(GroundUniverse& u, int depth) { return u.ensure_depth(depth) >= depth; }

// One conjunction of atoms packed into a single pseudo-atom, so the
// one-substitution instance relation on whole queries is the plain
// atom-level instance check.
Atom wrap_conjunction(const std::vector<Atom>& atoms) {
  std::vector<Term> ts;
  ts.reserve(atoms.size());
  for (const Atom& a : atoms) ts.push_back(Term::fun(a.pred, a.args));
  return Atom("$conj", std::move(ts));
}

Subst decode_binding(const VarSpace& vs, size_t idx, const GroundUniverse& u,
                     std::vector<size_t>& cells) {
  vs.decode(idx, cells);
  Subst delta;
  for (size_t k = 0; k < vs.vars.size(); k++) delta.bind(vs.vars[k], u.term(cells[k]));
  return delta;
}

// Cell index of a pattern term under a variable-to-cell assignment, or
// nullopt when the instantiated term lies outside the built universe.
std::optional<size_t> cell_of(const Term& t, const GroundUniverse& u,
                              const std::vector<std::string>& vars,
                              const std::vector<size_t>& cells) {
  if (t.is_var()) {
    for (size_t k = 0; k < vars.size(); k++)
      if (vars[k] == t.name()) return cells[k];
    return std::nullopt;
  }
  int f = u.functor_id(t.name(), (int)t.arity());
  if (f < 0) return std::nullopt;
  std::vector<int32_t> args(t.arity());
  for (size_t i = 0; i < t.arity(); i++) {
    auto c = cell_of(t.args()[i], u, vars, cells);
    if (!c) return std::nullopt;
    args[i] = (int32_t)*c;
  }
  return u.find_cell(f, args.data(), (int)t.arity());
}

std::optional<long> level_of(const Atom& pattern, const LevelMapping& lm, const GroundUniverse& u,
                             const std::vector<std::string>& vars,
                             const std::vector<size_t>& cells) {
  std::vector<size_t> argcells(pattern.args.size());
  for (size_t i = 0; i < pattern.args.size(); i++) {
    auto c = cell_of(pattern.args[i], u, vars, cells);
    if (!c) return std::nullopt;
    argcells[i] = *c;
  }
  return lm.eval_cells(u, pattern.pred, argcells);
}

// Outcome of trying to cover one ground atom with the whole program:
// ok means some clause produced an accepted instance; definitive means
// every clause either failed to match or was searched exhaustively, so
// a miss refutes rather than merely exhausting the margin.
struct CoverOutcome {
  bool ok = false;
  bool definitive = true;
  long tried = 0;
  std::optional<Clause> instance;
};

CoverOutcome cover_atom(const Program& p, const Atom& a, int body_bound, GroundUniverse& u,
                        const BodyAccept& accept) {
  CoverOutcome out;
  for (const Clause& c : p.clauses) {
    CoverResult res = probe_cover(c, a, body_bound, u, accept);
    out.tried += res.tried;
    if (res.status == CoverStatus::covered) {
      out.ok = true;
      out.instance = res.instance;
      return out;
    }
    if (res.status == CoverStatus::failed_bounded) out.definitive = false;
  }
  return out;
}

// Shared coverage scan: every atom senum enumerates must be covered by
// a clause instance whose body smem admits. senum and smem coincide for
// the plain check and differ for the per-part conditions of a split.
Report covered_impl(const Program& p, const Specification& senum, const Specification& smem,
                    int depth, GroundUniverse& u, int delta, const char* name) {
  Report r = make_report(name, depth);
  bool full = universe_reaches(u, depth);
  std::vector<Atom> atoms;
  try {
    atoms = senum.enumerate(depth, u);
  } catch (const SpecError& e) {
    r.verdict = Verdict::inconclusive;
    r.note = std::string("spec enumeration gave out: ") + e.what();
    return r;
  }
  r.atoms_checked = (long)atoms.size();

  BodyAccept accept = [&](const Atom&, const std::vector<Atom>& body) {
    for (const Atom& b : body)
      if (!smem.contains(b)) return false;
    return true;
  };

  std::string open_note;
  for (const Atom& a : atoms) {
    CoverOutcome out;
    bool trouble = false;
    try {
      out = cover_atom(p, a, a.depth() + delta, u, accept);
    } catch (const SpecError& e) {
      trouble = true;
      open_note = std::string("membership solver gave out on ") + a.str() + ": " + e.what();
    }
    r.instances_enumerated += out.tried;
    if (out.ok) continue;
    if (!trouble && out.definitive) {
      Counterexample w;
      w.kind = Counterexample::Kind::uncovered_atom;
      w.atoms = {a};
      r.witness = std::move(w);
      r.verdict = Verdict::refuted;
      note_add(r, "no clause instance can cover " + a.str());
      return r;
    }
    if (open_note.empty()) open_note = "no cover within the margin for " + a.str();
  }

  if (!open_note.empty()) {
    r.verdict = Verdict::inconclusive;
    note_add(r, open_note);
  } else if (!full) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "universe capped below the bound");
  } else {
    r.verdict = Verdict::verified_up_to_bound;
  }
  return r;
}

// Offender search behind suitability: a ground instance of a that the
// whole spec admits but part i does not.
struct SuitScan {
  std::optional<Atom> offender;
  long checked = 0;
  bool trouble = false;
  std::string trouble_note;
};

SuitScan scan_suitability(const Split& split, const Atom& a, size_t i, int depth,
                          GroundUniverse& u) {
  SuitScan sc;
  try {
    for_each_bounded_instance(a, depth, u, [&](const Atom& inst) {
      sc.checked++;
      if (sc.offender) return;
      if (split.whole.contains(inst) && !split.parts[i].contains(inst)) sc.offender = inst;
    });
  } catch (const SpecError& e) {
    sc.trouble = true;
    sc.trouble_note = e.what();
  }
  return sc;
}

void walk_nodes(const SldNode* n, const std::function<void(const SldNode*)>& fn) {
  if (!n) return;
  fn(n);
  for (const auto& c : n->children) walk_nodes(c.get(), fn);
}

bool query_has_atom(const Query& q) {
  for (const Goal& g : q)
    if (g.kind == Goal::Kind::atom) return true;
  return false;
}

void require_cuts_in_last_clause(const Program& p) {
  for (const auto& proc : p.procedures())
    for (size_t j = 0; j + 1 < proc.size(); j++)
      if (p.clauses[proc[j]].has_cut())
        throw std::invalid_argument("cut outside the last clause of its procedure: " +
                                    p.clauses[proc[j]].str());
}

// ---- rho candidate generation ----

// All anti-instances of a ground term: every independent choice of
// subterm positions replaced by holes. Holes share one placeholder name
// and are relabeled into distinct fresh variables per candidate.
const char* kHoleVar = "$h";

void anti_instances(const Term& t, std::vector<Term>& out) {
  out.push_back(Term::var(kHoleVar));
  if (t.is_const()) {
    out.push_back(t);
    return;
  }
  std::vector<std::vector<Term>> arg_choices(t.arity());
  for (size_t i = 0; i < t.arity(); i++) anti_instances(t.args()[i], arg_choices[i]);
  std::vector<size_t> pick(t.arity(), 0);
  for (;;) {
    std::vector<Term> args;
    args.reserve(t.arity());
    for (size_t i = 0; i < t.arity(); i++) args.push_back(arg_choices[i][pick[i]]);
    out.push_back(Term::fun(t.name(), std::move(args)));
    size_t i = 0;
    while (i < t.arity() && ++pick[i] == arg_choices[i].size()) pick[i++] = 0;
    if (i == t.arity()) break;
  }
}

Term relabel_holes(const Term& t, long& ctr) {
  if (t.is_var()) {
    if (t.name() == kHoleVar) return Term::var("$g" + std::to_string(ctr++));
    return t;
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& s : t.args()) args.push_back(relabel_holes(s, ctr));
  return Term::fun(t.name(), std::move(args));
}

constexpr long kEtaCap = 4096;

// Ground guard instantiations for one rho candidate: chain the post
// completions of the guard atoms left to right. Bound chosen to match
// the coverage margin of the atom under test.
void enumerate_etas(AdjustCandidate& cand, const std::vector<Atom>& guard_rho,
                    const Specification& post, int bound, GroundUniverse& u) {
  std::vector<Subst> etas;
  etas.emplace_back();
  for (const Atom& g : guard_rho) {
    std::vector<Subst> next;
    for (const Subst& eta : etas) {
      Atom inst = eta.apply(g);
      auto comps = post.completions(inst, bound, u);
      if (!comps) {
        cand.etas_exhaustive = false;
        continue;
      }
      for (const Subst& c : *comps) {
        next.push_back(eta.compose(c));
        if ((long)next.size() > kEtaCap) {
          cand.etas_exhaustive = false;
          next.resize((size_t)kEtaCap);
          break;
        }
      }
    }
    etas = std::move(next);
  }
  cand.etas = std::move(etas);
}

// Candidates for one cut clause: maximally general pre-instances of the
// head that a instantiates. Per-variable anti-instances of the matching
// substitution, plus shared fresh variables for groups of head variables
// bound to equal terms; deeper sharing between distinct subterms is not
// explored.
void clause_candidates(const Clause& c, size_t ci, const CallSuccessSpec& cs, const Atom& a,
                       int eta_bound, GroundUniverse& u, long rho_cap, AdjustCandidates& out) {
  auto mu = match(c.head, a);
  if (!mu) return;
  std::vector<std::string> hvars = vars_of(c.head);

  std::vector<std::vector<Term>> options(hvars.size());
  for (size_t k = 0; k < hvars.size(); k++) {
    const Term* b = mu->lookup(hvars[k]);
    if (b) {
      anti_instances(*b, options[k]);
    } else {
      // head variable absent from the matcher: the head position is a
      // repeated variable already bound elsewhere; keep it general
      options[k].push_back(Term::var(kHoleVar));
    }
  }

  // groups of head variables matched to the same ground term may share
  // one fresh variable instead of taking independent choices
  std::map<std::string, std::vector<size_t>> by_value;
  for (size_t k = 0; k < hvars.size(); k++) {
    const Term* b = mu->lookup(hvars[k]);
    if (b) by_value[b->str()].push_back(k);
  }
  std::vector<std::vector<size_t>> groups;
  for (auto& [val, ks] : by_value)
    if (ks.size() >= 2 && groups.size() < 10) groups.push_back(ks);

  std::vector<Atom> guard;
  if (c.cut_index)
    guard.assign(c.body.begin(), c.body.begin() + (std::ptrdiff_t)*c.cut_index);

  std::set<std::string> seen;
  std::vector<AdjustCandidate> found;
  long produced = 0;

  for (size_t mask = 0; mask < (size_t{1} << groups.size()); mask++) {
    std::vector<bool> shared(hvars.size(), false);
    std::vector<std::string> shared_name(hvars.size());
    for (size_t gi = 0; gi < groups.size(); gi++)
      if (mask & (size_t{1} << gi))
        for (size_t k : groups[gi]) {
          shared[k] = true;
          shared_name[k] = "$s" + std::to_string(gi);
        }

    std::vector<size_t> pick(hvars.size(), 0);
    for (;;) {
      if (++produced > rho_cap) {
        out.rho_exhaustive = false;
        break;
      }
      long ctr = 0;
      Subst rho;
      for (size_t k = 0; k < hvars.size(); k++) {
        Term t = shared[k] ? Term::var(shared_name[k]) : options[k][pick[k]];
        rho.bind(hvars[k], relabel_holes(t, ctr));
      }
      Atom head_rho = rho.apply(c.head);
      if (cs.pre.pattern_member(head_rho) && instance_of(a, head_rho)) {
        std::string key = canonical(head_rho).str();
        if (seen.insert(key).second) {
          AdjustCandidate cand;
          cand.clause_index = ci;
          cand.rho = rho;
          cand.head_rho = head_rho;
          std::vector<Atom> guard_rho;
          guard_rho.reserve(guard.size());
          for (const Atom& g : guard) guard_rho.push_back(rho.apply(g));
          enumerate_etas(cand, guard_rho, cs.post, eta_bound, u);
          found.push_back(std::move(cand));
        }
      }
      // advance the per-variable odometer over the unshared positions
      size_t k = 0;
      while (k < hvars.size() && (shared[k] || ++pick[k] == options[k].size())) {
        if (!shared[k]) pick[k] = 0;
        k++;
      }
      if (k == hvars.size()) break;
    }
    if (!out.rho_exhaustive) break;
  }

  // keep only maximally general candidates: the instance-closure property
  // carries condition 3 from a general head to every instance of it
  for (size_t x = 0; x < found.size(); x++) {
    bool dominated = false;
    for (size_t y = 0; y < found.size() && !dominated; y++) {
      if (x == y) continue;
      if (instance_of(found[x].head_rho, found[y].head_rho) &&
          !instance_of(found[y].head_rho, found[x].head_rho))
        dominated = true;
    }
    if (!dominated) out.list.push_back(found[x]);
  }
}

// Verdict bookkeeping for one atom inside a scan: a miss is definitive
// only when nothing was left unexplored.
struct AtomVerdict {
  bool ok = false;
  bool definitive = true;
  std::optional<Counterexample> witness;
};

}  // namespace

Report validate_split(const Split& split, const Program& p, int depth, GroundUniverse& u) {
  if (split.programs.size() != split.parts.size() || split.programs.empty())
    throw std::invalid_argument("split needs matching, non-empty program and part lists");
  Report r = make_report("split_valid", depth);
  bool full = universe_reaches(u, depth);

  auto clause_key = [](const Clause& c) {
    std::vector<Atom> all;
    all.push_back(c.head);
    all.insert(all.end(), c.body.begin(), c.body.end());
    std::vector<Atom> canon = canonical(all);
    std::string key = c.cut_index ? "!" + std::to_string(*c.cut_index) + " " : "";
    for (const Atom& a : canon) key += a.str() + " ";
    return key;
  };

  std::set<std::string> parent;
  for (const Clause& c : p.clauses) parent.insert(clause_key(c));
  for (size_t i = 0; i < split.programs.size(); i++) {
    for (const Clause& c : split.programs[i].clauses) {
      r.instances_enumerated++;
      if (!parent.count(clause_key(c))) {
        Counterexample w;
        w.kind = Counterexample::Kind::bad_clause_instance;
        w.instance = c;
        w.details = {{"part", std::to_string(i)}, {"problem", "clause not in the parent program"}};
        r.witness = std::move(w);
        r.verdict = Verdict::refuted;
        note_add(r, "part " + std::to_string(i) + " has a clause outside the program");
        return r;
      }
    }
  }

  try {
    std::vector<Atom> whole_atoms = split.whole.enumerate(depth, u);
    std::set<Atom> whole(whole_atoms.begin(), whole_atoms.end());
    std::set<Atom> parts_union;
    for (const Specification& part : split.parts) {
      std::vector<Atom> pa = part.enumerate(depth, u);
      parts_union.insert(pa.begin(), pa.end());
    }
    r.atoms_checked = (long)whole.size();
    for (const Atom& a : parts_union) {
      if (!whole.count(a)) {
        Counterexample w;
        w.kind = Counterexample::Kind::bad_clause_instance;
        w.atoms = {a};
        w.details = {{"problem", "atom in a part but not in the whole spec"}};
        r.witness = std::move(w);
        r.verdict = Verdict::refuted;
        note_add(r, "part atom outside the whole spec: " + a.str());
        return r;
      }
    }
    for (const Atom& a : whole) {
      if (!parts_union.count(a)) {
        Counterexample w;
        w.kind = Counterexample::Kind::bad_clause_instance;
        w.atoms = {a};
        w.details = {{"problem", "whole-spec atom missing from every part"}};
        r.witness = std::move(w);
        r.verdict = Verdict::refuted;
        note_add(r, "whole-spec atom missing from every part: " + a.str());
        return r;
      }
    }
  } catch (const SpecError& e) {
    r.verdict = Verdict::inconclusive;
    note_add(r, std::string("spec enumeration gave out: ") + e.what());
    return r;
  }

  if (!full) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "universe capped below the bound");
  } else {
    r.verdict = Verdict::verified_up_to_bound;
  }
  return r;
}

CoverResult probe_cover(const Clause& c, const Atom& a, int body_bound, GroundUniverse& u,
                        const BodyAccept& accept) {
  CoverResult res;
  auto theta = match(c.head, a);
  if (!theta) {
    res.status = CoverStatus::not_unifiable;
    return res;
  }
  std::vector<Atom> body;
  body.reserve(c.body.size());
  for (const Atom& b : c.body) body.push_back(theta->apply(b));

  std::vector<std::string> free = vars_of(body);
  if (free.empty()) {
    // the head forces the whole body: one candidate, checked outright,
    // so a miss here exhausts the clause no matter the bound
    res.tried = 1;
    if (accept(a, body)) {
      res.status = CoverStatus::covered;
      res.instance = Clause(a, body);
    } else {
      res.status = CoverStatus::failed_exhaustive;
    }
    return res;
  }

  std::vector<const Atom*> ptrs;
  ptrs.reserve(body.size());
  for (const Atom& b : body) ptrs.push_back(&b);
  auto bounds = var_depth_bounds(ptrs, body_bound);
  if (!bounds) {
    // instances exist beyond the margin only; nothing was explored
    res.status = CoverStatus::failed_bounded;
    return res;
  }
  int need = 0;
  for (const std::string& v : free) need = std::max(need, bounds->at(v));
  if (u.ensure_depth(need) < need) {
    res.status = CoverStatus::failed_bounded;
    return res;
  }

  VarSpace vs = make_var_space(free, *bounds, u);
  std::vector<size_t> cells;
  std::vector<Atom> ground;
  for (size_t idx = 0; idx < vs.total; idx++) {
    Subst delta = decode_binding(vs, idx, u, cells);
    ground.clear();
    for (const Atom& b : body) ground.push_back(delta.apply(b));
    res.tried++;
    if (accept(a, ground)) {
      res.status = CoverStatus::covered;
      res.instance = Clause(a, ground);
      return res;
    }
  }
  // free variables mean deeper instances were never candidates here
  res.status = CoverStatus::failed_bounded;
  return res;
}

Report check_correctness(const Program& p, const Specification& s, int depth, GroundUniverse& u,
                         ExecMode mode) {
  Report r = make_report("correctness", depth);
  bool full = universe_reaches(u, depth);
  bool trouble = false;

  for (size_t ci = 0; ci < p.clauses.size(); ci++) {
    const Clause& c = p.clauses[ci];
    auto bounds = var_depth_bounds(c, depth);
    if (!bounds) continue;  // the skeleton alone exceeds the bound
    std::vector<std::string> vars = vars_of(c);
    VarSpace vs = make_var_space(vars, *bounds, u);
    r.instances_enumerated += (long)vs.total;

    std::atomic<bool> solver_gave_out{false};
    auto violating = [&](size_t idx) {
      static thread_local std::vector<size_t> cells;
      Subst delta = decode_binding(vs, idx, u, cells);
      try {
        for (const Atom& b : c.body)
          if (!s.contains(delta.apply(b))) return false;
        return !s.contains(delta.apply(c.head));
      } catch (const SpecError&) {
        solver_gave_out = true;
        return false;
      }
    };
    auto hit = find_first_index(vs.total, mode, violating);
    if (solver_gave_out) trouble = true;
    if (hit) {
      std::vector<size_t> cells;
      Subst delta = decode_binding(vs, *hit, u, cells);
      Counterexample w;
      w.kind = Counterexample::Kind::bad_clause_instance;
      w.instance = delta.apply(Clause(c.head, c.body));
      w.clause_index = ci;
      w.details = {{"problem", "body holds in the spec but the head does not"}};
      r.witness = std::move(w);
      r.verdict = Verdict::refuted;
      note_add(r, "clause " + std::to_string(ci) + " maps spec-true bodies outside the spec");
      return r;
    }
  }

  if (trouble) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "spec membership solver gave out on some instance");
  } else if (!full) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "universe capped below the bound");
  } else {
    r.verdict = Verdict::verified_up_to_bound;
  }
  return r;
}

Report check_covered(const Program& p, const Specification& s, int depth, GroundUniverse& u,
                     int delta) {
  return covered_impl(p, s, s, depth, u, delta, "covered");
}

Report check_recurrent(const Program& p, const LevelMapping& lm, int depth, GroundUniverse& u,
                       ExecMode mode) {
  Report r = make_report("recurrent", depth);
  bool full = universe_reaches(u, depth);
  std::optional<std::string> undefined_at;

  for (size_t ci = 0; ci < p.clauses.size(); ci++) {
    const Clause& c = p.clauses[ci];
    if (c.body.empty()) continue;  // facts never constrain the mapping
    auto bounds = var_depth_bounds(c, depth);
    if (!bounds) continue;
    std::vector<std::string> vars = vars_of(c);
    VarSpace vs = make_var_space(vars, *bounds, u);
    r.instances_enumerated += (long)vs.total;

    auto violating = [&](size_t idx) {
      static thread_local std::vector<size_t> cells;
      vs.decode(idx, cells);
      auto lh = level_of(c.head, lm, u, vars, cells);
      if (!lh) return false;
      for (const Atom& b : c.body) {
        auto lb = level_of(b, lm, u, vars, cells);
        if (lb && *lh <= *lb) return true;
      }
      return false;
    };
    auto hit = find_first_index(vs.total, mode, violating);
    if (hit) {
      std::vector<size_t> cells;
      Subst delta = decode_binding(vs, *hit, u, cells);
      Clause inst = delta.apply(Clause(c.head, c.body));
      auto lh = lm.eval(inst.head);
      Counterexample w;
      w.kind = Counterexample::Kind::level_violation;
      w.instance = inst;
      w.clause_index = ci;
      for (size_t bi = 0; bi < inst.body.size(); bi++) {
        auto lb = lm.eval(inst.body[bi]);
        if (lh && lb && *lh <= *lb) {
          w.details = {{"head_level", std::to_string(*lh)},
                       {"body_level", std::to_string(*lb)},
                       {"body_position", std::to_string(bi)}};
          break;
        }
      }
      r.witness = std::move(w);
      r.verdict = Verdict::refuted;
      note_add(r, "no strict decrease in clause " + std::to_string(ci));
      return r;
    }

    if (!undefined_at) {
      auto undefined = [&](size_t idx) {
        static thread_local std::vector<size_t> cells;
        vs.decode(idx, cells);
        if (!level_of(c.head, lm, u, vars, cells)) return true;
        for (const Atom& b : c.body)
          if (!level_of(b, lm, u, vars, cells)) return true;
        return false;
      };
      auto miss = find_first_index(vs.total, mode, undefined);
      if (miss) {
        std::vector<size_t> cells;
        Subst delta = decode_binding(vs, *miss, u, cells);
        Clause inst = delta.apply(Clause(c.head, c.body));
        std::string at = inst.head.str();
        if (lm.eval(inst.head))
          for (const Atom& b : inst.body)
            if (!lm.eval(b)) {
              at = b.str();
              break;
            }
        undefined_at = at;
      }
    }
  }

  if (undefined_at) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "level mapping undefined on " + *undefined_at);
  } else if (!full) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "universe capped below the bound");
  } else {
    r.verdict = Verdict::verified_up_to_bound;
  }
  return r;
}

Report check_acceptable(const Program& p, const LevelMapping& lm, const Specification& s_prime,
                        int depth, GroundUniverse& u) {
  Report r = make_report("acceptable", depth);
  r.verdict = Verdict::verified_up_to_bound;
  bool full = universe_reaches(u, depth);

  // the definition presumes the program is correct w.r.t. the guard spec
  Report corr = check_correctness(p, s_prime, depth, u);
  fold(r, corr, "correctness against the guard spec");
  if (r.refuted()) return r;

  std::optional<std::string> undefined_at;
  bool trouble = false;
  for (size_t ci = 0; ci < p.clauses.size() && !r.refuted(); ci++) {
    const Clause& c = p.clauses[ci];
    if (c.body.empty()) continue;
    auto bounds = var_depth_bounds(c, depth);
    if (!bounds) continue;
    std::vector<std::string> vars = vars_of(c);
    VarSpace vs = make_var_space(vars, *bounds, u);
    r.instances_enumerated += (long)vs.total;

    std::vector<size_t> cells;
    for (size_t idx = 0; idx < vs.total; idx++) {
      Subst delta = decode_binding(vs, idx, u, cells);
      Clause inst = delta.apply(Clause(c.head, c.body));
      auto lh = lm.eval(inst.head);
      bool prefix_true = true;
      for (size_t bi = 0; bi < inst.body.size() && prefix_true; bi++) {
        auto lb = lm.eval(inst.body[bi]);
        if (!lh || !lb) {
          if (!undefined_at) undefined_at = (!lh ? inst.head : inst.body[bi]).str();
        } else if (*lh <= *lb) {
          Counterexample w;
          w.kind = Counterexample::Kind::level_violation;
          w.instance = inst;
          w.clause_index = ci;
          w.details = {{"head_level", std::to_string(*lh)},
                       {"body_level", std::to_string(*lb)},
                       {"body_position", std::to_string(bi)},
                       {"guarded", "prefix holds in the guard spec"}};
          r.witness = std::move(w);
          r.verdict = Verdict::refuted;
          note_add(r, "guarded decrease fails in clause " + std::to_string(ci));
          return r;
        }
        try {
          prefix_true = s_prime.contains(inst.body[bi]);
        } catch (const SpecError&) {
          trouble = true;
          prefix_true = false;
        }
      }
    }
  }

  if (undefined_at) mark_open(r, "level mapping undefined on " + *undefined_at);
  if (trouble) mark_open(r, "guard spec membership solver gave out");
  if (!full) mark_open(r, "universe capped below the bound");
  return r;
}

Report check_semi_completeness(const Program& p, const Specification& s, int depth,
                               GroundUniverse& u, int delta) {
  Report r = covered_impl(p, s, s, depth, u, delta, "semi_completeness");
  if (r.verified()) note_add(r, "every spec atom covered: the program is semi-complete up to the bound");
  return r;
}

Report check_completeness(const Program& p, const Specification& s, int depth,
                          const CompletenessEvidence& ev, GroundUniverse& u, long budget,
                          int delta) {
  Report r = make_report("completeness", depth);
  r.verdict = Verdict::verified_up_to_bound;

  if (ev.kind == CompletenessEvidence::Kind::finite_trees) {
    note_add(r, "evidence: finite SLD-trees");
    std::vector<Atom> atoms;
    try {
      atoms = s.enumerate(depth, u);
    } catch (const SpecError& e) {
      r.verdict = Verdict::inconclusive;
      note_add(r, std::string("spec enumeration gave out: ") + e.what());
      return r;
    }
    r.atoms_checked = (long)atoms.size();
    if (!universe_reaches(u, depth)) mark_open(r, "universe capped below the bound");

    std::map<size_t, SldTree> trees;
    std::optional<std::string> open;
    for (const Atom& a : atoms) {
      std::optional<size_t> qi;
      for (size_t k = 0; k < ev.queries.size(); k++)
        if (instance_of(a, ev.queries[k])) {
          qi = k;
          break;
        }
      if (!qi) {
        if (!open) open = "spec atom is no instance of any supplied query: " + a.str();
        continue;
      }
      auto it = trees.find(*qi);
      if (it == trees.end())
        it = trees.emplace(*qi, build_sld_tree(p, {ev.queries[*qi]}, budget)).first;
      const SldTree& t = it->second;
      if (!t.finite()) {
        if (!open)
          open = "SLD-tree budget exhausted for query " + ev.queries[*qi].str();
        continue;
      }
      // a finite tree carries every answer, so a spec atom that matches
      // no answer is genuinely outside the least model
      bool hit = false;
      for (const Answer& ans : t.answers)
        if (ans.instance.size() == 1 && instance_of(a, ans.instance[0])) {
          hit = true;
          break;
        }
      if (!hit) {
        Counterexample w;
        w.kind = Counterexample::Kind::missing_answer;
        w.atoms = {a};
        w.query = {ev.queries[*qi]};
        r.witness = std::move(w);
        r.verdict = Verdict::refuted;
        note_add(r, "spec atom " + a.str() + " is not an answer of its finite tree");
        return r;
      }
    }
    for (auto& [k, t] : trees) r.instances_enumerated += t.nodes;
    if (open) mark_open(r, *open);
    return r;
  }

  Report cov = covered_impl(p, s, s, depth, u, delta, "covered");
  fold(r, cov, "coverage");
  if (r.refuted()) return r;
  if (ev.kind == CompletenessEvidence::Kind::recurrent) {
    note_add(r, "evidence: recurrence");
    fold(r, check_recurrent(p, ev.lm, depth, u), "recurrence");
  } else {
    note_add(r, "evidence: acceptability");
    fold(r, check_acceptable(p, ev.lm, ev.s_prime, depth, u), "acceptability");
  }
  return r;
}

Report check_recurrently_covered(const Program& p, const Specification& s, const LevelMapping& lm,
                                 int depth, GroundUniverse& u, int delta) {
  Report r = make_report("recurrently_covered", depth);
  bool full = universe_reaches(u, depth);
  std::vector<Atom> atoms;
  try {
    atoms = s.enumerate(depth, u);
  } catch (const SpecError& e) {
    r.verdict = Verdict::inconclusive;
    note_add(r, std::string("spec enumeration gave out: ") + e.what());
    return r;
  }
  r.atoms_checked = (long)atoms.size();

  std::string open_note;
  for (const Atom& a : atoms) {
    auto la = lm.eval(a);
    if (!la) {
      if (open_note.empty()) open_note = "level mapping undefined on spec atom " + a.str();
      continue;
    }
    BodyAccept accept = [&](const Atom&, const std::vector<Atom>& body) {
      for (const Atom& b : body) {
        if (!s.contains(b)) return false;
        auto lb = lm.eval(b);
        if (!lb || *lb >= *la) return false;
      }
      return true;
    };
    CoverOutcome out;
    bool trouble = false;
    try {
      out = cover_atom(p, a, a.depth() + delta, u, accept);
    } catch (const SpecError& e) {
      trouble = true;
      if (open_note.empty())
        open_note = std::string("membership solver gave out on ") + a.str() + ": " + e.what();
    }
    r.instances_enumerated += out.tried;
    if (out.ok) continue;
    if (!trouble && out.definitive) {
      Counterexample w;
      w.kind = Counterexample::Kind::uncovered_atom;
      w.atoms = {a};
      w.details = {{"condition", "recurrently covered"}};
      r.witness = std::move(w);
      r.verdict = Verdict::refuted;
      note_add(r, "no instance covers " + a.str() + " with a strict level decrease");
      return r;
    }
    if (open_note.empty()) open_note = "no decreasing cover within the margin for " + a.str();
  }

  if (!open_note.empty()) {
    r.verdict = Verdict::inconclusive;
    note_add(r, open_note);
  } else if (!full) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "universe capped below the bound");
  } else {
    r.verdict = Verdict::verified_up_to_bound;
  }
  return r;
}

Report check_suitable(const Split& split, const Atom& a, size_t i, int depth, GroundUniverse& u) {
  if (i >= split.parts.size()) throw std::invalid_argument("split part index out of range");
  Report r = make_report("suitable", depth);
  bool full = universe_reaches(u, depth);
  SuitScan sc = scan_suitability(split, a, i, depth, u);
  r.instances_enumerated = sc.checked;
  if (sc.offender) {
    Counterexample w;
    w.kind = Counterexample::Kind::unsuitable_selection;
    w.atoms = {*sc.offender};
    w.query = {a};
    w.details = {{"part", std::to_string(i)}};
    r.witness = std::move(w);
    r.verdict = Verdict::refuted;
    note_add(r, "instance " + sc.offender->str() + " lies in the whole spec but not in part " +
                    std::to_string(i));
    return r;
  }
  if (sc.trouble) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "membership solver gave out: " + sc.trouble_note);
  } else if (!full) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "universe capped below the bound");
  } else {
    r.verdict = Verdict::verified_up_to_bound;
  }
  return r;
}

Report check_cssld_completeness(const Program& p, const Split& split, const SldTree& tree,
                                const CompletenessEvidence& ev, int depth, GroundUniverse& u,
                                int delta) {
  size_t n = split.programs.size();
  if (n == 0 || n != split.parts.size())
    throw std::invalid_argument("split needs matching, non-empty program and part lists");
  bool mismatch = false;
  walk_nodes(tree.root.get(), [&](const SldNode* node) {
    if (node->chosen_program && *node->chosen_program >= n) mismatch = true;
    if (node->in_program && *node->in_program >= n) mismatch = true;
  });
  if (mismatch) throw std::invalid_argument("tree references programs outside the split");

  Report r = make_report("cssld_completeness", depth);
  r.verdict = Verdict::verified_up_to_bound;

  // (1) each part's spec must be covered by its program w.r.t. the whole
  for (size_t i = 0; i < n; i++) {
    Report ci = covered_impl(split.programs[i], split.parts[i], split.whole, depth, u, delta,
                             "covered");
    fold(r, ci, "part " + std::to_string(i) + " coverage");
    if (r.refuted()) return r;
  }

  // (2) compatibility: every node that selected an atom must have picked
  // a program suitable for it, and no node may be left without one
  std::vector<const SldNode*> nodes;
  walk_nodes(tree.root.get(), [&](const SldNode* node) { nodes.push_back(node); });
  std::map<std::string, std::optional<Atom>> memo;
  for (const SldNode* node : nodes) {
    if (!query_has_atom(node->query)) continue;
    if (node->empty_choice) {
      Counterexample w;
      w.kind = Counterexample::Kind::unsuitable_selection;
      if (node->selected && *node->selected < node->query.size())
        w.query = {node->query[*node->selected].atom};
      w.details = {{"problem", "no program selected at a node with goals left"}};
      r.witness = std::move(w);
      r.verdict = Verdict::refuted;
      note_add(r, "a node with goals left selected no program");
      return r;
    }
    if (!node->chosen_program || !node->selected) continue;
    const Atom& sel = node->query[*node->selected].atom;
    size_t prog = *node->chosen_program;
    std::string key = canonical(sel).str() + "#" + std::to_string(prog);
    auto it = memo.find(key);
    if (it == memo.end()) {
      SuitScan sc = scan_suitability(split, sel, prog, depth, u);
      r.instances_enumerated += sc.checked;
      if (sc.trouble) mark_open(r, "membership solver gave out: " + sc.trouble_note);
      it = memo.emplace(key, sc.offender).first;
    }
    if (it->second) {
      Counterexample w;
      w.kind = Counterexample::Kind::unsuitable_selection;
      w.atoms = {*it->second};
      w.query = {sel};
      w.details = {{"part", std::to_string(prog)}};
      r.witness = std::move(w);
      r.verdict = Verdict::refuted;
      note_add(r, "program " + std::to_string(prog) + " chosen for " + sel.str() +
                      " although " + it->second->str() + " lies outside its part");
      return r;
    }
  }

  // (3) the termination-flavoured evidence
  switch (ev.kind) {
    case CompletenessEvidence::Kind::finite_trees:
      if (!tree.finite()) mark_open(r, "tree budget exhausted; finiteness unknown");
      else note_add(r, "evidence: the tree is finite");
      break;
    case CompletenessEvidence::Kind::recurrent:
      note_add(r, "evidence: recurrence");
      fold(r, check_recurrent(p, ev.lm, depth, u), "recurrence");
      break;
    case CompletenessEvidence::Kind::acceptable: {
      note_add(r, "evidence: acceptability");
      bool leftmost = true;
      for (const SldNode* node : nodes)
        if (node->selected && *node->selected != 0) leftmost = false;
      if (!leftmost)
        mark_open(r, "acceptability evidence needs leftmost selection, but the tree is not leftmost");
      fold(r, check_acceptable(p, ev.lm, ev.s_prime, depth, u), "acceptability");
      break;
    }
  }
  if (r.refuted()) return r;

  // the direct oracle is informational unless it finds a missing answer
  if (tree.finite() && !tree.unsafe_prune) {
    Report oc = tree_complete_wrt(tree, split.whole, depth, u);
    r.instances_enumerated += oc.instances_enumerated;
    if (oc.refuted()) {
      fold(r, oc, "direct oracle");
    } else if (!oc.verified()) {
      note_add(r, "direct oracle inconclusive: " + oc.note);
    } else {
      note_add(r, "direct oracle agrees");
    }
  }
  return r;
}

Report tree_complete_wrt(const SldTree& tree, const Specification& s, int depth,
                         GroundUniverse& u) {
  Report r = make_report("tree_complete", depth);
  if (!tree.finite()) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "tree budget exhausted; finiteness unknown");
    return r;
  }
  if (tree.unsafe_prune) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "a cut committed although its guard search was truncated");
    return r;
  }
  const std::vector<Atom>& root = tree.root_query;
  if (root.empty()) {
    r.verdict = Verdict::verified_up_to_bound;
    note_add(r, "empty query");
    return r;
  }
  bool full = universe_reaches(u, depth);

  std::vector<const Atom*> ptrs;
  for (const Atom& a : root) ptrs.push_back(&a);
  auto bounds = var_depth_bounds(ptrs, depth);
  if (!bounds) {
    r.verdict = Verdict::verified_up_to_bound;
    note_add(r, "no ground instance of the query fits the bound");
    return r;
  }
  std::vector<std::string> vars = vars_of(root);
  VarSpace vs = make_var_space(vars, *bounds, u);

  std::vector<Atom> wrapped_answers;
  for (const Answer& ans : tree.answers) wrapped_answers.push_back(wrap_conjunction(ans.instance));

  std::vector<size_t> cells;
  bool trouble = false;
  for (size_t idx = 0; idx < vs.total; idx++) {
    Subst delta = decode_binding(vs, idx, u, cells);
    std::vector<Atom> inst;
    inst.reserve(root.size());
    for (const Atom& a : root) inst.push_back(delta.apply(a));
    r.instances_enumerated++;
    bool wanted = false;
    try {
      wanted = models(s, inst);
    } catch (const SpecError&) {
      trouble = true;
      continue;
    }
    if (!wanted) continue;
    Atom w = wrap_conjunction(inst);
    bool hit = false;
    for (const Atom& wa : wrapped_answers)
      if (instance_of(w, wa)) {
        hit = true;
        break;
      }
    if (!hit) {
      Counterexample cw;
      cw.kind = Counterexample::Kind::missing_answer;
      cw.atoms = inst;
      cw.query = root;
      r.witness = std::move(cw);
      r.verdict = Verdict::refuted;
      std::string shown = inst.size() == 1 ? inst[0].str() : wrap_conjunction(inst).str();
      note_add(r, "spec-true instance " + shown + " matches no answer of the tree");
      return r;
    }
  }

  if (trouble) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "spec membership solver gave out on some instance");
  } else if (!full) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "universe capped below the bound");
  } else {
    r.verdict = Verdict::verified_up_to_bound;
  }
  return r;
}

AdjustCandidates adjust_candidates(const Program& p, const CallSuccessSpec& cs, const Atom& a,
                                   int depth, GroundUniverse& u, int delta, long rho_cap) {
  AdjustCandidates out;
  int eta_bound = a.depth() + delta;
  (void)depth;
  for (size_t ci = 0; ci < p.clauses.size(); ci++) {
    const Clause& c = p.clauses[ci];
    if (!c.has_cut()) continue;
    clause_candidates(c, ci, cs, a, eta_bound, u, rho_cap, out);
  }
  return out;
}

Report check_adjustably_covered(const Program& p, const Specification& s,
                                const CallSuccessSpec& cs, int depth, GroundUniverse& u,
                                int delta, long rho_cap) {
  require_cuts_in_last_clause(p);
  Report r = make_report("adjustably_covered", depth);
  bool full = universe_reaches(u, depth);
  std::vector<Atom> atoms;
  try {
    atoms = s.enumerate(depth, u);
  } catch (const SpecError& e) {
    r.verdict = Verdict::inconclusive;
    note_add(r, std::string("spec enumeration gave out: ") + e.what());
    return r;
  }
  r.atoms_checked = (long)atoms.size();

  // side condition first: the specified answers must sit inside post
  for (const Atom& a : atoms) {
    if (!atom_in_post(cs, a)) {
      Counterexample w;
      w.kind = Counterexample::Kind::uncovered_atom;
      w.atoms = {a};
      w.details = {{"condition", "spec atom outside post"}};
      r.witness = std::move(w);
      r.verdict = Verdict::refuted;
      note_add(r, "spec atom outside post: " + a.str());
      return r;
    }
  }

  BodyAccept accept = [&](const Atom&, const std::vector<Atom>& body) {
    for (const Atom& b : body)
      if (!s.contains(b)) return false;
    return true;
  };

  std::string open_note;
  for (const Atom& a : atoms) {
    int bound = a.depth() + delta;
    AtomVerdict av;
    try {
      // a cut-free clause covering the atom settles it outright
      for (const Clause& c : p.clauses) {
        if (c.has_cut()) continue;
        CoverResult res = probe_cover(c, a, bound, u, accept);
        r.instances_enumerated += res.tried;
        if (res.status == CoverStatus::covered) {
          av.ok = true;
          break;
        }
        if (res.status == CoverStatus::failed_bounded) av.definitive = false;
      }

      if (!av.ok) {
        for (size_t ci = 0; ci < p.clauses.size() && !av.ok; ci++) {
          const Clause& c = p.clauses[ci];
          if (!c.has_cut()) continue;
          if (!match(c.head, a)) continue;  // definitive for this clause

          size_t k = *c.cut_index;
          std::vector<Atom> guard(c.body.begin(), c.body.begin() + (std::ptrdiff_t)k);
          std::vector<Atom> residual(c.body.begin() + (std::ptrdiff_t)k, c.body.end());

          // condition 2: the guard prefix must already cover the atom
          CoverResult pre_res = probe_cover(Clause(c.head, guard), a, bound, u, accept);
          r.instances_enumerated += pre_res.tried;
          if (pre_res.status != CoverStatus::covered) {
            if (pre_res.status == CoverStatus::failed_bounded) av.definitive = false;
            continue;
          }

          // condition 3: the residual clause must cover the atom under
          // every pre-instance of the head and every post-true guard
          // instantiation
          AdjustCandidates cands;
          clause_candidates(c, ci, cs, a, bound, u, rho_cap, cands);
          if (!cands.rho_exhaustive) av.definitive = false;
          bool clause_ok = true;
          bool clause_definitive = true;
          for (const AdjustCandidate& cand : cands.list) {
            if (!cand.etas_exhaustive) clause_definitive = false;
            for (const Subst& eta : cand.etas) {
              Clause res_clause(eta.apply(cand.rho.apply(c.head)),
                                eta.apply(cand.rho.apply(residual)));
              CoverResult rr = probe_cover(res_clause, a, bound, u, accept);
              r.instances_enumerated += rr.tried;
              if (rr.status == CoverStatus::covered) continue;
              clause_ok = false;
              if (rr.status == CoverStatus::failed_bounded) {
                clause_definitive = false;
              } else if (!av.witness) {
                // a definitive miss under a genuine (rho, eta) pair
                // refutes this clause, whatever the bound
                Counterexample w;
                w.kind = Counterexample::Kind::adjustable_cover_failure;
                w.atoms = {a};
                w.instance = res_clause;
                w.clause_index = ci;
                w.substs = {{"rho", cand.rho}, {"eta", eta}};
                av.witness = std::move(w);
              }
            }
          }
          if (clause_ok && clause_definitive && cands.rho_exhaustive) {
            av.ok = true;
          } else if (!clause_definitive || !cands.rho_exhaustive) {
            av.definitive = false;
          } else if (!clause_ok && !av.witness) {
            av.definitive = av.definitive && true;
          }
        }
      }
    } catch (const SpecError& e) {
      av.definitive = false;
      if (open_note.empty())
        open_note = std::string("membership solver gave out on ") + a.str() + ": " + e.what();
    }

    if (av.ok) continue;
    if (av.definitive) {
      if (!av.witness) {
        Counterexample w;
        w.kind = Counterexample::Kind::uncovered_atom;
        w.atoms = {a};
        w.details = {{"condition", "adjustably covered"}};
        av.witness = std::move(w);
      }
      r.witness = std::move(av.witness);
      r.verdict = Verdict::refuted;
      note_add(r, "no clause adjustably covers " + a.str());
      return r;
    }
    if (open_note.empty()) open_note = "no adjustable cover within the margin for " + a.str();
  }

  if (!open_note.empty()) {
    r.verdict = Verdict::inconclusive;
    note_add(r, open_note);
  } else if (!full) {
    r.verdict = Verdict::inconclusive;
    note_add(r, "universe capped below the bound");
  } else {
    r.verdict = Verdict::verified_up_to_bound;
    note_add(r, "rho candidates explored at whole-variable sharing granularity");
  }
  return r;
}

Report check_cut_completeness(const Program& p, const Specification& s, const CallSuccessSpec& cs,
                              const Atom& query, int depth, long budget, GroundUniverse& u,
                              int delta) {
  if (!atom_in_pre(cs, query))
    throw std::invalid_argument("query outside pre: " + query.str());
  require_cuts_in_last_clause(p);

  Report r = make_report("cut_completeness", depth);
  r.verdict = Verdict::verified_up_to_bound;

  SldTree t = build_pruned_ld_tree(p, {query}, budget);
  r.instances_enumerated += t.nodes;
  if (!t.finite()) mark_open(r, "pruned tree budget exhausted; finiteness unknown");
  if (t.unsafe_prune) mark_open(r, "a cut committed although its guard search was truncated");

  fold(r, check_cs_correct_runtime(p, cs, {query}, budget), "call-success runtime");
  if (r.refuted()) return r;

  fold(r, check_adjustably_covered(p, s, cs, depth, u, delta), "adjustable coverage");
  if (r.refuted()) return r;

  if (t.finite() && !t.unsafe_prune) {
    Report oc = tree_complete_wrt(t, s, depth, u);
    r.instances_enumerated += oc.instances_enumerated;
    if (oc.refuted()) {
      fold(r, oc, "direct oracle");
    } else if (!oc.verified()) {
      note_add(r, "direct oracle inconclusive: " + oc.note);
    } else {
      note_add(r, "direct oracle agrees");
    }
  }
  return r;
}

namespace {

const std::string* detail_value(const Counterexample& w, const std::string& key) {
  for (const auto& [k, v] : w.details)
    if (k == key) return &v;
  return nullptr;
}

const Subst* subst_value(const Counterexample& w, const std::string& key) {
  for (const auto& [k, v] : w.substs)
    if (k == key) return &v;
  return nullptr;
}

[[noreturn]] void missing(const char* what) {
  throw std::invalid_argument(std::string("witness revalidation needs ") + what);
}

}  // namespace

bool revalidate_witness(const Report& r, const RevalidateContext& ctx) {
  if (!r.refuted()) return true;
  if (!r.witness) return false;
  const Counterexample& w = *r.witness;

  switch (w.kind) {
    case Counterexample::Kind::bad_clause_instance: {
      // split-shape witnesses carry no clause instance to replay
      if (!w.instance && !w.atoms.empty() && detail_value(w, "problem")) {
        if (!ctx.split) missing("the split");
        if (!ctx.universe) missing("the universe");
        const Atom& a = w.atoms[0];
        bool in_whole = ctx.split->whole.contains(a);
        bool in_part = false;
        for (const Specification& part : ctx.split->parts)
          if (part.contains(a)) in_part = true;
        return in_whole != in_part;
      }
      if (!ctx.program) missing("the program");
      if (!ctx.spec) missing("the spec");
      if (!w.instance || !w.clause_index) return false;
      if (*w.clause_index >= ctx.program->clauses.size()) return false;
      const Clause& c = ctx.program->clauses[*w.clause_index];
      const Clause& inst = *w.instance;
      std::vector<Atom> cv{c.head};
      cv.insert(cv.end(), c.body.begin(), c.body.end());
      std::vector<Atom> iv{inst.head};
      iv.insert(iv.end(), inst.body.begin(), inst.body.end());
      if (!inst.head.ground()) return false;
      for (const Atom& b : inst.body)
        if (!b.ground()) return false;
      if (!instance_of(wrap_conjunction(iv), wrap_conjunction(cv))) return false;
      for (const Atom& b : inst.body)
        if (!ctx.spec->contains(b)) return false;
      return !ctx.spec->contains(inst.head);
    }

    case Counterexample::Kind::level_violation: {
      if (!ctx.program) missing("the program");
      if (!ctx.lm) missing("the level mapping");
      if (!w.instance || !w.clause_index) return false;
      const Clause& inst = *w.instance;
      auto lh = ctx.lm->eval(inst.head);
      if (!lh) return false;
      bool guarded = detail_value(w, "guarded") != nullptr;
      if (guarded && !ctx.s_prime) missing("the guard spec");
      bool prefix_true = true;
      for (size_t bi = 0; bi < inst.body.size(); bi++) {
        if (guarded && !prefix_true) return false;
        auto lb = ctx.lm->eval(inst.body[bi]);
        if (lb && *lh <= *lb) return true;
        if (guarded) prefix_true = ctx.s_prime->contains(inst.body[bi]);
      }
      return false;
    }

    case Counterexample::Kind::uncovered_atom: {
      if (w.atoms.empty()) return false;
      const Atom& a = w.atoms[0];
      const std::string* cond = detail_value(w, "condition");
      if (cond && *cond == "spec atom outside post") {
        if (!ctx.cs) missing("the call-success spec");
        if (!ctx.spec) missing("the spec");
        return ctx.spec->contains(a) && !atom_in_post(*ctx.cs, a);
      }
      if (!ctx.program) missing("the program");
      if (!ctx.spec) missing("the spec");
      if (!ctx.universe) missing("the universe");
      BodyAccept accept = [&](const Atom&, const std::vector<Atom>& body) {
        for (const Atom& b : body)
          if (!ctx.spec->contains(b)) return false;
        return true;
      };
      if (cond && *cond == "recurrently covered") {
        if (!ctx.lm) missing("the level mapping");
        auto la = ctx.lm->eval(a);
        if (!la) return false;
        BodyAccept rec = [&](const Atom&, const std::vector<Atom>& body) {
          for (const Atom& b : body) {
            if (!ctx.spec->contains(b)) return false;
            auto lb = ctx.lm->eval(b);
            if (!lb || *lb >= *la) return false;
          }
          return true;
        };
        CoverOutcome out = cover_atom(*ctx.program, a, a.depth() + ctx.delta, *ctx.universe, rec);
        return !out.ok && out.definitive;
      }
      if (cond && *cond == "adjustably covered") {
        if (!ctx.cs) missing("the call-success spec");
        Report again = check_adjustably_covered(*ctx.program, *ctx.spec, *ctx.cs, ctx.depth,
                                                *ctx.universe, ctx.delta);
        return again.refuted();
      }
      CoverOutcome out = cover_atom(*ctx.program, a, a.depth() + ctx.delta, *ctx.universe, accept);
      return !out.ok && out.definitive;
    }

    case Counterexample::Kind::unsuitable_selection: {
      if (!ctx.split) missing("the split");
      const std::string* problem = detail_value(w, "problem");
      if (problem) {
        if (!ctx.tree) missing("the tree");
        bool found = false;
        walk_nodes(ctx.tree->root.get(), [&](const SldNode* node) {
          if (node->empty_choice && query_has_atom(node->query)) found = true;
        });
        return found;
      }
      const std::string* part = detail_value(w, "part");
      if (!part || w.atoms.empty()) return false;
      size_t i = (size_t)std::stoul(*part);
      if (i >= ctx.split->parts.size()) return false;
      const Atom& offender = w.atoms[0];
      if (!offender.ground()) return false;
      if (!w.query.empty() && !instance_of(offender, w.query[0])) return false;
      return ctx.split->whole.contains(offender) && !ctx.split->parts[i].contains(offender);
    }

    case Counterexample::Kind::adjustable_cover_failure: {
      if (!ctx.program) missing("the program");
      if (!ctx.spec) missing("the spec");
      if (!ctx.cs) missing("the call-success spec");
      if (!ctx.universe) missing("the universe");
      if (w.atoms.empty() || !w.clause_index) return false;
      const Subst* rho = subst_value(w, "rho");
      const Subst* eta = subst_value(w, "eta");
      if (!rho || !eta) return false;
      if (*w.clause_index >= ctx.program->clauses.size()) return false;
      const Clause& c = ctx.program->clauses[*w.clause_index];
      if (!c.has_cut()) return false;
      const Atom& a = w.atoms[0];
      Atom head_rho = rho->apply(c.head);
      if (!ctx.cs->pre.pattern_member(head_rho)) return false;
      if (!instance_of(a, head_rho)) return false;
      size_t k = *c.cut_index;
      for (size_t bi = 0; bi < k; bi++) {
        Atom g = eta->apply(rho->apply(c.body[bi]));
        if (!g.ground() || !atom_in_post(*ctx.cs, g)) return false;
      }
      std::vector<Atom> residual(c.body.begin() + (std::ptrdiff_t)k, c.body.end());
      Clause res_clause(eta->apply(head_rho), eta->apply(rho->apply(residual)));
      BodyAccept accept = [&](const Atom&, const std::vector<Atom>& body) {
        for (const Atom& b : body)
          if (!ctx.spec->contains(b)) return false;
        return true;
      };
      CoverResult res = probe_cover(res_clause, a, a.depth() + ctx.delta, *ctx.universe, accept);
      return res.status == CoverStatus::not_unifiable ||
             res.status == CoverStatus::failed_exhaustive;
    }

    case Counterexample::Kind::missing_answer: {
      if (!ctx.spec) missing("the spec");
      if (w.atoms.empty()) return false;
      for (const Atom& a : w.atoms)
        if (!a.ground()) return false;
      if (!models(*ctx.spec, w.atoms)) return false;
      const SldTree* t = ctx.tree;
      SldTree rebuilt;
      if (!t) {
        if (!ctx.program) missing("the program or the tree");
        if (w.query.empty()) return false;
        rebuilt = build_sld_tree(*ctx.program, w.query, ctx.budget);
        t = &rebuilt;
      }
      if (!t->finite()) return false;
      Atom wrapped = wrap_conjunction(w.atoms);
      for (const Answer& ans : t->answers)
        if (ans.instance.size() == w.atoms.size() &&
            instance_of(wrapped, wrap_conjunction(ans.instance)))
          return false;
      return true;
    }
  }
  return false;
}

}  // namespace lpcheck
