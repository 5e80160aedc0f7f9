#include "lpcheck/diagnose.hpp"

#include <sstream>

#include "lpcheck/unify.hpp"
#include "lpcheck/verify.hpp"

namespace lpcheck {

namespace {

std::string pred_key(const Atom& a) {
  return a.pred + "/" + std::to_string(a.args.size());
}

// Groups keep the order in which their predicate first produced a
// culprit, so reports read in enumeration order.
void add_culprit(Diagnosis& d, Culprit cul) {
  std::string key = pred_key(cul.atom);
  for (CulpritGroup& g : d.groups) {
    if (g.predicate == key) {
      g.culprits.push_back(std::move(cul));
      d.total++;
      return;
    }
  }
  CulpritGroup g;
  g.predicate = key;
  g.culprits.push_back(std::move(cul));
  d.groups.push_back(std::move(g));
  d.total++;
}

void note_open(Diagnosis& d, const std::string& why) {
  if (d.open_note.empty()) d.open_note = why;
}

Subst decode_binding(const VarSpace& vs, size_t idx, const GroundUniverse& u,
                     std::vector<size_t>& cells) {
  vs.decode(idx, cells);
  Subst delta;
  for (size_t k = 0; k < vs.vars.size(); k++) delta.bind(vs.vars[k], u.term(cells[k]));
  return delta;
}

}  // namespace

Diagnosis diagnose_incompleteness(const Program& p, const Specification& s, int depth,
                                  GroundUniverse& u, int delta, size_t cap) {
  Diagnosis d;
  d.kind = Diagnosis::Kind::incompleteness;
  d.bound = depth;
  if (cap == 0) cap = 1;

  bool full = u.ensure_depth(depth) >= depth;
  std::vector<Atom> atoms;
  try {
    atoms = s.enumerate(depth, u);
  } catch (const SpecError& e) {
    note_open(d, std::string("spec enumeration gave out: ") + e.what());
    return d;
  }

  BodyAccept accept = [&](const Atom&, const std::vector<Atom>& body) {
    for (const Atom& b : body)
      if (!s.contains(b)) return false;
    return true;
  };

  for (const Atom& a : atoms) {
    bool ok = false;
    bool definitive = true;
    std::optional<size_t> locus;
    bool trouble = false;
    for (size_t ci = 0; ci < p.clauses.size() && !ok; ci++) {
      CoverResult res;
      try {
        res = probe_cover(p.clauses[ci], a, a.depth() + delta, u, accept);
      } catch (const SpecError& e) {
        trouble = true;
        note_open(d, std::string("membership solver gave out on ") + a.str() + ": " + e.what());
        break;
      }
      if (res.status == CoverStatus::covered) ok = true;
      if (res.status != CoverStatus::not_unifiable && !locus) locus = ci;
      if (res.status == CoverStatus::failed_bounded) definitive = false;
    }
    if (ok) continue;
    if (trouble) continue;  // already recorded as open
    if (d.total >= cap) {
      d.truncated = true;
      break;
    }
    Culprit cul;
    cul.atom = a;
    cul.clause_index = locus;
    cul.definitive = definitive;
    add_culprit(d, std::move(cul));
  }

  if (!full) note_open(d, "universe capped below the bound");
  return d;
}

Diagnosis diagnose_incorrectness(const Program& p, const Specification& s, int depth,
                                 GroundUniverse& u, size_t cap) {
  Diagnosis d;
  d.kind = Diagnosis::Kind::incorrectness;
  d.bound = depth;
  if (cap == 0) cap = 1;

  bool full = u.ensure_depth(depth) >= depth;
  for (size_t ci = 0; ci < p.clauses.size() && !d.truncated; ci++) {
    const Clause& c = p.clauses[ci];
    auto bounds = var_depth_bounds(c, depth);
    if (!bounds) continue;  // the skeleton alone exceeds the bound
    std::vector<std::string> vars = vars_of(c);
    VarSpace vs = make_var_space(vars, *bounds, u);
    std::vector<size_t> cells;
    for (size_t idx = 0; idx < vs.total; idx++) {
      Subst delta = decode_binding(vs, idx, u, cells);
      bool body_holds = true;
      try {
        for (const Atom& b : c.body) {
          if (!s.contains(delta.apply(b))) {
            body_holds = false;
            break;
          }
        }
        if (!body_holds) continue;
        if (s.contains(delta.apply(c.head))) continue;
      } catch (const SpecError&) {
        note_open(d, "spec membership solver gave out on some instance");
        continue;
      }
      if (d.total >= cap) {
        d.truncated = true;
        break;
      }
      Culprit cul;
      cul.atom = delta.apply(c.head);
      cul.instance = delta.apply(Clause(c.head, c.body));
      cul.clause_index = ci;
      cul.definitive = true;  // a violating instance refutes outright
      add_culprit(d, std::move(cul));
    }
  }

  if (!full) note_open(d, "universe capped below the bound");
  return d;
}

std::string to_text(const Diagnosis& d) {
  std::ostringstream os;
  const char* what =
      d.kind == Diagnosis::Kind::incompleteness ? "incompleteness" : "incorrectness";
  os << what << " diagnosis (bound " << d.bound << "): ";
  if (d.empty()) {
    os << "clean";
    return os.str();
  }
  os << d.total << " culprit" << (d.total == 1 ? "" : "s");
  if (d.truncated) os << " (capped; more exist)";
  for (const CulpritGroup& g : d.groups) {
    os << "\n  " << g.predicate << ":";
    for (const Culprit& c : g.culprits) {
      os << "\n    " << (c.instance ? c.instance->str() : c.atom.str());
      if (c.clause_index) os << "  [clause #" << (*c.clause_index + 1) << "]";
      if (!c.definitive) os << "  (within the margin; a larger bound may cover it)";
    }
  }
  if (!d.open_note.empty()) os << "\n  open: " << d.open_note;
  return os.str();
}

nlohmann::json to_json(const Diagnosis& d) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["kind"] = d.kind == Diagnosis::Kind::incompleteness ? "incompleteness" : "incorrectness";
  j["bound"] = d.bound;
  j["total"] = d.total;
  j["truncated"] = d.truncated;
  j["empty"] = d.empty();
  if (!d.open_note.empty()) j["open"] = d.open_note;
  j["groups"] = nlohmann::json::array();
  for (const CulpritGroup& g : d.groups) {
    nlohmann::json gj;
    gj["predicate"] = g.predicate;
    gj["culprits"] = nlohmann::json::array();
    for (const Culprit& c : g.culprits) {
      nlohmann::json cj;
      cj["atom"] = c.atom.str();
      if (c.instance) cj["instance"] = c.instance->str();
      if (c.clause_index) cj["clause_index"] = *c.clause_index;
      cj["definitive"] = c.definitive;
      gj["culprits"].push_back(std::move(cj));
    }
    j["groups"].push_back(std::move(gj));
  }
  return j;
}

}  // namespace lpcheck
