#include "lpcheck/report.hpp"

#include <sstream>

namespace lpcheck {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::verified_up_to_bound:
      return "verified_up_to_bound";
    case Verdict::refuted:
      return "refuted";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

const char* Counterexample::kind_name(Kind k) {
  switch (k) {
    case Kind::uncovered_atom:
      return "uncovered_atom";
    case Kind::bad_clause_instance:
      return "bad_clause_instance";
    case Kind::level_violation:
      return "level_violation";
    case Kind::unsuitable_selection:
      return "unsuitable_selection";
    case Kind::adjustable_cover_failure:
      return "adjustable_cover_failure";
    case Kind::missing_answer:
      return "missing_answer";
  }
  return "?";
}

std::string to_text(const Report& r) {
  std::ostringstream os;
  os << r.check << ": " << verdict_name(r.verdict) << " (bound " << r.bound << ")";
  if (!r.note.empty()) os << "\n  note: " << r.note;
  os << "\n  checked: " << r.atoms_checked << " atoms, " << r.instances_enumerated
     << " instances";
  if (r.witness) {
    const Counterexample& w = *r.witness;
    os << "\n  witness: " << Counterexample::kind_name(w.kind);
    for (const Atom& a : w.atoms) os << "\n    atom: " << a.str();
    if (!w.query.empty()) {
      os << "\n    query:";
      for (const Atom& a : w.query) os << " " << a.str();
    }
    if (w.instance) os << "\n    instance: " << w.instance->str();
    if (w.clause_index) os << "\n    clause: #" << (*w.clause_index + 1);
    for (const auto& [name, s] : w.substs) os << "\n    " << name << " = " << s.str();
    for (const auto& [key, val] : w.details) os << "\n    " << key << ": " << val;
  }
  return os.str();
}

nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["check"] = r.check;
  j["verdict"] = verdict_name(r.verdict);
  j["bound"] = r.bound;
  j["instances_enumerated"] = r.instances_enumerated;
  j["atoms_checked"] = r.atoms_checked;
  if (!r.note.empty()) j["note"] = r.note;
  if (r.witness) {
    const Counterexample& w = *r.witness;
    nlohmann::json wj;
    wj["kind"] = Counterexample::kind_name(w.kind);
    wj["atoms"] = nlohmann::json::array();
    for (const Atom& a : w.atoms) wj["atoms"].push_back(a.str());
    if (!w.query.empty()) {
      wj["query"] = nlohmann::json::array();
      for (const Atom& a : w.query) wj["query"].push_back(a.str());
    }
    if (w.instance) wj["instance"] = w.instance->str();
    if (w.clause_index) wj["clause_index"] = *w.clause_index;
    if (!w.substs.empty()) {
      wj["substs"] = nlohmann::json::object();
      for (const auto& [name, s] : w.substs) wj["substs"][name] = s.str();
    }
    if (!w.details.empty()) {
      wj["details"] = nlohmann::json::object();
      for (const auto& [key, val] : w.details) wj["details"][key] = val;
    }
    j["witness"] = std::move(wj);
  }
  return j;
}

}  // namespace lpcheck
