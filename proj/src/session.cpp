#include "lpcheck/session.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lpcheck/parser.hpp"

namespace lpcheck {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const ConfigValue* need(const ConfigTable& t, const std::string& key, const std::string& where) {
  const ConfigValue* v = t.get(key);
  if (!v) throw ConfigError(where + " needs '" + key + "'");
  return v;
}

std::string need_string(const ConfigTable& t, const std::string& key, const std::string& where) {
  const ConfigValue* v = need(t, key, where);
  if (!v->is_str()) throw ConfigError(where + ": '" + key + "' must be a string");
  return v->str();
}

std::string opt_string(const ConfigTable& t, const std::string& key, const std::string& where,
                       const std::string& dflt = "") {
  const ConfigValue* v = t.get(key);
  if (!v) return dflt;
  if (!v->is_str()) throw ConfigError(where + ": '" + key + "' must be a string");
  return v->str();
}

long opt_int(const ConfigTable& t, const std::string& key, const std::string& where, long dflt) {
  const ConfigValue* v = t.get(key);
  if (!v) return dflt;
  if (!v->is_int()) throw ConfigError(where + ": '" + key + "' must be an integer");
  return v->integer();
}

bool opt_bool(const ConfigTable& t, const std::string& key, const std::string& where, bool dflt) {
  const ConfigValue* v = t.get(key);
  if (!v) return dflt;
  if (!v->is_bool()) throw ConfigError(where + ": '" + key + "' must be true or false");
  return v->boolean();
}

void reject_unknown_keys(const ConfigTable& t, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, _] : t.kv)
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

Atom parse_atom_checked(const std::string& text, const std::string& where) {
  try {
    return parse_atom_string(text);
  } catch (const ParseError& e) {
    throw ConfigError(where + ": bad atom \"" + text + "\": " + e.what());
  }
}

void require_spec_name(const SpecLibrary& lib, const std::string& name,
                       const std::string& where) {
  if (!lib.has(name)) throw ConfigError(where + ": no spec named '" + name + "'");
}

// The one evidence vocabulary shared by completeness and
// cssld_completeness; finite-tree queries are only meaningful for the
// former (the latter judges the tree it is given).
void validate_evidence(const Session& s, CheckSpec& ck, const ConfigTable& t,
                       const std::string& where, bool queries_allowed) {
  ck.evidence = need_string(t, "evidence", where);
  if (ck.evidence == "finite") {
    if (const ConfigValue* q = t.get("queries")) {
      if (!queries_allowed)
        throw ConfigError(where + ": 'queries' only applies to plain completeness");
      if (!q->is_array()) throw ConfigError(where + ": 'queries' must be an array");
      for (const ConfigValue& e : q->array()) {
        if (!e.is_str()) throw ConfigError(where + ": 'queries' entries must be strings");
        ck.queries.push_back(parse_atom_checked(e.str(), where));
      }
    }
    if (queries_allowed && ck.queries.empty())
      throw ConfigError(where + ": finite-tree evidence needs a nonempty 'queries'");
    return;
  }
  if (ck.evidence == "recurrent" || ck.evidence == "acceptable") {
    if (!s.has_levels)
      throw ConfigError(where + ": evidence '" + ck.evidence + "' needs a 'levels' file");
    if (ck.evidence == "acceptable") {
      ck.s_prime = need_string(t, "s_prime", where);
      require_spec_name(s.specs, ck.s_prime, where);
    }
    return;
  }
  throw ConfigError(where + ": evidence must be finite, recurrent, or acceptable");
}

void validate_split_keys(const Session& s, CheckSpec& ck, const ConfigTable& t,
                         const std::string& where) {
  const ConfigValue* progs = need(t, "split_programs", where);
  if (!progs->is_array()) throw ConfigError(where + ": 'split_programs' must be an array");
  for (const ConfigValue& part : progs->array()) {
    if (!part.is_array())
      throw ConfigError(where + ": 'split_programs' entries must be arrays of clause numbers");
    std::vector<size_t> indices;
    for (const ConfigValue& e : part.array()) {
      if (!e.is_int()) throw ConfigError(where + ": clause numbers must be integers");
      long n = e.integer();
      if (n < 1 || (size_t)n > s.program.clauses.size())
        throw ConfigError(where + ": clause number " + std::to_string(n) +
                          " out of range (program has " +
                          std::to_string(s.program.clauses.size()) + " clauses)");
      indices.push_back((size_t)n - 1);
    }
    ck.split_programs.push_back(std::move(indices));
  }
  const ConfigValue* parts = need(t, "split_parts", where);
  if (!parts->is_array()) throw ConfigError(where + ": 'split_parts' must be an array");
  for (const ConfigValue& e : parts->array()) {
    if (!e.is_str()) throw ConfigError(where + ": 'split_parts' entries must be spec names");
    require_spec_name(s.specs, e.str(), where);
    ck.split_parts.push_back(e.str());
  }
  if (ck.split_programs.empty() || ck.split_programs.size() != ck.split_parts.size())
    throw ConfigError(where + ": split_programs and split_parts must be nonempty and aligned");
  ck.whole = need_string(t, "whole", where);
  require_spec_name(s.specs, ck.whole, where);
}

void validate_rule(CheckSpec& ck, const ConfigTable& t, const std::string& where) {
  ck.rule = need_string(t, "rule", where);
  size_t n = ck.split_programs.size();
  if (ck.rule == "alternating" || ck.rule == "suitability") return;
  if (ck.rule == "fixed") {
    long p = opt_int(t, "rule_part", where, 1);
    if (p < 1 || (size_t)p > n)
      throw ConfigError(where + ": rule_part " + std::to_string(p) + " out of range");
    ck.rule_part = (size_t)p - 1;
    return;
  }
  if (ck.rule == "table") {
    const ConfigValue* v = need(t, "rule_table", where);
    if (!v->is_array()) throw ConfigError(where + ": 'rule_table' must be an array");
    for (const ConfigValue& e : v->array()) {
      if (!e.is_str())
        throw ConfigError(where + ": 'rule_table' entries must be \"atom -> part\" strings");
      const std::string& row = e.str();
      size_t sep = row.rfind("->");
      if (sep == std::string::npos)
        throw ConfigError(where + ": rule_table entry \"" + row + "\" lacks '->'");
      Atom pat = parse_atom_checked(row.substr(0, sep), where);
      std::string rhs = row.substr(sep + 2);
      size_t b = rhs.find_first_not_of(" \t");
      size_t epos = rhs.find_last_not_of(" \t");
      rhs = b == std::string::npos ? "" : rhs.substr(b, epos - b + 1);
      std::optional<size_t> part;
      if (rhs != "none") {
        long p = 0;
        try {
          p = std::stol(rhs);
        } catch (...) {
          throw ConfigError(where + ": rule_table part \"" + rhs + "\" is not a number or none");
        }
        if (p < 1 || (size_t)p > n)
          throw ConfigError(where + ": rule_table part " + std::to_string(p) + " out of range");
        part = (size_t)p - 1;
      }
      ck.rule_table.emplace_back(std::move(pat), part);
    }
    if (ck.rule_table.empty()) throw ConfigError(where + ": 'rule_table' must be nonempty");
    return;
  }
  throw ConfigError(where + ": rule must be alternating, fixed, suitability, or table");
}

void validate_call_success(const Session& s, CheckSpec& ck, const ConfigTable& t,
                           const std::string& where) {
  ck.pre = need_string(t, "pre", where);
  ck.post = need_string(t, "post", where);
  require_spec_name(s.specs, ck.pre, where);
  require_spec_name(s.specs, ck.post, where);
  if (!s.specs.get(ck.pre).substitution_closed())
    throw ConfigError(where + ": pre spec '" + ck.pre + "' is not closed under substitution");
  if (!s.specs.get(ck.post).substitution_closed())
    throw ConfigError(where + ": post spec '" + ck.post + "' is not closed under substitution");
}

Atom need_query(const ConfigTable& t, const std::string& where) {
  return parse_atom_checked(need_string(t, "query", where), where);
}

CheckSpec load_check(const Session& s, const ConfigTable& t, size_t index) {
  std::string where = "check " + std::to_string(index + 1);
  static const std::set<std::string> known = {
      "kind",  "spec",           "s_prime",     "evidence",   "queries",
      "query", "pre",            "post",        "split_programs",
      "split_parts",             "whole",       "rule",       "rule_part",
      "rule_table"};
  reject_unknown_keys(t, known, where);

  CheckSpec ck;
  ck.kind = need_string(t, "kind", where);
  where += " (" + ck.kind + ")";

  auto main_spec = [&] {
    ck.spec = need_string(t, "spec", where);
    require_spec_name(s.specs, ck.spec, where);
  };

  if (ck.kind == "correctness" || ck.kind == "covered" || ck.kind == "semi_completeness") {
    main_spec();
  } else if (ck.kind == "recurrent") {
    if (!s.has_levels) throw ConfigError(where + ": needs a 'levels' file");
  } else if (ck.kind == "acceptable") {
    main_spec();  // the guard spec the decrease is conditioned on
    if (!s.has_levels) throw ConfigError(where + ": needs a 'levels' file");
  } else if (ck.kind == "recurrently_covered") {
    main_spec();
    if (!s.has_levels) throw ConfigError(where + ": needs a 'levels' file");
  } else if (ck.kind == "completeness") {
    main_spec();
    validate_evidence(s, ck, t, where, true);
  } else if (ck.kind == "suitable") {
    validate_split_keys(s, ck, t, where);
    ck.query = need_query(t, where);
    long p = opt_int(t, "rule_part", where, 1);
    if (p < 1 || (size_t)p > ck.split_programs.size())
      throw ConfigError(where + ": rule_part " + std::to_string(p) + " out of range");
    ck.rule_part = (size_t)p - 1;
  } else if (ck.kind == "validate_split") {
    validate_split_keys(s, ck, t, where);
  } else if (ck.kind == "cssld_completeness") {
    validate_split_keys(s, ck, t, where);
    validate_rule(ck, t, where);
    ck.query = need_query(t, where);
    validate_evidence(s, ck, t, where, false);
  } else if (ck.kind == "adjustably_covered") {
    main_spec();
    validate_call_success(s, ck, t, where);
  } else if (ck.kind == "cut_completeness") {
    main_spec();
    validate_call_success(s, ck, t, where);
    ck.query = need_query(t, where);
  } else if (ck.kind == "pruned_completeness") {
    main_spec();
    ck.query = need_query(t, where);
  } else if (ck.kind == "cs_runtime") {
    validate_call_success(s, ck, t, where);
    ck.query = need_query(t, where);
  } else {
    throw ConfigError(where + ": unknown check kind");
  }
  return ck;
}

Split make_split(const Session& s, const CheckSpec& ck) {
  Split sp;
  for (const std::vector<size_t>& part : ck.split_programs) {
    Program pi;
    for (size_t idx : part) {
      const Clause& c = s.program.clauses[idx];
      pi.clauses.emplace_back(c.head, c.body);  // cut dropped: parts are definite
    }
    sp.programs.push_back(std::move(pi));
  }
  for (const std::string& name : ck.split_parts) sp.parts.push_back(s.specs.get(name));
  sp.whole = s.specs.get(ck.whole);
  return sp;
}

CSelectionRule make_rule(const Session& s, const CheckSpec& ck, const Split& split) {
  if (ck.rule == "alternating") return cs_alternating(split.programs.size());
  if (ck.rule == "fixed") return cs_fixed(ck.rule_part);
  if (ck.rule == "suitability")
    return cs_suitability(split.whole, split.parts, s.settings.depth, *s.universe);
  std::vector<CsTableEntry> entries;
  for (const auto& [pat, part] : ck.rule_table) entries.push_back({pat, part});
  return cs_table(std::move(entries));
}

CompletenessEvidence make_evidence(const Session& s, const CheckSpec& ck) {
  if (ck.evidence == "finite") return CompletenessEvidence::finite(ck.queries);
  if (ck.evidence == "recurrent") return CompletenessEvidence::recurrent(s.levels);
  return CompletenessEvidence::acceptable(s.levels, s.specs.get(ck.s_prime));
}

Report run_one(Session& s, const CheckSpec& ck) {
  GroundUniverse& u = *s.universe;
  const SessionSettings& st = s.settings;
  const Program& p = s.program;
  auto spec = [&](const std::string& name) -> const Specification& {
    return s.specs.get(name);
  };

  if (ck.kind == "correctness") return check_correctness(p, spec(ck.spec), st.depth, u);
  if (ck.kind == "covered") return check_covered(p, spec(ck.spec), st.depth, u, st.delta);
  if (ck.kind == "semi_completeness")
    return check_semi_completeness(p, spec(ck.spec), st.depth, u, st.delta);
  if (ck.kind == "recurrent") return check_recurrent(p, s.levels, st.depth, u);
  if (ck.kind == "acceptable")
    return check_acceptable(p, s.levels, spec(ck.spec), st.depth, u);
  if (ck.kind == "recurrently_covered")
    return check_recurrently_covered(p, spec(ck.spec), s.levels, st.depth, u, st.delta);
  if (ck.kind == "completeness")
    return check_completeness(p, spec(ck.spec), st.depth, make_evidence(s, ck), u, st.budget,
                              st.delta);
  if (ck.kind == "suitable") {
    Split split = make_split(s, ck);
    return check_suitable(split, *ck.query, ck.rule_part, st.depth, u);
  }
  if (ck.kind == "validate_split") {
    Split split = make_split(s, ck);
    return validate_split(split, p.without_cuts(), st.depth, u);
  }
  if (ck.kind == "cssld_completeness") {
    Split split = make_split(s, ck);
    SldTree tree =
        build_cssld_tree(split.programs, {*ck.query}, make_rule(s, ck, split), st.budget);
    return check_cssld_completeness(p.without_cuts(), split, tree, make_evidence(s, ck),
                                    st.depth, u, st.delta);
  }
  if (ck.kind == "adjustably_covered") {
    CallSuccessSpec cs{spec(ck.pre), spec(ck.post)};
    return check_adjustably_covered(p, spec(ck.spec), cs, st.depth, u, st.delta);
  }
  if (ck.kind == "cut_completeness") {
    CallSuccessSpec cs{spec(ck.pre), spec(ck.post)};
    return check_cut_completeness(p, spec(ck.spec), cs, *ck.query, st.depth, st.budget, u,
                                  st.delta);
  }
  if (ck.kind == "pruned_completeness") {
    SldTree tree = build_pruned_ld_tree(p, {*ck.query}, st.budget);
    Report r = tree_complete_wrt(tree, spec(ck.spec), st.depth, u);
    return r;
  }
  // cs_runtime, the only kind left
  CallSuccessSpec cs{spec(ck.pre), spec(ck.post)};
  return check_cs_correct_runtime(p, cs, {*ck.query}, st.budget);
}

}  // namespace

Session load_session(const std::string& config_path, const SettingsOverride& ov) {
  Session s;
  s.config_path = config_path;

  std::string cfg_text = read_file(config_path);
  s.input_hashes[std::filesystem::path(config_path).filename().string()] = fnv1a(cfg_text);
  ConfigFile cfg;
  try {
    cfg = parse_config(cfg_text);
  } catch (const ParseError& e) {
    throw ConfigError(config_path + ": " + e.what());
  }

  static const std::set<std::string> root_known = {
      "program",      "specs", "levels",          "depth",      "budget",
      "delta",        "fresh_consts",             "allow_nonfinal_cut",
      "witness_cap"};
  reject_unknown_keys(cfg.root, root_known, "config");
  for (const auto& [name, _] : cfg.tables)
    if (name != "diagnose") throw ConfigError("config: unknown section [" + name + "]");
  for (const auto& [name, _] : cfg.table_arrays)
    if (name != "check") throw ConfigError("config: unknown section [[" + name + "]]");

  s.settings.depth = (int)opt_int(cfg.root, "depth", "config", 3);
  s.settings.budget = opt_int(cfg.root, "budget", "config", 200000);
  s.settings.delta = (int)opt_int(cfg.root, "delta", "config", 2);
  s.settings.fresh_consts = opt_int(cfg.root, "fresh_consts", "config", 0);
  s.settings.allow_nonfinal_cut = opt_bool(cfg.root, "allow_nonfinal_cut", "config", false);
  long cap = opt_int(cfg.root, "witness_cap", "config", 50);
  s.settings.witness_cap = (size_t)cap;
  if (ov.depth) s.settings.depth = *ov.depth;
  if (ov.budget) s.settings.budget = *ov.budget;
  if (ov.delta) s.settings.delta = *ov.delta;
  if (ov.fresh_consts) s.settings.fresh_consts = *ov.fresh_consts;
  if (ov.witness_cap) s.settings.witness_cap = *ov.witness_cap;
  if (s.settings.depth < 0 || s.settings.budget < 1 || s.settings.delta < 0 ||
      s.settings.fresh_consts < 0 || cap < 1 || s.settings.witness_cap < 1)
    throw ConfigError("config: depth/delta/fresh_consts must be >= 0, budget/witness_cap >= 1");

  std::filesystem::path dir = std::filesystem::path(config_path).parent_path();
  auto load_input = [&](const std::string& name) {
    std::string text = read_file((dir / name).string());
    s.input_hashes[name] = fnv1a(text);
    return text;
  };

  std::string program_file = need_string(cfg.root, "program", "config");
  try {
    s.program = parse_program(load_input(program_file), s.settings.allow_nonfinal_cut);
  } catch (const ParseError& e) {
    throw ConfigError(program_file + ": " + e.what());
  }
  if (s.program.clauses.empty()) throw ConfigError(program_file + ": empty program");

  std::string specs_file = opt_string(cfg.root, "specs", "config");
  if (!specs_file.empty()) {
    try {
      s.specs = SpecLibrary::from_file(parse_spec_file(load_input(specs_file)),
                                       (int)std::min(s.settings.budget, (long)1 << 30));
    } catch (const ParseError& e) {
      throw ConfigError(specs_file + ": " + e.what());
    } catch (const SpecError& e) {
      throw ConfigError(specs_file + ": " + e.what());
    }
  }

  std::string levels_file = opt_string(cfg.root, "levels", "config");
  if (!levels_file.empty()) {
    try {
      s.levels = LevelMapping::from_file(parse_level_file(load_input(levels_file)));
      s.has_levels = true;
    } catch (const ParseError& e) {
      throw ConfigError(levels_file + ": " + e.what());
    }
  }

  if (auto it = cfg.tables.find("diagnose"); it != cfg.tables.end()) {
    static const std::set<std::string> diag_known = {"spec", "spec_correctness"};
    reject_unknown_keys(it->second, diag_known, "[diagnose]");
    s.diagnose.configured = true;
    s.diagnose.spec_compl = need_string(it->second, "spec", "[diagnose]");
    require_spec_name(s.specs, s.diagnose.spec_compl, "[diagnose]");
    s.diagnose.spec_corr =
        opt_string(it->second, "spec_correctness", "[diagnose]", s.diagnose.spec_compl);
    require_spec_name(s.specs, s.diagnose.spec_corr, "[diagnose]");
  }

  if (auto it = cfg.table_arrays.find("check"); it != cfg.table_arrays.end()) {
    for (size_t i = 0; i < it->second.size(); i++)
      s.checks.push_back(load_check(s, it->second[i], i));
  }

  s.sig.add_program(s.program);
  for (const std::string& name : s.specs.names()) s.specs.get(name).extend_signature(s.sig);
  for (const CheckSpec& ck : s.checks) {
    for (const Atom& q : ck.queries) s.sig.add_atom(q);
    if (ck.query) s.sig.add_atom(*ck.query);
    for (const auto& [pat, _] : ck.rule_table) s.sig.add_atom(pat);
  }
  if (s.settings.fresh_consts > 0) s.sig.add_fresh_constants((size_t)s.settings.fresh_consts);
  if (!s.sig.has_constant()) s.sig.add_fresh_constants(1);
  try {
    s.sig.finalize();
  } catch (const SignatureError& e) {
    throw ConfigError(std::string("signature: ") + e.what());
  }
  s.universe = std::make_unique<GroundUniverse>(s.sig);
  return s;
}

RunManifest run_checks(Session& s) {
  RunManifest m;
  m.tool_version = tool_version();
  m.config_path = s.config_path;
  m.settings = s.settings;
  m.input_hashes = s.input_hashes;
  for (size_t i = 0; i < s.checks.size(); i++) {
    try {
      m.reports.push_back(run_one(s, s.checks[i]));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("check " + std::to_string(i + 1) + " (" + s.checks[i].kind +
                        "): " + e.what());
    }
  }
  return m;
}

std::pair<Diagnosis, Diagnosis> run_diagnosis(Session& s) {
  if (!s.diagnose.configured) throw ConfigError("config has no [diagnose] section");
  const Specification& s_compl = s.specs.get(s.diagnose.spec_compl);
  const Specification& s_corr = s.specs.get(s.diagnose.spec_corr);
  Diagnosis incompleteness = diagnose_incompleteness(
      s.program, s_compl, s.settings.depth, *s.universe, s.settings.delta,
      s.settings.witness_cap);
  Diagnosis incorrectness = diagnose_incorrectness(s.program, s_corr, s.settings.depth,
                                                   *s.universe, s.settings.witness_cap);
  return {std::move(incompleteness), std::move(incorrectness)};
}

int exit_code(const std::vector<Report>& reports) {
  bool any_inconclusive = false;
  for (const Report& r : reports) {
    if (r.refuted()) return 1;
    if (!r.verified()) any_inconclusive = true;
  }
  return any_inconclusive ? 2 : 0;
}

const char* tool_version() { return "lpcheck 0.1.0"; }

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

static std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", (unsigned long long)v);
  return buf;
}

std::string to_text(const RunManifest& m) {
  std::ostringstream os;
  os << m.tool_version << "\n";
  os << "config: " << m.config_path << "\n";
  os << "settings: depth " << m.settings.depth << ", budget " << m.settings.budget
     << ", delta " << m.settings.delta << ", fresh_consts " << m.settings.fresh_consts
     << (m.settings.allow_nonfinal_cut ? ", nonfinal cuts allowed" : "") << "\n";
  os << "inputs:\n";
  for (const auto& [name, hash] : m.input_hashes)
    os << "  " << name << "  " << hex64(hash) << "\n";
  int verified = 0, refuted = 0, open = 0;
  for (size_t i = 0; i < m.reports.size(); i++) {
    const Report& r = m.reports[i];
    (r.verified() ? verified : r.refuted() ? refuted : open)++;
    os << "\n[" << (i + 1) << "/" << m.reports.size() << "] " << to_text(r) << "\n";
  }
  os << "\nsummary: " << verified << " verified, " << refuted << " refuted, " << open
     << " inconclusive\n";
  return os.str();
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["tool"] = m.tool_version;
  j["config"] = m.config_path;
  j["settings"] = {{"depth", m.settings.depth},
                   {"budget", m.settings.budget},
                   {"delta", m.settings.delta},
                   {"fresh_consts", m.settings.fresh_consts},
                   {"allow_nonfinal_cut", m.settings.allow_nonfinal_cut},
                   {"witness_cap", m.settings.witness_cap}};
  j["inputs"] = nlohmann::json::object();
  for (const auto& [name, hash] : m.input_hashes) j["inputs"][name] = hex64(hash);
  j["reports"] = nlohmann::json::array();
  for (const Report& r : m.reports) j["reports"].push_back(to_json(r));
  int verified = 0, refuted = 0, open = 0;
  for (const Report& r : m.reports) (r.verified() ? verified : r.refuted() ? refuted : open)++;
  j["summary"] = {{"verified", verified}, {"refuted", refuted}, {"inconclusive", open}};
  return j;
}

}  // namespace lpcheck
