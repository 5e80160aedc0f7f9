#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lpcheck/term.hpp"

namespace lpcheck {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", column " +
                           std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};

struct SourceProgram {
  Program program;
  std::vector<int> clause_lines;  // 1-based source line per clause
};

// Edinburgh-style clauses: 'head :- b1, ..., bn.' or 'head.', with !,
// [H|T] lists, 'X-Y' pairs and 'X=Y' equations. By default a cut may
// only appear in the last clause of its procedure; allow_nonfinal_cut
// lifts that for programs meant to run under the pruned-LD engine only.
SourceProgram parse_program_source(const std::string& text, bool allow_nonfinal_cut = false);
Program parse_program(const std::string& text, bool allow_nonfinal_cut = false);

// Conjunctive query "a1, ..., an" (no cut allowed).
std::vector<Atom> parse_query(const std::string& text);
Atom parse_atom_string(const std::string& text);
Term parse_term_string(const std::string& text);

// ---- specification files ----

struct SpecTemplate {
  Atom pattern;
  std::vector<Atom> guards;
};

struct SpecExpr {
  enum class Kind { templates, ref, set_union, set_intersect, set_diff };
  Kind kind = Kind::templates;
  std::vector<SpecTemplate> templates;
  std::string ref;
  std::unique_ptr<SpecExpr> lhs, rhs;
};

struct SpecFile {
  std::vector<Clause> aux;  // auxiliary guard relations, definite clauses
  std::vector<std::pair<std::string, SpecExpr>> specs;
};

SpecFile parse_spec_file(const std::string& text);

// ---- level mapping files ----

struct MeasureExpr {
  enum class Kind { constant, listlen, termsize, add, mul, maxof, table };
  Kind kind = Kind::constant;
  long value = 0;
  std::string var;                      // listlen / termsize operand
  std::string table;                    // table lookup name
  std::vector<std::string> table_args;  // pattern variables keying the lookup
  std::vector<MeasureExpr> kids;        // add / mul / maxof operands
};

struct LevelEntry {
  Atom pattern;  // p(V1,...,Vn) with distinct variables
  MeasureExpr expr;
  std::vector<Atom> when_guards;  // optional domain restriction
};

struct LevelTable {
  std::string name;
  std::vector<std::pair<std::vector<Term>, long>> rows;  // ground keys
};

struct LevelFile {
  std::vector<LevelEntry> entries;
  std::vector<LevelTable> tables;
};

LevelFile parse_level_file(const std::string& text);

// ---- run configuration (toml subset) ----

struct ConfigValue;
using ConfigArray = std::vector<ConfigValue>;

struct ConfigValue {
  std::variant<std::string, long, bool, ConfigArray> v;

  bool is_str() const { return std::holds_alternative<std::string>(v); }
  bool is_int() const { return std::holds_alternative<long>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_array() const { return std::holds_alternative<ConfigArray>(v); }
  const std::string& str() const { return std::get<std::string>(v); }
  long integer() const { return std::get<long>(v); }
  bool boolean() const { return std::get<bool>(v); }
  const ConfigArray& array() const { return std::get<ConfigArray>(v); }
};

struct ConfigTable {
  std::map<std::string, ConfigValue> kv;
  int line = 0;

  const ConfigValue* get(const std::string& key) const {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  }
};

struct ConfigFile {
  ConfigTable root;
  std::map<std::string, ConfigTable> tables;
  std::map<std::string, std::vector<ConfigTable>> table_arrays;
};

ConfigFile parse_config(const std::string& text);

}  // namespace lpcheck
