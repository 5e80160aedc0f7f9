#include "lpcheck/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace lpcheck {

namespace {

enum class Tok {
  Ident,
  Var,
  Int,
  LParen,
  RParen,
  LBrack,
  RBrack,
  LBrace,
  RBrace,
  Comma,
  Bar,
  Dot,
  If,  // :-
  Bang,
  Eq,
  Dash,
  Plus,
  Star,
  UnionOp,      // the two-character union operator
  IntersectOp,  // the two-character intersection operator
  DiffOp,       // backslash, set difference
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok k, std::string t) { out.push_back({k, std::move(t), line, col}); };
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      line++;
      col = 1;
      i++;
      continue;
    }
    if (isspace((unsigned char)c)) {
      col++;
      i++;
      continue;
    }
    if (c == '%') {
      while (i < s.size() && s[i] != '\n') i++;
      continue;
    }
    int startcol = col;
    auto single = [&](Tok k) {
      out.push_back({k, std::string(1, c), line, startcol});
      i++;
      col++;
    };
    if (isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < s.size() && isdigit((unsigned char)s[j])) j++;
      out.push_back({Tok::Int, s.substr(i, j - i), line, startcol});
      col += (int)(j - i);
      i = j;
      continue;
    }
    if (isalpha((unsigned char)c) || c == '_') {
      size_t j = i;
      while (j < s.size() && (isalnum((unsigned char)s[j]) || s[j] == '_')) j++;
      std::string word = s.substr(i, j - i);
      bool isvar = isupper((unsigned char)c) || c == '_';
      out.push_back({isvar ? Tok::Var : Tok::Ident, word, line, startcol});
      col += (int)(j - i);
      i = j;
      continue;
    }
    switch (c) {
      case '(': single(Tok::LParen); break;
      case ')': single(Tok::RParen); break;
      case '[': single(Tok::LBrack); break;
      case ']': single(Tok::RBrack); break;
      case '{': single(Tok::LBrace); break;
      case '}': single(Tok::RBrace); break;
      case ',': single(Tok::Comma); break;
      case '|': single(Tok::Bar); break;
      case '.': single(Tok::Dot); break;
      case '!': single(Tok::Bang); break;
      case '=': single(Tok::Eq); break;
      case '-': single(Tok::Dash); break;
      case '+': single(Tok::Plus); break;
      case '*': single(Tok::Star); break;
      case ':':
        if (i + 1 < s.size() && s[i + 1] == '-') {
          push(Tok::If, ":-");
          i += 2;
          col += 2;
        } else {
          throw ParseError("stray ':'", line, startcol);
        }
        break;
      case '\\':
        if (i + 1 < s.size() && s[i + 1] == '/') {
          push(Tok::UnionOp, "\\/");
          i += 2;
          col += 2;
        } else {
          push(Tok::DiffOp, "\\");
          i++;
          col++;
        }
        break;
      case '/':
        if (i + 1 < s.size() && s[i + 1] == '\\') {
          push(Tok::IntersectOp, "/\\");
          i += 2;
          col += 2;
        } else {
          throw ParseError("stray '/'", line, startcol);
        }
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, startcol);
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// Recursive-descent parser over the token vector; pos_ is freely
// rewindable, which the level-entry grammar needs for one lookahead.
struct P {
  std::vector<Token> toks;
  size_t pos = 0;
  unsigned long anon = 0;

  explicit P(const std::string& text) : toks(lex(text)) {}

  const Token& cur() const { return toks[pos]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    pos++;
    return true;
  }
  Token expect(Tok k, const char* what) {
    if (!at(k)) throw err(std::string("expected ") + what);
    return toks[pos++];
  }
  ParseError err(const std::string& msg) const { return ParseError(msg, cur().line, cur().col); }

  Term parse_term() {
    Term t = parse_primary();
    while (at(Tok::Dash)) {
      pos++;
      Term rhs = parse_primary();
      t = Term::fun("-", {std::move(t), std::move(rhs)});
    }
    return t;
  }

  Term parse_primary() {
    if (at(Tok::Var)) {
      std::string name = toks[pos++].text;
      if (name == "_") name = "_!" + std::to_string(anon++);  // renamed per clause below
      return Term::var(name);
    }
    if (at(Tok::Int)) return Term::fun(toks[pos++].text);
    if (at(Tok::Ident)) {
      std::string name = toks[pos++].text;
      std::vector<Term> args;
      if (accept(Tok::LParen)) {
        args.push_back(parse_term());
        while (accept(Tok::Comma)) args.push_back(parse_term());
        expect(Tok::RParen, "')'");
      }
      return Term::fun(std::move(name), std::move(args));
    }
    if (accept(Tok::LBrack)) {
      if (accept(Tok::RBrack)) return mk_nil();
      std::vector<Term> elems;
      elems.push_back(parse_term());
      while (accept(Tok::Comma)) elems.push_back(parse_term());
      Term tail = mk_nil();
      if (accept(Tok::Bar)) tail = parse_term();
      expect(Tok::RBrack, "']'");
      return mk_list(std::move(elems), std::move(tail));
    }
    if (accept(Tok::LParen)) {
      Term t = parse_term();
      expect(Tok::RParen, "')'");
      return t;
    }
    throw err("expected a term");
  }

  // an atom, or T = U read as the '=' predicate
  Atom parse_atom() {
    Term t = parse_term();
    if (accept(Tok::Eq)) {
      Term rhs = parse_term();
      return Atom("=", {std::move(t), std::move(rhs)});
    }
    if (t.is_var()) throw err("a variable is not a valid atom");
    return Atom(t.name(), t.args());
  }

  // clause body with at most one cut; returns body atoms + cut position
  std::pair<std::vector<Atom>, std::optional<size_t>> parse_body() {
    std::vector<Atom> body;
    std::optional<size_t> cut;
    for (;;) {
      if (accept(Tok::Bang)) {
        if (cut) throw err("more than one cut in a clause");
        cut = body.size();
      } else {
        body.push_back(parse_atom());
      }
      if (!accept(Tok::Comma)) break;
    }
    return {std::move(body), cut};
  }

  Clause parse_clause() {
    int line = cur().line;
    Atom head = parse_atom();
    std::vector<Atom> body;
    std::optional<size_t> cut;
    if (accept(Tok::If)) std::tie(body, cut) = parse_body();
    expect(Tok::Dot, "'.'");
    Clause c(std::move(head), std::move(body), cut);
    normalize_anon(c);
    (void)line;
    return c;
  }

  // Rename placeholder '_' variables to _0, _1, ... choosing suffixes
  // that do not collide with the clause's named variables.
  void normalize_anon(Clause& c) {
    std::vector<std::string> vars = vars_of(c);
    std::set<std::string> named(vars.begin(), vars.end());
    Subst ren;
    unsigned long next = 0;
    for (const std::string& v : vars) {
      if (v.rfind("_!", 0) != 0) continue;
      std::string cand;
      do {
        cand = "_" + std::to_string(next++);
      } while (named.count(cand));
      named.insert(cand);
      ren.bind(v, Term::var(cand));
    }
    if (!ren.empty()) c = ren.apply(c);
  }
};

}  // namespace

SourceProgram parse_program_source(const std::string& text, bool allow_nonfinal_cut) {
  P p(text);
  SourceProgram sp;
  while (!p.at(Tok::End)) {
    int line = p.cur().line;
    sp.program.clauses.push_back(p.parse_clause());
    sp.clause_lines.push_back(line);
  }
  if (!allow_nonfinal_cut) {
    for (const std::vector<size_t>& proc : sp.program.procedures()) {
      for (size_t k = 0; k + 1 < proc.size(); k++) {
        const Clause& c = sp.program.clauses[proc[k]];
        if (c.has_cut())
          throw ParseError("cut in a non-final clause of " + c.head.pred + "/" +
                               std::to_string(c.head.arity()) +
                               " (only the last clause of a procedure may cut)",
                           sp.clause_lines[proc[k]], 1);
      }
    }
  }
  return sp;
}

Program parse_program(const std::string& text, bool allow_nonfinal_cut) {
  return parse_program_source(text, allow_nonfinal_cut).program;
}

std::vector<Atom> parse_query(const std::string& text) {
  P p(text);
  std::vector<Atom> q;
  if (p.at(Tok::End)) return q;
  q.push_back(p.parse_atom());
  while (p.accept(Tok::Comma)) q.push_back(p.parse_atom());
  p.accept(Tok::Dot);
  if (!p.at(Tok::End)) throw p.err("trailing input after query");
  return q;
}

Atom parse_atom_string(const std::string& text) {
  P p(text);
  Atom a = p.parse_atom();
  p.accept(Tok::Dot);
  if (!p.at(Tok::End)) throw p.err("trailing input after atom");
  return a;
}

Term parse_term_string(const std::string& text) {
  P p(text);
  Term t = p.parse_term();
  if (!p.at(Tok::End)) throw p.err("trailing input after term");
  return t;
}

namespace {

SpecTemplate parse_template(P& p) {
  SpecTemplate t;
  t.pattern = p.parse_atom();
  if (p.accept(Tok::Bar)) {
    t.guards.push_back(p.parse_atom());
    while (p.accept(Tok::Comma)) t.guards.push_back(p.parse_atom());
  }
  p.expect(Tok::Dot, "'.' after spec template");
  return t;
}

SpecExpr parse_spec_expr(P& p);

// spec names may start uppercase (S0, Sr) so they lex as variables
std::string spec_name(P& p) {
  if (p.at(Tok::Ident) || p.at(Tok::Var)) return p.toks[p.pos++].text;
  throw p.err("expected a spec name");
}

SpecExpr parse_spec_prim(P& p) {
  SpecExpr e;
  if (p.at(Tok::Ident) || p.at(Tok::Var)) {
    e.kind = SpecExpr::Kind::ref;
    e.ref = spec_name(p);
    return e;
  }
  if (p.accept(Tok::LParen)) {
    e = parse_spec_expr(p);
    p.expect(Tok::RParen, "')'");
    return e;
  }
  if (p.accept(Tok::LBrace)) {
    e.kind = SpecExpr::Kind::templates;
    while (!p.accept(Tok::RBrace)) e.templates.push_back(parse_template(p));
    return e;
  }
  throw p.err("expected a spec name, '(' or '{'");
}

SpecExpr binop(SpecExpr::Kind k, SpecExpr l, SpecExpr r) {
  SpecExpr e;
  e.kind = k;
  e.lhs = std::make_unique<SpecExpr>(std::move(l));
  e.rhs = std::make_unique<SpecExpr>(std::move(r));
  return e;
}

SpecExpr parse_spec_isect(P& p) {
  SpecExpr e = parse_spec_prim(p);
  while (p.accept(Tok::IntersectOp)) e = binop(SpecExpr::Kind::set_intersect, std::move(e), parse_spec_prim(p));
  return e;
}

SpecExpr parse_spec_diff(P& p) {
  SpecExpr e = parse_spec_isect(p);
  while (p.accept(Tok::DiffOp)) e = binop(SpecExpr::Kind::set_diff, std::move(e), parse_spec_isect(p));
  return e;
}

SpecExpr parse_spec_expr(P& p) {
  SpecExpr e = parse_spec_diff(p);
  while (p.accept(Tok::UnionOp)) e = binop(SpecExpr::Kind::set_union, std::move(e), parse_spec_diff(p));
  return e;
}

}  // namespace

SpecFile parse_spec_file(const std::string& text) {
  P p(text);
  SpecFile f;
  while (!p.at(Tok::End)) {
    Token t = p.expect(Tok::Ident, "'aux' or 'spec'");
    if (t.text == "aux") {
      p.expect(Tok::LBrace, "'{'");
      while (!p.accept(Tok::RBrace)) {
        Clause c = p.parse_clause();
        if (c.has_cut()) throw p.err("cut not allowed in auxiliary guard clauses");
        f.aux.push_back(std::move(c));
      }
    } else if (t.text == "spec") {
      std::string name = spec_name(p);
      for (const auto& [n, e] : f.specs) {
        (void)e;
        if (n == name) throw p.err("duplicate spec '" + name + "'");
      }
      SpecExpr e;
      if (p.accept(Tok::Eq)) {
        e = parse_spec_expr(p);
        p.expect(Tok::Dot, "'.'");
      } else {
        p.expect(Tok::LBrace, "'{' or '='");
        e.kind = SpecExpr::Kind::templates;
        while (!p.accept(Tok::RBrace)) e.templates.push_back(parse_template(p));
      }
      f.specs.emplace_back(std::move(name), std::move(e));
    } else {
      throw ParseError("expected 'aux' or 'spec', got '" + t.text + "'", t.line, t.col);
    }
  }
  return f;
}

namespace {

MeasureExpr parse_msum(P& p);

MeasureExpr parse_mprim(P& p) {
  MeasureExpr e;
  if (p.at(Tok::Int)) {
    e.kind = MeasureExpr::Kind::constant;
    e.value = std::stol(p.toks[p.pos++].text);
    return e;
  }
  if (p.accept(Tok::LParen)) {
    e = parse_msum(p);
    p.expect(Tok::RParen, "')'");
    return e;
  }
  Token t = p.expect(Tok::Ident, "a measure");
  if (t.text == "listlen" || t.text == "termsize") {
    e.kind = t.text == "listlen" ? MeasureExpr::Kind::listlen : MeasureExpr::Kind::termsize;
    p.expect(Tok::LParen, "'('");
    e.var = p.expect(Tok::Var, "a variable").text;
    p.expect(Tok::RParen, "')'");
    return e;
  }
  if (t.text == "max") {
    e.kind = MeasureExpr::Kind::maxof;
    p.expect(Tok::LParen, "'('");
    e.kids.push_back(parse_msum(p));
    p.expect(Tok::Comma, "','");
    e.kids.push_back(parse_msum(p));
    p.expect(Tok::RParen, "')'");
    return e;
  }
  // table lookup: name[V1,...,Vn]
  e.kind = MeasureExpr::Kind::table;
  e.table = t.text;
  p.expect(Tok::LBrack, "'['");
  e.table_args.push_back(p.expect(Tok::Var, "a variable").text);
  while (p.accept(Tok::Comma)) e.table_args.push_back(p.expect(Tok::Var, "a variable").text);
  p.expect(Tok::RBrack, "']'");
  return e;
}

MeasureExpr parse_mprod(P& p) {
  MeasureExpr e = parse_mprim(p);
  while (p.accept(Tok::Star)) {
    MeasureExpr r;
    r.kind = MeasureExpr::Kind::mul;
    r.kids.push_back(std::move(e));
    r.kids.push_back(parse_mprim(p));
    e = std::move(r);
  }
  return e;
}

MeasureExpr parse_msum(P& p) {
  MeasureExpr e = parse_mprod(p);
  while (p.accept(Tok::Plus)) {
    MeasureExpr r;
    r.kind = MeasureExpr::Kind::add;
    r.kids.push_back(std::move(e));
    r.kids.push_back(parse_mprod(p));
    e = std::move(r);
  }
  return e;
}

void check_level_pattern(const Atom& a, const P& p) {
  std::set<std::string> seen;
  for (const Term& t : a.args) {
    if (!t.is_var()) throw p.err("level pattern arguments must be distinct variables");
    if (!seen.insert(t.name()).second)
      throw p.err("level pattern arguments must be distinct variables");
  }
}

}  // namespace

LevelFile parse_level_file(const std::string& text) {
  P p(text);
  LevelFile f;
  while (!p.at(Tok::End)) {
    if (p.at(Tok::Ident) && p.cur().text == "table" && p.pos + 1 < p.toks.size() &&
        p.toks[p.pos + 1].kind == Tok::Ident) {
      p.pos++;
      LevelTable tab;
      tab.name = p.expect(Tok::Ident, "table name").text;
      p.expect(Tok::LBrace, "'{'");
      while (!p.accept(Tok::RBrace)) {
        std::vector<Term> key;
        p.expect(Tok::LParen, "'('");
        key.push_back(p.parse_term());
        while (p.accept(Tok::Comma)) key.push_back(p.parse_term());
        p.expect(Tok::RParen, "')'");
        for (const Term& t : key)
          if (!t.ground()) throw p.err("table keys must be ground");
        p.expect(Tok::Eq, "'='");
        long v = std::stol(p.expect(Tok::Int, "a value").text);
        p.expect(Tok::Dot, "'.'");
        tab.rows.emplace_back(std::move(key), v);
      }
      f.tables.push_back(std::move(tab));
      continue;
    }
    LevelEntry e;
    // pattern '=' measure; for the '=' predicate the pattern itself is
    // T=U, so disambiguate with one token of lookahead after the '='
    Term t1 = p.parse_term();
    p.expect(Tok::Eq, "'='");
    size_t mark = p.pos;
    bool eq_pattern = false;
    if (p.at(Tok::Var)) {
      // try: T=U = expr
      try {
        Term t2 = p.parse_term();
        if (p.at(Tok::Eq)) {
          e.pattern = Atom("=", {t1, t2});
          p.pos++;
          eq_pattern = true;
        }
      } catch (const ParseError&) {
      }
      if (!eq_pattern) p.pos = mark;
    }
    if (!eq_pattern) {
      if (t1.is_var()) throw p.err("level pattern must be an atom");
      e.pattern = Atom(t1.name(), t1.args());
    }
    check_level_pattern(e.pattern, p);
    e.expr = parse_msum(p);
    if (p.at(Tok::Ident) && p.cur().text == "when") {
      p.pos++;
      e.when_guards.push_back(p.parse_atom());
      while (p.accept(Tok::Comma)) e.when_guards.push_back(p.parse_atom());
    }
    p.expect(Tok::Dot, "'.'");
    f.entries.push_back(std::move(e));
  }
  return f;
}

// ---- toml-subset config ----

namespace {

struct ConfigParser {
  const std::string& text;
  size_t i = 0;
  int line = 1;

  explicit ConfigParser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, 1); }

  void skip_space_in_line() {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) i++;
  }
  void skip_blank() {
    for (;;) {
      skip_space_in_line();
      if (i < text.size() && text[i] == '#') {
        while (i < text.size() && text[i] != '\n') i++;
      }
      if (i < text.size() && text[i] == '\n') {
        i++;
        line++;
        continue;
      }
      return;
    }
  }

  std::string bare_key() {
    size_t j = i;
    while (j < text.size() && (isalnum((unsigned char)text[j]) || text[j] == '_')) j++;
    if (j == i) fail("expected a key");
    std::string k = text.substr(i, j - i);
    i = j;
    return k;
  }

  ConfigValue value() {
    skip_space_in_line();
    if (i >= text.size()) fail("expected a value");
    char c = text[i];
    if (c == '"') {
      i++;
      std::string s;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) {
          i++;
          s += text[i] == 'n' ? '\n' : text[i];
        } else {
          s += text[i];
        }
        i++;
      }
      if (i >= text.size()) fail("unterminated string");
      i++;
      return ConfigValue{s};
    }
    if (c == '[') {
      i++;
      ConfigArray arr;
      skip_blank();
      if (i < text.size() && text[i] == ']') {
        i++;
        return ConfigValue{arr};
      }
      for (;;) {
        skip_blank();
        arr.push_back(value());
        skip_blank();
        if (i < text.size() && text[i] == ',') {
          i++;
          continue;
        }
        if (i < text.size() && text[i] == ']') {
          i++;
          return ConfigValue{arr};
        }
        fail("expected ',' or ']' in array");
      }
    }
    if (c == '-' || isdigit((unsigned char)c)) {
      size_t j = i;
      if (c == '-') j++;
      while (j < text.size() && isdigit((unsigned char)text[j])) j++;
      long v = std::stol(text.substr(i, j - i));
      i = j;
      return ConfigValue{v};
    }
    if (isalpha((unsigned char)c)) {
      std::string w = bare_key();
      if (w == "true") return ConfigValue{true};
      if (w == "false") return ConfigValue{false};
      fail("unquoted value '" + w + "' (only true/false allowed bare)");
    }
    fail("unexpected value syntax");
  }

  ConfigFile parse() {
    ConfigFile f;
    ConfigTable* target = &f.root;
    for (;;) {
      skip_blank();
      if (i >= text.size()) return f;
      if (text[i] == '[') {
        bool arr = i + 1 < text.size() && text[i + 1] == '[';
        i += arr ? 2 : 1;
        skip_space_in_line();
        std::string name = bare_key();
        skip_space_in_line();
        if (arr) {
          if (i + 1 >= text.size() || text[i] != ']' || text[i + 1] != ']') fail("expected ']]'");
          i += 2;
          f.table_arrays[name].emplace_back();
          f.table_arrays[name].back().line = line;
          target = &f.table_arrays[name].back();
        } else {
          if (i >= text.size() || text[i] != ']') fail("expected ']'");
          i++;
          if (f.tables.count(name)) fail("duplicate section [" + name + "]");
          f.tables[name].line = line;
          target = &f.tables[name];
        }
        continue;
      }
      std::string key = bare_key();
      skip_space_in_line();
      if (i >= text.size() || text[i] != '=') fail("expected '=' after key '" + key + "'");
      i++;
      ConfigValue v = value();
      skip_space_in_line();
      if (i < text.size() && text[i] == '#')
        while (i < text.size() && text[i] != '\n') i++;
      if (i < text.size() && text[i] != '\n') fail("trailing input after value of '" + key + "'");
      if (target->kv.count(key)) fail("duplicate key '" + key + "'");
      target->kv.emplace(key, std::move(v));
    }
  }
};

}  // namespace

ConfigFile parse_config(const std::string& text) { return ConfigParser(text).parse(); }

}  // namespace lpcheck
