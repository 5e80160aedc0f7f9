#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lpcheck/engine.hpp"
#include "lpcheck/parser.hpp"
#include "lpcheck/session.hpp"

using namespace lpcheck;

namespace {

// A config path that does not exist as given is retried under the
// directory named by LPCHECK_CONFIG_DIR, so suites of bundles can be
// addressed by bare name.
std::string resolve_config(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("LPCHECK_CONFIG_DIR")) {
    fs::path alt = fs::path(dir) / path;
    if (fs::exists(alt)) return alt.string();
  }
  return path;  // let the loader produce the error message
}

std::string read_file_or_die(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct CommonFlags {
  int depth = -1;
  long budget = -1;
  int delta = -1;
  long fresh_consts = -1;
  long witness_cap = -1;
  std::string format = "text";

  SettingsOverride overrides() const {
    SettingsOverride ov;
    if (depth >= 0) ov.depth = depth;
    if (budget >= 0) ov.budget = budget;
    if (delta >= 0) ov.delta = delta;
    if (fresh_consts >= 0) ov.fresh_consts = fresh_consts;
    if (witness_cap >= 0) ov.witness_cap = (size_t)witness_cap;
    return ov;
  }
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--depth", f.depth, "enumeration depth bound (overrides the config)");
  cmd->add_option("--budget", f.budget, "tree-node and guard-solver budget");
  cmd->add_option("--delta", f.delta, "body-depth slack over the head atom's depth");
  cmd->add_option("--fresh-consts", f.fresh_consts, "extra constants added to the universe");
  cmd->add_option("--witness-cap", f.witness_cap, "max culprits a diagnosis lists");
  cmd->add_option("--format", f.format, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));
}

int cmd_check(const std::string& config, const CommonFlags& f) {
  Session s = load_session(resolve_config(config), f.overrides());
  RunManifest m = run_checks(s);
  if (f.format == "structured")
    std::cout << to_json(m).dump(2) << "\n";
  else
    std::cout << to_text(m);
  return exit_code(m.reports);
}

int cmd_diagnose(const std::string& config, const CommonFlags& f) {
  Session s = load_session(resolve_config(config), f.overrides());
  auto [incompleteness, incorrectness] = run_diagnosis(s);
  if (f.format == "structured") {
    nlohmann::json j;
    j["format_version"] = 1;
    j["incompleteness"] = to_json(incompleteness);
    j["incorrectness"] = to_json(incorrectness);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << to_text(incompleteness) << "\n" << to_text(incorrectness) << "\n";
  }
  return incompleteness.empty() && incorrectness.empty() ? 0 : 1;
}

// "1,2,4;1,2,3" -> clause index lists (1-based in the flag).
std::vector<std::vector<size_t>> parse_split_flag(const std::string& text, size_t nclauses) {
  std::vector<std::vector<size_t>> parts;
  std::istringstream partstream(text);
  std::string chunk;
  while (std::getline(partstream, chunk, ';')) {
    std::vector<size_t> indices;
    std::istringstream numstream(chunk);
    std::string num;
    while (std::getline(numstream, num, ',')) {
      long n = 0;
      try {
        n = std::stol(num);
      } catch (...) {
        throw ConfigError("--split: '" + num + "' is not a clause number");
      }
      if (n < 1 || (size_t)n > nclauses)
        throw ConfigError("--split: clause number " + std::to_string(n) + " out of range");
      indices.push_back((size_t)n - 1);
    }
    if (indices.empty()) throw ConfigError("--split: empty part");
    parts.push_back(std::move(indices));
  }
  if (parts.empty()) throw ConfigError("--split: no parts");
  return parts;
}

int cmd_run(const std::string& program_path, const std::string& query_text,
            const std::string& engine, const std::string& rule, const std::string& split_flag,
            long budget, bool dump_tree, const std::string& format) {
  Program p;
  try {
    // execution has Prolog's operational reading, so cuts may sit anywhere
    p = parse_program(read_file_or_die(program_path), true);
  } catch (const ParseError& e) {
    throw ConfigError(program_path + ": " + e.what());
  }
  std::vector<Atom> query;
  try {
    query = parse_query(query_text);
  } catch (const ParseError& e) {
    throw ConfigError("query: " + std::string(e.what()));
  }

  SldTree tree;
  if (engine == "sld") {
    tree = build_sld_tree(p, query, budget);
  } else if (engine == "pruned-ld") {
    tree = build_pruned_ld_tree(p, query, budget);
  } else {  // cssld
    if (split_flag.empty())
      throw ConfigError("--engine=cssld needs --split \"i,j,...;k,l,...\"");
    std::vector<Program> programs;
    for (const std::vector<size_t>& part : parse_split_flag(split_flag, p.clauses.size())) {
      Program pi;
      for (size_t idx : part) {
        const Clause& c = p.clauses[idx];
        pi.clauses.emplace_back(c.head, c.body);
      }
      programs.push_back(std::move(pi));
    }
    CSelectionRule sel;
    if (rule == "alternating" || rule.empty()) {
      sel = cs_alternating(programs.size());
    } else if (rule.rfind("fixed:", 0) == 0) {
      long n = 0;
      try {
        n = std::stol(rule.substr(6));
      } catch (...) {
        throw ConfigError("--rule=fixed:N needs a number");
      }
      if (n < 1 || (size_t)n > programs.size())
        throw ConfigError("--rule=fixed: part " + std::to_string(n) + " out of range");
      sel = cs_fixed((size_t)n - 1);
    } else {
      throw ConfigError("--rule for cssld must be alternating or fixed:N");
    }
    tree = build_cssld_tree(programs, query, sel, budget);
  }

  if (format == "structured") {
    nlohmann::json j;
    j["format_version"] = 1;
    j["engine"] = engine;
    j["answers"] = nlohmann::json::array();
    for (const Answer& a : tree.answers) {
      nlohmann::json row = nlohmann::json::array();
      for (const Atom& at : a.instance) row.push_back(at.str());
      j["answers"].push_back(std::move(row));
    }
    j["nodes"] = tree.nodes;
    j["budget_exhausted"] = tree.budget_exhausted;
    j["unsafe_prune"] = tree.unsafe_prune;
    if (dump_tree) j["tree"] = tree_json(tree);
    std::cout << j.dump(2) << "\n";
  } else {
    for (const Answer& a : tree.answers) {
      std::string line;
      for (const Atom& at : a.instance) line += (line.empty() ? "" : ", ") + at.str();
      std::cout << line << "\n";
    }
    if (tree.answers.empty()) std::cout << "no answers\n";
    if (tree.budget_exhausted) std::cout << "(budget exhausted: the tree was cut off)\n";
    if (tree.unsafe_prune)
      std::cout << "(a cut committed although its guard search was truncated)\n";
    if (dump_tree) std::cout << tree_text(tree);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bounded verification and execution for definite logic programs"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  CommonFlags check_flags;
  std::string check_config;
  CLI::App* check = app.add_subcommand("check", "run the checks configured in a bundle");
  check->add_option("config", check_config, "config file")->required();
  add_common(check, check_flags);

  CommonFlags diag_flags;
  std::string diag_config;
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "list uncovered atoms and violating instances");
  diagnose->add_option("config", diag_config, "config file")->required();
  add_common(diagnose, diag_flags);

  std::string run_program, run_query, run_engine = "sld", run_rule, run_split,
                           run_format = "text";
  long run_budget = 200000;
  bool run_tree = false;
  CLI::App* run = app.add_subcommand("run", "execute a query and print the answers");
  run->add_option("program", run_program, "program file")->required();
  run->add_option("query", run_query, "query, e.g. \"app(X,Y,[a])\"")->required();
  run->add_option("--engine", run_engine, "sld, cssld, or pruned-ld")
      ->check(CLI::IsMember({"sld", "cssld", "pruned-ld"}));
  run->add_option("--rule", run_rule, "cssld program choice: alternating or fixed:N");
  run->add_option("--split", run_split, "cssld parts as clause numbers: \"1,2,4;1,2,3\"");
  run->add_option("--budget", run_budget, "tree-node budget");
  run->add_flag("--tree", run_tree, "dump the tree after the answers");
  run->add_option("--format", run_format, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;  // help/version exit cleanly, usage errors map to 3
  }

  try {
    if (check->parsed()) return cmd_check(check_config, check_flags);
    if (diagnose->parsed()) return cmd_diagnose(diag_config, diag_flags);
    return cmd_run(run_program, run_query, run_engine, run_rule, run_split, run_budget,
                   run_tree, run_format);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
