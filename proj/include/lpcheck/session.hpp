#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "lpcheck/diagnose.hpp"
#include "lpcheck/engine.hpp"
#include "lpcheck/report.hpp"
#include "lpcheck/spec.hpp"
#include "lpcheck/term.hpp"
#include "lpcheck/verify.hpp"

namespace lpcheck {

// Anything wrong with a config bundle or the files it references. The
// CLI maps this (and only this) to the usage-error exit code.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// One [[check]] entry after load-time validation: names are known to
// resolve, atoms are parsed, split indices are 0-based and in range.
struct CheckSpec {
  std::string kind;
  std::string spec;                // main spec name, where the kind takes one
  std::string s_prime;             // guard spec name for acceptable evidence
  std::string evidence;            // finite | recurrent | acceptable
  std::vector<Atom> queries;       // finite-tree evidence queries
  std::optional<Atom> query;       // tree root / suitability atom / runtime query
  std::string pre, post;           // call-success spec names
  std::vector<std::vector<size_t>> split_programs;  // clause indices per part
  std::vector<std::string> split_parts;             // part spec names
  std::string whole;               // whole spec name for splits
  std::string rule;                // alternating | fixed | suitability | table
  size_t rule_part = 0;            // fixed: which program answers everything
  std::vector<std::pair<Atom, std::optional<size_t>>> rule_table;
};

struct SessionSettings {
  int depth = 3;
  long budget = 200000;
  int delta = 2;
  long fresh_consts = 0;
  bool allow_nonfinal_cut = false;
  size_t witness_cap = 50;
};

// The [diagnose] section: which specs the two diagnosis sweeps run
// against. spec_corr defaults to spec_compl.
struct DiagnoseSpec {
  bool configured = false;
  std::string spec_compl;
  std::string spec_corr;
};

// A loaded bundle: program, spec library, level mapping, the checks to
// run, and the ground universe assembled from all of them.
struct Session {
  std::string config_path;
  SessionSettings settings;
  Program program;
  SpecLibrary specs;
  LevelMapping levels;
  bool has_levels = false;
  std::vector<CheckSpec> checks;
  DiagnoseSpec diagnose;
  Signature sig;
  std::unique_ptr<GroundUniverse> universe;
  std::map<std::string, std::uint64_t> input_hashes;  // file as referenced -> fnv1a
};

// Command-line overrides of the bundle's settings; unset fields keep
// the config's values. Applied before the signature is assembled, so
// fresh_consts takes effect on the universe.
struct SettingsOverride {
  std::optional<int> depth;
  std::optional<long> budget;
  std::optional<int> delta;
  std::optional<long> fresh_consts;
  std::optional<size_t> witness_cap;
};

// Reads and validates a config bundle. File paths inside the config
// resolve relative to the config's directory. Throws ConfigError on
// anything malformed, unreadable, unresolvable, or out of range.
Session load_session(const std::string& config_path, const SettingsOverride& ov = {});

// The reproducible record of one check run: no timestamps, no absolute
// paths beyond what the caller passed in, so identical inputs give
// byte-identical manifests.
struct RunManifest {
  std::string tool_version;
  std::string config_path;
  SessionSettings settings;
  std::map<std::string, std::uint64_t> input_hashes;
  std::vector<Report> reports;
};

// Runs every configured check in order. Contract violations raised by
// the checks (std::invalid_argument) are configuration mistakes from
// the bundle's point of view and resurface as ConfigError.
RunManifest run_checks(Session& s);

// Runs the [diagnose] section: incompleteness against spec_compl,
// incorrectness against spec_corr.
std::pair<Diagnosis, Diagnosis> run_diagnosis(Session& s);

// 0 all verified, 1 any refuted, 2 any inconclusive without refutation.
int exit_code(const std::vector<Report>& reports);

const char* tool_version();
std::uint64_t fnv1a(const std::string& data);

std::string to_text(const RunManifest& m);
nlohmann::json to_json(const RunManifest& m);

}  // namespace lpcheck
