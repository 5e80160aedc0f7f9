#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpcheck/term.hpp"

namespace lpcheck {

struct SignatureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Function and predicate alphabet of a session. Functor arities must be
// globally consistent; predicates live in a separate namespace.
struct Signature {
  std::vector<std::pair<std::string, int>> functors;    // constants have arity 0
  std::vector<std::pair<std::string, int>> predicates;

  void add_functor(const std::string& name, int arity);
  void add_predicate(const std::string& name, int arity);
  void add_term(const Term& t);
  void add_atom(const Atom& a);
  void add_clause(const Clause& c);
  void add_program(const Program& p);
  // extra constants "$1".."$n" standing in for the rest of an open alphabet
  void add_fresh_constants(int n);

  bool has_constant() const;
  // sort, dedupe, and reject arity clashes
  void finalize();
  std::string str() const;
};

// All ground terms over a signature up to a depth, stored as a DAG:
// each entry is a functor id plus indices of its argument terms. Entries
// are ordered by depth, then functor, then argument tuples, so index
// order is a deterministic enumeration order and every depth level is a
// prefix range. Metadata (depth, spine length, node count, list flag)
// is precomputed so measure evaluation never materializes terms.
class GroundUniverse {
public:
  static constexpr size_t kDefaultCap = 4u << 20;

  explicit GroundUniverse(const Signature& sig, size_t entry_cap = kDefaultCap);

  // Build levels until terms of depth <= d exist, or the entry cap is
  // hit (then the universe stays complete up to the last full level).
  // Returns the depth actually reached.
  int ensure_depth(int d);
  int max_depth() const { return max_depth_; }
  bool capped() const { return capped_; }

  size_t size() const { return funcs_.size(); }
  size_t count_up_to(int depth) const;

  int functor_id(const std::string& name, int arity) const;
  const std::string& functor_name(int id) const { return ftab_[id].first; }
  int functor_arity(int id) const { return ftab_[id].second; }

  int func_of(size_t i) const { return funcs_[i]; }
  const int32_t* args_of(size_t i) const { return arg_pool_.data() + arg_ofs_[i]; }
  int depth_of(size_t i) const { return depths_[i]; }
  long spine_len_of(size_t i) const { return plens_[i]; }
  long node_count_of(size_t i) const { return nodes_[i]; }
  bool is_list_of(size_t i) const { return proper_[i]; }

  Term term(size_t i) const;
  // index of a ground term already inside the built levels
  std::optional<size_t> find(const Term& t) const;
  std::optional<size_t> find_cell(int func, const int32_t* args, int arity) const;

private:
  size_t cap_;
  bool capped_ = false;
  int max_depth_ = -1;
  std::vector<std::pair<std::string, int>> ftab_;

  std::vector<int32_t> funcs_;
  std::vector<uint32_t> arg_ofs_;
  std::vector<int32_t> depths_;
  std::vector<int32_t> plens_;
  std::vector<int64_t> nodes_;
  std::vector<uint8_t> proper_;
  std::vector<int32_t> arg_pool_;
  std::vector<size_t> level_end_;  // level_end_[d] = #terms of depth <= d

  // open-addressed index over entries, keys compared against entry data
  std::vector<int32_t> index_;
  uint64_t hash_cell(int func, const int32_t* args, int arity) const;
  void index_insert(int32_t id);
  void rebuild_index();
  int32_t add_entry(int func, const int32_t* args, int arity);
};

// Mixed-radix space of ground bindings for a variable list, each
// variable drawing from the universe prefix allowed by its depth bound.
struct VarSpace {
  std::vector<std::string> vars;
  std::vector<size_t> radix;
  size_t total = 1;  // 0 when some variable has no candidates

  void decode(size_t idx, std::vector<size_t>& out) const {
    out.resize(vars.size());
    for (size_t k = 0; k < vars.size(); k++) {
      out[k] = idx % radix[k];
      idx /= radix[k];
    }
  }
};

VarSpace make_var_space(const std::vector<std::string>& vars,
                        const std::map<std::string, int>& bounds, const GroundUniverse& u);

// Depth budget for each variable such that instantiating within it
// keeps every atom's depth <= bound. nullopt when the skeleton alone
// is too deep for the bound.
std::optional<std::map<std::string, int>> var_depth_bounds(const std::vector<const Atom*>& atoms,
                                                           int bound);
std::optional<std::map<std::string, int>> var_depth_bounds(const Clause& c, int bound);
std::optional<std::map<std::string, int>> var_depth_bounds(const Atom& a, int bound);

// Ground instances of c where every substituted term has depth <= depth
// (the classic bounded instance set; atoms may end up deeper than the
// bound by the clause's own constructors). Deterministic order. Throws
// SignatureError when the universe has no constants.
std::vector<Clause> ground_instances(const Clause& c, int depth, GroundUniverse& u);

// Ground instances of a pattern atom with instance depth <= bound.
void for_each_bounded_instance(const Atom& pattern, int bound, GroundUniverse& u,
                               const std::function<void(const Atom&)>& fn);

// Every ground atom of the given predicates with depth <= bound, in
// deterministic order: the brute-force side of enumeration cross-checks.
std::vector<Atom> all_ground_atoms(const std::vector<std::pair<std::string, int>>& preds,
                                   int bound, GroundUniverse& u);

}  // namespace lpcheck
