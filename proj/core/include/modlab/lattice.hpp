#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "modlab/ring_module.hpp"

namespace modlab {

// formulas: modules whose actions are scalars use closed forms (Soc = M[r],
// purity, elementary endomorphisms, DFS over covers). lattice: everything is
// read off the materialized submodule lattice. Other modules always use the
// lattice.
enum class Route { formulas, lattice };

struct InvarianceFailure {
  GroupHom map;
  Vec element;  // in K, map(element) is not
};

// Per-module cache. Not thread-safe; use one per worker.
class Analysis {
 public:
  explicit Analysis(RModule m, Route route = Route::formulas, Int guard = default_size_guard());

  const RModule& module() const { return m_; }
  const FiniteAbelianGroup& group() const { return m_.group(); }
  Int guard() const { return guard_; }
  bool formulas() const { return formulas_; }

  const std::vector<Subgroup>& submodules();
  const HomSet& end();
  // Additive generators of End(M).
  const std::vector<GroupHom>& end_generators();

  const Subgroup& socle();
  const Subgroup& radical();
  Subgroup socle_of(const Subgroup& l);
  Subgroup radical_of(const Subgroup& l);

  // nullopt when the predicate holds; otherwise a nonzero X <= L with X meet K = 0
  // (resp. a proper X < L with K + X = L).
  std::optional<Subgroup> essential_failure(const Subgroup& k, const Subgroup& l);
  std::optional<Subgroup> superfluous_failure(const Subgroup& k, const Subgroup& l);
  bool is_essential(const Subgroup& k, const Subgroup& l) { return !essential_failure(k, l); }
  bool is_superfluous(const Subgroup& k, const Subgroup& l) { return !superfluous_failure(k, l); }

  bool is_summand(const Subgroup& k);
  std::optional<Subgroup> complement(const Subgroup& k);
  std::optional<InvarianceFailure> invariance_failure(const Subgroup& k);
  bool is_fully_invariant(const Subgroup& k);
  const std::vector<Subgroup>& summands();

  // Y/K superfluous in M/K, for a summand K <= Y.
  bool lies_above(const Subgroup& y, const Subgroup& k);
  // A (fully invariant, if strict) summand D with X essential in D. The
  // lattice route returns the first in canonical order.
  std::optional<Subgroup> envelope(const Subgroup& x, bool strict);
  // A (fully invariant, if strict) summand K <= Y that Y lies above.
  std::optional<Subgroup> lies_above_summand(const Subgroup& y, bool strict);

  std::uint64_t envelope_candidates() const { return candidates_; }

 private:
  struct Lattice;
  Lattice& lattice();
  bool submodule_or_throw(const Subgroup& s, const char* what) const;
  Int radical_scalar() const { return rad_; }
  Subgroup primary_part(const Subgroup& x, Int p) const;
  std::optional<Subgroup> envelope_dfs(const Subgroup& x, Int p, bool strict);
  std::optional<Subgroup> above_dfs(const Subgroup& y, Int p, bool strict);
  bool summand_ok(const Subgroup& s, bool strict);

  RModule m_;
  Int guard_;
  bool formulas_;
  Int rad_ = 1;  // product of the primes dividing the exponent
  std::vector<Int> primes_;
  std::optional<std::vector<Subgroup>> subs_;
  std::optional<HomSet> end_;
  std::optional<std::vector<GroupHom>> end_gens_;
  std::optional<Subgroup> soc_, rad_sub_;
  std::optional<std::vector<Subgroup>> summands_;
  std::unordered_map<Subgroup, bool, SubgroupHash> summand_memo_, fi_memo_;
  std::vector<std::vector<Subgroup>> power_images_;  // [prime index][h] = p^h M
  std::shared_ptr<Lattice> lattice_;
  std::uint64_t candidates_ = 0;
};

// One-shot entry points; each builds a throwaway Analysis.
Subgroup socle(const RModule& m);
Subgroup radical(const RModule& m);

struct LatticeVerdict {
  bool holds = false;
  std::optional<Subgroup> witness;
};
LatticeVerdict is_essential(const RModule& m, const Subgroup& k, const Subgroup& l);
LatticeVerdict is_superfluous(const RModule& m, const Subgroup& k, const Subgroup& l);
std::vector<Subgroup> summands(const RModule& m);
LatticeVerdict is_summand(const RModule& m, const Subgroup& k);  // witness = complement
std::optional<InvarianceFailure> is_fully_invariant(const RModule& m, const Subgroup& k);
bool lies_above(const RModule& m, const Subgroup& l, const Subgroup& k);
std::optional<Subgroup> essential_envelope_summand(const RModule& m, const Subgroup& x, bool strict);

// Least supersets closed under pairwise meet (join); sorted, duplicates removed.
std::vector<Subgroup> meet_closure(const std::vector<Subgroup>& s);
std::vector<Subgroup> join_closure(const std::vector<Subgroup>& s);

// End(M) abelian. Enumerates End when it fits the guard; otherwise first tries
// commutativity of generators, then projections onto each summand along a
// complement.
AbelianEndCertificate end_is_abelian(Analysis& a);

}  // namespace modlab
