#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "modlab/abelian.hpp"

namespace modlab {

// Empty label list: the ring acts through Z only.
struct RingContext {
  std::string name = "Z";
  std::vector<std::string> labels;
  bool operator==(const RingContext& other) const = default;
};

struct Validation {
  bool ok = true;
  std::vector<std::string> problems;
};

// Checks raw action data: one square matrix per label, each entry satisfying
// the congruence h_ij * d_j = 0 mod d_i.
Validation validate_module(const FiniteAbelianGroup& group, const RingContext& ctx,
                           const std::vector<Vec>& matrices);

class RModule {
 public:
  RModule() = default;
  static RModule abelian(FiniteAbelianGroup group, std::string name = {});
  RModule(std::string name, RingContext ctx, FiniteAbelianGroup group, std::vector<GroupHom> actions);

  const std::string& name() const { return name_; }
  const RingContext& context() const { return ctx_; }
  const FiniteAbelianGroup& group() const { return group_; }
  const std::vector<GroupHom>& actions() const { return actions_; }
  Int order() const { return group_.order(); }
  // Every action is multiplication by an integer, so submodules are subgroups
  // and every group endomorphism commutes with the actions.
  bool scalar_actions() const { return scalar_; }

  bool is_submodule(const Subgroup& s) const;
  Subgroup generated(std::span<const Vec> generators) const;
  Subgroup cyclic(std::span<const Int> x) const;
  bool is_hom_to(const GroupHom& f, const RModule& target) const;
  RModule renamed(std::string name) const;

 private:
  std::string name_;
  RingContext ctx_;
  FiniteAbelianGroup group_;
  std::vector<GroupHom> actions_;
  bool scalar_ = true;
};

void require_same_context(const RModule& a, const RModule& b);

// Hom_R(M, N) as a subgroup of the coordinate group of Hom_Z(M, N).
class HomSet {
 public:
  HomSet(const RModule& domain, const RModule& codomain);

  const RModule& domain() const { return domain_; }
  const RModule& codomain() const { return codomain_; }
  const HomCoordinates& coordinates() const { return coords_; }
  const Subgroup& subgroup() const { return sub_; }
  Int cardinality() const { return sub_.cardinality(); }

  std::vector<GroupHom> generators() const;
  bool contains(const GroupHom& f) const;
  GroupHom hom_at(std::span<const Int> coords) const { return coords_.to_hom(coords); }
  GroupHom random(std::mt19937_64& rng) const;
  // Every element, ordered by matrix entries. Throws size_guard beyond `guard`.
  std::vector<GroupHom> elements(Int guard) const;
  std::vector<GroupHom> elements() const { return elements(default_size_guard()); }
  void for_each(const std::function<void(const GroupHom&)>& fn) const;

 private:
  RModule domain_;
  RModule codomain_;
  HomCoordinates coords_;
  Subgroup sub_;
};

inline HomSet hom_set(const RModule& m, const RModule& n) { return HomSet(m, n); }

// Submodules ordered by (cardinality, basis).
std::vector<Subgroup> r_submodules(const RModule& m, Int guard);
inline std::vector<Subgroup> r_submodules(const RModule& m) { return r_submodules(m, default_size_guard()); }
void for_each_submodule(const RModule& m, const std::function<bool(const Subgroup&)>& fn);

struct DirectSum {
  RModule sum;
  std::vector<GroupHom> injections;
  std::vector<GroupHom> projections;
};
DirectSum direct_sum(const std::vector<RModule>& parts);
DirectSum direct_power(const RModule& m, std::size_t k);

// A submodule with the induced action, presented in invariant-factor
// coordinates, together with the inclusion map.
struct Submodule {
  RModule module;
  GroupHom inclusion;
};
Submodule as_module(const RModule& m, const Subgroup& s);

// M/K with the induced action.
struct QuotientModule {
  RModule module;
  GroupHom projection;
};
QuotientModule quotient_module(const RModule& m, const Subgroup& k);

// Same module in invariant-factor coordinates, with the isomorphism.
struct Recoordinated {
  RModule module;
  GroupHom iso;  // original -> canonical
};
Recoordinated to_canonical_coordinates(const RModule& m);

struct AbelianEndCertificate {
  bool abelian = true;
  std::vector<GroupHom> idempotents;  // complete list when abelian
  std::optional<std::pair<GroupHom, GroupHom>> witness;  // idempotent e and some f with ef != fe
};
// Enumerates End(M); throws size_guard when |End(M)| exceeds the guard.
AbelianEndCertificate end_ring_is_abelian(const RModule& m, Int guard);

}  // namespace modlab
