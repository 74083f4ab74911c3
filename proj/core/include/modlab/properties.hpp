#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "modlab/lattice.hpp"

namespace modlab {

enum class PropertyId {
  extending,
  lifting,
  rickart,
  dual_rickart,
  baer,
  dual_baer,
  cs_rickart,
  dual_cs_rickart,
  cs_baer,
  dual_cs_baer,
  regular,
  weak_duo,
  sip,
  ssip,
  ssp,
  sssp,
  sip_extending,
  ssip_extending,
  esip,
  essip,
  ssp_lifting,
  sssp_lifting,
  lssp,
  lsssp,
  k_nonsingular,
  t_nonsingular,
  e_k_nonsingular,
  e_k_cononsingular,
  l_t_nonsingular,
  l_t_cononsingular,
};

const std::vector<PropertyId>& all_property_ids();
std::string_view to_string(PropertyId id);
// Accepts "dual_cs_baer" and "dual-cs-baer".
std::optional<PropertyId> parse_property_id(std::string_view name);

// Which flag a property admits: module properties have strong versions,
// summand intersection/sum properties have strict ones.
enum class Variant { none, strong, strict };
Variant variant_of(PropertyId id);
// Quantifies over Hom(M, N) for a pair; the others are properties of one module.
bool is_relative(PropertyId id);
std::optional<PropertyId> dual_of(PropertyId id);

struct Property {
  PropertyId id = PropertyId::extending;
  bool strong = false;  // strong or strict, per variant_of(id)
  auto operator<=>(const Property&) const = default;
};
// From command-line style flags. Throws invalid_property for combinations the
// definitions do not cover (strong on a summand property, --dual on a dual id, ...).
Property make_property(std::string_view name, bool strong, bool strict, bool dual);
Property make_property(PropertyId id, bool strong = false);
std::string to_string(const Property& p);  // "cs_baer", "strong cs_baer", "strict essip"

// Witness payloads are JSON; see certificate.hpp for the replay side.
struct Certificate {
  Property property;
  std::string module;
  std::string codomain;  // equals module for self properties
  bool verdict = false;
  nlohmann::json witness;
};

// How the families {Ker f} and {Im f} and their closures are produced.
// enumerate: every f in Hom(M, N), then pairwise meet/join closure.
// galois: a submodule X is a kernel meet iff r_M(l_U(X)) = X (image joins dually).
// types: Z-linear pairs only; X is a kernel iff M/X embeds in N, Y an image
//   iff Y is a quotient of M, decided from invariant factors.
// automatic: enumerate when |Hom| is at most hom_enumeration_limit, else types
//   when available, else galois.
enum class FamilyRoute { automatic, enumerate, galois, types };

struct CheckOptions {
  Int guard = default_size_guard();
  Int hom_enumeration_limit = Int{1} << 12;
  std::size_t entry_cap = 256;  // list entries kept in certificates; 0 keeps all
  Route route = Route::formulas;
  FamilyRoute family_route = FamilyRoute::automatic;
  Int lattice_pairs_limit = Int{1} << 26;  // cononsingularity double loop
};

// A family of submodules: either every submodule of the ambient module or an
// explicit sorted list.
struct Family {
  bool everything = false;
  std::vector<Subgroup> members;
  std::string route;  // which FamilyRoute produced it
};

// Cache for one ordered pair (M, N); N = M for self properties. Not thread-safe.
class Workbench {
 public:
  explicit Workbench(RModule m, std::optional<RModule> n = std::nullopt, CheckOptions opts = {});
  Workbench(const Workbench&) = delete;
  Workbench& operator=(const Workbench&) = delete;

  const CheckOptions& options() const { return opts_; }
  bool self() const { return self_; }
  const RModule& source() const { return src_.module(); }
  const RModule& target() const { return tgt().module(); }
  Analysis& src() { return src_; }
  Analysis& tgt() { return self_ ? src_ : *tgt_; }
  const Analysis& tgt() const { return self_ ? src_ : *tgt_; }

  // Hom_R(M, N) = Hom_Z(M, N): every action is a scalar and M, N agree on it.
  bool z_linear() const { return z_linear_; }
  const HomSet& homs();
  Int hom_count();  // throws size_guard when the coordinate group is too large

  // Single kernels / images and their closures (with M, resp. 0, the empty family).
  const Family& kernels();
  const Family& images();
  const Family& kernel_meets();
  const Family& image_joins();
  // Homomorphisms whose kernel meet (image join) is exactly x; x must be a member.
  std::vector<GroupHom> kernel_family(const Subgroup& x);
  std::vector<GroupHom> image_family(const Subgroup& y);

  // Calls fn on each member; fn returns false to stop.
  void for_each(const Family& f, bool in_source, const std::function<bool(const Subgroup&)>& fn);

  Certificate check(const Property& p);

 private:
  Family enumerate_family(bool kernels_side, bool closed);
  Family galois_family(bool kernels_side);
  Family types_family(bool kernels_side, bool closed);
  FamilyRoute pick_route();
  void enumerate_homs();

  CheckOptions opts_;
  bool self_;
  Analysis src_;
  std::optional<Analysis> tgt_;
  bool z_linear_ = false;
  std::optional<HomSet> homs_;
  std::optional<FamilyRoute> route_;
  std::optional<Family> kernels_, images_, kernel_meets_, image_joins_;
  // enumerate route: one representative map per distinct kernel / image
  std::map<Subgroup, GroupHom> kernel_rep_, image_rep_;
  bool enumerated_ = false;
  std::map<Property, Certificate> cache_;
};

Certificate check(const Property& p, const RModule& m, const std::optional<RModule>& n = std::nullopt,
                  const CheckOptions& opts = {});

// The maps of Hom(M, N) live in the coordinate group of u (HomSet::coordinates);
// subsets Z of U are subgroups of that group contained in u.subgroup().
Subgroup l_U(const HomSet& u, const Subgroup& x);
Subgroup r_M(const HomSet& u, const Subgroup& z);
Subgroup l_U_prime(const HomSet& u, const Subgroup& y);
Subgroup r_N_prime(const HomSet& u, const Subgroup& z);

// Z-linear constructions used for witnesses: a map M -> N with kernel exactly x
// (M/x must embed in N), and one with image exactly y (y must be a quotient of M).
std::optional<GroupHom> map_with_kernel(const FiniteAbelianGroup& m, const FiniteAbelianGroup& n, const Subgroup& x);
std::optional<GroupHom> map_onto(const FiniteAbelianGroup& m, const Subgroup& y);

// JSON encodings shared with the certificate checker.
nlohmann::json to_json(const Subgroup& s);  // generator rows
nlohmann::json to_json(const GroupHom& f);  // row-major matrix
nlohmann::json json_int(Int v);             // decimal string beyond 2^53
Int int_from_json(const nlohmann::json& j);
Subgroup subgroup_from_json(const nlohmann::json& j, const FiniteAbelianGroup& ambient);
GroupHom hom_from_json(const nlohmann::json& j, const FiniteAbelianGroup& dom, const FiniteAbelianGroup& cod);

}  // namespace modlab
