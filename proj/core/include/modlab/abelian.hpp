#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modlab/error.hpp"

namespace modlab {

using Int = std::int64_t;
using Vec = std::vector<Int>;

// p -> exponents of the p-primary part, largest first.
using PrimaryType = std::map<Int, std::vector<int>>;

std::vector<std::pair<Int, int>> factorize(Int n);
Int ipow(Int base, int exp);

class FiniteAbelianGroup {
 public:
  FiniteAbelianGroup() = default;
  // Coordinates exactly as given: the group is the sum of Z/d_i over `orders`.
  explicit FiniteAbelianGroup(Vec orders);
  // Invariant-factor form d_1 | d_2 | ... with every d_i > 1.
  static FiniteAbelianGroup canonical(const Vec& orders);

  const Vec& orders() const { return orders_; }
  std::size_t rank() const { return orders_.size(); }
  Int order() const { return order_; }
  Int exponent() const;
  bool is_trivial() const { return order_ == 1; }
  bool is_canonical() const;
  Vec invariant_factors() const;
  PrimaryType primary_type() const;

  Vec zero() const { return Vec(orders_.size(), 0); }
  Vec basis_vector(std::size_t i) const;
  Vec reduce(Vec x) const;
  bool is_element(std::span<const Int> x) const;
  Vec add(std::span<const Int> x, std::span<const Int> y) const;
  Vec scale(Int n, std::span<const Int> x) const;
  Int element_order(std::span<const Int> x) const;

  // Mixed-radix index, first coordinate most significant.
  std::uint64_t index_of(std::span<const Int> x) const;
  Vec element_at(std::uint64_t index) const;

  FiniteAbelianGroup direct_sum(const FiniteAbelianGroup& other) const;
  std::string to_string() const;

  bool operator==(const FiniteAbelianGroup& other) const { return orders_ == other.orders_; }

 private:
  Vec orders_;
  Int order_ = 1;
};

// A subgroup in canonical form: the row-style Hermite normal form of the
// lattice H + diag(d)Z^k. Pivots divide the moduli and entries above a pivot
// are reduced modulo it, so equal subgroups have equal bases.
class Subgroup {
 public:
  Subgroup() = default;
  static Subgroup from_hnf(FiniteAbelianGroup ambient, Vec hnf);

  const FiniteAbelianGroup& ambient() const { return ambient_; }
  const Vec& basis() const { return hnf_; }
  Int cardinality() const { return card_; }
  Int pivot(std::size_t i) const { return hnf_[i * ambient_.rank() + i]; }
  std::span<const Int> row(std::size_t i) const {
    return {hnf_.data() + i * ambient_.rank(), ambient_.rank()};
  }
  // Rows whose pivot is a proper divisor of the modulus; they generate.
  std::vector<Vec> generators() const;

  bool contains(std::span<const Int> x) const;
  bool is_zero() const { return card_ == 1; }
  bool is_whole() const { return card_ == ambient_.order(); }

  // Every element exactly once: sum of c_i * row_i with 0 <= c_i < d_i / h_ii.
  void for_each_element(const std::function<void(const Vec&)>& fn) const;
  std::vector<Vec> elements() const;

  std::size_t hash() const;
  bool operator==(const Subgroup& other) const {
    return card_ == other.card_ && hnf_ == other.hnf_ && ambient_ == other.ambient_;
  }
  // Order used everywhere for determinism: cardinality, then basis entries.
  bool operator<(const Subgroup& other) const;

 private:
  FiniteAbelianGroup ambient_;
  Vec hnf_;
  Int card_ = 1;
};

struct SubgroupHash {
  std::size_t operator()(const Subgroup& s) const { return s.hash(); }
};

Subgroup canonicalize(std::span<const Vec> generators, const FiniteAbelianGroup& ambient);
Subgroup zero_subgroup(const FiniteAbelianGroup& g);
Subgroup whole_group(const FiniteAbelianGroup& g);
Subgroup cyclic_subgroup(const FiniteAbelianGroup& g, std::span<const Int> x);

bool is_subset(const Subgroup& a, const Subgroup& b);
Subgroup meet(const Subgroup& a, const Subgroup& b);
Subgroup join(const Subgroup& a, const Subgroup& b);
Subgroup scale(Int n, const Subgroup& a);

// Primary type of a subgroup and of ambient/K, read off from |p^i X|.
PrimaryType primary_type(const Subgroup& x);
PrimaryType quotient_primary_type(const Subgroup& k);
bool type_fits(const std::vector<int>& inner, const std::vector<int>& outer);

// Matrix is rows = codomain rank, columns = domain rank; column j is the
// image of generator j.
class GroupHom {
 public:
  GroupHom() = default;
  GroupHom(FiniteAbelianGroup domain, FiniteAbelianGroup codomain, Vec matrix);
  static GroupHom zero(const FiniteAbelianGroup& domain, const FiniteAbelianGroup& codomain);
  static GroupHom identity(const FiniteAbelianGroup& g);
  static GroupHom scalar(const FiniteAbelianGroup& g, Int n);
  // Column j given as the image of generator j.
  static GroupHom from_images(const FiniteAbelianGroup& domain, const FiniteAbelianGroup& codomain,
                              const std::vector<Vec>& images);

  const FiniteAbelianGroup& domain() const { return domain_; }
  const FiniteAbelianGroup& codomain() const { return codomain_; }
  const Vec& matrix() const { return matrix_; }
  Int entry(std::size_t i, std::size_t j) const { return matrix_[i * domain_.rank() + j]; }
  Vec image_of_generator(std::size_t j) const;
  Vec apply(std::span<const Int> x) const;
  bool is_zero() const;
  // Scalar multiplication by some integer, i.e. the map commutes with everything.
  std::optional<Int> as_scalar() const;

  GroupHom operator+(const GroupHom& other) const;
  GroupHom operator-() const;
  bool operator==(const GroupHom& other) const = default;
  bool operator<(const GroupHom& other) const { return matrix_ < other.matrix_; }

 private:
  FiniteAbelianGroup domain_;
  FiniteAbelianGroup codomain_;
  Vec matrix_;
};

// g after f
GroupHom compose(const GroupHom& g, const GroupHom& f);

Subgroup kernel(const GroupHom& f);
Subgroup image(const GroupHom& f);
Subgroup image_of(const GroupHom& f, const Subgroup& x);
Subgroup kernel_on(const GroupHom& f, const Subgroup& s);
Subgroup preimage(const GroupHom& f, const Subgroup& y);
std::optional<Vec> solve(const GroupHom& f, std::span<const Int> y);

struct Quotient {
  FiniteAbelianGroup group;  // invariant-factor form
  GroupHom projection;
  std::vector<Vec> lifts;  // lifts[i] maps to the i-th generator of `group`
};
Quotient quotient(const Subgroup& k);

// X as an abstract group: invariant factors and matching generators in X.
struct Structure {
  Vec orders;
  std::vector<Vec> generators;
};
Structure structure(const Subgroup& x);

// Hom_Z(A, B) as the group of coordinates c_ij in Z/gcd(a_j, b_i), entry
// h_ij = c_ij * b_i / gcd(a_j, b_i).
class HomCoordinates {
 public:
  HomCoordinates(FiniteAbelianGroup domain, FiniteAbelianGroup codomain);
  const FiniteAbelianGroup& group() const { return group_; }
  const FiniteAbelianGroup& domain() const { return domain_; }
  const FiniteAbelianGroup& codomain() const { return codomain_; }
  GroupHom to_hom(std::span<const Int> coords) const;
  Vec from_hom(const GroupHom& h) const;

 private:
  FiniteAbelianGroup domain_;
  FiniteAbelianGroup codomain_;
  FiniteAbelianGroup group_;
  Vec step_;
};

// Each subgroup exactly once, generated directly in canonical form from the
// bottom row up. `fn` returns false to stop early.
void for_each_subgroup(const FiniteAbelianGroup& g, const std::function<bool(const Subgroup&)>& fn);
std::vector<Subgroup> all_subgroups(const FiniteAbelianGroup& g);
std::uint64_t count_subgroups(const FiniteAbelianGroup& g);

void check_size(Int cardinality, Int guard);

}  // namespace modlab
