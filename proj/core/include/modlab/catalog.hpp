#pragma once

#include <string>
#include <vector>

#include "modlab/ring_module.hpp"

namespace modlab {

// Named modules used by the corpus, the suites and the tests.
RModule abelian_module(const Vec& orders);  // name "z4_z8" style, coordinates as given
std::string abelian_name(const Vec& orders);

// Z/2 + Z/2 with the coordinate swap as its only action.
RModule swap_module();

// Upper-triangular 2x2 matrices over F2 on basis (e11, e12, e22), acting on
// itself by right multiplication with e11, e12, e22.
RModule triangular_regular_module();

// Regular module of Z/n: the action is multiplication by 1, so it is the Z-module Z/n
// under a one-label context.
RModule cyclic_regular_module(Int n);

// A = T2(F2), G = {1, g} with g conjugation by [[1,1],[0,1]], M = A over A*G.
// Candidate conventions for the action generators.
struct SkewCandidate {
  RModule module;
  std::string convention;
};
std::vector<SkewCandidate> skew_candidates();

// All partitions of n (parts non-increasing).
std::vector<std::vector<int>> partitions(int n);
// Invariant factors of the abelian group with the given primary type.
Vec invariant_factors_of(const PrimaryType& type);
// Every abelian group of order n, by invariant factors, in a fixed order.
std::vector<Vec> abelian_groups_of_order(Int n);
// p-group with exponent partition lambda: orders p^lambda_i, largest first.
Vec p_group(Int p, const std::vector<int>& lambda);

}  // namespace modlab
