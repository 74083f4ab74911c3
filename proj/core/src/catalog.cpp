#include "modlab/catalog.hpp"

#include <algorithm>
#include <functional>

namespace modlab {

std::string abelian_name(const Vec& orders) {
  if (orders.empty()) return "zero";
  std::string s;
  for (std::size_t i = 0; i < orders.size(); ++i) s += (i ? "_z" : "z") + std::to_string(orders[i]);
  return s;
}

RModule abelian_module(const Vec& orders) {
  return RModule::abelian(FiniteAbelianGroup(orders), abelian_name(orders));
}

RModule swap_module() {
  FiniteAbelianGroup g({2, 2});
  return RModule("swap_z2_z2", RingContext{"F2[C2]", {"s"}}, g, {GroupHom(g, g, {0, 1, 1, 0})});
}

namespace {

// matrices act on coordinates (a, b, c) of [[a, b], [0, c]]
const Vec kRightE11{1, 0, 0, 0, 0, 0, 0, 0, 0};
const Vec kRightE12{0, 0, 0, 1, 0, 0, 0, 0, 0};  // (a,b,c) -> (0,a,0)
const Vec kRightE22{0, 0, 0, 0, 1, 0, 0, 0, 1};
const Vec kLeftE11{1, 0, 0, 0, 1, 0, 0, 0, 0};   // (a,b,0)
const Vec kLeftE12{0, 0, 0, 0, 0, 1, 0, 0, 0};   // (0,c,0)
const Vec kLeftE22{0, 0, 0, 0, 0, 0, 0, 0, 1};   // (0,0,c)
const Vec kConj{1, 0, 0, 1, 1, 1, 0, 0, 1};      // (a, a+b+c, c)

RModule t2(const std::string& name, const std::string& ring, const std::vector<std::string>& labels,
           const std::vector<Vec>& mats) {
  FiniteAbelianGroup g({2, 2, 2});
  std::vector<GroupHom> acts;
  for (auto& m : mats) acts.emplace_back(g, g, m);
  return RModule(name, RingContext{ring, labels}, g, std::move(acts));
}

}  // namespace

RModule triangular_regular_module() {
  return t2("t2f2_regular", "T2(F2)", {"e11", "e12", "e22"}, {kRightE11, kRightE12, kRightE22});
}

RModule cyclic_regular_module(Int n) {
  FiniteAbelianGroup g({n});
  return RModule("z" + std::to_string(n) + "_regular", RingContext{"Z" + std::to_string(n), {"1"}}, g,
                 {GroupHom::identity(g)});
}

std::vector<SkewCandidate> skew_candidates() {
  const std::string ring = "T2(F2)*C2";
  const std::vector<std::string> full{"e11", "e12", "e22", "g"};
  const std::vector<std::string> base{"e11", "e12", "e22"};
  return {
      {t2("skew_right_conj", ring, full, {kRightE11, kRightE12, kRightE22, kConj}),
       "right multiplication by A, g by conjugation"},
      {t2("skew_left_conj", ring, full, {kLeftE11, kLeftE12, kLeftE22, kConj}),
       "left multiplication by A, g by conjugation"},
      {t2("skew_right_only", ring + "/A", base, {kRightE11, kRightE12, kRightE22}),
       "right multiplication by A, g ignored"},
      {t2("skew_conj_only", ring + "/G", {"g"}, {kConj}), "conjugation only"},
  };
}

std::vector<std::vector<int>> partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int left, int max) {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int k = std::min(left, max); k >= 1; --k) {
      cur.push_back(k);
      rec(left - k, k);
      cur.pop_back();
    }
  };
  rec(n, n);
  std::reverse(out.begin(), out.end());  // (1,1,...,1) first, (n) last
  return out;
}

Vec invariant_factors_of(const PrimaryType& type) {
  std::size_t len = 0;
  for (auto& [p, parts] : type) len = std::max(len, parts.size());
  Vec out(len, 1);
  for (auto [p, parts] : type) {
    std::sort(parts.rbegin(), parts.rend());  // largest part goes to the last factor
    for (std::size_t i = 0; i < parts.size(); ++i) out[len - 1 - i] *= ipow(p, parts[i]);
  }
  return out;
}

Vec p_group(Int p, const std::vector<int>& lambda) {
  Vec out;
  for (int e : lambda) out.push_back(ipow(p, e));
  return out;
}

std::vector<Vec> abelian_groups_of_order(Int n) {
  auto f = factorize(n);
  std::vector<Vec> out;
  PrimaryType type;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == f.size()) {
      out.push_back(invariant_factors_of(type));
      return;
    }
    for (auto& lam : partitions(f[i].second)) {
      type[f[i].first] = lam;
      rec(i + 1);
    }
    type.erase(f[i].first);
  };
  rec(0);
  return out;
}

}  // namespace modlab
