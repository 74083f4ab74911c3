#include <gtest/gtest.h>

#include <numeric>

#include "modlab/ring_module.hpp"
#include "support/brute.hpp"

using namespace modlab;

namespace {

FiniteAbelianGroup G(Vec o) { return FiniteAbelianGroup(std::move(o)); }
RModule Z(Vec o) { return RModule::abelian(G(std::move(o))); }

RModule swap_module() {
  auto g = G({2, 2});
  return RModule("swap", RingContext{"F2[C2]", {"s"}}, g, {GroupHom(g, g, {0, 1, 1, 0})});
}

// Column-by-column search: candidate images of generator j are the elements
// killed by d_j; keep the maps commuting with every action.
std::vector<GroupHom> brute_homs(const RModule& m, const RModule& n) {
  const auto& dm = m.group();
  const auto& dn = n.group();
  std::vector<std::vector<Vec>> cands(dm.rank());
  for (auto& y : brute::all_elements(dn))
    for (std::size_t j = 0; j < dm.rank(); ++j)
      if (dn.element_order(y) != 0 && dm.orders()[j] % dn.element_order(y) == 0) cands[j].push_back(y);
  std::vector<GroupHom> out;
  std::vector<Vec> images(dm.rank());
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == dm.rank()) {
      auto f = GroupHom::from_images(dm, dn, images);
      if (m.is_hom_to(f, n)) out.push_back(f);
      return;
    }
    for (auto& y : cands[j]) {
      images[j] = y;
      rec(j + 1);
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Validate, KnownValues) {
  EXPECT_TRUE(validate_module(G({6}), RingContext{}, {}).ok);
  EXPECT_TRUE(validate_module(G({4}), RingContext{"R", {"a"}}, {{3}}).ok);
  auto bad = validate_module(G({4}), RingContext{"R", {"a"}}, {{1, 0}});
  EXPECT_FALSE(bad.ok);
  EXPECT_NE(bad.problems.front().find("'a'"), std::string::npos);
  auto cong = validate_module(G({2, 4}), RingContext{"R", {"g"}}, {{0, 0, 1, 0}});
  EXPECT_FALSE(cong.ok);
  EXPECT_NE(cong.problems.front().find("(1,0)"), std::string::npos);
  EXPECT_THROW(RModule("x", RingContext{"R", {"a", "a"}}, G({2}), {GroupHom::identity(G({2})), GroupHom::identity(G({2}))}),
               Error);
}

TEST(HomSet, KnownValues) {
  EXPECT_EQ(hom_set(Z({2}), Z({3})).cardinality(), 1);
  auto h = hom_set(Z({6}), Z({4}));
  auto els = h.elements();
  ASSERT_EQ(els.size(), 2u);
  EXPECT_TRUE(els[0].is_zero());
  EXPECT_EQ(els[1].matrix(), Vec{2});
  EXPECT_EQ(hom_set(Z({2, 2}), Z({2, 2})).cardinality(), 16);
  RModule other("q", RingContext{"Q", {"a"}}, G({2}), {GroupHom::identity(G({2}))});
  try {
    hom_set(Z({2}), other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::context_mismatch);
  }
}

TEST(HomSet, CyclicGcdLaw) {
  for (Int a = 1; a <= 24; ++a)
    for (Int b = 1; b <= 24; ++b) EXPECT_EQ(hom_set(Z({a}), Z({b})).cardinality(), std::gcd(a, b));
}

TEST(HomSet, AgreesWithColumnSearch) {
  std::vector<RModule> mods{Z({2, 2}), Z({4, 2}), Z({6}), Z({2, 4}), swap_module(), Z({3, 3}),
                            RModule("u3", RingContext{"U", {"u"}}, G({4}), {GroupHom::scalar(G({4}), 3)})};
  for (auto& m : mods)
    for (auto& n : mods) {
      if (!(m.context() == n.context())) continue;
      auto h = hom_set(m, n);
      EXPECT_EQ(h.elements(), brute_homs(m, n)) << m.group().to_string() << " -> " << n.group().to_string();
    }
}

TEST(HomSet, ClosedUnderSumAndComposition) {
  for (auto m : {Z({4, 2}), swap_module(), Z({2, 2, 2})}) {
    auto end = hom_set(m, m);
    auto els = end.elements();
    std::set<Vec> mats;
    for (auto& f : els) mats.insert(f.matrix());
    EXPECT_TRUE(mats.count(GroupHom::identity(m.group()).matrix()));
    EXPECT_TRUE(mats.count(GroupHom::zero(m.group(), m.group()).matrix()));
    for (auto& f : els)
      for (auto& g : els) {
        EXPECT_TRUE(mats.count((f + g).matrix()));
        EXPECT_TRUE(mats.count(compose(f, g).matrix()));
      }
  }
}

TEST(Submodules, KnownValues) {
  EXPECT_EQ(r_submodules(Z({4})).size(), 3u);
  EXPECT_EQ(r_submodules(Z({2, 2})).size(), 5u);
  auto sw = swap_module();
  auto subs = r_submodules(sw);
  // brute force: subgroups closed under the swap
  std::size_t expect = 0;
  for (auto& s : brute::all_subgroup_sets(sw.group())) {
    bool closed = true;
    for (auto& x : s) closed = closed && s.count(sw.actions()[0].apply(x));
    expect += closed;
  }
  EXPECT_EQ(subs.size(), expect);
  EXPECT_EQ(subs.size(), 3u);  // 0, the diagonal, everything
  EXPECT_LT(subs.size(), all_subgroups(sw.group()).size());
  std::vector<Vec> diag{{1, 1}};
  EXPECT_TRUE(sw.is_submodule(canonicalize(diag, sw.group())));
  std::vector<Vec> axis{{1, 0}};
  EXPECT_FALSE(sw.is_submodule(canonicalize(axis, sw.group())));
  EXPECT_EQ(sw.cyclic(Vec{1, 0}).cardinality(), 4);
  EXPECT_THROW(r_submodules(Z({2, 2}), 3), Error);
}

TEST(DirectSum, BiproductIdentities) {
  auto p = direct_power(Z({2}), 3);
  EXPECT_EQ(p.sum.order(), 8);
  EXPECT_EQ(p.injections.size(), 3u);
  auto s = direct_sum({Z({4}), Z({2})});
  EXPECT_EQ(s.sum.order(), 8);
  auto g = G({4});
  RModule a("a", RingContext{"R", {"x"}}, g, {GroupHom::scalar(g, 3)});
  RModule b("b", RingContext{"R", {"x"}}, g, {GroupHom::scalar(g, 1)});
  auto ab = direct_sum({a, b});
  EXPECT_EQ(ab.sum.actions()[0].matrix(), (Vec{3, 0, 0, 1}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      auto pi = compose(ab.projections[i], ab.injections[j]);
      if (i == j)
        EXPECT_EQ(pi, GroupHom::identity(pi.domain()));
      else
        EXPECT_TRUE(pi.is_zero());
    }
  auto sum = compose(ab.injections[0], ab.projections[0]) + compose(ab.injections[1], ab.projections[1]);
  EXPECT_EQ(sum, GroupHom::identity(ab.sum.group()));
  EXPECT_THROW(direct_sum({a, Z({2})}), Error);
}

TEST(EndRing, Abelianness) {
  for (Int n = 1; n <= 30; ++n) EXPECT_TRUE(end_ring_is_abelian(Z({n}), 1 << 20).abelian);
  auto cert = end_ring_is_abelian(Z({2, 2}), 1 << 20);
  ASSERT_FALSE(cert.abelian);
  auto [e, f] = *cert.witness;
  EXPECT_EQ(compose(e, e), e);
  EXPECT_NE(compose(e, f), compose(f, e));
  EXPECT_FALSE(end_ring_is_abelian(Z({4, 8}), 1 << 20).abelian);  // complement of Z8 not unique
  EXPECT_TRUE(end_ring_is_abelian(Z({4, 9}), 1 << 20).abelian);
  EXPECT_THROW(end_ring_is_abelian(Z({2, 2, 2, 2, 2}), 1 << 20), Error);
}

TEST(Induced, SubmoduleAndQuotientModules) {
  auto m = swap_module();
  std::vector<Vec> diag{{1, 1}};
  auto d = canonicalize(diag, m.group());
  auto sub = as_module(m, d);
  EXPECT_EQ(sub.module.order(), 2);
  EXPECT_TRUE(sub.module.is_hom_to(sub.inclusion, m));
  auto q = quotient_module(m, d);
  EXPECT_EQ(q.module.order(), 2);
  EXPECT_TRUE(m.is_hom_to(q.projection, q.module));
  EXPECT_EQ(kernel(q.projection), d);
  auto rc = to_canonical_coordinates(RModule::abelian(G({4, 9})));
  EXPECT_EQ(rc.module.group().orders(), Vec{36});
  EXPECT_TRUE(kernel(rc.iso).is_zero());
}
