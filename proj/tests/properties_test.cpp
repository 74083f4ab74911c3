#include <gtest/gtest.h>

#include <random>

#include "modlab/catalog.hpp"
#include "modlab/properties.hpp"
#include "support/oracle_props.hpp"

using namespace modlab;
using P = PropertyId;

namespace {

RModule Z(Vec o) { return abelian_module(o); }

bool verdict(P id, bool strong, const RModule& m, std::optional<RModule> n = std::nullopt, CheckOptions o = {}) {
  return check(Property{id, strong}, m, n, o).verdict;
}

std::vector<Property> every_property() {
  std::vector<Property> out;
  for (auto id : all_property_ids()) {
    out.push_back({id, false});
    if (variant_of(id) != Variant::none) out.push_back({id, true});
  }
  return out;
}

std::vector<RModule> self_modules() {
  std::vector<RModule> out;
  for (Int n = 1; n <= 32; ++n)
    for (auto& o : abelian_groups_of_order(n)) out.push_back(Z(o));
  out.push_back(Z({2, 4}));
  out.push_back(swap_module());
  out.push_back(triangular_regular_module());
  out.push_back(cyclic_regular_module(12));
  for (auto& c : skew_candidates()) out.push_back(c.module);
  return out;
}

std::vector<std::pair<RModule, RModule>> pair_modules() {
  std::vector<std::pair<RModule, RModule>> out{
      {Z({6}), Z({4})},   {Z({4}), Z({2})},       {Z({2}), Z({4})},    {Z({4}), Z({8})},
      {Z({8}), Z({4})},   {Z({2, 4}), Z({4})},    {Z({4}), Z({2, 4})}, {Z({2}), Z({3})},
      {Z({12}), Z({6})},  {Z({3}), Z({9})},       {Z({8}), Z({2, 4})}, {Z({2, 8}), Z({2})},
      {Z({4}), Z({2, 2})}, {Z({}), Z({4})},       {Z({4}), Z({})},     {Z({2, 2}), Z({2, 2, 2})},
  };
  auto sk = skew_candidates();
  out.push_back({sk[0].module, sk[1].module});
  out.push_back({sk[1].module, sk[0].module});
  out.push_back({swap_module(), swap_module().renamed("swap_copy")});
  return out;
}

}  // namespace

TEST(Flags, Resolution) {
  EXPECT_EQ(make_property("cs-baer", false, false, true).id, P::dual_cs_baer);
  EXPECT_EQ(make_property("extending", true, false, true).id, P::lifting);
  EXPECT_EQ(make_property("esip", false, true, true).id, P::lssp);
  EXPECT_EQ(make_property("dual_cs_baer", true, false, false).strong, true);
  auto bad = [](const char* n, bool s, bool t, bool d) {
    try {
      make_property(n, s, t, d);
    } catch (const Error& e) {
      return e.code() == ErrorCode::invalid_property;
    }
    return false;
  };
  EXPECT_TRUE(bad("dual-cs-baer", false, false, true));
  EXPECT_TRUE(bad("sip", true, false, false));
  EXPECT_TRUE(bad("cs-baer", false, true, false));
  EXPECT_TRUE(bad("weak-duo", true, false, false));
  EXPECT_TRUE(bad("k-nonsingular", false, true, false));
  EXPECT_TRUE(bad("regular", false, false, true));
  EXPECT_TRUE(bad("cs-baer", true, true, false));
  EXPECT_TRUE(bad("nonsense", false, false, false));
  EXPECT_EQ(all_property_ids().size(), 30u);
  for (auto id : all_property_ids()) EXPECT_EQ(parse_property_id(to_string(id)), id);
}

TEST(Check, KnownValues) {
  EXPECT_FALSE(verdict(P::dual_cs_baer, false, Z({2, 16})));
  EXPECT_TRUE(verdict(P::dual_cs_baer, false, Z({2})));
  EXPECT_TRUE(verdict(P::dual_cs_baer, false, Z({16})));
  EXPECT_FALSE(verdict(P::baer, true, Z({4})));
  EXPECT_TRUE(verdict(P::cs_baer, true, Z({6}), Z({4})));
  for (Int n = 2; n <= 30; ++n) EXPECT_TRUE(verdict(P::dual_cs_baer, true, Z({n}))) << n;
  auto c = check({P::weak_duo, false}, Z({2, 2}));
  EXPECT_FALSE(c.verdict);
  EXPECT_EQ(c.witness["kind"], "not_invariant");
}

// Z4 + Z8 is extending but not weak duo: (a, b) -> (b mod 4, 0) moves the Z8
// summand. Its strong verdict follows.
TEST(Check, Z4Z8StrongVerdictFollowsWeakDuo) {
  auto m = Z({4, 8});
  EXPECT_TRUE(verdict(P::extending, false, m));
  EXPECT_TRUE(verdict(P::cs_baer, false, m));
  EXPECT_FALSE(verdict(P::weak_duo, false, m));
  EXPECT_FALSE(verdict(P::cs_baer, true, m));
  GroupHom f(m.group(), m.group(), {0, 1, 0, 0});
  auto summand = m.generated(std::vector<Vec>{{0, 1}});
  EXPECT_TRUE(is_summand(m, summand).holds);
  EXPECT_FALSE(summand.contains(f.apply(Vec{0, 1})));
}

TEST(Check, ZeroModuleIsVacuous) {
  auto zero = Z({});
  for (auto& p : every_property()) {
    EXPECT_TRUE(check(p, zero).verdict) << to_string(p);
  }
  // But not L-T-cononsingular: with U = 0 every X <= Y has the same l'_U,
  // and Z4 is not small in itself.
  EXPECT_FALSE(verdict(P::l_t_cononsingular, false, zero, Z({4})));
  // Hom(0, N) = 0: every relative Rickart/Baer/CS property holds.
  for (auto id : {P::rickart, P::baer, P::cs_rickart, P::cs_baer, P::dual_rickart, P::dual_baer, P::dual_cs_rickart,
                  P::dual_cs_baer})
    EXPECT_TRUE(verdict(id, false, zero, Z({4}))) << to_string(id);
}

TEST(Check, UniformSourceGivesCsBaer) {
  std::vector<RModule> targets{Z({2}), Z({4}), Z({2, 4}), Z({2, 2, 2}), Z({3, 9}), Z({8, 2})};
  for (Int q : {2, 4, 8, 3, 9, 5})
    for (auto& n : targets) EXPECT_TRUE(verdict(P::cs_baer, false, Z({q}), n)) << q << " " << n.name();
}

TEST(Check, ContextAndAmbientErrors) {
  try {
    check({P::cs_baer, false}, Z({4}), swap_module());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::context_mismatch);
  }
  EXPECT_THROW(check({P::extending, false}, Z({4}), Z({2})), Error);
  CheckOptions o;
  o.guard = 4;
  try {
    check({P::extending, false}, Z({8}), std::nullopt, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::size_guard);
  }
}

TEST(Galois, KnownValues) {
  auto z4 = Z({4});
  HomSet u(z4, z4);
  const auto& cg = u.coordinates().group();
  EXPECT_TRUE(l_U(u, whole_group(z4.group())).is_zero());
  EXPECT_EQ(r_M(u, zero_subgroup(cg)), whole_group(z4.group()));
  EXPECT_EQ(l_U(u, zero_subgroup(z4.group())), u.subgroup());
  auto x = z4.generated(std::vector<Vec>{{2}});
  EXPECT_EQ(r_M(u, l_U(u, x)), x);
  EXPECT_THROW(l_U(u, zero_subgroup(FiniteAbelianGroup({2}))), Error);
}

TEST(Galois, LawsOnRandomSamples) {
  std::mt19937_64 rng(11);
  for (auto& [m, n] : pair_modules()) {
    HomSet u(m, n);
    const auto& cg = u.coordinates().group();
    auto xs = r_submodules(m);
    auto ys = r_submodules(n);
    // l_U agrees with the element-wise definition
    oracle::SetModule sm(m), sn(n);
    auto homs = oracle::all_homs(sm, sn, 1 << 16);
    ASSERT_EQ(static_cast<std::size_t>(u.cardinality()), homs.size());
    for (auto& x : xs) {
      auto lx = l_U(u, x);
      std::size_t count = 0;
      u.for_each([&](const GroupHom& f) {
        bool kills = is_subset(x, kernel(f));
        EXPECT_EQ(lx.contains(u.coordinates().from_hom(f)), kills);
        count += kills;
      });
      EXPECT_EQ(static_cast<std::size_t>(lx.cardinality()), count);
    }
    for (int trial = 0; trial < 200; ++trial) {
      const auto& x = xs[rng() % xs.size()];
      const auto& y = ys[rng() % ys.size()];
      std::vector<Vec> zg;
      for (int k = rng() % 3; k >= 0; --k) zg.push_back(u.coordinates().from_hom(u.random(rng)));
      Subgroup z = canonicalize(zg, cg);
      EXPECT_TRUE(is_subset(x, r_M(u, l_U(u, x))));
      EXPECT_TRUE(is_subset(z, l_U(u, r_M(u, z))));
      EXPECT_EQ(l_U(u, r_M(u, l_U(u, x))), l_U(u, x));
      EXPECT_TRUE(is_subset(r_N_prime(u, l_U_prime(u, y)), y));
      EXPECT_TRUE(is_subset(z, l_U_prime(u, r_N_prime(u, z))));
      EXPECT_EQ(l_U_prime(u, r_N_prime(u, l_U_prime(u, y))), l_U_prime(u, y));
    }
  }
}

// The three family routes produce the same families where they apply.
TEST(Families, RoutesAgree) {
  auto pairs = pair_modules();
  for (auto& m : self_modules())
    if (m.order() <= 32) pairs.push_back({m, m});
  for (auto& [m, n] : pairs) {
    bool self = m.name() == n.name();
    auto bench = [&](FamilyRoute r) {
      CheckOptions o;
      o.family_route = r;
      return std::make_unique<Workbench>(m, self ? std::nullopt : std::optional<RModule>(n), o);
    };
    auto en = bench(FamilyRoute::enumerate);
    auto ga = bench(FamilyRoute::galois);
    if (en->hom_count() > (1 << 16)) continue;
    EXPECT_EQ(en->kernel_meets().members, ga->kernel_meets().members) << m.name() << " " << n.name();
    EXPECT_EQ(en->image_joins().members, ga->image_joins().members) << m.name() << " " << n.name();
    if (!en->z_linear()) continue;
    auto ty = bench(FamilyRoute::types);
    auto expand = [&](Workbench& w, const Family& f, bool src) {
      std::vector<Subgroup> out;
      w.for_each(f, src, [&](const Subgroup& s) {
        out.push_back(s);
        return true;
      });
      std::sort(out.begin(), out.end());
      return out;
    };
    EXPECT_EQ(expand(*en, en->kernels(), true), expand(*ty, ty->kernels(), true)) << m.name() << " " << n.name();
    EXPECT_EQ(expand(*en, en->images(), false), expand(*ty, ty->images(), false)) << m.name() << " " << n.name();
    EXPECT_EQ(expand(*en, en->kernel_meets(), true), expand(*ty, ty->kernel_meets(), true));
    EXPECT_EQ(expand(*en, en->image_joins(), false), expand(*ty, ty->image_joins(), false));
  }
}

TEST(Families, WitnessFamiliesReproduceMembers) {
  for (auto& [m, n] : pair_modules()) {
    for (auto route : {FamilyRoute::enumerate, FamilyRoute::galois}) {
      CheckOptions o;
      o.family_route = route;
      Workbench w(m, n, o);
      for (auto& x : w.kernel_meets().members) {
        Subgroup k = whole_group(m.group());
        for (auto& f : w.kernel_family(x)) {
          EXPECT_TRUE(m.is_hom_to(f, n));
          k = meet(k, kernel(f));
        }
        EXPECT_EQ(k, x);
      }
      for (auto& y : w.image_joins().members) {
        Subgroup s = zero_subgroup(n.group());
        for (auto& f : w.image_family(y)) s = join(s, image(f));
        EXPECT_EQ(s, y);
      }
    }
  }
}

TEST(Witness, ZLinearConstructions) {
  std::vector<Vec> groups{{2, 4}, {4, 8}, {2, 2, 2}, {6, 4}, {3, 9}, {12}, {2, 16}, {4, 2}};
  for (auto& a : groups)
    for (auto& b : groups) {
      FiniteAbelianGroup m(a), n(b);
      for (auto& x : all_subgroups(m)) {
        auto f = map_with_kernel(m, n, x);
        if (f) EXPECT_EQ(kernel(*f), x);
        // existence agrees with a search over all maps
        bool exists = false;
        HomSet u(RModule::abelian(m), RModule::abelian(n));
        u.for_each([&](const GroupHom& g) { exists = exists || kernel(g) == x; });
        EXPECT_EQ(f.has_value(), exists);
      }
      for (auto& y : all_subgroups(n)) {
        auto f = map_onto(m, y);
        bool exists = false;
        HomSet u(RModule::abelian(m), RModule::abelian(n));
        u.for_each([&](const GroupHom& g) { exists = exists || image(g) == y; });
        EXPECT_EQ(f.has_value(), exists);
      }
    }
}

// Every property, both flags, against the definitional evaluation.
TEST(Oracle, SelfProperties) {
  for (auto& m : self_modules()) {
    SCOPED_TRACE(m.name());
    oracle::SetModule sm(m);
    oracle::Lat lat(sm, oracle::end_spanning(sm, 1 << 20));
    oracle::PairOracle o(sm, sm, lat, lat, 1 << 14);
    Workbench w(m);
    for (auto& p : every_property()) {
      auto expect = oracle::evaluate(p.id, p.strong, o);
      if (!expect) continue;
      EXPECT_EQ(w.check(p).verdict, *expect) << to_string(p);
    }
  }
}

TEST(Oracle, RelativeProperties) {
  for (auto& [m, n] : pair_modules()) {
    SCOPED_TRACE(m.name() + " -> " + n.name());
    oracle::SetModule sm(m), sn(n);
    oracle::Lat lm(sm, oracle::end_spanning(sm, 1 << 20)), ln(sn, oracle::end_spanning(sn, 1 << 20));
    oracle::PairOracle o(sm, sn, lm, ln, 1 << 14);
    Workbench w(m, n);
    for (auto& p : every_property()) {
      if (!is_relative(p.id)) continue;
      auto expect = oracle::evaluate(p.id, p.strong, o);
      if (!expect) continue;
      EXPECT_EQ(w.check(p).verdict, *expect) << to_string(p);
    }
  }
}

// Order-64 groups have End too large to enumerate; the oracle finds kernels
// and images by search instead.
TEST(Oracle, LargeEndomorphismRings) {
  for (Vec o : {Vec{4, 16}, Vec{2, 4, 8}, Vec{2, 2, 16}, Vec{64}}) {
    auto m = Z(o);
    SCOPED_TRACE(m.name());
    oracle::SetModule sm(m);
    oracle::Lat lat(sm, oracle::end_spanning(sm, 1 << 20));
    oracle::PairOracle po(sm, sm, lat, lat, 1 << 12);
    Workbench w(m);
    for (auto id : {P::cs_baer, P::dual_cs_baer, P::cs_rickart, P::dual_cs_rickart, P::extending, P::lifting})
      for (bool strong : {false, true}) EXPECT_EQ(w.check({id, strong}).verdict, *oracle::evaluate(id, strong, po));
  }
}

TEST(Laws, StrongImpliesPlain) {
  for (auto& m : self_modules()) {
    Workbench w(m);
    for (auto id : all_property_ids()) {
      if (variant_of(id) == Variant::none) continue;
      if (w.check({id, true}).verdict) EXPECT_TRUE(w.check({id, false}).verdict) << m.name() << " " << to_string(id);
    }
  }
}

TEST(Laws, EsipMatchesSipExtending) {
  for (auto& m : self_modules()) {
    Workbench w(m);
    for (bool strict : {false, true}) {
      EXPECT_EQ(w.check({P::esip, strict}).verdict, w.check({P::sip_extending, strict}).verdict) << m.name();
      EXPECT_EQ(w.check({P::lssp, strict}).verdict, w.check({P::ssp_lifting, strict}).verdict) << m.name();
    }
  }
}

TEST(Certificates, NegativeWitnessShapes) {
  auto c = check({P::dual_cs_baer, false}, Z({2, 16}));
  ASSERT_FALSE(c.verdict);
  EXPECT_EQ(c.witness["kind"], "not_above");
  EXPECT_FALSE(c.witness["maps"].empty());
  EXPECT_GE(c.witness["candidates"]["total"].get<int>(), 1);
  auto b = check({P::baer, true}, Z({4}));
  EXPECT_EQ(b.witness["kind"], "not_summand");
  CheckOptions o;
  o.entry_cap = 3;
  auto e = check({P::extending, false}, Z({2, 2, 2}), std::nullopt, o);
  EXPECT_TRUE(e.verdict);
  EXPECT_EQ(e.witness["list"]["entries"].size(), 3u);
  EXPECT_TRUE(e.witness["list"]["truncated"].get<bool>());
  EXPECT_EQ(e.witness["list"]["total"].get<int>(), 16);
}
