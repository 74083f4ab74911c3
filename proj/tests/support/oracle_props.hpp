#pragma once

// Definitional evaluation of the property catalogue over explicit element
// sets. Kernels and images come from Hom enumeration when it is small, and
// otherwise from a search for a map with the prescribed kernel (image).

#include <optional>

#include "modlab/properties.hpp"
#include "support/oracle.hpp"

namespace oracle {

using modlab::PropertyId;

class Lat {
 public:
  Lat(const SetModule& sm, std::vector<Map> endos) : sm_(sm), endos_(std::move(endos)) {
    const auto& subs = sm.subs();
    for (std::size_t i = 0; i < subs.size(); ++i) {
      std::size_t c = SetModule::card(subs[i]);
      if (c > 1) {
        bool atom = true;
        for (auto& y : subs)
          if (SetModule::card(y) > 1 && y != subs[i] && SetModule::subset(y, subs[i])) atom = false;
        if (atom) atoms_.push_back(i);
      }
      if (c < sm.size()) {
        bool coatom = true;
        for (auto& y : subs)
          if (SetModule::card(y) < sm.size() && y != subs[i] && SetModule::subset(subs[i], y)) coatom = false;
        if (coatom) coatoms_.push_back(i);
      }
    }
    summand_.resize(subs.size());
    fi_.resize(subs.size());
    for (std::size_t i = 0; i < subs.size(); ++i) {
      summand_[i] = sm.summand(subs[i]);
      fi_[i] = sm.invariant(subs[i], endos_);
    }
  }

  const SetModule& sm() const { return sm_; }
  const std::vector<Map>& endos() const { return endos_; }
  bool summand(std::size_t i) const { return summand_[i]; }
  bool fi(std::size_t i) const { return fi_[i]; }
  bool summand_ok(std::size_t i, bool strong) const { return summand_[i] && (!strong || fi_[i]); }
  std::size_t idx(const Bits& b) const { return sm_.index_of(b); }

  // every nonzero submodule of d meets x; atoms suffice
  bool essential(const Bits& x, const Bits& d) const {
    for (auto a : atoms_) {
      const Bits& z = sm_.subs()[a];
      if (SetModule::subset(z, d) && SetModule::card(SetModule::meet(z, x)) == 1) return false;
    }
    return true;
  }
  // Y/K small in M/K: no proper Z >= K with Y + Z = M; maximal Z suffice
  bool lies_over(const Bits& y, const Bits& k) const {
    for (auto c : coatoms_) {
      const Bits& z = sm_.subs()[c];
      if (SetModule::subset(k, z) && sm_.sum_card(y, z) == sm_.size()) return false;
    }
    return true;
  }
  bool has_envelope(const Bits& x, bool strong) const {
    const auto& subs = sm_.subs();
    for (std::size_t d = 0; d < subs.size(); ++d)
      if (summand_ok(d, strong) && SetModule::subset(x, subs[d]) && essential(x, subs[d])) return true;
    return false;
  }
  bool has_above(const Bits& y, bool strong) const {
    const auto& subs = sm_.subs();
    for (std::size_t k = 0; k < subs.size(); ++k)
      if (summand_ok(k, strong) && SetModule::subset(subs[k], y) && lies_over(y, subs[k])) return true;
    return false;
  }

 private:
  const SetModule& sm_;
  std::vector<Map> endos_;
  std::vector<std::size_t> atoms_, coatoms_;
  std::vector<char> summand_, fi_;
};

// Least family containing s and closed under pairwise meet (join).
inline std::vector<Bits> closure(const SetModule& sm, std::vector<Bits> s, bool meets) {
  std::unordered_map<Bits, char, BitsHash> seen;
  for (auto& b : s) seen.emplace(b, 1);
  std::vector<Bits> all;
  for (auto& [b, _] : seen) all.push_back(b);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      Bits c = meets ? SetModule::meet(all[i], all[j]) : sm.join(all[i], all[j]);
      if (seen.emplace(c, 1).second) all.push_back(std::move(c));
    }
  return all;
}

// Is there an R-linear f: M -> N with kernel exactly x (kernel = true) or image
// exactly x (kernel = false)? Depth-first over the images of the coordinate
// generators of M.
inline bool map_exists(const SetModule& m, const SetModule& n, const Bits& x, bool want_kernel) {
  const auto& gm = m.module().group();
  const auto& gn = n.module().group();
  std::size_t r = gm.rank();
  std::vector<Map> am, an;
  for (auto& a : m.module().actions()) am.push_back(m.map_of(gm, gm, a.matrix()));
  for (auto& a : n.module().actions()) an.push_back(n.map_of(gn, gn, a.matrix()));
  std::vector<std::size_t> cand;
  for (std::size_t e = 0; e < n.size(); ++e)
    if (!want_kernel ? SetModule::test(x, e) : true) cand.push_back(e);
  std::vector<Vec> images(r);
  // elements of M supported on the first t coordinates
  auto f_of = [&](const Vec& v) {
    Vec y = gn.zero();
    for (std::size_t j = 0; j < r; ++j)
      if (v[j]) y = gn.add(y, gn.scale(v[j], images[j]));
    return y;
  };
  std::size_t target_card = SetModule::card(x);
  std::function<bool(std::size_t)> rec = [&](std::size_t t) -> bool {
    if (t == r) {
      Map f(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) f[i] = static_cast<std::uint32_t>(gn.index_of(f_of(m.element(i))));
      for (std::size_t l = 0; l < am.size(); ++l)
        for (std::size_t i = 0; i < m.size(); ++i)
          if (f[am[l][i]] != an[l][f[i]]) return false;
      if (want_kernel) return true;  // kernel already pinned down
      Bits im(x.size(), 0);
      for (auto v : f) SetModule::set(im, v);
      return im == x;
    }
    Int ord = gm.orders()[t];
    for (auto e : cand) {
      const Vec& y = n.element(e);
      if (ord % gn.element_order(y) != 0) continue;
      images[t] = y;
      bool ok = true;
      if (want_kernel) {
        // on <e_0..e_t>: f(v) = 0 exactly on x
        for (std::size_t i = 0; i < m.size() && ok; ++i) {
          const Vec& v = m.element(i);
          bool inside = true;
          for (std::size_t j = t + 1; j < r; ++j)
            if (v[j]) inside = false;
          if (!inside) continue;
          bool zero = f_of(v) == gn.zero();
          if (zero != SetModule::test(x, i)) ok = false;
        }
      } else {
        // the span of the chosen images times what is left must reach |x|
        Bits span = n.zero();
        std::vector<std::uint32_t> gens;
        for (std::size_t j = 0; j <= t; ++j) gens.push_back(static_cast<std::uint32_t>(gn.index_of(images[j])));
        span = n.extend(span, gens);
        long double room = static_cast<long double>(SetModule::card(span));
        for (std::size_t j = t + 1; j < r; ++j) room *= static_cast<long double>(gm.orders()[j]);
        if (room < static_cast<long double>(target_card)) ok = false;
      }
      if (ok && rec(t + 1)) return true;
    }
    images[t] = gn.zero();
    return false;
  };
  return rec(0);
}

struct PairOracle {
  const SetModule& m;
  const SetModule& n;
  const Lat& lm;
  const Lat& ln;
  std::optional<std::vector<Map>> homs;  // when enumerable
  std::vector<Bits> kernels, images;

  PairOracle(const SetModule& m_, const SetModule& n_, const Lat& lm_, const Lat& ln_, std::size_t cap)
      : m(m_), n(n_), lm(lm_), ln(ln_) {
    try {
      homs = all_homs(m, n, cap);
    } catch (const std::runtime_error&) {
    }
    if (homs) {
      std::unordered_map<Bits, char, BitsHash> ks, is;
      for (auto& f : *homs) {
        Bits k(m.subs()[0].size(), 0), im(n.subs()[0].size(), 0);
        for (std::size_t i = 0; i < f.size(); ++i) {
          if (f[i] == 0) SetModule::set(k, i);
          SetModule::set(im, f[i]);
        }
        ks.emplace(k, 1);
        is.emplace(im, 1);
      }
      for (auto& [b, _] : ks) kernels.push_back(b);
      for (auto& [b, _] : is) images.push_back(b);
    } else {
      for (auto& x : m.subs())
        if (map_exists(m, n, x, true)) kernels.push_back(x);
      for (auto& y : n.subs())
        if (map_exists(m, n, y, false)) images.push_back(y);
    }
  }

  // l_U(x) as a set of hom indices
  std::vector<std::size_t> l_U(const Bits& x) const {
    std::vector<std::size_t> out;
    for (std::size_t h = 0; h < homs->size(); ++h) {
      bool ok = true;
      for (std::size_t i = 0; i < m.size() && ok; ++i)
        if (SetModule::test(x, i) && (*homs)[h][i] != 0) ok = false;
      if (ok) out.push_back(h);
    }
    return out;
  }
  std::vector<std::size_t> l_U_prime(const Bits& y) const {
    std::vector<std::size_t> out;
    for (std::size_t h = 0; h < homs->size(); ++h) {
      bool ok = true;
      for (std::size_t i = 0; i < m.size() && ok; ++i)
        if (!SetModule::test(y, (*homs)[h][i])) ok = false;
      if (ok) out.push_back(h);
    }
    return out;
  }
};

// nullopt when the definition cannot be evaluated here (Hom not enumerable
// for the cononsingularity quantifier).
inline std::optional<bool> evaluate(PropertyId id, bool strong, const PairOracle& o) {
  const Lat& lm = o.lm;
  const Lat& ln = o.ln;
  const SetModule& m = o.m;
  const SetModule& n = o.n;
  auto every = [](const std::vector<Bits>& v, auto pred) {
    for (auto& b : v)
      if (!pred(b)) return false;
    return true;
  };
  auto summands = [](const Lat& l) {
    std::vector<Bits> out;
    for (std::size_t i = 0; i < l.sm().subs().size(); ++i)
      if (l.summand(i)) out.push_back(l.sm().subs()[i]);
    return out;
  };
  auto pairs = [](const SetModule& sm, const std::vector<Bits>& v, bool meets) {
    std::unordered_map<Bits, char, BitsHash> seen;
    std::vector<Bits> out;
    for (auto& a : v)
      for (auto& b : v) {
        Bits c = meets ? SetModule::meet(a, b) : sm.join(a, b);
        if (seen.emplace(c, 1).second) out.push_back(std::move(c));
      }
    return out;
  };
  auto ker_meets = [&] {
    auto k = o.kernels;
    k.push_back(m.whole());
    return closure(m, k, true);
  };
  auto im_joins = [&] {
    auto i = o.images;
    i.push_back(n.zero());
    return closure(n, i, false);
  };
  auto sok = [](const Lat& l, bool st) { return [&l, st](const Bits& b) { return l.summand_ok(l.idx(b), st); }; };
  auto env = [](const Lat& l, bool st) { return [&l, st](const Bits& b) { return l.has_envelope(b, st); }; };
  auto abv = [](const Lat& l, bool st) { return [&l, st](const Bits& b) { return l.has_above(b, st); }; };
  using P = PropertyId;
  switch (id) {
    case P::extending: return every(m.subs(), env(lm, strong));
    case P::lifting: return every(m.subs(), abv(lm, strong));
    case P::rickart: return every(o.kernels, sok(lm, strong));
    case P::dual_rickart: return every(o.images, sok(ln, strong));
    case P::baer: return every(ker_meets(), sok(lm, strong));
    case P::dual_baer: return every(im_joins(), sok(ln, strong));
    case P::cs_rickart: return every(o.kernels, env(lm, strong));
    case P::dual_cs_rickart: return every(o.images, abv(ln, strong));
    case P::cs_baer: return every(ker_meets(), env(lm, strong));
    case P::dual_cs_baer: return every(im_joins(), abv(ln, strong));
    case P::regular: return every(o.kernels, sok(lm, strong)) && every(o.images, sok(ln, strong));
    case P::weak_duo: {
      auto s = summands(lm);
      return every(s, sok(lm, true));
    }
    case P::sip: return every(pairs(m, summands(lm), true), sok(lm, strong));
    case P::ssip: return every(closure(m, summands(lm), true), sok(lm, strong));
    case P::ssp: return every(pairs(m, summands(lm), false), sok(lm, strong));
    case P::sssp: return every(closure(m, summands(lm), false), sok(lm, strong));
    case P::esip: return every(pairs(m, summands(lm), true), env(lm, strong));
    case P::essip: return every(closure(m, summands(lm), true), env(lm, strong));
    case P::lssp: return every(pairs(m, summands(lm), false), abv(lm, strong));
    case P::lsssp: return every(closure(m, summands(lm), false), abv(lm, strong));
    case P::sip_extending:
    case P::ssip_extending: {
      std::vector<Bits> e;
      for (auto& x : m.subs())
        if (lm.has_envelope(x, false)) e.push_back(x);
      auto c = id == P::sip_extending ? pairs(m, e, true) : closure(m, e, true);
      return every(c, env(lm, strong));
    }
    case P::ssp_lifting:
    case P::sssp_lifting: {
      std::vector<Bits> a;
      for (auto& y : m.subs())
        if (lm.has_above(y, false)) a.push_back(y);
      auto c = id == P::ssp_lifting ? pairs(m, a, false) : closure(m, a, false);
      return every(c, abv(lm, strong));
    }
    case P::k_nonsingular:
      return every(o.kernels, [&](const Bits& k) { return k == m.whole() || !lm.essential(k, m.whole()); });
    case P::t_nonsingular:
      return every(o.images, [&](const Bits& y) {
        // superfluous in N: no proper Z with Y + Z = N
        if (y == n.zero()) return true;
        return !ln.lies_over(y, n.zero());
      });
    case P::e_k_nonsingular:
      return every(o.kernels, [&](const Bits& k) { return k == m.whole() || !lm.has_envelope(k, false); });
    case P::l_t_nonsingular:
      return every(o.images, [&](const Bits& y) { return y == n.zero() || !ln.has_above(y, false); });
    case P::e_k_cononsingular: {
      if (!o.homs) return std::nullopt;
      for (auto& x : m.subs()) {
        auto lx = o.l_U(x);
        for (auto& y : m.subs())
          if (SetModule::subset(x, y) && o.l_U(y) == lx && !lm.essential(x, y)) return false;
      }
      return true;
    }
    case P::l_t_cononsingular: {
      if (!o.homs) return std::nullopt;
      for (auto& x : n.subs()) {
        auto lx = o.l_U_prime(x);
        for (auto& y : n.subs())
          if (SetModule::subset(x, y) && o.l_U_prime(y) == lx && !ln.lies_over(y, x)) return false;
      }
      return true;
    }
  }
  return std::nullopt;
}

}  // namespace oracle
