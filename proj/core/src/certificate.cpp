#include "modlab/certificate.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace modlab {

using nlohmann::json;

namespace {

struct Rejected {
  std::string why;
};

[[noreturn]] void reject(std::string why) { throw Rejected{std::move(why)}; }
void claim(bool ok, const char* what) {
  if (!ok) reject(what);
}

constexpr Int kEnumerateHoms = Int{1} << 16;

// Per-module facts the checker derives for itself.
class Side {
 public:
  explicit Side(const RModule& m) : m_(m) {}

  const RModule& module() const { return m_; }
  const FiniteAbelianGroup& group() const { return m_.group(); }

  Subgroup sub(const json& j) const {
    Subgroup s = subgroup_from_json(j, group());
    claim(m_.is_submodule(s), "witness subgroup is not a submodule");
    return s;
  }

  const std::vector<Subgroup>& lattice() {
    if (!lattice_) lattice_ = r_submodules(m_);
    return *lattice_;
  }

  const std::vector<GroupHom>& end_generators() {
    if (!end_) end_ = HomSet(m_, m_).generators();
    return *end_;
  }

  // Rad M: the meet of the maximal submodules; pM over the primes when every
  // action is a scalar.
  const Subgroup& radical() {
    if (rad_) return *rad_;
    Subgroup r = whole_group(group());
    if (m_.scalar_actions()) {
      for (auto& [p, e] : factorize(m_.order())) r = meet(r, scale(p, whole_group(group())));
    } else {
      const auto& subs = lattice();
      for (auto& s : subs) {
        if (s.is_whole()) continue;
        bool maximal = true;
        for (auto& t : subs)
          if (!t.is_whole() && !(t == s) && is_subset(s, t)) {
            maximal = false;
            break;
          }
        if (maximal) r = meet(r, s);
      }
    }
    rad_ = r;
    return *rad_;
  }

  // x essential in d: each element of prime order in d generates a submodule meeting x.
  bool essential(const Subgroup& x, const Subgroup& d) const {
    if (!is_subset(x, d)) return false;
    for (auto& [p, e] : factorize(std::max<Int>(d.cardinality(), 1))) {
      Subgroup layer = kernel_on(GroupHom::scalar(group(), p), d);
      if (m_.scalar_actions()) {
        if (!is_subset(layer, x)) return false;
        continue;
      }
      bool ok = true;
      layer.for_each_element([&](const Vec& w) {
        if (!ok || w == group().zero()) return;
        if (meet(m_.cyclic(w), x).is_zero()) ok = false;
      });
      if (!ok) return false;
    }
    return true;
  }

  // y/k small in M/k
  bool lies_over(const Subgroup& y, const Subgroup& k) {
    return is_subset(k, y) && is_subset(y, join(k, radical()));
  }

  bool complements(const Subgroup& d, const Subgroup& t) const {
    return meet(d, t).is_zero() && join(d, t).is_whole();
  }

  bool fully_invariant(const Subgroup& d) {
    for (auto& g : end_generators())
      if (!is_subset(image_of(g, d), d)) return false;
    return true;
  }

  // Pure subgroups of finite abelian groups are exactly the summands.
  bool summand(const Subgroup& d) {
    if (m_.scalar_actions()) {
      for (auto& [p, e] : factorize(m_.order())) {
        Int q = 1;
        for (int k = 1; k <= e; ++k) {
          q *= p;
          if (!(meet(d, scale(q, whole_group(group()))) == scale(q, d))) return false;
        }
      }
      return true;
    }
    for (auto& t : lattice())
      if (t.cardinality() * d.cardinality() == m_.order() && meet(d, t).is_zero()) return true;
    return false;
  }

  const std::vector<Subgroup>& summands() {
    if (!summands_) {
      summands_.emplace();
      for (auto& s : lattice())
        if (summand(s)) summands_->push_back(s);
    }
    return *summands_;
  }

 private:
  const RModule& m_;
  std::optional<std::vector<Subgroup>> lattice_;
  std::optional<std::vector<GroupHom>> end_;
  std::optional<Subgroup> rad_;
  std::optional<std::vector<Subgroup>> summands_;
};

// Cyclic factors of a p-group type, largest first: a embeds in b iff for each k
// at most as many factors of a have exponent >= k as factors of b do.
bool type_embeds(const PrimaryType& a, const PrimaryType& b) {
  for (auto& [p, ea] : a) {
    auto it = b.find(p);
    std::vector<int> eb = it == b.end() ? std::vector<int>{} : it->second;
    int top = ea.empty() ? 0 : *std::max_element(ea.begin(), ea.end());
    for (int k = 1; k <= top; ++k) {
      auto ca = std::count_if(ea.begin(), ea.end(), [k](int v) { return v >= k; });
      auto cb = std::count_if(eb.begin(), eb.end(), [k](int v) { return v >= k; });
      if (ca > cb) return false;
    }
  }
  return true;
}

// every p-exponent of a is at most the largest p-exponent of b
bool exponents_bounded(const PrimaryType& a, const PrimaryType& b) {
  for (auto& [p, ea] : a) {
    if (ea.empty()) continue;
    auto it = b.find(p);
    int cap = it == b.end() || it->second.empty() ? 0 : *std::max_element(it->second.begin(), it->second.end());
    if (*std::max_element(ea.begin(), ea.end()) > cap) return false;
  }
  return true;
}

PrimaryType whole_type(const FiniteAbelianGroup& g) { return primary_type(whole_group(g)); }

class Checker {
 public:
  Checker(const Certificate& c, const RModule& m, const std::optional<RModule>& n)
      : c_(c), w_(c.witness), src_(m), own_(n ? std::optional<Side>(std::in_place, *n) : std::nullopt),
        tgt_(own_ ? *own_ : src_), self_(!n) {}

  void run() {
    using P = PropertyId;
    switch (c_.property.id) {
      case P::cs_baer: envelope_family("kernel_meets"); break;
      case P::cs_rickart: envelope_family("kernels"); break;
      case P::extending: envelope_family("submodules"); break;
      case P::dual_cs_baer: above_family("image_joins"); break;
      case P::dual_cs_rickart: above_family("images"); break;
      case P::lifting: above_family("submodules"); break;
      case P::baer: summand_family("kernel_meets", src_); break;
      case P::rickart: summand_family("kernels", src_); break;
      case P::dual_baer: summand_family("image_joins", tgt_); break;
      case P::dual_rickart: summand_family("images", tgt_); break;
      case P::regular: regular(); break;
      case P::weak_duo: weak_duo(); break;
      case P::k_nonsingular:
      case P::t_nonsingular:
      case P::e_k_nonsingular:
      case P::l_t_nonsingular: nonsingular(); break;
      case P::e_k_cononsingular: cononsingular(true); break;
      case P::l_t_cononsingular: cononsingular(false); break;
      default: combinations(); break;
    }
  }

 private:
  bool strong() const { return c_.property.strong; }

  void expect_verdict(bool positive) { claim(c_.verdict == positive, "verdict does not match the witness kind"); }
  std::string kind() const { return w_.at("kind").get<std::string>(); }

  GroupHom map_of(const json& j) const {
    GroupHom f = hom_from_json(j, src_.group(), tgt_.group());
    claim(src_.module().is_hom_to(f, tgt_.module()), "witness map is not R-linear");
    return f;
  }
  GroupHom endo_of(Side& s, const json& j) const {
    GroupHom f = hom_from_json(j, s.group(), s.group());
    claim(s.module().is_hom_to(f, s.module()), "witness endomorphism is not R-linear");
    return f;
  }

  bool z_linear() const {
    const auto& a = src_.module();
    const auto& b = tgt_.module();
    if (!a.scalar_actions() || !b.scalar_actions()) return false;
    Int g = std::gcd(std::max<Int>(a.group().exponent(), 1), std::max<Int>(b.group().exponent(), 1));
    for (std::size_t i = 0; i < a.actions().size(); ++i) {
      auto x = a.actions()[i].as_scalar();
      auto y = b.actions()[i].as_scalar();
      if (g > 1 && ((*x - *y) % g + g) % g != 0) return false;
    }
    return true;
  }

  // The quantified family, recomputed: by enumerating Hom when it is small,
  // else from invariant factors for Z-linear pairs.
  std::vector<Subgroup> family(const std::string& name) {
    if (name == "submodules") return src_.lattice();

    bool kernel_side = name == "kernels" || name == "kernel_meets";
    bool closed = name == "kernel_meets" || name == "image_joins";
    Side& side = kernel_side ? src_ : tgt_;
    std::vector<Subgroup> out;
    HomSet u(src_.module(), tgt_.module());
    if (u.cardinality() <= kEnumerateHoms) {
      std::set<Subgroup> found;
      u.for_each([&](const GroupHom& f) { found.insert(kernel_side ? kernel(f) : image(f)); });
      std::vector<Subgroup> all(found.begin(), found.end());
      if (closed) {
        all.push_back(kernel_side ? whole_group(side.group()) : zero_subgroup(side.group()));
        std::unordered_set<Subgroup, SubgroupHash> seen(all.begin(), all.end());
        for (std::size_t i = 0; i < all.size(); ++i)
          for (std::size_t j = 0; j < i; ++j) {
            Subgroup s = kernel_side ? meet(all[i], all[j]) : join(all[i], all[j]);
            if (seen.insert(s).second) all.push_back(s);
          }
      }
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      return all;
    }
    claim(z_linear(), "Hom too large to recount and the pair is not Z-linear");
    PrimaryType tm = whole_type(src_.group()), tn = whole_type(tgt_.group());
    for (auto& s : side.lattice()) {
      bool member;
      if (kernel_side)
        member = closed ? exponents_bounded(quotient_primary_type(s), tn) : type_embeds(quotient_primary_type(s), tn);
      else
        member = closed ? exponents_bounded(primary_type(s), tm) : type_embeds(primary_type(s), tm);
      if (member) out.push_back(s);
    }
    return out;
  }

  // x belongs to the family: the listed maps realise it.
  void membership(const std::string& name, const Subgroup& x) {
    if (name == "submodules") return;
    bool kernel_side = name == "kernels" || name == "kernel_meets";
    bool single = name == "kernels" || name == "images";
    const json& maps = w_.at("maps");
    if (single) claim(maps.size() == 1, "a single kernel or image needs exactly one map");
    Subgroup acc = kernel_side ? whole_group(src_.group()) : zero_subgroup(tgt_.group());
    for (auto& j : maps) {
      GroupHom f = map_of(j);
      acc = kernel_side ? meet(acc, kernel(f)) : join(acc, image(f));
    }
    claim(acc == x, "the maps do not produce the offending member");
  }

  // A complete list: every entry is a member, no member is missing. Members
  // past the entry cap are confirmed by `unlisted` rather than trusted.
  template <class Fn, class Gn>
  void positive_list(const std::vector<Subgroup>& members, const char* key, Side& side, Fn check_entry, Gn unlisted) {
    const json& list = w_.at("list");
    claim(list.at("total").get<std::size_t>() == members.size(), "family size differs from the recount");
    std::set<Subgroup> want(members.begin(), members.end()), seen;
    for (auto& e : list.at("entries")) {
      Subgroup x = side.sub(e.at(key));
      claim(want.count(x) == 1, "listed entry is not in the family");
      claim(seen.insert(x).second, "entry listed twice");
      check_entry(e, x);
    }
    if (seen.size() < want.size()) {
      claim(list.at("truncated").get<bool>(), "list is short but not marked truncated");
      for (auto& x : want)
        if (!seen.count(x)) unlisted(x);
    }
  }

  bool has_envelope(const Subgroup& x, bool st) {
    for (auto& d : src_.summands())
      if (is_subset(x, d) && src_.essential(x, d) && (!st || src_.fully_invariant(d))) return true;
    return false;
  }
  bool has_above(Side& s, const Subgroup& y, bool st) {
    for (auto& k : s.summands())
      if (is_subset(k, y) && s.lies_over(y, k) && (!st || s.fully_invariant(k))) return true;
    return false;
  }
  bool summand_ok(Side& s, const Subgroup& x) { return s.summand(x) && (!strong() || s.fully_invariant(x)); }

  void enclosing(Side& s, const json& e, const Subgroup& d) {
    Subgroup t = s.sub(e.at("complement"));
    claim(s.complements(d, t), "complement does not split the summand");
    if (strong()) claim(s.fully_invariant(d), "summand is not fully invariant");
  }

  // No (fully invariant) summand above x has x essential in it; the candidate
  // list is recounted and every candidate, listed or not, is confirmed to fail.
  void no_envelope(const Subgroup& x) {
    std::vector<Subgroup> above;
    for (auto& d : src_.summands())
      if (is_subset(x, d)) above.push_back(d);
    const json& cand = w_.at("candidates");
    claim(cand.at("total").get<std::size_t>() == above.size(), "candidate count differs from the recount");
    for (auto& e : cand.at("entries")) {
      Subgroup d = src_.sub(e.at("summand"));
      claim(src_.complements(d, src_.sub(e.at("complement"))), "candidate complement does not split");
    }
    for (auto& d : above)
      claim(!src_.essential(x, d) || (strong() && !src_.fully_invariant(d)), "a candidate summand encloses x");
  }

  void not_above(Side& s, const Subgroup& y) {
    std::vector<Subgroup> below;
    for (auto& k : s.summands())
      if (is_subset(k, y)) below.push_back(k);
    const json& cand = w_.at("candidates");
    claim(cand.at("total").get<std::size_t>() == below.size(), "candidate count differs from the recount");
    for (auto& e : cand.at("entries")) {
      Subgroup k = s.sub(e.at("summand"));
      claim(s.complements(k, s.sub(e.at("complement"))), "candidate complement does not split");
    }
    for (auto& k : below)
      claim(!s.lies_over(y, k) || (strong() && !s.fully_invariant(k)), "y lies above a candidate summand");
  }

  // x fails to be a (fully invariant) summand.
  void not_summand(Side& s, const Subgroup& x) {
    if (w_.contains("complement")) {
      claim(strong(), "x is a summand and the property is not strong");
      claim(s.complements(x, s.sub(w_.at("complement"))), "complement does not split");
      GroupHom h = endo_of(s, w_.at("map"));
      Vec v = s.group().reduce([&] {
        Vec out;
        for (auto& j : w_.at("element_vector")) out.push_back(int_from_json(j));
        return out;
      }());
      claim(x.contains(v), "element is not in x");
      claim(!x.contains(h.apply(v)), "the map keeps the element inside x");
    } else {
      claim(!s.summand(x), "x is a summand");
    }
  }

  void envelope_family(const std::string& name) {
    claim(w_.at("family") == name, "wrong family for the property");
    if (kind() == "envelopes") {
      expect_verdict(true);
      positive_list(
          family(name), "x", src_,
          [&](const json& e, const Subgroup& x) {
            Subgroup d = src_.sub(e.at("summand"));
            claim(src_.essential(x, d), "x is not essential in the summand");
            enclosing(src_, e, d);
          },
          [&](const Subgroup& x) { claim(has_envelope(x, strong()), "unlisted member has no envelope"); });
      return;
    }
    claim(kind() == "no_envelope", "unexpected witness kind");
    expect_verdict(false);
    Subgroup x = src_.sub(w_.at("x"));
    membership(name, x);
    no_envelope(x);
  }

  void above_family(const std::string& name) {
    claim(w_.at("family") == name, "wrong family for the property");
    Side& s = name == "submodules" ? src_ : tgt_;
    if (kind() == "above") {
      expect_verdict(true);
      positive_list(
          family(name), "y", s,
          [&](const json& e, const Subgroup& y) {
            Subgroup k = s.sub(e.at("summand"));
            claim(s.lies_over(y, k), "y does not lie above the summand");
            enclosing(s, e, k);
          },
          [&](const Subgroup& y) { claim(has_above(s, y, strong()), "unlisted member lies above no summand"); });
      return;
    }
    claim(kind() == "not_above", "unexpected witness kind");
    expect_verdict(false);
    Subgroup y = s.sub(w_.at("y"));
    membership(name, y);
    not_above(s, y);
  }

  void summand_family(const std::string& name, Side& s) {
    claim(w_.at("family") == name, "wrong family for the property");
    if (kind() == "summands") {
      expect_verdict(true);
      positive_list(
          family(name), "k", s, [&](const json& e, const Subgroup& k) { enclosing(s, e, k); },
          [&](const Subgroup& x) { claim(summand_ok(s, x), "unlisted member is not a summand"); });
      return;
    }
    claim(kind() == "not_summand", "unexpected witness kind");
    expect_verdict(false);
    Subgroup x = s.sub(w_.at("x"));
    membership(name, x);
    not_summand(s, x);
  }

  void regular() {
    claim(kind() == "both", "unexpected witness kind");
    bool r = w_.at("rickart_verdict"), d = w_.at("dual_rickart_verdict");
    expect_verdict(r && d);
    Certificate a = c_, b = c_;
    a.property.id = PropertyId::rickart;
    a.verdict = r;
    a.witness = w_.at("rickart");
    b.property.id = PropertyId::dual_rickart;
    b.verdict = d;
    b.witness = w_.at("dual_rickart");
    std::optional<RModule> n;
    if (!self_) n = tgt_.module();
    for (auto* sub : {&a, &b}) Checker(*sub, src_.module(), n).run();
  }

  void weak_duo() {
    if (kind() == "summands") {
      expect_verdict(true);
      positive_list(
          src_.summands(), "k", src_,
          [&](const json& e, const Subgroup& k) {
            claim(src_.complements(k, src_.sub(e.at("complement"))), "complement does not split");
            claim(src_.fully_invariant(k), "summand is not fully invariant");
          },
          [&](const Subgroup& k) { claim(src_.fully_invariant(k), "unlisted summand moves"); });
      return;
    }
    claim(kind() == "not_invariant", "unexpected witness kind");
    expect_verdict(false);
    Subgroup k = src_.sub(w_.at("k"));
    claim(src_.complements(k, src_.sub(w_.at("complement"))), "complement does not split");
    GroupHom h = endo_of(src_, w_.at("map"));
    Vec v;
    for (auto& j : w_.at("element_vector")) v.push_back(int_from_json(j));
    v = src_.group().reduce(v);
    claim(k.contains(v) && !k.contains(h.apply(v)), "the map does not move the summand");
  }

  // The bad condition on a kernel (image) for each nonsingularity notion.
  std::optional<Subgroup> bad(const Subgroup& s) {
    using P = PropertyId;
    switch (c_.property.id) {
      case P::k_nonsingular:
        if (src_.essential(s, whole_group(src_.group()))) return s;
        return std::nullopt;
      case P::t_nonsingular:
        if (is_subset(s, tgt_.radical())) return s;
        return std::nullopt;
      case P::e_k_nonsingular:
        for (auto& d : src_.summands())
          if (src_.essential(s, d)) return d;
        return std::nullopt;
      default:
        for (auto& k : tgt_.summands())
          if (tgt_.lies_over(s, k)) return k;
        return std::nullopt;
    }
  }

  void nonsingular() {
    using P = PropertyId;
    bool kernel_side = c_.property.id == P::k_nonsingular || c_.property.id == P::e_k_nonsingular;
    Side& s = kernel_side ? src_ : tgt_;
    Subgroup trivial = kernel_side ? whole_group(src_.group()) : zero_subgroup(tgt_.group());
    if (kind() == "no_bad_map") {
      expect_verdict(true);
      std::size_t checked = 0;
      for (auto& x : family(kernel_side ? "kernels" : "images")) {
        if (x == trivial) continue;
        ++checked;
        claim(!bad(x), "a nonzero map meets the condition");
      }
      claim(w_.at("checked").get<std::size_t>() == checked, "checked count differs from the recount");
      return;
    }
    claim(kind() == "bad_map", "unexpected witness kind");
    expect_verdict(false);
    GroupHom f = map_of(w_.at("map"));
    claim(!f.is_zero(), "the map is zero");
    Subgroup x = s.sub(w_.at(kernel_side ? "kernel" : "image"));
    claim(x == (kernel_side ? kernel(f) : image(f)), "kernel (image) does not match the map");
    switch (c_.property.id) {
      case P::k_nonsingular: claim(src_.essential(x, whole_group(src_.group())), "kernel is not essential"); break;
      case P::t_nonsingular: claim(is_subset(x, tgt_.radical()), "image is not superfluous"); break;
      case P::e_k_nonsingular: {
        Subgroup d = s.sub(w_.at("summand"));
        claim(s.complements(d, s.sub(w_.at("complement"))), "complement does not split");
        claim(src_.essential(x, d), "kernel is not essential in the summand");
        break;
      }
      default: {
        Subgroup k = s.sub(w_.at("summand"));
        claim(s.complements(k, s.sub(w_.at("complement"))), "complement does not split");
        claim(tgt_.lies_over(x, k), "image does not lie above the summand");
      }
    }
  }

  // Closure values compared through the Galois operators of Hom(M, N).
  void cononsingular(bool kernel_side) {
    Side& s = kernel_side ? src_ : tgt_;
    HomSet u(src_.module(), tgt_.module());
    auto hull = [&](const Subgroup& x) { return kernel_side ? r_M(u, l_U(u, x)) : r_N_prime(u, l_U_prime(u, x)); };
    auto fails = [&](const Subgroup& x, const Subgroup& y) {
      return kernel_side ? !s.essential(x, y) : !s.lies_over(y, x);
    };
    if (kind() == "cononsingular") {
      expect_verdict(true);
      std::map<Subgroup, std::vector<Subgroup>> classes;
      for (auto& x : s.lattice()) classes[hull(x)].push_back(x);
      claim(w_.at("classes").get<std::size_t>() == classes.size(), "class count differs from the recount");
      for (auto& [h, members] : classes)
        for (auto& x : members)
          for (auto& y : members)
            if (!(x == y) && is_subset(x, y)) claim(!fails(x, y), "a pair with equal annihilators fails");
      return;
    }
    claim(kind() == "cononsingular_failure", "unexpected witness kind");
    expect_verdict(false);
    Subgroup x = s.sub(w_.at("x")), y = s.sub(w_.at("y"));
    claim(is_subset(x, y) && !(x == y), "x is not properly inside y");
    if (kernel_side)
      claim(l_U(u, x) == l_U(u, y), "l_U(x) and l_U(y) differ");
    else
      claim(l_U_prime(u, x) == l_U_prime(u, y), "l'_U(x) and l'_U(y) differ");
    if (kernel_side) {
      Subgroup z = s.sub(w_.at("z"));
      claim(!z.is_zero() && is_subset(z, y) && meet(z, x).is_zero(), "z does not show x inessential in y");
    } else {
      claim(!s.lies_over(y, x), "y lies above x");
    }
  }

  // SIP-type families: meets or joins of summands (or of the submodules with
  // an envelope, or lying above a summand).
  void combinations() {
    using P = PropertyId;
    auto id = c_.property.id;
    bool meets = id == P::sip || id == P::ssip || id == P::esip || id == P::essip || id == P::sip_extending ||
                 id == P::ssip_extending;
    bool family = id == P::ssip || id == P::sssp || id == P::essip || id == P::lsssp || id == P::ssip_extending ||
                  id == P::sssp_lifting;
    enum { summand, envelope, above } goal;
    if (id == P::sip || id == P::ssip || id == P::ssp || id == P::sssp)
      goal = summand;
    else if (meets)
      goal = envelope;
    else
      goal = above;
    std::string base_name = id == P::sip_extending || id == P::ssip_extending ? "essential_in_summands"
                            : id == P::ssp_lifting || id == P::sssp_lifting ? "above_summands"
                                                                            : "summands";
    claim(w_.at("family") == base_name && w_.at("meets") == meets && w_.at("pairs_only") == !family,
          "wrong family for the property");
    std::vector<Subgroup> base;
    auto in_base = [&](const Subgroup& x) {
      if (base_name == "summands") return src_.summand(x);
      return base_name == "essential_in_summands" ? has_envelope(x, false) : has_above(src_, x, false);
    };
    for (auto& x : src_.lattice())
      if (in_base(x)) base.push_back(x);
    auto combine = [&](const Subgroup& a, const Subgroup& b) { return meets ? meet(a, b) : join(a, b); };
    auto holds = [&](const Subgroup& x) {
      switch (goal) {
        case summand: return summand_ok(src_, x);
        case envelope: return has_envelope(x, strong());
        default: return has_above(src_, x, strong());
      }
    };
    if (kind() == "combinations") {
      expect_verdict(true);
      std::vector<Subgroup> combos;
      if (base.size() == src_.lattice().size()) {
        combos = base;
      } else {
        std::unordered_set<Subgroup, SubgroupHash> seen;
        std::vector<Subgroup> all = base;
        for (auto& b : all) seen.insert(b);
        if (family) {
          Subgroup empty = meets ? whole_group(src_.group()) : zero_subgroup(src_.group());
          if (seen.insert(empty).second) all.push_back(empty);
        }
        if (family) {
          for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = 0; j < i; ++j) {
              Subgroup s = combine(all[i], all[j]);
              if (seen.insert(s).second) all.push_back(s);
            }
          combos = all;
        } else {
          seen.clear();
          for (std::size_t i = 0; i < base.size(); ++i)
            for (std::size_t j = i; j < base.size(); ++j) {
              Subgroup s = combine(base[i], base[j]);
              if (seen.insert(s).second) combos.push_back(s);
            }
        }
      }
      claim(w_.at("combinations").get<std::size_t>() == combos.size(), "combination count differs from the recount");
      positive_list(
          combos, "x", src_,
          [&](const json& e, const Subgroup& x) {
            Subgroup d = src_.sub(e.at("summand"));
            if (goal == summand) claim(d == x, "x is not its own summand");
            if (goal == envelope) claim(src_.essential(x, d), "x is not essential in the summand");
            if (goal == above) claim(src_.lies_over(x, d), "x does not lie above the summand");
            enclosing(src_, e, d);
          },
          [&](const Subgroup& x) { claim(holds(x), "unlisted combination fails"); });
      return;
    }
    expect_verdict(false);
    Subgroup x = src_.sub(w_.at("x"));
    const json& members = w_.at("members");
    claim(!members.empty(), "no generating members");
    if (!family) claim(members.size() <= 2, "a pair property needs at most two members");
    Subgroup acc = meets ? whole_group(src_.group()) : zero_subgroup(src_.group());
    for (auto& e : members) {
      Subgroup b = src_.sub(e.contains("k") ? e.at("k") : e.contains("x") ? e.at("x") : e.at("y"));
      claim(std::find(base.begin(), base.end(), b) != base.end(), "member is not in the base family");
      acc = combine(acc, b);
    }
    claim(acc == x, "members do not combine to x");
    switch (goal) {
      case summand:
        claim(kind() == "not_summand", "unexpected witness kind");
        not_summand(src_, x);
        break;
      case envelope:
        claim(kind() == "no_envelope", "unexpected witness kind");
        no_envelope(x);
        break;
      default:
        claim(kind() == "not_above", "unexpected witness kind");
        not_above(src_, x);
    }
  }

  const Certificate& c_;
  const json& w_;
  Side src_;
  std::optional<Side> own_;
  Side& tgt_;
  bool self_;
};

}  // namespace

Replay replay(const Certificate& c, const RModule& m, const std::optional<RModule>& n) {
  Replay out;
  try {
    if (n) require_same_context(m, *n);
    claim(c.module == m.name(), "certificate is for another module");
    claim(c.codomain == (n ? n->name() : m.name()), "certificate is for another codomain");
    Checker(c, m, n).run();
  } catch (const Rejected& r) {
    out.ok = false;
    out.failure = r.why;
  } catch (const std::exception& e) {
    out.ok = false;
    out.failure = std::string("malformed witness: ") + e.what();
  }
  return out;
}

json to_json(const Certificate& c) {
  bool strict = c.property.strong && variant_of(c.property.id) == Variant::strict;
  return json{{"property", std::string(to_string(c.property.id))},
              {"strong", c.property.strong && !strict},
              {"strict", strict},
              {"module", c.module},
              {"codomain", c.codomain},
              {"verdict", c.verdict},
              {"certificate", c.witness}};
}

Certificate certificate_from_json(const json& j) {
  Certificate c;
  auto id = parse_property_id(j.at("property").get<std::string>());
  if (!id) throw Error(ErrorCode::parse_error, "unknown property in certificate");
  c.property = make_property(*id, j.value("strong", false) || j.value("strict", false));
  c.module = j.at("module").get<std::string>();
  c.codomain = j.at("codomain").get<std::string>();
  c.verdict = j.at("verdict").get<bool>();
  c.witness = j.at("certificate");
  return c;
}

std::uint64_t certificate_hash(const Certificate& c) {
  std::string s = to_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace modlab
