#include "modlab/suites.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <iomanip>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "modlab/catalog.hpp"
#include "modlab/certificate.hpp"

namespace modlab {

using nlohmann::json;
using P = PropertyId;

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::violation: return "violation";
    case CheckStatus::skipped: return "skipped";
  }
  return "?";
}

std::size_t SuiteReport::count(CheckStatus s) const {
  return std::count_if(checks.begin(), checks.end(), [s](const SuiteCheck& c) { return c.status == s; });
}

json SuiteReport::to_json() const {
  json rows = json::array();
  for (auto& c : checks)
    rows.push_back(json{{"instance", c.instance},
                        {"statement", c.statement},
                        {"status", std::string(to_string(c.status))},
                        {"detail", c.detail}});
  return json{{"suite", suite},
              {"checks", rows},
              {"passed", count(CheckStatus::pass)},
              {"violations", violations()},
              {"skipped", count(CheckStatus::skipped)}};
}

namespace {

std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w;
  for (auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (w.size() <= i) w.push_back(0);
      w[i] = std::max(w[i], r[i].size());
    }
  std::ostringstream out;
  for (auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(w[i] - r[i].size() + 2, ' ');
    }
    out << line << "\n";
  }
  return out.str();
}

}  // namespace

std::string SuiteReport::table() const {
  std::vector<std::vector<std::string>> rows{{"instance", "statement", "status", "detail"}};
  for (auto& c : checks) rows.push_back({c.instance, c.statement, std::string(to_string(c.status)), c.detail});
  std::ostringstream out;
  out << aligned(rows);
  out << suite << ": " << count(CheckStatus::pass) << " passed, " << violations() << " violations, "
      << count(CheckStatus::skipped) << " skipped\n";
  return out.str();
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i; (i = next++) < n;) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

// Number of prime factors of n with multiplicity: bounds every chain of submodules.
int length_bound(Int n) {
  int l = 0;
  for (auto& [p, e] : factorize(n)) l += e;
  return l;
}

bool z_linear_pair(const RModule& m, const RModule& n) {
  return m.scalar_actions() && n.scalar_actions() && m.context() == n.context();
}

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

std::optional<bool> search_hom(const RModule& m, const RModule& n, Int guard, bool mono) {
  HomSet u(m, n);
  if (u.cardinality() > guard) return std::nullopt;
  bool found = false;
  u.for_each([&](const GroupHom& f) {
    if (found) return;
    found = mono ? kernel(f).is_zero() : image(f).is_whole();
  });
  return found;
}

std::string yn(bool b) { return b ? "true" : "false"; }

// Collects the checks of one instance.
class Rec {
 public:
  explicit Rec(std::string instance) : inst_(std::move(instance)) {}

  void holds(const std::string& stmt, bool ok, std::string detail) {
    out_.push_back({inst_, stmt, ok ? CheckStatus::pass : CheckStatus::violation, std::move(detail)});
  }
  void implies(const std::string& stmt, bool a, bool b) { holds(stmt, !a || b, "lhs=" + yn(a) + " rhs=" + yn(b)); }
  void iff(const std::string& stmt, bool a, bool b) { holds(stmt, a == b, "lhs=" + yn(a) + " rhs=" + yn(b)); }
  void skip(const std::string& stmt, std::string why) {
    out_.push_back({inst_, stmt, CheckStatus::skipped, std::move(why)});
  }

  // Runs one statement; an exceeded guard skips it, any other error is a violation.
  template <class F>
  void run(const std::string& stmt, F&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::size_guard)
        skip(stmt, std::string("size guard: ") + e.what());
      else
        holds(stmt, false, std::string("error ") + std::string(to_string(e.code())) + ": " + e.what());
    }
  }

  std::vector<SuiteCheck> take() { return std::move(out_); }

 private:
  std::string inst_;
  std::vector<SuiteCheck> out_;
};

// Lazily built workbenches for M, N and the pair.
class Bench {
 public:
  Bench(RModule m, std::optional<RModule> n, const SuiteOptions& o)
      : m_(std::move(m)), n_(std::move(n)), o_(o) {
    if (n_) require_same_context(m_, *n_);
  }

  const RModule& m() const { return m_; }
  const RModule& n() const { return n_ ? *n_ : m_; }
  bool self() const { return !n_; }

  Workbench& pair() {
    if (self()) return wm();
    if (!pair_) pair_ = std::make_unique<Workbench>(m_, *n_, o_.check);
    return *pair_;
  }
  Workbench& wm() {
    if (!wm_) wm_ = std::make_unique<Workbench>(m_, std::nullopt, o_.check);
    return *wm_;
  }
  Workbench& wn() {
    if (self()) return wm();
    if (!wn_) wn_ = std::make_unique<Workbench>(*n_, std::nullopt, o_.check);
    return *wn_;
  }

  // Relative ids on the pair.
  bool rel(P id, bool strong = false) { return pair().check({id, strong}).verdict; }
  bool on_m(P id, bool strong = false) { return wm().check({id, strong}).verdict; }
  bool on_n(P id, bool strong = false) { return wn().check({id, strong}).verdict; }

  bool mono() {
    if (!mono_) mono_ = self() ? std::optional<bool>(true) : has_monomorphism(m_, *n_, o_.check.guard);
    if (!*mono_) return false;
    return **mono_;
  }
  bool mono_known() {
    mono();
    return mono_->has_value();
  }
  bool epi() {
    if (!epi_) epi_ = self() ? std::optional<bool>(true) : has_epimorphism(m_, *n_, o_.check.guard);
    if (!*epi_) return false;
    return **epi_;
  }
  bool epi_known() {
    epi();
    return epi_->has_value();
  }

 private:
  RModule m_;
  std::optional<RModule> n_;
  const SuiteOptions& o_;
  std::unique_ptr<Workbench> pair_, wm_, wn_;
  std::optional<std::optional<bool>> mono_, epi_;
};

std::string pair_key(const RModule& m, const std::optional<RModule>& n) {
  return n ? m.name() + " -> " + n->name() : m.name();
}

std::string pname(P id, bool strong) { return to_string(Property{id, strong}); }

// Hypothesis-guarded statement: skipped unless the embedding is known to exist.
template <class F>
void when(Rec& r, const std::string& stmt, bool known, bool holds, F&& fn) {
  if (!known)
    r.skip(stmt, "hypothesis undecided: Hom too large to search");
  else if (!holds)
    r.skip(stmt, std::string(hypothesis_unmet));
  else
    r.run(stmt, fn);
}

Int power_order(Int base, std::size_t k, Int cap) {
  Int v = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (v > cap / std::max<Int>(base, 1)) return cap + 1;
    v *= base;
  }
  return v;
}

}  // namespace

std::optional<bool> has_monomorphism(const RModule& m, const RModule& n, Int guard) {
  require_same_context(m, n);
  if (z_linear_pair(m, n)) return type_embeds(m.group().primary_type(), n.group().primary_type());
  if (m.order() > n.order()) return false;
  return search_hom(m, n, guard, true);
}

std::optional<bool> has_epimorphism(const RModule& m, const RModule& n, Int guard) {
  require_same_context(m, n);
  // a quotient of a finite abelian group is isomorphic to a subgroup
  if (z_linear_pair(m, n)) return type_embeds(n.group().primary_type(), m.group().primary_type());
  if (m.order() < n.order()) return false;
  return search_hom(m, n, guard, false);
}

std::vector<SuiteCheck> verify_diagram(const RModule& m, const SuiteOptions& o) {
  Rec r(m.name());
  Bench b(m, std::nullopt, o);
  struct Edge {
    P a;
    bool sa;
    P c;
    bool sc;
  };
  const bool F = false, T = true;
  std::vector<Edge> edges{
      {P::extending, F, P::cs_baer, F},        {P::cs_baer, F, P::cs_rickart, F},
      {P::baer, F, P::cs_baer, F},             {P::baer, F, P::rickart, F},
      {P::rickart, F, P::cs_rickart, F},       {P::cs_baer, F, P::essip, F},
      {P::essip, F, P::sip_extending, F},      {P::essip, F, P::esip, F},
      {P::ssip, F, P::sip, F},                 {P::rickart, F, P::sip, F},
      {P::baer, F, P::ssip, F},                {P::cs_rickart, F, P::sip_extending, F},
      {P::ssip_extending, F, P::essip, F},     {P::ssip_extending, F, P::sip_extending, F},
      {P::lifting, F, P::dual_cs_baer, F},     {P::dual_cs_baer, F, P::dual_cs_rickart, F},
      {P::dual_baer, F, P::dual_cs_baer, F},   {P::dual_baer, F, P::dual_rickart, F},
      {P::dual_rickart, F, P::dual_cs_rickart, F}, {P::dual_cs_baer, F, P::lsssp, F},
      {P::lsssp, F, P::ssp_lifting, F},        {P::lsssp, F, P::lssp, F},
      {P::sssp, F, P::ssp, F},                 {P::dual_rickart, F, P::ssp, F},
      {P::dual_baer, F, P::sssp, F},           {P::dual_cs_rickart, F, P::ssp_lifting, F},
      {P::sssp_lifting, F, P::lsssp, F},       {P::sssp_lifting, F, P::ssp_lifting, F},
      {P::regular, F, P::rickart, F},          {P::regular, F, P::dual_rickart, F},
      // strong and strict versions
      {P::extending, T, P::cs_baer, T},        {P::cs_baer, T, P::cs_rickart, T},
      {P::baer, T, P::cs_baer, T},             {P::baer, T, P::rickart, T},
      {P::rickart, T, P::cs_rickart, T},       {P::cs_baer, T, P::essip, T},
      {P::essip, T, P::esip, T},               {P::ssip, T, P::sip, T},
      {P::cs_rickart, T, P::sip_extending, T}, {P::ssip_extending, T, P::essip, T},
      {P::ssip_extending, T, P::sip_extending, T},
      {P::lifting, T, P::dual_cs_baer, T},     {P::dual_cs_baer, T, P::dual_cs_rickart, T},
      {P::dual_baer, T, P::dual_cs_baer, T},   {P::dual_baer, T, P::dual_rickart, T},
      {P::dual_rickart, T, P::dual_cs_rickart, T}, {P::dual_cs_baer, T, P::lsssp, T},
      {P::lsssp, T, P::lssp, T},               {P::sssp, T, P::ssp, T},
      {P::dual_cs_rickart, T, P::ssp_lifting, T}, {P::sssp_lifting, T, P::lsssp, T},
      {P::sssp_lifting, T, P::ssp_lifting, T},
  };
  for (auto& e : edges) {
    auto stmt = pname(e.a, e.sa) + " => " + pname(e.c, e.sc);
    r.run(stmt, [&] { r.implies(stmt, b.on_m(e.a, e.sa), b.on_m(e.c, e.sc)); });
  }
  for (bool s : {false, true}) {
    auto s1 = pname(P::esip, s) + " <=> " + pname(P::sip_extending, s);
    r.run(s1, [&] { r.iff(s1, b.on_m(P::esip, s), b.on_m(P::sip_extending, s)); });
    auto s2 = pname(P::lssp, s) + " <=> " + pname(P::ssp_lifting, s);
    r.run(s2, [&] { r.iff(s2, b.on_m(P::lssp, s), b.on_m(P::ssp_lifting, s)); });
  }
  for (auto id : all_property_ids()) {
    if (variant_of(id) == Variant::none || is_relative(id)) continue;
    auto stmt = pname(id, true) + " => " + pname(id, false);
    r.run(stmt, [&] { r.implies(stmt, b.on_m(id, true), b.on_m(id, false)); });
  }
  return r.take();
}

std::vector<SuiteCheck> verify_st00(const RModule& m, const SuiteOptions& o) {
  Rec r(m.name());
  Bench b(m, std::nullopt, o);
  std::optional<bool> wd, ab;
  auto weak_duo = [&] { return wd ? *wd : *(wd = b.on_m(P::weak_duo)); };
  auto end_abelian = [&] { return ab ? *ab : *(ab = end_is_abelian(b.wm().src()).abelian); };
  r.run("weak_duo <=> End abelian", [&] { r.iff("weak_duo <=> End abelian", weak_duo(), end_abelian()); });
  for (P id : {P::cs_baer, P::dual_cs_baer}) {
    auto s = pname(id, true), p = pname(id, false);
    r.run(s + " <=> " + p + " & weak_duo",
          [&] { r.iff(s + " <=> " + p + " & weak_duo", b.on_m(id, true), b.on_m(id) && weak_duo()); });
    r.run(s + " <=> " + p + " & End abelian",
          [&] { r.iff(s + " <=> " + p + " & End abelian", b.on_m(id, true), b.on_m(id) && end_abelian()); });
    auto ind = "indecomposable: " + s + " <=> " + p;
    r.run(ind, [&] {
      bool indecomposable = m.order() > 1 && b.wm().src().summands().size() == 2;
      if (!indecomposable)
        r.skip(ind, std::string(hypothesis_unmet));
      else
        r.iff(ind, b.on_m(id, true), b.on_m(id));
    });
  }
  return r.take();
}

std::vector<SuiteCheck> verify_st0(const RModule& m, const RModule& n, const SuiteOptions& o) {
  Rec r(pair_key(m, n));
  Bench b(m, n, o);
  auto s1 = "M embeds in N: strong cs_baer <=> cs_baer & weak_duo(M)";
  when(r, s1, b.mono_known(), b.mono(),
       [&] { r.iff(s1, b.rel(P::cs_baer, true), b.rel(P::cs_baer) && b.on_m(P::weak_duo)); });
  auto s2 = "N is a factor of M: strong dual_cs_baer <=> dual_cs_baer & weak_duo(N)";
  when(r, s2, b.epi_known(), b.epi(),
       [&] { r.iff(s2, b.rel(P::dual_cs_baer, true), b.rel(P::dual_cs_baer) && b.on_n(P::weak_duo)); });
  return r.take();
}

std::vector<SuiteCheck> verify_nonsingular_equiv(const RModule& m, const std::optional<RModule>& n,
                                                 const SuiteOptions& o) {
  Rec r(pair_key(m, n));
  Bench b(m, n, o);
  for (bool s : {false, true}) {
    auto s1 = pname(P::cs_baer, s) + " & k_nonsingular <=> " + pname(P::baer, s);
    r.run(s1, [&] { r.iff(s1, b.rel(P::cs_baer, s) && b.rel(P::k_nonsingular), b.rel(P::baer, s)); });
    auto s2 = pname(P::dual_cs_baer, s) + " & t_nonsingular <=> " + pname(P::dual_baer, s);
    r.run(s2, [&] { r.iff(s2, b.rel(P::dual_cs_baer, s) && b.rel(P::t_nonsingular), b.rel(P::dual_baer, s)); });
  }
  return r.take();
}

std::vector<SuiteCheck> verify_product_reduction(const RModule& m, const std::optional<RModule>& n,
                                                 const SuiteOptions& o) {
  Rec r(pair_key(m, n));
  Bench b(m, n, o);
  const RModule& tgt = b.n();
  Int homs = 0;
  r.run("|Hom(M, N)|", [&] { homs = b.pair().hom_count(); });
  if (homs == 0) return r.take();
  Int cap = o.max_power_order;

  // Kernel side: a meet of kernels is already the meet of at most l(M) of them,
  // and a family has at most |Hom| distinct members.
  int lm = length_bound(m.order());
  Int kstar = std::min<Int>(homs, std::max(lm, 1));
  std::set<Int> ks{1, 2, kstar};
  for (Int k : ks) {
    bool exact = k >= lm || k >= homs;
    for (bool s : {false, true}) {
      auto stmt = pname(P::cs_baer, s) + "(M, N) " + (exact ? "<=>" : "=>") + " " + pname(P::cs_rickart, s) +
                  "(M, N^" + std::to_string(k) + ")";
      if (power_order(tgt.order(), k, cap) > cap) {
        r.skip(stmt, "size guard: |N^" + std::to_string(k) + "| exceeds " + std::to_string(cap));
        continue;
      }
      r.run(stmt, [&] {
        RModule nk = k == 1 ? tgt : direct_power(tgt, k).sum;
        bool lhs = b.rel(P::cs_baer, s);
        bool rhs = check({P::cs_rickart, s}, m, nk, o.check).verdict;
        exact ? r.iff(stmt, lhs, rhs) : r.implies(stmt, lhs, rhs);
      });
    }
  }

  int ln = length_bound(tgt.order());
  Int kd = std::min<Int>(homs, std::max(ln, 1));
  std::set<Int> kds{1, 2, kd};
  for (Int k : kds) {
    bool exact = k >= ln || k >= homs;
    for (bool s : {false, true}) {
      auto stmt = pname(P::dual_cs_baer, s) + "(M, N) " + (exact ? "<=>" : "=>") + " " +
                  pname(P::dual_cs_rickart, s) + "(M^" + std::to_string(k) + ", N)";
      if (power_order(m.order(), k, cap) > cap) {
        r.skip(stmt, "size guard: |M^" + std::to_string(k) + "| exceeds " + std::to_string(cap));
        continue;
      }
      r.run(stmt, [&] {
        RModule mk = k == 1 ? m : direct_power(m, k).sum;
        bool lhs = b.rel(P::dual_cs_baer, s);
        bool rhs = check({P::dual_cs_rickart, s}, mk, tgt, o.check).verdict;
        exact ? r.iff(stmt, lhs, rhs) : r.implies(stmt, lhs, rhs);
      });
    }
  }
  return r.take();
}

namespace {

std::string sum_name(const std::vector<RModule>& parts) {
  std::string s;
  for (auto& p : parts) s += (s.empty() ? "" : "+") + p.name();
  return s;
}

Int product_order(const std::vector<RModule>& parts) {
  Int v = 1;
  for (auto& p : parts) v *= p.order();
  return v;
}

}  // namespace

std::vector<SuiteCheck> verify_dsum_self(const std::vector<RModule>& parts, const SuiteOptions& o) {
  Rec r(sum_name(parts));
  if (parts.size() < 2 || parts.size() > 3) throw Error(ErrorCode::precondition, "two or three summands");
  if (product_order(parts) > o.max_sum_order) {
    r.skip("sum theorems", "size guard: order " + std::to_string(product_order(parts)));
    return r.take();
  }
  DirectSum ds = direct_sum(parts);
  Bench b(ds.sum, std::nullopt, o);
  std::vector<std::unique_ptr<Bench>> comp;
  for (auto& p : parts) comp.push_back(std::make_unique<Bench>(p, std::nullopt, o));

  bool homs_zero = true;
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = 0; j < parts.size(); ++j)
      if (i != j && HomSet(parts[i], parts[j]).cardinality() > 1) homs_zero = false;

  // every submodule L is the sum of its meets with the components
  std::optional<bool> splits;
  auto decomposes = [&] {
    if (splits) return *splits;
    std::vector<Subgroup> comps;
    for (auto& inj : ds.injections) comps.push_back(image(inj));
    bool ok = true;
    for_each_submodule(ds.sum, [&](const Subgroup& l) {
      Int prod = 1;
      for (auto& c : comps) prod *= meet(l, c).cardinality();
      ok = prod == l.cardinality();
      return ok;
    });
    return *(splits = ok);
  };

  for (P id : {P::cs_baer, P::dual_cs_baer}) {
    auto all = [&](bool s) {
      bool v = true;
      for (auto& c : comp) v = v && c->on_m(id, s);
      return v;
    };
    auto s1 = "Hom(Mi, Mj) = 0: " + pname(id, false) + "(sum) <=> every " + pname(id, false) + "(Mi)";
    if (!homs_zero)
      r.skip(s1, std::string(hypothesis_unmet));
    else
      r.run(s1, [&] { r.iff(s1, b.on_m(id), all(false)); });
    auto s2 = pname(id, true) + "(sum) <=> every " + pname(id, true) + "(Mi) & Hom(Mi, Mj) = 0";
    r.run(s2, [&] { r.iff(s2, b.on_m(id, true), all(true) && homs_zero); });
    for (bool s : {false, true}) {
      auto s3 = "L = sum of L meet Mi: " + pname(id, s) + "(sum) <=> every " + pname(id, s) + "(Mi)";
      r.run(s3, [&] {
        if (!decomposes())
          r.skip(s3, std::string(hypothesis_unmet));
        else
          r.iff(s3, b.on_m(id, s), all(s));
      });
    }
    P rick = id == P::cs_baer ? P::cs_rickart : P::dual_cs_rickart;
    for (bool s : {false, true}) {
      auto s4 = pname(id, s) + "(sum) => every " + pname(id, s) + "(Mi) & " + pname(rick, s) + "(Mi, Mj)";
      r.run(s4, [&] {
        bool rhs = all(s);
        for (std::size_t i = 0; i < parts.size() && rhs; ++i)
          for (std::size_t j = 0; j < parts.size() && rhs; ++j)
            if (i != j) rhs = check({rick, s}, parts[i], parts[j], o.check).verdict;
        r.implies(s4, b.on_m(id, s), rhs);
      });
    }
  }
  return r.take();
}

std::vector<SuiteCheck> verify_dsum_pair(const RModule& m, const std::vector<RModule>& parts,
                                         const SuiteOptions& o) {
  Rec r(m.name() + " ; " + sum_name(parts));
  if (product_order(parts) > o.max_sum_order) {
    r.skip("sum theorems", "size guard: order " + std::to_string(product_order(parts)));
    return r.take();
  }
  RModule sum = direct_sum(parts).sum;
  for (bool s : {false, true}) {
    auto s1 = pname(P::cs_baer, s) + "(M, sum Ni) <=> every " + pname(P::cs_baer, s) + "(M, Ni)";
    r.run(s1, [&] {
      bool each = true;
      for (auto& p : parts) each = each && check({P::cs_baer, s}, m, p, o.check).verdict;
      r.iff(s1, check({P::cs_baer, s}, m, sum, o.check).verdict, each);
    });
    auto s2 = pname(P::dual_cs_baer, s) + "(sum Mi, N) <=> every " + pname(P::dual_cs_baer, s) + "(Mi, N)";
    r.run(s2, [&] {
      bool each = true;
      for (auto& p : parts) each = each && check({P::dual_cs_baer, s}, p, m, o.check).verdict;
      r.iff(s2, check({P::dual_cs_baer, s}, sum, m, o.check).verdict, each);
    });
  }
  return r.take();
}

std::vector<SuiteCheck> verify_essip_bridge(const RModule& m, const std::optional<RModule>& n,
                                            const SuiteOptions& o) {
  Rec r(pair_key(m, n));
  Bench b(m, n, o);
  const RModule& tgt = b.n();
  for (bool s : {false, true}) {
    // both sides of the pair are finite: Soc essential, Rad superfluous
    auto a1 = pname(P::ssip_extending, s) + "(M) <=> " + pname(P::essip, s) + "(M)";
    r.run(a1, [&] { r.iff(a1, b.on_m(P::ssip_extending, s), b.on_m(P::essip, s)); });
    auto a2 = pname(P::sssp_lifting, s) + "(N) <=> " + pname(P::lsssp, s) + "(N)";
    if (!b.self()) r.run(a2, [&] { r.iff(a2, b.on_n(P::sssp_lifting, s), b.on_n(P::lsssp, s)); });

    auto c1 = "M embeds in N: " + pname(P::cs_baer, s) + " => " + pname(P::essip, s) + "(M)";
    when(r, c1, b.mono_known(), b.mono(), [&] { r.implies(c1, b.rel(P::cs_baer, s), b.on_m(P::essip, s)); });
    auto c2 = "N is a factor of M: " + pname(P::dual_cs_baer, s) + " => " + pname(P::lsssp, s) + "(N)";
    when(r, c2, b.epi_known(), b.epi(), [&] { r.implies(c2, b.rel(P::dual_cs_baer, s), b.on_n(P::lsssp, s)); });

    auto d1 = pname(P::cs_rickart, s) + " & " + pname(P::ssip_extending, s) + "(M) => " + pname(P::cs_baer, s);
    r.run(d1, [&] {
      r.implies(d1, b.rel(P::cs_rickart, s) && b.on_m(P::ssip_extending, s), b.rel(P::cs_baer, s));
    });
    auto d2 = "M embeds in N: " + pname(P::cs_baer, s) + " => " + pname(P::cs_rickart, s) + " & " +
              pname(P::ssip_extending, s) + "(M)";
    when(r, d2, b.mono_known(), b.mono(), [&] {
      r.implies(d2, b.rel(P::cs_baer, s), b.rel(P::cs_rickart, s) && b.on_m(P::ssip_extending, s));
    });
    auto d3 = pname(P::dual_cs_rickart, s) + " & " + pname(P::sssp_lifting, s) + "(N) => " +
              pname(P::dual_cs_baer, s);
    r.run(d3, [&] {
      r.implies(d3, b.rel(P::dual_cs_rickart, s) && b.on_n(P::sssp_lifting, s), b.rel(P::dual_cs_baer, s));
    });
    auto d4 = "N is a factor of M: " + pname(P::dual_cs_baer, s) + " => " + pname(P::dual_cs_rickart, s) + " & " +
              pname(P::sssp_lifting, s) + "(N)";
    when(r, d4, b.epi_known(), b.epi(), [&] {
      r.implies(d4, b.rel(P::dual_cs_baer, s), b.rel(P::dual_cs_rickart, s) && b.on_n(P::sssp_lifting, s));
    });

    auto e1 = pname(P::essip, s) + "(M + N) => " + pname(P::cs_baer, s);
    auto e2 = pname(P::lsssp, s) + "(M + N) => " + pname(P::dual_cs_baer, s);
    if (m.order() * tgt.order() > o.max_sum_order) {
      r.skip(e1, "size guard: |M + N| = " + std::to_string(m.order() * tgt.order()));
      r.skip(e2, "size guard: |M + N| = " + std::to_string(m.order() * tgt.order()));
      continue;
    }
    RModule mn = direct_sum({m, tgt}).sum;
    r.run(e1, [&] { r.implies(e1, check({P::essip, s}, mn, std::nullopt, o.check).verdict, b.rel(P::cs_baer, s)); });
    r.run(e2, [&] {
      r.implies(e2, check({P::lsssp, s}, mn, std::nullopt, o.check).verdict, b.rel(P::dual_cs_baer, s));
    });
  }
  return r.take();
}

std::vector<SuiteCheck> verify_cononsingular_bridge(const RModule& m, const std::optional<RModule>& n,
                                                    const SuiteOptions& o) {
  Rec r(pair_key(m, n));
  Bench b(m, n, o);
  for (bool s : {false, true}) {
    auto t1 = pname(P::cs_baer, s) + " & e_k_cononsingular => " + pname(P::extending, s) + "(M)";
    r.run(t1, [&] {
      r.implies(t1, b.rel(P::cs_baer, s) && b.rel(P::e_k_cononsingular), b.on_m(P::extending, s));
    });
    auto t2 = pname(P::dual_cs_baer, s) + " & l_t_cononsingular => " + pname(P::lifting, s) + "(N)";
    r.run(t2, [&] {
      r.implies(t2, b.rel(P::dual_cs_baer, s) && b.rel(P::l_t_cononsingular), b.on_n(P::lifting, s));
    });
    auto k1 = "M embeds in N: " + pname(P::extending, s) + "(M) & e_k_nonsingular => " + pname(P::cs_baer, s) +
              " & e_k_cononsingular";
    when(r, k1, b.mono_known(), b.mono(), [&] {
      r.implies(k1, b.on_m(P::extending, s) && b.rel(P::e_k_nonsingular),
                b.rel(P::cs_baer, s) && b.rel(P::e_k_cononsingular));
    });
    auto k2 = "N is a factor of M: " + pname(P::lifting, s) + "(N) & l_t_nonsingular => " +
              pname(P::dual_cs_baer, s) + " & l_t_cononsingular";
    when(r, k2, b.epi_known(), b.epi(), [&] {
      r.implies(k2, b.on_n(P::lifting, s) && b.rel(P::l_t_nonsingular),
                b.rel(P::dual_cs_baer, s) && b.rel(P::l_t_cononsingular));
    });
    auto k3 = "M embeds in N: " + pname(P::extending, s) + "(M) & k_nonsingular => " + pname(P::baer, s);
    when(r, k3, b.mono_known(), b.mono(), [&] {
      r.implies(k3, b.on_m(P::extending, s) && b.rel(P::k_nonsingular), b.rel(P::baer, s));
    });
    auto k4 = "N is a factor of M: " + pname(P::lifting, s) + "(N) & t_nonsingular => " + pname(P::dual_baer, s);
    when(r, k4, b.epi_known(), b.epi(), [&] {
      r.implies(k4, b.on_n(P::lifting, s) && b.rel(P::t_nonsingular), b.rel(P::dual_baer, s));
    });
  }
  return r.take();
}

namespace {

bool end_commutative(Analysis& a) {
  auto& g = a.end_generators();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if (!(compose(g[i], g[j]) == compose(g[j], g[i]))) return false;
  return true;
}

// Z/d with the ring acting through the scalars it acts by on R.
std::optional<RModule> cyclic_over(const RModule& r, Int d) {
  FiniteAbelianGroup g({d});
  std::vector<GroupHom> acts;
  for (auto& a : r.actions()) {
    auto c = a.as_scalar();
    if (!c) return std::nullopt;
    acts.push_back(GroupHom::scalar(g, *c));
  }
  return RModule("z" + std::to_string(d) + "_over_" + r.name(), r.context(), g, std::move(acts));
}

}  // namespace

std::vector<SuiteCheck> verify_ring_theorems(const RModule& rr, const SuiteOptions& o) {
  Rec r(rr.name());
  Bench b(rr, std::nullopt, o);
  // finite rings are semiperfect and semiregular
  r.run("lifting", [&] { r.holds("lifting", b.on_m(P::lifting), "verdict=" + yn(b.on_m(P::lifting))); });
  r.run("dual_cs_baer", [&] {
    r.holds("dual_cs_baer", b.on_m(P::dual_cs_baer), "verdict=" + yn(b.on_m(P::dual_cs_baer)));
  });
  r.run("dual_cs_rickart", [&] {
    r.holds("dual_cs_rickart", b.on_m(P::dual_cs_rickart), "verdict=" + yn(b.on_m(P::dual_cs_rickart)));
  });
  r.run("dual_cs_baer <=> lifting", [&] { r.iff("dual_cs_baer <=> lifting", b.on_m(P::dual_cs_baer), b.on_m(P::lifting)); });
  std::optional<bool> ab;
  auto abelian = [&] { return ab ? *ab : *(ab = end_is_abelian(b.wm().src()).abelian); };
  for (P id : {P::dual_cs_baer, P::lifting, P::dual_cs_rickart}) {
    auto stmt = pname(id, true) + " <=> End abelian";
    r.run(stmt, [&] { r.iff(stmt, b.on_m(id, true), abelian()); });
  }
  auto cyc = std::string("commutative: cyclic modules, dual_cs_baer => lifting");
  r.run(cyc, [&] {
    if (!rr.scalar_actions() || rr.group().rank() != 1 || !end_commutative(b.wm().src())) {
      r.skip(cyc, std::string(hypothesis_unmet));
      return;
    }
    Int n = rr.order();
    for (Int d = 1; d <= n; ++d) {
      if (n % d) continue;
      auto c = cyclic_over(rr, d);
      if (!c) continue;
      for (bool s : {false, true}) {
        auto stmt = c->name() + ": " + pname(P::dual_cs_baer, s) + " => " + pname(P::lifting, s);
        bool lhs = check({P::dual_cs_baer, s}, *c, std::nullopt, o.check).verdict;
        bool rhs = check({P::lifting, s}, *c, std::nullopt, o.check).verdict;
        r.implies(stmt, lhs, rhs);
      }
    }
  });
  return r.take();
}

std::vector<SuiteCheck> verify_sum_with_ring(const Vec& orders, Int pk, const SuiteOptions& o) {
  RModule ring = cyclic_regular_module(pk);
  FiniteAbelianGroup g(orders);
  std::vector<GroupHom> acts(ring.actions().size(), GroupHom::identity(g));
  RModule m(abelian_name(orders) + "_over_" + ring.name(), ring.context(), g, acts);
  Rec r(m.name() + " + " + ring.name());
  for (Int o_ : orders)
    if (pk % o_) throw Error(ErrorCode::precondition, "exponent must divide the ring order");
  RModule sum = direct_sum({m, ring}).sum;
  auto stmt = std::string("dual_cs_baer(M + R) <=> lifting(M + R)");
  r.run(stmt, [&] {
    Workbench w(sum, std::nullopt, o.check);
    r.iff(stmt, w.check({P::dual_cs_baer, false}).verdict, w.check({P::lifting, false}).verdict);
  });
  return r.take();
}

namespace {

// Summands of M as modules; Z-linear ones up to isomorphism type.
std::vector<RModule> summand_modules(const RModule& m, const SuiteOptions& o, std::size_t cap) {
  Analysis a(m, o.check.route, o.check.guard);
  std::vector<RModule> out;
  std::set<Vec> seen;
  for (auto& s : a.summands()) {
    Submodule sm = as_module(m, s);
    if (m.scalar_actions()) {
      if (!seen.insert(sm.module.group().invariant_factors()).second) continue;
      out.push_back(sm.module.renamed(abelian_name(sm.module.group().orders())));
    } else {
      out.push_back(sm.module.renamed(m.name() + "|" + std::to_string(out.size())));
    }
    if (out.size() >= cap) break;
  }
  return out;
}

}  // namespace

std::vector<SuiteCheck> verify_transfer(const RModule& m, const std::optional<RModule>& n, const SuiteOptions& o) {
  Rec r(pair_key(m, n));
  Bench b(m, n, o);
  std::vector<RModule> sm, sn;
  r.run("summands", [&] {
    sm = summand_modules(m, o, 6);
    sn = n ? summand_modules(*n, o, 6) : sm;
  });
  for (auto& a : sm)
    for (auto& c : sn)
      for (P id : {P::cs_baer, P::dual_cs_baer})
        for (bool s : {false, true}) {
          auto stmt = pname(id, s) + "(M, N) => " + pname(id, s) + "(" + a.name() + ", " + c.name() + ")";
          r.run(stmt, [&] { r.implies(stmt, b.rel(id, s), check({id, s}, a, c, o.check).verdict); });
        }
  return r.take();
}

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids{"diagram", "st00",          "nonsingular", "product", "dsum",
                                            "essip",   "cononsingular", "ring",        "transfer"};
  return ids;
}

namespace {

using Task = std::function<std::vector<SuiteCheck>()>;

// Pair instances: corpus pairs, then (M, M) for every module.
std::vector<std::pair<const RModule*, const RModule*>> pair_instances(const Corpus& c) {
  std::vector<std::pair<const RModule*, const RModule*>> out;
  for (auto& p : c.pairs) out.emplace_back(&c.module(p.source), &c.module(p.target));
  for (auto& i : c.modules) out.emplace_back(&i.module, nullptr);
  return out;
}

std::optional<RModule> opt(const RModule* n) { return n ? std::optional<RModule>(*n) : std::nullopt; }

std::vector<std::vector<RModule>> dsum_lists(const Corpus& c, Int cap) {
  std::vector<const RModule*> comps;
  for (auto& i : c.modules)
    if (i.module.order() > 1 && i.module.order() <= 8 && i.module.context() == RingContext{}) comps.push_back(&i.module);
  std::vector<std::vector<RModule>> out;
  for (std::size_t a = 0; a < comps.size(); ++a)
    for (std::size_t b = a; b < comps.size(); ++b) {
      if (comps[a]->order() * comps[b]->order() <= cap) out.push_back({*comps[a], *comps[b]});
      for (std::size_t d = b; d < comps.size(); ++d)
        if (comps[a]->order() * comps[b]->order() * comps[d]->order() <= std::min<Int>(cap, 64))
          out.push_back({*comps[a], *comps[b], *comps[d]});
    }
  auto named = [&](std::vector<std::string> names) {
    std::vector<RModule> v;
    for (auto& n : names) {
      bool found = false;
      for (auto& i : c.modules) found |= i.module.name() == n;
      if (!found) return;
      v.push_back(c.module(n));
    }
    out.push_back(v);
  };
  named({"z4", "z9"});
  named({"z2", "z16"});
  named({"z4", "z8"});
  named({"z3", "z27"});
  // ring contexts: a module with itself, and modules sharing a context
  for (std::size_t a = 0; a < c.modules.size(); ++a) {
    auto& x = c.modules[a].module;
    if (x.context() == RingContext{} || x.order() * x.order() > std::min<Int>(cap, 64)) continue;
    out.push_back({x, x.renamed(x.name() + "'")});
    for (std::size_t b = a + 1; b < c.modules.size(); ++b) {
      auto& y = c.modules[b].module;
      if (y.context() == x.context() && x.order() * y.order() <= std::min<Int>(cap, 64)) out.push_back({x, y});
    }
  }
  return out;
}

std::vector<Task> suite_tasks(std::string_view id, const Corpus& c, const SuiteOptions& o) {
  std::vector<Task> tasks;
  auto pairs = pair_instances(c);
  if (id == "diagram") {
    for (auto& i : c.modules) tasks.push_back([&o, m = &i.module] { return verify_diagram(*m, o); });
  } else if (id == "st00") {
    for (auto& i : c.modules) tasks.push_back([&o, m = &i.module] { return verify_st00(*m, o); });
    for (auto& p : c.pairs)
      tasks.push_back([&o, m = &c.module(p.source), n = &c.module(p.target)] { return verify_st0(*m, *n, o); });
  } else if (id == "nonsingular") {
    for (auto [m, n] : pairs) tasks.push_back([&o, m, n] { return verify_nonsingular_equiv(*m, opt(n), o); });
  } else if (id == "product") {
    for (auto [m, n] : pairs) tasks.push_back([&o, m, n] { return verify_product_reduction(*m, opt(n), o); });
  } else if (id == "dsum") {
    for (auto& list : dsum_lists(c, o.max_sum_order)) {
      tasks.push_back([&o, list] { return verify_dsum_self(list, o); });
      std::set<std::string> done;
      for (auto& m : list)
        if (done.insert(m.name()).second) tasks.push_back([&o, list, m] { return verify_dsum_pair(m, list, o); });
    }
  } else if (id == "essip") {
    for (auto [m, n] : pairs) tasks.push_back([&o, m, n] { return verify_essip_bridge(*m, opt(n), o); });
  } else if (id == "cononsingular") {
    for (auto [m, n] : pairs) tasks.push_back([&o, m, n] { return verify_cononsingular_bridge(*m, opt(n), o); });
  } else if (id == "ring") {
    for (auto& i : c.modules) {
      auto& name = i.module.name();
      if (name.size() > 8 && name.substr(name.size() - 8) == "_regular")
        tasks.push_back([&o, m = &i.module] { return verify_ring_theorems(*m, o); });
    }
    for (Int pk : {4, 8, 9}) {
      for (Int order = 1; order <= 64; ++order)
        for (auto& g : abelian_groups_of_order(order)) {
          bool fits = std::all_of(g.begin(), g.end(), [pk](Int v) { return pk % v == 0; });
          if (fits) tasks.push_back([&o, g, pk] { return verify_sum_with_ring(g, pk, o); });
        }
    }
  } else if (id == "transfer") {
    for (auto [m, n] : pairs) {
      if (m->order() > 64 || (n && n->order() > 64)) continue;
      tasks.push_back([&o, m, n] { return verify_transfer(*m, opt(n), o); });
    }
  } else {
    throw Error(ErrorCode::unknown_suite, "unknown suite '" + std::string(id) + "'");
  }
  return tasks;
}

}  // namespace

SuiteReport run_suite(std::string_view id, const Corpus& corpus, const SuiteOptions& o) {
  SuiteReport rep{std::string(id), {}};
  std::vector<std::string> ids;
  if (id == "all")
    ids = suite_ids();
  else
    ids.push_back(std::string(id));
  for (auto& s : ids) {
    auto tasks = suite_tasks(s, corpus, o);
    std::vector<std::vector<SuiteCheck>> results(tasks.size());
    parallel_for(tasks.size(), o.workers, [&](std::size_t i) { results[i] = tasks[i](); });
    for (auto& r : results)
      for (auto& c : r) {
        if (id == "all") c.statement = s + ": " + c.statement;
        rep.checks.push_back(std::move(c));
      }
  }
  return rep;
}

bool adjacent_exponents(const std::vector<int>& partition) {
  std::set<int> d(partition.begin(), partition.end());
  return d.size() <= 1 || (d.size() == 2 && *d.rbegin() == *d.begin() + 1);
}

std::size_t ClassTable::mismatches() const {
  return std::count_if(rows.begin(), rows.end(), [](const ClassRow& r) { return r.verdict != r.predicate; });
}

json ClassTable::to_json() const {
  json out = json::array();
  for (auto& r : rows)
    out.push_back(json{{"partition", r.partition},
                       {"module", r.module},
                       {"verdict", r.verdict},
                       {"predicate", r.predicate},
                       {"certificate_hash", r.hash}});
  return json{{"p", p},
              {"max_sum", max_sum},
              {"property", to_string(Property{P::dual_cs_baer, strong})},
              {"rows", out},
              {"mismatches", mismatches()}};
}

namespace {

std::string partition_text(const std::vector<int>& lambda) {
  std::string s = "(";
  for (std::size_t i = 0; i < lambda.size(); ++i) s += (i ? "," : "") + std::to_string(lambda[i]);
  return s + ")";
}

}  // namespace

std::string ClassTable::table() const {
  std::vector<std::vector<std::string>> t{{"partition", "module", "verdict", "predicate", "match", "certificate"}};
  for (auto& r : rows)
    t.push_back({partition_text(r.partition), r.module, yn(r.verdict), yn(r.predicate),
                 r.verdict == r.predicate ? "yes" : "NO", r.hash});
  std::ostringstream out;
  out << aligned(t);
  out << "p=" << p << " max_sum=" << max_sum << " " << to_string(Property{P::dual_cs_baer, strong}) << ": "
      << rows.size() << " partitions, " << mismatches() << " mismatches\n";
  return out.str();
}

ClassTable classify_p_groups(Int p, int max_sum, bool strong, const SuiteOptions& o) {
  if (p < 2 || factorize(p).size() != 1 || factorize(p)[0].second != 1)
    throw Error(ErrorCode::precondition, "p must be prime");
  if (max_sum < 1) throw Error(ErrorCode::precondition, "max-sum must be positive");
  ClassTable t{p, max_sum, strong, {}};
  std::vector<std::vector<int>> parts;
  for (int s = 1; s <= max_sum; ++s)
    for (auto& l : partitions(s)) parts.push_back(l);
  // the order check happens up front so a guard error is not buried in a worker
  for (auto& l : parts) {
    Int order = 1;
    for (int e : l) order *= ipow(p, e);
    check_size(order, o.check.guard);
  }
  t.rows.resize(parts.size());
  parallel_for(parts.size(), o.workers, [&](std::size_t i) {
    RModule m = abelian_module(p_group(p, parts[i]));
    Certificate c = check({P::dual_cs_baer, strong}, m, std::nullopt, o.check);
    t.rows[i] = ClassRow{parts[i], m.name(), c.verdict,
                         strong ? parts[i].size() <= 1 : adjacent_exponents(parts[i]), hex64(certificate_hash(c))};
  });
  return t;
}

std::size_t MixedTable::mismatches() const {
  return std::count_if(rows.begin(), rows.end(), [](const MixedRow& r) { return r.verdict != r.predicate; });
}

json MixedTable::to_json() const {
  json out = json::array();
  for (auto& r : rows)
    out.push_back(json{{"module", r.module}, {"order", r.order}, {"verdict", r.verdict}, {"predicate", r.predicate}});
  return json{{"max_order", max_order}, {"rows", out}, {"mismatches", mismatches()}};
}

std::string MixedTable::table() const {
  std::vector<std::vector<std::string>> t{{"module", "order", "verdict", "predicate", "match"}};
  for (auto& r : rows)
    t.push_back({r.module, std::to_string(r.order), yn(r.verdict), yn(r.predicate), r.verdict == r.predicate ? "yes" : "NO"});
  std::ostringstream out;
  out << aligned(t);
  out << "orders <= " << max_order << ": " << rows.size() << " groups, " << mismatches() << " mismatches\n";
  return out.str();
}

MixedTable classify_mixed(Int max_order, const SuiteOptions& o) {
  if (max_order > 1024) throw Error(ErrorCode::size_guard, "classify_mixed is limited to order 1024");
  MixedTable t{max_order, {}};
  std::vector<Vec> groups;
  for (Int n = 2; n <= max_order; ++n)
    for (auto& g : abelian_groups_of_order(n)) groups.push_back(g);
  t.rows.resize(groups.size());
  parallel_for(groups.size(), o.workers, [&](std::size_t i) {
    RModule m = abelian_module(groups[i]);
    bool pred = true;
    for (auto& [q, ex] : m.group().primary_type()) pred = pred && adjacent_exponents(ex);
    bool v = check({P::dual_cs_baer, false}, m, std::nullopt, o.check).verdict;
    t.rows[i] = MixedRow{m.name(), m.order(), v, pred};
  });
  return t;
}

}  // namespace modlab
