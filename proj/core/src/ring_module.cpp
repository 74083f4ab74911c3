#include "modlab/ring_module.hpp"

#include <algorithm>
#include <set>

#include "arith.hpp"

namespace modlab {

using detail::mod;

Validation validate_module(const FiniteAbelianGroup& group, const RingContext& ctx,
                           const std::vector<Vec>& matrices) {
  Validation v;
  std::set<std::string> seen;
  for (auto& l : ctx.labels)
    if (!seen.insert(l).second) v.problems.push_back("duplicate label '" + l + "'");
  if (matrices.size() != ctx.labels.size())
    v.problems.push_back("expected " + std::to_string(ctx.labels.size()) + " action matrices, got " +
                         std::to_string(matrices.size()));
  std::size_t k = group.rank();
  const Vec& d = group.orders();
  for (std::size_t a = 0; a < matrices.size() && a < ctx.labels.size(); ++a) {
    const Vec& m = matrices[a];
    const std::string& label = ctx.labels[a];
    if (m.size() != k * k) {
      v.problems.push_back("action '" + label + "' must be " + std::to_string(k) + "x" + std::to_string(k));
      continue;
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (mod(static_cast<detail::i128>(m[i * k + j]) * d[j], d[i]) != 0)
          v.problems.push_back("action '" + label + "' entry (" + std::to_string(i) + "," + std::to_string(j) +
                               ") = " + std::to_string(m[i * k + j]) + " is not well defined: times " +
                               std::to_string(d[j]) + " is nonzero mod " + std::to_string(d[i]));
  }
  v.ok = v.problems.empty();
  return v;
}

RModule RModule::abelian(FiniteAbelianGroup group, std::string name) {
  return RModule(std::move(name), RingContext{}, std::move(group), {});
}

RModule::RModule(std::string name, RingContext ctx, FiniteAbelianGroup group, std::vector<GroupHom> actions)
    : name_(std::move(name)), ctx_(std::move(ctx)), group_(std::move(group)), actions_(std::move(actions)) {
  std::vector<Vec> mats;
  for (auto& a : actions_) {
    if (!(a.domain() == group_) || !(a.codomain() == group_))
      throw Error(ErrorCode::malformed_input, "action is not an endomorphism of " + group_.to_string());
    mats.push_back(a.matrix());
  }
  auto v = validate_module(group_, ctx_, mats);
  if (!v.ok) throw Error(ErrorCode::malformed_input, v.problems.front());
  scalar_ = std::all_of(actions_.begin(), actions_.end(), [](const GroupHom& a) { return a.as_scalar().has_value(); });
}

bool RModule::is_submodule(const Subgroup& s) const {
  if (!(s.ambient() == group_)) throw Error(ErrorCode::ambient_mismatch, "subgroup of a different group");
  if (scalar_) return true;
  auto gens = s.generators();
  for (auto& a : actions_)
    for (auto& x : gens)
      if (!s.contains(a.apply(x))) return false;
  return true;
}

Subgroup RModule::generated(std::span<const Vec> generators) const {
  Subgroup s = canonicalize(generators, group_);
  if (scalar_) return s;
  while (true) {
    std::vector<Vec> gens = s.generators();
    std::size_t base = gens.size();
    for (std::size_t i = 0; i < base; ++i)
      for (auto& a : actions_) gens.push_back(a.apply(gens[i]));
    Subgroup t = canonicalize(gens, group_);
    if (t == s) return s;
    s = std::move(t);
  }
}

Subgroup RModule::cyclic(std::span<const Int> x) const {
  std::vector<Vec> g{Vec(x.begin(), x.end())};
  return generated(g);
}

bool RModule::is_hom_to(const GroupHom& f, const RModule& target) const {
  if (!(f.domain() == group_) || !(f.codomain() == target.group_)) return false;
  if (!(ctx_ == target.ctx_)) return false;
  for (std::size_t a = 0; a < actions_.size(); ++a)
    if (!(compose(f, actions_[a]) == compose(target.actions_[a], f))) return false;
  return true;
}

RModule RModule::renamed(std::string name) const {
  RModule m = *this;
  m.name_ = std::move(name);
  return m;
}

void require_same_context(const RModule& a, const RModule& b) {
  if (!(a.context() == b.context()))
    throw Error(ErrorCode::context_mismatch,
                "ring contexts differ: '" + a.context().name + "' vs '" + b.context().name + "'");
}

// ---------------------------------------------------------------------------

HomSet::HomSet(const RModule& domain, const RModule& codomain)
    : domain_(domain), codomain_(codomain), coords_(domain.group(), codomain.group()) {
  require_same_context(domain, codomain);
  const FiniteAbelianGroup& h = coords_.group();
  const auto& am = domain.actions();
  const auto& an = codomain.actions();
  bool trivial = am.empty();
  if (!trivial && domain.scalar_actions() && codomain.scalar_actions()) {
    // h*a = b*h holds for every h exactly when (a - b) kills Hom_Z(M, N).
    trivial = true;
    for (std::size_t l = 0; l < am.size() && trivial; ++l) {
      Int a = *am[l].as_scalar(), b = *an[l].as_scalar();
      for (std::size_t idx = 0; idx < h.rank(); ++idx)
        if (mod(static_cast<detail::i128>(a - b), h.orders()[idx]) != 0) trivial = false;
    }
  }
  if (trivial) {
    sub_ = whole_group(h);
    return;
  }
  // Phi(h) = (h rho_M(g) - rho_N(g) h) over all labels; Hom_R is its kernel,
  // taken one label and one output row at a time so no target order overflows.
  std::size_t n = codomain.group().rank(), m = domain.group().rank();
  std::vector<GroupHom> us;
  for (std::size_t c = 0; c < h.rank(); ++c) us.push_back(coords_.to_hom(h.basis_vector(c)));
  sub_ = whole_group(h);
  for (std::size_t l = 0; l < am.size(); ++l) {
    std::vector<GroupHom> diffs;
    for (auto& u : us) diffs.push_back(compose(u, am[l]) + (-compose(an[l], u)));
    for (std::size_t i = 0; i < n; ++i) {
      FiniteAbelianGroup target(Vec(m, codomain.group().orders()[i]));
      std::vector<Vec> images;
      bool zero = true;
      for (auto& d : diffs) {
        Vec row(d.matrix().begin() + i * m, d.matrix().begin() + (i + 1) * m);
        for (Int v : row) zero = zero && v == 0;
        images.push_back(std::move(row));
      }
      if (!zero) sub_ = meet(sub_, kernel(GroupHom::from_images(h, target, images)));
    }
  }
}

std::vector<GroupHom> HomSet::generators() const {
  std::vector<GroupHom> out;
  for (auto& g : sub_.generators()) out.push_back(coords_.to_hom(g));
  return out;
}

bool HomSet::contains(const GroupHom& f) const { return domain_.is_hom_to(f, codomain_); }

GroupHom HomSet::random(std::mt19937_64& rng) const {
  const FiniteAbelianGroup& h = coords_.group();
  Vec c = h.zero();
  std::size_t k = h.rank();
  for (std::size_t i = 0; i < k; ++i) {
    Int lim = h.orders()[i] / sub_.pivot(i);
    if (lim <= 1) continue;
    Int t = static_cast<Int>(rng() % static_cast<std::uint64_t>(lim));
    c = h.add(c, h.scale(t, sub_.row(i)));
  }
  return coords_.to_hom(c);
}

std::vector<GroupHom> HomSet::elements(Int guard) const {
  check_size(sub_.cardinality(), guard);
  std::vector<GroupHom> out;
  out.reserve(static_cast<std::size_t>(sub_.cardinality()));
  sub_.for_each_element([&](const Vec& c) { out.push_back(coords_.to_hom(c)); });
  std::sort(out.begin(), out.end());
  return out;
}

void HomSet::for_each(const std::function<void(const GroupHom&)>& fn) const {
  sub_.for_each_element([&](const Vec& c) { fn(coords_.to_hom(c)); });
}

// ---------------------------------------------------------------------------

std::vector<Subgroup> r_submodules(const RModule& m, Int guard) {
  check_size(m.order(), guard);
  std::vector<Subgroup> out;
  for_each_submodule(m, [&](const Subgroup& s) {
    out.push_back(s);
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

void for_each_submodule(const RModule& m, const std::function<bool(const Subgroup&)>& fn) {
  if (m.scalar_actions()) {
    for_each_subgroup(m.group(), fn);
    return;
  }
  for_each_subgroup(m.group(), [&](const Subgroup& s) { return m.is_submodule(s) ? fn(s) : true; });
}

DirectSum direct_sum(const std::vector<RModule>& parts) {
  RingContext ctx = parts.empty() ? RingContext{} : parts.front().context();
  for (auto& p : parts) require_same_context(parts.front(), p);
  Vec orders;
  std::string name;
  for (auto& p : parts) {
    orders.insert(orders.end(), p.group().orders().begin(), p.group().orders().end());
    name += (name.empty() ? "" : "+") + (p.name().empty() ? p.group().to_string() : p.name());
  }
  FiniteAbelianGroup g(orders);
  std::size_t k = g.rank();
  std::vector<GroupHom> actions;
  for (std::size_t l = 0; l < ctx.labels.size(); ++l) {
    Vec mat(k * k, 0);
    std::size_t off = 0;
    for (auto& p : parts) {
      std::size_t r = p.group().rank();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) mat[(off + i) * k + off + j] = p.actions()[l].entry(i, j);
      off += r;
    }
    actions.emplace_back(g, g, std::move(mat));
  }
  DirectSum out{RModule(name, ctx, g, std::move(actions)), {}, {}};
  std::size_t off = 0;
  for (auto& p : parts) {
    std::size_t r = p.group().rank();
    Vec inj(k * r, 0), proj(r * k, 0);
    for (std::size_t i = 0; i < r; ++i) {
      inj[(off + i) * r + i] = 1;
      proj[i * k + off + i] = 1;
    }
    out.injections.emplace_back(p.group(), g, std::move(inj));
    out.projections.emplace_back(g, p.group(), std::move(proj));
    off += r;
  }
  return out;
}

DirectSum direct_power(const RModule& m, std::size_t k) {
  std::vector<RModule> parts(k, m);
  DirectSum d = direct_sum(parts);
  d.sum = d.sum.renamed((m.name().empty() ? m.group().to_string() : m.name()) + "^" + std::to_string(k));
  return d;
}

Submodule as_module(const RModule& m, const Subgroup& s) {
  if (!m.is_submodule(s)) throw Error(ErrorCode::precondition, "not a submodule");
  Structure st = structure(s);
  FiniteAbelianGroup g(st.orders);
  GroupHom inc = GroupHom::from_images(g, m.group(), st.generators);
  std::vector<GroupHom> actions;
  for (auto& a : m.actions()) {
    std::vector<Vec> cols;
    for (auto& x : st.generators) cols.push_back(*solve(inc, a.apply(x)));
    actions.push_back(GroupHom::from_images(g, g, cols));
  }
  return {RModule(m.name() + "|sub", m.context(), g, std::move(actions)), inc};
}

QuotientModule quotient_module(const RModule& m, const Subgroup& k) {
  if (!m.is_submodule(k)) throw Error(ErrorCode::precondition, "not a submodule");
  Quotient q = quotient(k);
  std::vector<GroupHom> actions;
  for (auto& a : m.actions()) {
    std::vector<Vec> cols;
    for (auto& l : q.lifts) cols.push_back(q.projection.apply(a.apply(l)));
    actions.push_back(GroupHom::from_images(q.group, q.group, cols));
  }
  return {RModule(m.name() + "/sub", m.context(), q.group, std::move(actions)), q.projection};
}

Recoordinated to_canonical_coordinates(const RModule& m) {
  QuotientModule q = quotient_module(m, zero_subgroup(m.group()));
  return {q.module.renamed(m.name()), q.projection};
}

AbelianEndCertificate end_ring_is_abelian(const RModule& m, Int guard) {
  HomSet end(m, m);
  auto all = end.elements(guard);
  auto gens = end.generators();
  AbelianEndCertificate cert;
  for (auto& e : all) {
    if (!(compose(e, e) == e)) continue;
    cert.idempotents.push_back(e);
    for (auto& f : gens)
      if (!(compose(e, f) == compose(f, e))) {
        cert.abelian = false;
        cert.witness = std::make_pair(e, f);
        cert.idempotents.clear();
        return cert;
      }
  }
  return cert;
}

}  // namespace modlab
