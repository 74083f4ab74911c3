#include "modlab/properties.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_set>

namespace modlab {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Ids and flags

namespace {

struct IdInfo {
  PropertyId id;
  const char* name;
  Variant variant;
  bool relative;
  std::optional<PropertyId> dual;  // set on the "primal" side only
};

const std::vector<IdInfo>& id_table() {
  using P = PropertyId;
  using V = Variant;
  static const std::vector<IdInfo> t{
      {P::extending, "extending", V::strong, false, P::lifting},
      {P::lifting, "lifting", V::strong, false, {}},
      {P::rickart, "rickart", V::strong, true, P::dual_rickart},
      {P::dual_rickart, "dual_rickart", V::strong, true, {}},
      {P::baer, "baer", V::strong, true, P::dual_baer},
      {P::dual_baer, "dual_baer", V::strong, true, {}},
      {P::cs_rickart, "cs_rickart", V::strong, true, P::dual_cs_rickart},
      {P::dual_cs_rickart, "dual_cs_rickart", V::strong, true, {}},
      {P::cs_baer, "cs_baer", V::strong, true, P::dual_cs_baer},
      {P::dual_cs_baer, "dual_cs_baer", V::strong, true, {}},
      {P::regular, "regular", V::strong, true, {}},
      {P::weak_duo, "weak_duo", V::none, false, {}},
      {P::sip, "sip", V::strict, false, P::ssp},
      {P::ssip, "ssip", V::strict, false, P::sssp},
      {P::ssp, "ssp", V::strict, false, {}},
      {P::sssp, "sssp", V::strict, false, {}},
      {P::sip_extending, "sip_extending", V::strict, false, P::ssp_lifting},
      {P::ssip_extending, "ssip_extending", V::strict, false, P::sssp_lifting},
      {P::esip, "esip", V::strict, false, P::lssp},
      {P::essip, "essip", V::strict, false, P::lsssp},
      {P::ssp_lifting, "ssp_lifting", V::strict, false, {}},
      {P::sssp_lifting, "sssp_lifting", V::strict, false, {}},
      {P::lssp, "lssp", V::strict, false, {}},
      {P::lsssp, "lsssp", V::strict, false, {}},
      {P::k_nonsingular, "k_nonsingular", V::none, true, P::t_nonsingular},
      {P::t_nonsingular, "t_nonsingular", V::none, true, {}},
      {P::e_k_nonsingular, "e_k_nonsingular", V::none, true, P::l_t_nonsingular},
      {P::e_k_cononsingular, "e_k_cononsingular", V::none, true, P::l_t_cononsingular},
      {P::l_t_nonsingular, "l_t_nonsingular", V::none, true, {}},
      {P::l_t_cononsingular, "l_t_cononsingular", V::none, true, {}},
  };
  return t;
}

const IdInfo& info(PropertyId id) { return id_table()[static_cast<std::size_t>(id)]; }

}  // namespace

const std::vector<PropertyId>& all_property_ids() {
  static const std::vector<PropertyId> ids = [] {
    std::vector<PropertyId> v;
    for (auto& i : id_table()) v.push_back(i.id);
    return v;
  }();
  return ids;
}

std::string_view to_string(PropertyId id) { return info(id).name; }

std::optional<PropertyId> parse_property_id(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '-', '_');
  for (auto& i : id_table())
    if (n == i.name) return i.id;
  return std::nullopt;
}

Variant variant_of(PropertyId id) { return info(id).variant; }
bool is_relative(PropertyId id) { return info(id).relative; }
std::optional<PropertyId> dual_of(PropertyId id) { return info(id).dual; }

Property make_property(PropertyId id, bool strong) {
  if (strong && variant_of(id) == Variant::none)
    throw Error(ErrorCode::invalid_property, std::string(to_string(id)) + " has no strong or strict version");
  return Property{id, strong};
}

Property make_property(std::string_view name, bool strong, bool strict, bool dual) {
  auto id = parse_property_id(name);
  if (!id) throw Error(ErrorCode::invalid_property, "unknown property '" + std::string(name) + "'");
  if (dual) {
    auto d = dual_of(*id);
    if (!d) throw Error(ErrorCode::invalid_property, std::string(to_string(*id)) + " has no dual in the catalogue");
    id = *d;
  }
  if (strong && strict) throw Error(ErrorCode::invalid_property, "--strong and --strict are exclusive");
  Variant v = variant_of(*id);
  if (strong && v != Variant::strong)
    throw Error(ErrorCode::invalid_property, std::string(to_string(*id)) + " has no strong version");
  if (strict && v != Variant::strict)
    throw Error(ErrorCode::invalid_property, std::string(to_string(*id)) + " has no strict version");
  return Property{*id, strong || strict};
}

std::string to_string(const Property& p) {
  std::string s(to_string(p.id));
  if (!p.strong) return s;
  return (variant_of(p.id) == Variant::strict ? "strict " : "strong ") + s;
}

// ---------------------------------------------------------------------------
// JSON encodings

json json_int(Int v) {
  constexpr Int limit = Int{1} << 53;
  if (v > limit || v < -limit) return std::to_string(v);
  return v;
}

Int int_from_json(const json& j) {
  if (j.is_string()) return std::stoll(j.get<std::string>());
  if (!j.is_number_integer()) throw Error(ErrorCode::parse_error, "expected an integer");
  return j.get<Int>();
}

json to_json(const Subgroup& s) {
  json rows = json::array();
  for (auto& g : s.generators()) {
    json r = json::array();
    for (Int v : g) r.push_back(json_int(v));
    rows.push_back(std::move(r));
  }
  return rows;
}

json to_json(const GroupHom& f) {
  json m = json::array();
  for (Int v : f.matrix()) m.push_back(json_int(v));
  return m;
}

Subgroup subgroup_from_json(const json& j, const FiniteAbelianGroup& ambient) {
  if (!j.is_array()) throw Error(ErrorCode::parse_error, "subgroup: expected a list of generators");
  std::vector<Vec> gens;
  for (auto& row : j) {
    if (!row.is_array() || row.size() != ambient.rank()) throw Error(ErrorCode::parse_error, "subgroup: bad generator");
    Vec v;
    for (auto& x : row) v.push_back(int_from_json(x));
    gens.push_back(ambient.reduce(std::move(v)));
  }
  return canonicalize(gens, ambient);
}

GroupHom hom_from_json(const json& j, const FiniteAbelianGroup& dom, const FiniteAbelianGroup& cod) {
  if (!j.is_array() || j.size() != dom.rank() * cod.rank()) throw Error(ErrorCode::parse_error, "map: bad matrix");
  Vec m;
  for (auto& x : j) m.push_back(int_from_json(x));
  return GroupHom(dom, cod, std::move(m));
}

// ---------------------------------------------------------------------------
// Z-linear witness maps

namespace {

// Invariant factors of `small` pair off, largest with largest, against `big`.
std::optional<std::vector<std::size_t>> fit(const Vec& small, const Vec& big) {
  std::vector<std::size_t> si(small.size()), bi(big.size());
  std::iota(si.begin(), si.end(), 0);
  std::iota(bi.begin(), bi.end(), 0);
  std::stable_sort(si.begin(), si.end(), [&](auto a, auto b) { return small[a] > small[b]; });
  std::stable_sort(bi.begin(), bi.end(), [&](auto a, auto b) { return big[a] > big[b]; });
  if (si.size() > bi.size()) return std::nullopt;
  std::vector<std::size_t> match(small.size());
  for (std::size_t t = 0; t < si.size(); ++t) {
    if (big[bi[t]] % small[si[t]] != 0) return std::nullopt;
    match[si[t]] = bi[t];
  }
  return match;
}

// M as sum of cyclic groups on `st.generators`; the inverse coordinates.
GroupHom coordinates_in(const FiniteAbelianGroup& m, const Structure& st) {
  FiniteAbelianGroup cg(st.orders);
  GroupHom inc = GroupHom::from_images(cg, m, st.generators);
  std::vector<Vec> cols;
  for (std::size_t j = 0; j < m.rank(); ++j) {
    auto c = solve(inc, m.basis_vector(j));
    if (!c) throw std::logic_error("coordinates_in: generators do not span");
    cols.push_back(cg.reduce(*c));
  }
  return GroupHom::from_images(m, cg, cols);
}

}  // namespace

std::optional<GroupHom> map_with_kernel(const FiniteAbelianGroup& m, const FiniteAbelianGroup& n, const Subgroup& x) {
  if (!(x.ambient() == m)) throw Error(ErrorCode::ambient_mismatch, "map_with_kernel: X lives elsewhere");
  Quotient q = quotient(x);
  Structure sn = structure(whole_group(n));
  auto match = fit(q.group.orders(), sn.orders);
  if (!match) return std::nullopt;
  std::vector<Vec> images;
  for (std::size_t i = 0; i < q.group.rank(); ++i) {
    std::size_t t = (*match)[i];
    images.push_back(n.scale(sn.orders[t] / q.group.orders()[i], sn.generators[t]));
  }
  GroupHom f = compose(GroupHom::from_images(q.group, n, images), q.projection);
  if (!(kernel(f) == x)) throw std::logic_error("map_with_kernel: construction failed");
  return f;
}

std::optional<GroupHom> map_onto(const FiniteAbelianGroup& m, const Subgroup& y) {
  Structure sm = structure(whole_group(m));
  Structure sy = structure(y);
  auto match = fit(sy.orders, sm.orders);
  if (!match) return std::nullopt;
  const auto& n = y.ambient();
  std::vector<Vec> images(sm.orders.size(), n.zero());
  for (std::size_t i = 0; i < sy.orders.size(); ++i) images[(*match)[i]] = sy.generators[i];
  GroupHom f = compose(GroupHom::from_images(FiniteAbelianGroup(sm.orders), n, images), coordinates_in(m, sm));
  if (!(image(f) == y)) throw std::logic_error("map_onto: construction failed");
  return f;
}

// ---------------------------------------------------------------------------
// l_U, r_M and their primes

namespace {

// c -> (phi(f_c(v)))_v over the listed vectors, as a map from the coordinate group.
GroupHom evaluation(const HomSet& u, const std::vector<Vec>& vs, const GroupHom& phi) {
  const auto& cg = u.coordinates().group();
  Vec orders;
  for (std::size_t i = 0; i < vs.size(); ++i)
    orders.insert(orders.end(), phi.codomain().orders().begin(), phi.codomain().orders().end());
  FiniteAbelianGroup target(orders);
  std::vector<Vec> cols;
  for (std::size_t t = 0; t < cg.rank(); ++t) {
    GroupHom f = u.hom_at(cg.basis_vector(t));
    Vec col;
    for (auto& v : vs) {
      Vec w = phi.apply(f.apply(v));
      col.insert(col.end(), w.begin(), w.end());
    }
    cols.push_back(std::move(col));
  }
  return GroupHom::from_images(cg, target, cols);
}

void require_in_U(const HomSet& u, const Subgroup& z) {
  if (!(z.ambient() == u.coordinates().group()))
    throw Error(ErrorCode::ambient_mismatch, "Z is not a set of maps M -> N");
  if (!is_subset(z, u.subgroup())) throw Error(ErrorCode::precondition, "Z is not contained in Hom(M, N)");
}

}  // namespace

Subgroup l_U(const HomSet& u, const Subgroup& x) {
  const auto& m = u.domain().group();
  if (!(x.ambient() == m)) throw Error(ErrorCode::ambient_mismatch, "X is not a subobject of M");
  auto gens = x.generators();
  if (gens.empty()) return u.subgroup();
  GroupHom e = evaluation(u, gens, GroupHom::identity(u.codomain().group()));
  return meet(kernel(e), u.subgroup());
}

Subgroup r_M(const HomSet& u, const Subgroup& z) {
  require_in_U(u, z);
  Subgroup out = whole_group(u.domain().group());
  for (auto& g : z.generators()) out = meet(out, kernel(u.hom_at(g)));
  return out;
}

Subgroup l_U_prime(const HomSet& u, const Subgroup& y) {
  const auto& n = u.codomain().group();
  if (!(y.ambient() == n)) throw Error(ErrorCode::ambient_mismatch, "Y is not a subobject of N");
  const auto& m = u.domain().group();
  if (m.rank() == 0) return u.subgroup();
  std::vector<Vec> basis;
  for (std::size_t j = 0; j < m.rank(); ++j) basis.push_back(m.basis_vector(j));
  GroupHom e = evaluation(u, basis, quotient(y).projection);
  return meet(kernel(e), u.subgroup());
}

Subgroup r_N_prime(const HomSet& u, const Subgroup& z) {
  require_in_U(u, z);
  Subgroup out = zero_subgroup(u.codomain().group());
  for (auto& g : z.generators()) out = join(out, image(u.hom_at(g)));
  return out;
}

// ---------------------------------------------------------------------------
// Workbench

namespace {

bool compute_z_linear(const RModule& m, const RModule& n) {
  if (!m.scalar_actions() || !n.scalar_actions()) return false;
  Int g = std::gcd(m.group().exponent(), n.group().exponent());
  for (std::size_t l = 0; l < m.actions().size(); ++l) {
    auto a = m.actions()[l].as_scalar();
    auto b = n.actions()[l].as_scalar();
    if (!a || !b) return false;
    if ((*a - *b) % g != 0) return false;
  }
  return true;
}

// Bounded list plus a count of everything offered.
struct Entries {
  std::size_t cap;
  json items = json::array();
  std::size_t total = 0;
  explicit Entries(std::size_t c) : cap(c) {}
  bool room() const { return cap == 0 || items.size() < cap; }
  void add(json j) {
    ++total;
    if (room()) items.push_back(std::move(j));
  }
  json finish() const { return json{{"entries", items}, {"total", total}, {"truncated", total > items.size()}}; }
};

json summand_entry(Analysis& a, const Subgroup& k) {
  return json{{"k", to_json(k)}, {"complement", to_json(*a.complement(k))}};
}

json maps_json(const std::vector<GroupHom>& fs) {
  json out = json::array();
  for (auto& f : fs) out.push_back(to_json(f));
  return out;
}

bool summand_ok(Analysis& a, const Subgroup& k, bool strong) {
  return a.is_summand(k) && (!strong || a.is_fully_invariant(k));
}

// Submodules of M containing x (via M/x) or contained in y (via y as a module).
void for_each_above(Analysis& a, const Subgroup& x, const std::function<bool(const Subgroup&)>& fn) {
  auto q = quotient_module(a.module(), x);
  for_each_submodule(q.module, [&](const Subgroup& s) { return fn(preimage(q.projection, s)); });
}
void for_each_below(Analysis& a, const Subgroup& y, const std::function<bool(const Subgroup&)>& fn) {
  auto sub = as_module(a.module(), y);
  for_each_submodule(sub.module, [&](const Subgroup& s) { return fn(image_of(sub.inclusion, s)); });
}

// Every (fully invariant) summand that could have enclosed x; the checker
// confirms each one fails.
json envelope_candidates(Analysis& a, const Subgroup& x, std::size_t cap) {
  Entries e(cap);
  std::vector<Subgroup> found;
  for_each_above(a, x, [&](const Subgroup& d) {
    if (a.is_summand(d)) found.push_back(d);
    return true;
  });
  std::sort(found.begin(), found.end());
  for (auto& d : found) e.add(json{{"summand", to_json(d)}, {"complement", to_json(*a.complement(d))}});
  return e.finish();
}

json above_candidates(Analysis& a, const Subgroup& y, std::size_t cap) {
  Entries e(cap);
  std::vector<Subgroup> found;
  for_each_below(a, y, [&](const Subgroup& k) {
    if (a.is_summand(k)) found.push_back(k);
    return true;
  });
  std::sort(found.begin(), found.end());
  for (auto& k : found) e.add(json{{"summand", to_json(k)}, {"complement", to_json(*a.complement(k))}});
  return e.finish();
}

}  // namespace

Workbench::Workbench(RModule m, std::optional<RModule> n, CheckOptions opts)
    : opts_(opts), self_(!n.has_value()), src_(m, opts.route, opts.guard) {
  if (n) {
    require_same_context(m, *n);
    tgt_.emplace(*n, opts.route, opts.guard);
  }
  z_linear_ = compute_z_linear(source(), target());
}

const HomSet& Workbench::homs() {
  if (!homs_) homs_.emplace(source(), target());
  return *homs_;
}

Int Workbench::hom_count() { return homs().cardinality(); }

FamilyRoute Workbench::pick_route() {
  if (route_) return *route_;
  FamilyRoute r = opts_.family_route;
  if (r == FamilyRoute::types && !z_linear_)
    throw Error(ErrorCode::precondition, "the types route needs Z-linear Hom sets");
  if (r == FamilyRoute::automatic) {
    bool small = false;
    try {
      small = hom_count() <= opts_.hom_enumeration_limit;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::size_guard) throw;
    }
    r = small ? FamilyRoute::enumerate : z_linear_ ? FamilyRoute::types : FamilyRoute::galois;
  }
  route_ = r;
  return r;
}

void Workbench::enumerate_homs() {
  if (enumerated_) return;
  check_size(hom_count(), opts_.guard);
  homs().for_each([&](const GroupHom& f) {
    kernel_rep_.emplace(kernel(f), f);
    image_rep_.emplace(image(f), f);
  });
  enumerated_ = true;
}

Family Workbench::enumerate_family(bool kernels_side, bool closed) {
  enumerate_homs();
  Family out;
  out.route = "enumerate";
  for (auto& [s, f] : kernels_side ? kernel_rep_ : image_rep_) out.members.push_back(s);
  if (closed) {
    if (kernels_side) {
      out.members.push_back(whole_group(source().group()));
      out.members = meet_closure(out.members);
    } else {
      out.members.push_back(zero_subgroup(target().group()));
      out.members = join_closure(out.members);
    }
  }
  return out;
}

// Fixed points of X -> r_M(l_U(X)) (Y -> r'_N(l'_U(Y))) over the lattice.
Family Workbench::galois_family(bool kernels_side) {
  Family out;
  out.route = "galois";
  const HomSet& u = homs();
  auto& a = kernels_side ? src_ : tgt();
  for_each_submodule(a.module(), [&](const Subgroup& x) {
    Subgroup c = kernels_side ? r_M(u, l_U(u, x)) : r_N_prime(u, l_U_prime(u, x));
    if (c == x) out.members.push_back(x);
    return true;
  });
  std::sort(out.members.begin(), out.members.end());
  return out;
}

Family Workbench::types_family(bool kernels_side, bool closed) {
  Family out;
  out.route = "types";
  if (self_) {
    // Over Z every quotient of a finite M embeds in M and every subgroup is a quotient.
    out.everything = true;
    return out;
  }
  const auto& mg = source().group();
  const auto& ng = target().group();
  if (kernels_side) {
    Structure sn = structure(whole_group(ng));
    for_each_submodule(source(), [&](const Subgroup& x) {
      if (fit(quotient(x).group.orders(), sn.orders)) out.members.push_back(x);
      return true;
    });
  } else {
    Structure sm = structure(whole_group(mg));
    for_each_submodule(target(), [&](const Subgroup& y) {
      if (fit(structure(y).orders, sm.orders)) out.members.push_back(y);
      return true;
    });
  }
  std::sort(out.members.begin(), out.members.end());
  if (closed) {
    if (kernels_side) {
      out.members.push_back(whole_group(mg));
      out.members = meet_closure(out.members);
    } else {
      out.members.push_back(zero_subgroup(ng));
      out.members = join_closure(out.members);
    }
  }
  return out;
}

const Family& Workbench::kernels() {
  if (!kernels_) {
    FamilyRoute r = pick_route();
    // Single kernels are not Galois-closed; fall back to enumeration.
    kernels_ = r == FamilyRoute::types ? types_family(true, false) : enumerate_family(true, false);
  }
  return *kernels_;
}

const Family& Workbench::images() {
  if (!images_) {
    FamilyRoute r = pick_route();
    images_ = r == FamilyRoute::types ? types_family(false, false) : enumerate_family(false, false);
  }
  return *images_;
}

const Family& Workbench::kernel_meets() {
  if (!kernel_meets_) {
    switch (pick_route()) {
      case FamilyRoute::enumerate: kernel_meets_ = enumerate_family(true, true); break;
      case FamilyRoute::types: kernel_meets_ = types_family(true, true); break;
      default: kernel_meets_ = galois_family(true);
    }
  }
  return *kernel_meets_;
}

const Family& Workbench::image_joins() {
  if (!image_joins_) {
    switch (pick_route()) {
      case FamilyRoute::enumerate: image_joins_ = enumerate_family(false, true); break;
      case FamilyRoute::types: image_joins_ = types_family(false, true); break;
      default: image_joins_ = galois_family(false);
    }
  }
  return *image_joins_;
}

std::vector<GroupHom> Workbench::kernel_family(const Subgroup& x) {
  if (x == whole_group(source().group())) return {};
  auto it = kernel_rep_.find(x);
  if (it != kernel_rep_.end()) return {it->second};
  if (z_linear_)
    if (auto f = map_with_kernel(source().group(), target().group(), x)) return {*f};
  const HomSet& u = homs();
  std::vector<GroupHom> out;
  Subgroup m = whole_group(source().group());
  for (auto& g : l_U(u, x).generators()) {
    out.push_back(u.hom_at(g));
    m = meet(m, kernel(out.back()));
  }
  if (!(m == x)) throw Error(ErrorCode::precondition, "not a meet of kernels");
  return out;
}

std::vector<GroupHom> Workbench::image_family(const Subgroup& y) {
  if (y.is_zero()) return {};
  auto it = image_rep_.find(y);
  if (it != image_rep_.end()) return {it->second};
  if (z_linear_) {
    auto f = map_onto(source().group(), y);
    if (f) return {*f};
  }
  const HomSet& u = homs();
  std::vector<GroupHom> out;
  Subgroup s = zero_subgroup(target().group());
  for (auto& g : l_U_prime(u, y).generators()) {
    out.push_back(u.hom_at(g));
    s = join(s, image(out.back()));
  }
  if (!(s == y)) throw Error(ErrorCode::precondition, "not a join of images");
  return out;
}

void Workbench::for_each(const Family& f, bool in_source, const std::function<bool(const Subgroup&)>& fn) {
  if (f.everything) {
    for_each_submodule(in_source ? source() : target(), fn);
    return;
  }
  for (auto& s : f.members)
    if (!fn(s)) return;
}

// ---------------------------------------------------------------------------
// The checks

namespace {

struct Ctx {
  Workbench& w;
  const Property& p;
  std::size_t cap;
};

using P = PropertyId;

json family_header(const Family& f, const char* which) {
  return json{{"family", which}, {"route", f.route}, {"everything", f.everything}};
}

// Every member of a family (in M) essential in a (fully invariant) summand.
Certificate envelope_all(Ctx c, const Family& fam, const char* which, bool kernel_side) {
  Certificate out;
  Analysis& a = c.w.src();
  Entries e(c.cap);
  std::optional<Subgroup> bad;
  c.w.for_each(fam, true, [&](const Subgroup& x) {
    auto d = a.envelope(x, c.p.strong);
    if (!d) {
      bad = x;
      return false;
    }
    e.add(json{{"x", to_json(x)}, {"summand", to_json(*d)}, {"complement", to_json(*a.complement(*d))}});
    return true;
  });
  out.witness = family_header(fam, which);
  if (bad) {
    out.verdict = false;
    out.witness["kind"] = "no_envelope";
    out.witness["x"] = to_json(*bad);
    if (kernel_side) out.witness["maps"] = maps_json(c.w.kernel_family(*bad));
    out.witness["candidates"] = envelope_candidates(a, *bad, c.cap);
  } else {
    out.verdict = true;
    out.witness["kind"] = "envelopes";
    out.witness["list"] = e.finish();
  }
  return out;
}

// Every member of a family (in N) lies above a (fully invariant) summand of N.
Certificate above_all(Ctx c, const Family& fam, const char* which, bool image_side) {
  Certificate out;
  Analysis& a = c.w.tgt();
  Entries e(c.cap);
  std::optional<Subgroup> bad;
  c.w.for_each(fam, false, [&](const Subgroup& y) {
    auto k = a.lies_above_summand(y, c.p.strong);
    if (!k) {
      bad = y;
      return false;
    }
    e.add(json{{"y", to_json(y)}, {"summand", to_json(*k)}, {"complement", to_json(*a.complement(*k))}});
    return true;
  });
  out.witness = family_header(fam, which);
  if (bad) {
    out.verdict = false;
    out.witness["kind"] = "not_above";
    out.witness["y"] = to_json(*bad);
    if (image_side) out.witness["maps"] = maps_json(c.w.image_family(*bad));
    out.witness["candidates"] = above_candidates(a, *bad, c.cap);
  } else {
    out.verdict = true;
    out.witness["kind"] = "above";
    out.witness["list"] = e.finish();
  }
  return out;
}

// Every member a (fully invariant) summand; in_source picks M or N.
Certificate summand_all(Ctx c, const Family& fam, const char* which, bool in_source, int family_side) {
  Certificate out;
  Analysis& a = in_source ? c.w.src() : c.w.tgt();
  Entries e(c.cap);
  std::optional<Subgroup> bad;
  c.w.for_each(fam, in_source, [&](const Subgroup& x) {
    if (!summand_ok(a, x, c.p.strong)) {
      bad = x;
      return false;
    }
    e.add(summand_entry(a, x));
    return true;
  });
  out.witness = family_header(fam, which);
  if (bad) {
    out.verdict = false;
    out.witness["kind"] = "not_summand";
    out.witness["x"] = to_json(*bad);
    if (family_side == 1) out.witness["maps"] = maps_json(c.w.kernel_family(*bad));
    if (family_side == 2) out.witness["maps"] = maps_json(c.w.image_family(*bad));
    if (auto t = a.complement(*bad)) {
      // a summand that is not fully invariant
      auto fail = a.invariance_failure(*bad);
      out.witness["complement"] = to_json(*t);
      out.witness["map"] = to_json(fail->map);
      out.witness["element"] = to_json(cyclic_subgroup(a.group(), fail->element));
      out.witness["element_vector"] = json::array();
      for (Int v : fail->element) out.witness["element_vector"].push_back(json_int(v));
    }
  } else {
    out.verdict = true;
    out.witness["kind"] = "summands";
    out.witness["list"] = e.finish();
  }
  return out;
}

const std::vector<Subgroup>& all_subs(Analysis& a) { return a.submodules(); }

// Meets (joins) of two members of base, or of arbitrary subfamilies when
// `family` is set. A base equal to the whole lattice is already closed.
std::vector<Subgroup> combine(Analysis& a, const std::vector<Subgroup>& base, bool meets, bool family) {
  if (base.size() == all_subs(a).size()) return base;
  if (family) {
    auto with_empty = base;
    with_empty.push_back(meets ? whole_group(a.group()) : zero_subgroup(a.group()));
    return meets ? meet_closure(with_empty) : join_closure(with_empty);
  }
  std::unordered_set<Subgroup, SubgroupHash> seen;
  std::vector<Subgroup> out;
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = i; j < base.size(); ++j) {
      Subgroup s = meets ? meet(base[i], base[j]) : join(base[i], base[j]);
      if (seen.insert(s).second) out.push_back(std::move(s));
    }
  std::sort(out.begin(), out.end());
  return out;
}

// Members of base whose meet (join) is s: all those containing (contained in) s,
// or a single pair when only pairs are allowed.
std::vector<Subgroup> origin(const std::vector<Subgroup>& base, const Subgroup& s, bool meets, bool family) {
  std::vector<Subgroup> out;
  for (auto& b : base)
    if (meets ? is_subset(s, b) : is_subset(b, s)) out.push_back(b);
  if (family) return out;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i; j < out.size(); ++j)
      if ((meets ? meet(out[i], out[j]) : join(out[i], out[j])) == s) return {out[i], out[j]};
  throw std::logic_error("origin: no generating pair");
}

enum class Goal { summand, envelope, above };

// SIP-type checks: combine the base family, then require each result to be a
// (fully invariant) summand, to have an envelope, or to lie above a summand.
Certificate summand_family(Ctx c, const std::vector<Subgroup>& base, const char* base_name, bool meets, bool family,
                           Goal goal, const std::function<json(const Subgroup&)>& base_entry) {
  Analysis& a = c.w.src();
  auto combos = combine(a, base, meets, family);
  Certificate out;
  out.witness = json{{"family", base_name}, {"meets", meets}, {"pairs_only", !family}, {"combinations", combos.size()}};
  Entries e(c.cap);
  for (auto& s : combos) {
    std::optional<Subgroup> d;
    bool ok;
    switch (goal) {
      case Goal::summand: ok = summand_ok(a, s, c.p.strong); d = s; break;
      case Goal::envelope: d = a.envelope(s, c.p.strong); ok = d.has_value(); break;
      default: d = a.lies_above_summand(s, c.p.strong); ok = d.has_value();
    }
    if (ok) {
      e.add(json{{"x", to_json(s)}, {"summand", to_json(*d)}, {"complement", to_json(*a.complement(*d))}});
      continue;
    }
    out.verdict = false;
    out.witness["kind"] = goal == Goal::summand ? "not_summand" : goal == Goal::envelope ? "no_envelope" : "not_above";
    out.witness["x"] = to_json(s);
    json parts = json::array();
    for (auto& b : origin(base, s, meets, family)) parts.push_back(base_entry(b));
    out.witness["members"] = parts;
    if (goal == Goal::envelope) out.witness["candidates"] = envelope_candidates(a, s, c.cap);
    if (goal == Goal::above) out.witness["candidates"] = above_candidates(a, s, c.cap);
    if (goal == Goal::summand && a.is_summand(s)) {
      auto fail = a.invariance_failure(s);
      out.witness["complement"] = to_json(*a.complement(s));
      out.witness["map"] = to_json(fail->map);
      out.witness["element_vector"] = json::array();
      for (Int v : fail->element) out.witness["element_vector"].push_back(json_int(v));
    }
    return out;
  }
  out.verdict = true;
  out.witness["kind"] = "combinations";
  out.witness["list"] = e.finish();
  return out;
}

Certificate weak_duo(Ctx c) {
  Analysis& a = c.w.src();
  Certificate out;
  Entries e(c.cap);
  for (auto& k : a.summands()) {
    if (auto fail = a.invariance_failure(k)) {
      out.verdict = false;
      out.witness = json{{"kind", "not_invariant"},
                         {"k", to_json(k)},
                         {"complement", to_json(*a.complement(k))},
                         {"map", to_json(fail->map)}};
      out.witness["element_vector"] = json::array();
      for (Int v : fail->element) out.witness["element_vector"].push_back(json_int(v));
      return out;
    }
    e.add(summand_entry(a, k));
  }
  out.verdict = true;
  out.witness = json{{"kind", "summands"}, {"family", "summands"}, {"list", e.finish()}};
  return out;
}

// No nonzero map whose kernel (image) satisfies `bad`. `bad` returns the
// enclosing summand for the E-/L- variants and the ambient bound otherwise.
Certificate no_bad_map(Ctx c, bool kernel_side, const std::function<std::optional<Subgroup>(const Subgroup&)>& bad,
                       const char* what, bool with_summand) {
  Workbench& w = c.w;
  const Family& fam = kernel_side ? w.kernels() : w.images();
  Subgroup trivial = kernel_side ? whole_group(w.source().group()) : zero_subgroup(w.target().group());
  Certificate out;
  std::size_t checked = 0;
  std::optional<std::pair<Subgroup, Subgroup>> hit;
  w.for_each(fam, kernel_side, [&](const Subgroup& s) {
    if (s == trivial) return true;
    ++checked;
    if (auto why = bad(s)) {
      hit.emplace(s, *why);
      return false;
    }
    return true;
  });
  out.witness = family_header(fam, kernel_side ? "kernels" : "images");
  out.witness["condition"] = what;
  if (!hit) {
    out.verdict = true;
    out.witness["kind"] = "no_bad_map";
    out.witness["checked"] = checked;
    return out;
  }
  out.verdict = false;
  auto& [s, d] = *hit;
  auto maps = kernel_side ? w.kernel_family(s) : w.image_family(s);
  out.witness["kind"] = "bad_map";
  out.witness["map"] = to_json(maps.front());
  out.witness[kernel_side ? "kernel" : "image"] = to_json(s);
  if (with_summand) {
    Analysis& a = kernel_side ? w.src() : w.tgt();
    out.witness["summand"] = to_json(d);
    out.witness["complement"] = to_json(*a.complement(d));
  }
  return out;
}

// closure operator values per submodule: r_M l_U (kernel side) or r'_N l'_U.
Certificate cononsingular(Ctx c, bool kernel_side) {
  Workbench& w = c.w;
  Analysis& a = kernel_side ? w.src() : w.tgt();
  const auto& subs = a.submodules();
  if (static_cast<long double>(subs.size()) * subs.size() > static_cast<long double>(w.options().lattice_pairs_limit))
    throw Error(ErrorCode::size_guard, "cononsingularity: lattice too large for the pair loop");
  std::vector<Subgroup> hull(subs.size());
  bool via_homs = true;
  try {
    (void)w.homs();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::size_guard || !w.z_linear()) throw;
    via_homs = false;
  }
  if (via_homs) {
    const HomSet& u = w.homs();
    for (std::size_t i = 0; i < subs.size(); ++i)
      hull[i] = kernel_side ? r_M(u, l_U(u, subs[i])) : r_N_prime(u, l_U_prime(u, subs[i]));
  } else {
    // meet of the kernels above X (join of the images below Y)
    const Family& fam = kernel_side ? w.kernels() : w.images();
    auto member = [&](const Subgroup& s) {
      return fam.everything || std::binary_search(fam.members.begin(), fam.members.end(), s);
    };
    for (std::size_t i = 0; i < subs.size(); ++i) {
      Subgroup h = kernel_side ? whole_group(a.group()) : zero_subgroup(a.group());
      for (auto& s : subs)
        if (kernel_side ? (is_subset(subs[i], s) && member(s)) : (is_subset(s, subs[i]) && member(s)))
          h = kernel_side ? meet(h, s) : join(h, s);
      hull[i] = h;
    }
  }
  std::map<Subgroup, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < subs.size(); ++i) classes[hull[i]].push_back(i);
  Certificate out;
  std::size_t pairs = 0;
  const Subgroup& rad = a.radical();
  for (auto& [h, idx] : classes)
    for (auto i : idx)
      for (auto j : idx) {
        const Subgroup& x = subs[i];
        const Subgroup& y = subs[j];
        if (i == j || !is_subset(x, y)) continue;
        ++pairs;
        if (kernel_side) {
          if (auto z = a.essential_failure(x, y)) {
            out.verdict = false;
            out.witness = json{{"kind", "cononsingular_failure"}, {"x", to_json(x)}, {"y", to_json(y)},
                               {"hull", to_json(h)}, {"z", to_json(*z)}};
            return out;
          }
        } else if (!is_subset(y, join(x, rad))) {
          out.verdict = false;
          out.witness = json{{"kind", "cononsingular_failure"}, {"x", to_json(x)}, {"y", to_json(y)},
                             {"hull", to_json(h)}, {"radical", to_json(rad)}};
          return out;
        }
      }
  out.verdict = true;
  out.witness = json{{"kind", "cononsingular"}, {"classes", classes.size()}, {"pairs", pairs},
                     {"hull_route", via_homs ? "galois" : "types"}};
  return out;
}

}  // namespace

Certificate Workbench::check(const Property& p) {
  make_property(p.id, p.strong);
  if (!is_relative(p.id) && !self_)
    throw Error(ErrorCode::precondition, std::string(to_string(p.id)) + " is a property of one module");
  auto it = cache_.find(p);
  if (it != cache_.end()) return it->second;

  Ctx c{*this, p, opts_.entry_cap};
  Analysis& a = src_;
  Certificate out;
  auto summand_json = [&](const Subgroup& k) { return summand_entry(a, k); };
  switch (p.id) {
    case P::cs_baer: out = envelope_all(c, kernel_meets(), "kernel_meets", true); break;
    case P::cs_rickart: out = envelope_all(c, kernels(), "kernels", true); break;
    case P::dual_cs_baer: out = above_all(c, image_joins(), "image_joins", true); break;
    case P::dual_cs_rickart: out = above_all(c, images(), "images", true); break;
    case P::baer: out = summand_all(c, kernel_meets(), "kernel_meets", true, 1); break;
    case P::rickart: out = summand_all(c, kernels(), "kernels", true, 1); break;
    case P::dual_baer: out = summand_all(c, image_joins(), "image_joins", false, 2); break;
    case P::dual_rickart: out = summand_all(c, images(), "images", false, 2); break;
    case P::regular: {
      auto r = check(Property{P::rickart, p.strong});
      auto d = check(Property{P::dual_rickart, p.strong});
      out.verdict = r.verdict && d.verdict;
      out.witness = json{{"kind", "both"}, {"rickart", r.witness}, {"dual_rickart", d.witness},
                         {"rickart_verdict", r.verdict}, {"dual_rickart_verdict", d.verdict}};
      break;
    }
    case P::extending: {
      Family all;
      all.everything = true;
      all.route = "submodules";
      out = envelope_all(c, all, "submodules", false);
      break;
    }
    case P::lifting: {
      Family all;
      all.everything = true;
      all.route = "submodules";
      out = above_all(c, all, "submodules", false);
      break;
    }
    case P::weak_duo: out = weak_duo(c); break;
    case P::sip:
    case P::ssip:
      out = summand_family(c, a.summands(), "summands", true, p.id == P::ssip, Goal::summand, summand_json);
      break;
    case P::ssp:
    case P::sssp:
      out = summand_family(c, a.summands(), "summands", false, p.id == P::sssp, Goal::summand, summand_json);
      break;
    case P::esip:
    case P::essip:
      out = summand_family(c, a.summands(), "summands", true, p.id == P::essip, Goal::envelope, summand_json);
      break;
    case P::lssp:
    case P::lsssp:
      out = summand_family(c, a.summands(), "summands", false, p.id == P::lsssp, Goal::above, summand_json);
      break;
    case P::sip_extending:
    case P::ssip_extending: {
      std::vector<Subgroup> base;
      for (auto& x : a.submodules())
        if (a.envelope(x, false)) base.push_back(x);
      auto entry = [&](const Subgroup& x) {
        auto d = *a.envelope(x, false);
        return json{{"x", to_json(x)}, {"summand", to_json(d)}, {"complement", to_json(*a.complement(d))}};
      };
      out = summand_family(c, base, "essential_in_summands", true, p.id == P::ssip_extending, Goal::envelope, entry);
      break;
    }
    case P::ssp_lifting:
    case P::sssp_lifting: {
      std::vector<Subgroup> base;
      for (auto& y : a.submodules())
        if (a.lies_above_summand(y, false)) base.push_back(y);
      auto entry = [&](const Subgroup& y) {
        auto k = *a.lies_above_summand(y, false);
        return json{{"y", to_json(y)}, {"summand", to_json(k)}, {"complement", to_json(*a.complement(k))}};
      };
      out = summand_family(c, base, "above_summands", false, p.id == P::sssp_lifting, Goal::above, entry);
      break;
    }
    case P::k_nonsingular:
      out = no_bad_map(
          c, true, [&](const Subgroup& k) -> std::optional<Subgroup> {
            if (src_.is_essential(k, whole_group(src_.group()))) return whole_group(src_.group());
            return std::nullopt;
          },
          "kernel essential in M", false);
      break;
    case P::t_nonsingular:
      out = no_bad_map(
          c, false, [&](const Subgroup& y) -> std::optional<Subgroup> {
            if (tgt().is_superfluous(y, whole_group(tgt().group()))) return zero_subgroup(tgt().group());
            return std::nullopt;
          },
          "image superfluous in N", false);
      break;
    case P::e_k_nonsingular:
      out = no_bad_map(
          c, true, [&](const Subgroup& k) { return src_.envelope(k, false); },
          "kernel essential in a summand of M", true);
      break;
    case P::l_t_nonsingular:
      out = no_bad_map(
          c, false, [&](const Subgroup& y) { return tgt().lies_above_summand(y, false); },
          "image lies above a summand of N", true);
      break;
    case P::e_k_cononsingular: out = cononsingular(c, true); break;
    case P::l_t_cononsingular: out = cononsingular(c, false); break;
  }
  out.property = p;
  out.module = source().name();
  out.codomain = target().name();
  cache_.emplace(p, out);
  return out;
}

Certificate check(const Property& p, const RModule& m, const std::optional<RModule>& n, const CheckOptions& opts) {
  Workbench w(m, n, opts);
  return w.check(p);
}

}  // namespace modlab
