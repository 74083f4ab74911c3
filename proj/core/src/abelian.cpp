#include "modlab/abelian.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "arith.hpp"

namespace modlab {

using detail::Echelon;
using detail::i128;
using detail::mod;

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_input: return "malformed_input";
    case ErrorCode::ambient_mismatch: return "ambient_mismatch";
    case ErrorCode::context_mismatch: return "context_mismatch";
    case ErrorCode::size_guard: return "size_guard";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::unknown_suite: return "unknown_suite";
    case ErrorCode::invalid_property: return "invalid_property";
  }
  return "unknown";
}

namespace {
std::int64_t& guard_slot() {
  static std::int64_t guard = [] {
    if (const char* env = std::getenv("MODLAB_MAX_SIZE")) {
      char* end = nullptr;
      long long v = std::strtoll(env, &end, 10);
      if (end != env && v > 0) return static_cast<std::int64_t>(v);
    }
    return std::int64_t{1} << 20;
  }();
  return guard;
}
}  // namespace

std::int64_t default_size_guard() { return guard_slot(); }
void set_default_size_guard(std::int64_t guard) { guard_slot() = guard; }

void check_size(Int cardinality, Int guard) {
  if (cardinality > guard)
    throw Error(ErrorCode::size_guard, "cardinality " + std::to_string(cardinality) +
                                           " exceeds size guard " + std::to_string(guard));
}

std::vector<std::pair<Int, int>> factorize(Int n) {
  std::vector<std::pair<Int, int>> out;
  for (Int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

Int ipow(Int base, int exp) {
  Int r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

// ---------------------------------------------------------------------------
// FiniteAbelianGroup

FiniteAbelianGroup::FiniteAbelianGroup(Vec orders) : orders_(std::move(orders)) {
  i128 total = 1;
  for (Int d : orders_) {
    if (d < 1) throw Error(ErrorCode::malformed_input, "group orders must be >= 1");
    total *= d;
    if (total > (i128{1} << 62)) throw Error(ErrorCode::size_guard, "group order overflows 2^62");
  }
  order_ = static_cast<Int>(total);
}

FiniteAbelianGroup FiniteAbelianGroup::canonical(const Vec& orders) {
  return FiniteAbelianGroup(FiniteAbelianGroup(orders).invariant_factors());
}

Int FiniteAbelianGroup::exponent() const {
  Int e = 1;
  for (Int d : orders_) e = std::lcm(e, d);
  return e;
}

bool FiniteAbelianGroup::is_canonical() const {
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    if (orders_[i] < 2) return false;
    if (i + 1 < orders_.size() && orders_[i + 1] % orders_[i] != 0) return false;
  }
  return true;
}

PrimaryType FiniteAbelianGroup::primary_type() const {
  PrimaryType t;
  for (Int d : orders_)
    for (auto [p, e] : factorize(d)) t[p].push_back(e);
  for (auto& [p, parts] : t) std::sort(parts.rbegin(), parts.rend());
  return t;
}

Vec FiniteAbelianGroup::invariant_factors() const {
  // Combine the primary parts: the largest powers of every prime form d_k, etc.
  PrimaryType t = primary_type();
  std::size_t len = 0;
  for (auto& [p, parts] : t) len = std::max(len, parts.size());
  Vec out(len, 1);
  for (auto& [p, parts] : t)
    for (std::size_t i = 0; i < parts.size(); ++i) out[len - 1 - i] *= ipow(p, parts[i]);
  return out;
}

Vec FiniteAbelianGroup::basis_vector(std::size_t i) const {
  Vec v(orders_.size(), 0);
  v[i] = orders_[i] == 1 ? 0 : 1;
  return v;
}

Vec FiniteAbelianGroup::reduce(Vec x) const {
  if (x.size() != orders_.size())
    throw Error(ErrorCode::malformed_input, "element has " + std::to_string(x.size()) +
                                                " coordinates, ambient rank is " +
                                                std::to_string(orders_.size()));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = mod(x[i], orders_[i]);
  return x;
}

bool FiniteAbelianGroup::is_element(std::span<const Int> x) const {
  if (x.size() != orders_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < 0 || x[i] >= orders_[i]) return false;
  return true;
}

Vec FiniteAbelianGroup::add(std::span<const Int> x, std::span<const Int> y) const {
  Vec z(orders_.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = mod(static_cast<i128>(x[i]) + y[i], orders_[i]);
  return z;
}

Vec FiniteAbelianGroup::scale(Int n, std::span<const Int> x) const {
  Vec z(orders_.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = mod(static_cast<i128>(n) * x[i], orders_[i]);
  return z;
}

Int FiniteAbelianGroup::element_order(std::span<const Int> x) const {
  Int o = 1;
  for (std::size_t i = 0; i < orders_.size(); ++i)
    o = std::lcm(o, orders_[i] / std::gcd(orders_[i], mod(x[i], orders_[i])));
  return o;
}

std::uint64_t FiniteAbelianGroup::index_of(std::span<const Int> x) const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < orders_.size(); ++i)
    idx = idx * static_cast<std::uint64_t>(orders_[i]) + static_cast<std::uint64_t>(x[i]);
  return idx;
}

Vec FiniteAbelianGroup::element_at(std::uint64_t index) const {
  Vec x(orders_.size());
  for (std::size_t i = orders_.size(); i-- > 0;) {
    x[i] = static_cast<Int>(index % static_cast<std::uint64_t>(orders_[i]));
    index /= static_cast<std::uint64_t>(orders_[i]);
  }
  return x;
}

FiniteAbelianGroup FiniteAbelianGroup::direct_sum(const FiniteAbelianGroup& other) const {
  Vec o = orders_;
  o.insert(o.end(), other.orders_.begin(), other.orders_.end());
  return FiniteAbelianGroup(std::move(o));
}

std::string FiniteAbelianGroup::to_string() const {
  if (orders_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < orders_.size(); ++i) os << (i ? "+" : "") << "Z" << orders_[i];
  return os.str();
}

// ---------------------------------------------------------------------------
// Subgroup

Subgroup Subgroup::from_hnf(FiniteAbelianGroup ambient, Vec hnf) {
  Subgroup s;
  std::size_t k = ambient.rank();
  Int card = 1;
  for (std::size_t i = 0; i < k; ++i) card *= ambient.orders()[i] / hnf[i * k + i];
  s.ambient_ = std::move(ambient);
  s.hnf_ = std::move(hnf);
  s.card_ = card;
  return s;
}

std::vector<Vec> Subgroup::generators() const {
  std::vector<Vec> out;
  std::size_t k = ambient_.rank();
  for (std::size_t i = 0; i < k; ++i)
    if (pivot(i) != ambient_.orders()[i]) out.emplace_back(row(i).begin(), row(i).end());
  return out;
}

bool Subgroup::contains(std::span<const Int> x) const {
  std::size_t k = ambient_.rank();
  if (x.size() != k) throw Error(ErrorCode::ambient_mismatch, "element rank differs from ambient");
  const Vec& d = ambient_.orders();
  Vec v(x.begin(), x.end());
  for (std::size_t i = 0; i < k; ++i) {
    Int xi = mod(v[i], d[i]);
    if (xi == 0) continue;
    Int h = pivot(i);
    if (xi % h != 0) return false;
    Int q = xi / h;
    const Int* r = hnf_.data() + i * k;
    for (std::size_t j = i + 1; j < k; ++j) v[j] = mod(static_cast<i128>(v[j]) - static_cast<i128>(q) * r[j], d[j]);
  }
  return true;
}

void Subgroup::for_each_element(const std::function<void(const Vec&)>& fn) const {
  std::size_t k = ambient_.rank();
  const Vec& d = ambient_.orders();
  Vec lim(k), c(k, 0);
  for (std::size_t i = 0; i < k; ++i) lim[i] = d[i] / pivot(i);
  Vec cur(k, 0);
  while (true) {
    fn(cur);
    std::size_t i = k;
    while (i > 0) {
      --i;
      const Int* r = hnf_.data() + i * k;
      if (++c[i] < lim[i]) {
        for (std::size_t j = i; j < k; ++j) cur[j] = mod(static_cast<i128>(cur[j]) + r[j], d[j]);
        goto next;
      }
      // wrap: subtract (lim-1) copies
      for (std::size_t j = i; j < k; ++j)
        cur[j] = mod(static_cast<i128>(cur[j]) - static_cast<i128>(lim[i] - 1) * r[j], d[j]);
      c[i] = 0;
    }
    return;
  next:;
  }
}

std::vector<Vec> Subgroup::elements() const {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(card_));
  for_each_element([&](const Vec& x) { out.push_back(x); });
  return out;
}

std::size_t Subgroup::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (Int v : hnf_) {
    h ^= static_cast<std::uint64_t>(v);
    h *= 1099511628211ull;
  }
  for (Int v : ambient_.orders()) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e37;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

bool Subgroup::operator<(const Subgroup& other) const {
  if (card_ != other.card_) return card_ < other.card_;
  if (hnf_ != other.hnf_) return hnf_ < other.hnf_;
  return ambient_.orders() < other.ambient_.orders();
}

namespace {

void require_same(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) {
  if (!(a == b))
    throw Error(ErrorCode::ambient_mismatch, "ambient " + a.to_string() + " differs from " + b.to_string());
}

Subgroup finish_into(const FiniteAbelianGroup& g, Echelon& e) {
  e.finish();
  return Subgroup::from_hnf(g, e.rows());
}

}  // namespace

Subgroup canonicalize(std::span<const Vec> generators, const FiniteAbelianGroup& ambient) {
  Echelon e(ambient.orders());
  for (const Vec& v : generators) {
    if (v.size() != ambient.rank())
      throw Error(ErrorCode::malformed_input, "generator has " + std::to_string(v.size()) +
                                                  " coordinates, ambient rank is " +
                                                  std::to_string(ambient.rank()));
    e.insert(v);
  }
  return finish_into(ambient, e);
}

Subgroup zero_subgroup(const FiniteAbelianGroup& g) { return canonicalize({}, g); }

Subgroup whole_group(const FiniteAbelianGroup& g) {
  std::vector<Vec> gens;
  for (std::size_t i = 0; i < g.rank(); ++i) gens.push_back(g.basis_vector(i));
  return canonicalize(gens, g);
}

Subgroup cyclic_subgroup(const FiniteAbelianGroup& g, std::span<const Int> x) {
  std::vector<Vec> gens{Vec(x.begin(), x.end())};
  return canonicalize(gens, g);
}

bool is_subset(const Subgroup& a, const Subgroup& b) {
  require_same(a.ambient(), b.ambient());
  if (a.cardinality() > b.cardinality() || b.cardinality() % a.cardinality() != 0) return false;
  std::size_t k = a.ambient().rank();
  for (std::size_t i = 0; i < k; ++i)
    if (a.pivot(i) != a.ambient().orders()[i] && !b.contains(a.row(i))) return false;
  return true;
}

Subgroup join(const Subgroup& a, const Subgroup& b) {
  require_same(a.ambient(), b.ambient());
  if (a.cardinality() == 1) return b;
  if (b.cardinality() == 1) return a;
  Echelon e(a.ambient().orders(), a.basis());
  std::size_t k = a.ambient().rank();
  for (std::size_t i = 0; i < k; ++i)
    if (b.pivot(i) != b.ambient().orders()[i]) e.insert(b.row(i));
  return finish_into(a.ambient(), e);
}

// Zassenhaus: in G + G take rows (a, a) and (b, 0); rows with zero left block
// span the intersection in the right block.
Subgroup meet(const Subgroup& a, const Subgroup& b) {
  require_same(a.ambient(), b.ambient());
  const FiniteAbelianGroup& g = a.ambient();
  if (a.is_zero() || b.is_whole()) return a;
  if (b.is_zero() || a.is_whole()) return b;
  std::size_t k = g.rank();
  Vec moduli = g.orders();
  moduli.insert(moduli.end(), g.orders().begin(), g.orders().end());
  Echelon e(moduli);
  Vec v(2 * k);
  for (std::size_t i = 0; i < k; ++i) {
    if (a.pivot(i) == g.orders()[i]) continue;
    auto r = a.row(i);
    std::copy(r.begin(), r.end(), v.begin());
    std::copy(r.begin(), r.end(), v.begin() + static_cast<std::ptrdiff_t>(k));
    e.insert(v);
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (b.pivot(i) == g.orders()[i]) continue;
    auto r = b.row(i);
    std::copy(r.begin(), r.end(), v.begin());
    std::fill(v.begin() + static_cast<std::ptrdiff_t>(k), v.end(), 0);
    e.insert(v);
  }
  e.finish();
  return Subgroup::from_hnf(g, e.block(k));
}

Subgroup scale(Int n, const Subgroup& a) {
  const FiniteAbelianGroup& g = a.ambient();
  std::vector<Vec> gens;
  for (auto& r : a.generators()) gens.push_back(g.scale(n, r));
  return canonicalize(gens, g);
}

namespace {

std::vector<int> partition_from_sizes(const std::vector<Int>& sizes, Int p) {
  // sizes[i] = |p^i X|; conjugate parts are log_p(sizes[i-1]/sizes[i]).
  std::vector<int> conj;
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    Int ratio = sizes[i - 1] / sizes[i];
    int e = 0;
    while (ratio > 1) {
      ratio /= p;
      ++e;
    }
    if (e == 0) break;
    conj.push_back(e);
  }
  std::vector<int> parts;
  if (conj.empty()) return parts;
  for (int j = 1; j <= conj.front(); ++j) {
    int c = 0;
    for (int v : conj)
      if (v >= j) ++c;
    parts.push_back(c);
  }
  return parts;
}

Int p_part(Int n, Int p) {
  Int r = 1;
  while (n % p == 0) {
    n /= p;
    r *= p;
  }
  return r;
}

}  // namespace

PrimaryType primary_type(const Subgroup& x) {
  PrimaryType t;
  for (auto [p, e] : factorize(x.cardinality())) {
    std::vector<Int> sizes;
    Subgroup cur = x;
    // Only the p-part shrinks under multiplication by p.
    sizes.push_back(p_part(cur.cardinality(), p));
    while (sizes.back() > 1) {
      cur = scale(p, cur);
      sizes.push_back(p_part(cur.cardinality(), p));
    }
    t[p] = partition_from_sizes(sizes, p);
  }
  return t;
}

PrimaryType quotient_primary_type(const Subgroup& k) {
  const FiniteAbelianGroup& g = k.ambient();
  PrimaryType t;
  Int qcard = g.order() / k.cardinality();
  for (auto [p, e] : factorize(qcard)) {
    std::vector<Int> sizes;
    Subgroup whole = whole_group(g);
    Subgroup cur = whole;
    sizes.push_back(p_part(qcard, p));
    while (sizes.back() > 1) {
      cur = scale(p, cur);
      sizes.push_back(p_part(join(cur, k).cardinality() / k.cardinality(), p));
    }
    t[p] = partition_from_sizes(sizes, p);
  }
  return t;
}

bool type_fits(const std::vector<int>& inner, const std::vector<int>& outer) {
  if (inner.size() > outer.size()) return false;
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (inner[i] > outer[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// GroupHom

GroupHom::GroupHom(FiniteAbelianGroup domain, FiniteAbelianGroup codomain, Vec matrix)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
  std::size_t n = codomain_.rank(), m = domain_.rank();
  if (matrix_.size() != n * m)
    throw Error(ErrorCode::malformed_input, "hom matrix must be " + std::to_string(n) + "x" + std::to_string(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Int& h = matrix_[i * m + j];
      h = mod(h, codomain_.orders()[i]);
      if (mod(static_cast<i128>(h) * domain_.orders()[j], codomain_.orders()[i]) != 0)
        throw Error(ErrorCode::malformed_input, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                    ") violates h*d_j = 0 mod e_i");
    }
}

GroupHom GroupHom::zero(const FiniteAbelianGroup& domain, const FiniteAbelianGroup& codomain) {
  return GroupHom(domain, codomain, Vec(domain.rank() * codomain.rank(), 0));
}

GroupHom GroupHom::identity(const FiniteAbelianGroup& g) { return scalar(g, 1); }

GroupHom GroupHom::scalar(const FiniteAbelianGroup& g, Int n) {
  std::size_t k = g.rank();
  Vec m(k * k, 0);
  for (std::size_t i = 0; i < k; ++i) m[i * k + i] = n;
  return GroupHom(g, g, std::move(m));
}

GroupHom GroupHom::from_images(const FiniteAbelianGroup& domain, const FiniteAbelianGroup& codomain,
                               const std::vector<Vec>& images) {
  std::size_t n = codomain.rank(), m = domain.rank();
  if (images.size() != m) throw Error(ErrorCode::malformed_input, "need one image per domain generator");
  Vec mat(n * m);
  for (std::size_t j = 0; j < m; ++j) {
    if (images[j].size() != n) throw Error(ErrorCode::malformed_input, "image has wrong rank");
    for (std::size_t i = 0; i < n; ++i) mat[i * m + j] = images[j][i];
  }
  return GroupHom(domain, codomain, std::move(mat));
}

Vec GroupHom::image_of_generator(std::size_t j) const {
  std::size_t n = codomain_.rank(), m = domain_.rank();
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = matrix_[i * m + j];
  return v;
}

Vec GroupHom::apply(std::span<const Int> x) const {
  std::size_t n = codomain_.rank(), m = domain_.rank();
  if (x.size() != m) throw Error(ErrorCode::ambient_mismatch, "element rank differs from hom domain");
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    i128 s = 0;
    for (std::size_t j = 0; j < m; ++j) s += static_cast<i128>(matrix_[i * m + j]) * x[j];
    y[i] = mod(s, codomain_.orders()[i]);
  }
  return y;
}

bool GroupHom::is_zero() const {
  return std::all_of(matrix_.begin(), matrix_.end(), [](Int v) { return v == 0; });
}

std::optional<Int> GroupHom::as_scalar() const {
  if (!(domain_ == codomain_)) return std::nullopt;
  std::size_t k = domain_.rank();
  const Vec& d = domain_.orders();
  // n = a_i mod d_i for every diagonal entry; combine by CRT.
  Int n = 0, m = 1;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      if (i != j && matrix_[i * k + j] != 0) return std::nullopt;
    Int a = matrix_[i * k + i], di = d[i];
    Int g = std::gcd(m, di);
    if (mod(a - n, g) != 0) return std::nullopt;
    Int step = di / g;
    Int t = step == 1 ? 0 : mod(static_cast<i128>((a - n) / g) * detail::inverse_mod(m / g, step), step);
    Int l = m / g * di;
    n = mod(static_cast<i128>(n) + static_cast<i128>(m) * t, l);
    m = l;
  }
  return n;
}

GroupHom GroupHom::operator+(const GroupHom& other) const {
  require_same(domain_, other.domain_);
  require_same(codomain_, other.codomain_);
  Vec m(matrix_.size());
  std::size_t cols = domain_.rank();
  for (std::size_t idx = 0; idx < m.size(); ++idx)
    m[idx] = mod(static_cast<i128>(matrix_[idx]) + other.matrix_[idx], codomain_.orders()[idx / cols]);
  return GroupHom(domain_, codomain_, std::move(m));
}

GroupHom GroupHom::operator-() const {
  Vec m(matrix_.size());
  std::size_t cols = domain_.rank();
  for (std::size_t idx = 0; idx < m.size(); ++idx) m[idx] = mod(-matrix_[idx], codomain_.orders()[idx / cols]);
  return GroupHom(domain_, codomain_, std::move(m));
}

GroupHom compose(const GroupHom& g, const GroupHom& f) {
  require_same(f.codomain(), g.domain());
  std::vector<Vec> images;
  for (std::size_t j = 0; j < f.domain().rank(); ++j) images.push_back(g.apply(f.image_of_generator(j)));
  return GroupHom::from_images(f.domain(), g.codomain(), images);
}

namespace {

// Graph lattice: columns are codomain coordinates followed by domain
// coordinates.
Vec graph_moduli(const GroupHom& f) {
  Vec m = f.codomain().orders();
  m.insert(m.end(), f.domain().orders().begin(), f.domain().orders().end());
  return m;
}

void insert_graph_row(Echelon& e, const GroupHom& f, std::span<const Int> x) {
  std::size_t n = f.codomain().rank();
  Vec v(n + x.size());
  Vec fx = f.apply(x);
  std::copy(fx.begin(), fx.end(), v.begin());
  std::copy(x.begin(), x.end(), v.begin() + static_cast<std::ptrdiff_t>(n));
  e.insert(v);
}

}  // namespace

Subgroup kernel(const GroupHom& f) {
  Echelon e(graph_moduli(f));
  for (std::size_t j = 0; j < f.domain().rank(); ++j) insert_graph_row(e, f, f.domain().basis_vector(j));
  e.finish();
  return Subgroup::from_hnf(f.domain(), e.block(f.codomain().rank()));
}

Subgroup kernel_on(const GroupHom& f, const Subgroup& s) {
  require_same(f.domain(), s.ambient());
  Echelon e(graph_moduli(f));
  for (const Vec& x : s.generators()) insert_graph_row(e, f, x);
  e.finish();
  return Subgroup::from_hnf(f.domain(), e.block(f.codomain().rank()));
}

Subgroup preimage(const GroupHom& f, const Subgroup& y) {
  require_same(f.codomain(), y.ambient());
  Echelon e(graph_moduli(f));
  for (std::size_t j = 0; j < f.domain().rank(); ++j) insert_graph_row(e, f, f.domain().basis_vector(j));
  Vec v(f.codomain().rank() + f.domain().rank(), 0);
  for (const Vec& g : y.generators()) {
    std::fill(v.begin(), v.end(), 0);
    std::copy(g.begin(), g.end(), v.begin());
    e.insert(v);
  }
  e.finish();
  return Subgroup::from_hnf(f.domain(), e.block(f.codomain().rank()));
}

Subgroup image(const GroupHom& f) {
  std::vector<Vec> gens;
  for (std::size_t j = 0; j < f.domain().rank(); ++j) gens.push_back(f.image_of_generator(j));
  return canonicalize(gens, f.codomain());
}

Subgroup image_of(const GroupHom& f, const Subgroup& x) {
  require_same(f.domain(), x.ambient());
  std::vector<Vec> gens;
  for (const Vec& g : x.generators()) gens.push_back(f.apply(g));
  return canonicalize(gens, f.codomain());
}

std::optional<Vec> solve(const GroupHom& f, std::span<const Int> y) {
  std::size_t n = f.codomain().rank(), m = f.domain().rank();
  Vec moduli = graph_moduli(f);
  Echelon e(moduli);
  for (std::size_t j = 0; j < m; ++j) insert_graph_row(e, f, f.domain().basis_vector(j));
  e.finish();
  Vec v(n + m, 0);
  std::copy(y.begin(), y.end(), v.begin());
  for (std::size_t i = 0; i < n; ++i) {
    Int x = mod(v[i], moduli[i]);
    if (x == 0) continue;
    const Int* p = e.row(i);
    if (x % p[i] != 0) return std::nullopt;
    Int q = x / p[i];
    for (std::size_t j = i; j < n + m; ++j) v[j] = mod(static_cast<i128>(v[j]) - static_cast<i128>(q) * p[j], moduli[j]);
  }
  Vec x(m);
  for (std::size_t j = 0; j < m; ++j) x[j] = mod(-v[n + j], moduli[n + j]);
  return x;
}

// ---------------------------------------------------------------------------
// Smith normal form with column transform tracking

namespace {

struct Smith {
  std::size_t k;
  std::vector<i128> a, q, qinv;  // row-major k x k
  i128& at(std::vector<i128>& m, std::size_t i, std::size_t j) { return m[i * k + j]; }
};

i128 abs128(i128 v) { return v < 0 ? -v : v; }

Smith smith(std::vector<i128> a, std::size_t k) {
  Smith s{k, std::move(a), std::vector<i128>(k * k, 0), std::vector<i128>(k * k, 0)};
  for (std::size_t i = 0; i < k; ++i) s.q[i * k + i] = s.qinv[i * k + i] = 1;
  auto col_sub = [&](std::size_t c, std::size_t t, i128 f) {  // col_c -= f col_t
    for (std::size_t r = 0; r < k; ++r) {
      s.at(s.a, r, c) -= f * s.at(s.a, r, t);
      s.at(s.q, r, c) -= f * s.at(s.q, r, t);
    }
    for (std::size_t j = 0; j < k; ++j) s.at(s.qinv, t, j) += f * s.at(s.qinv, c, j);
  };
  auto col_swap = [&](std::size_t c, std::size_t t) {
    if (c == t) return;
    for (std::size_t r = 0; r < k; ++r) {
      std::swap(s.at(s.a, r, c), s.at(s.a, r, t));
      std::swap(s.at(s.q, r, c), s.at(s.q, r, t));
    }
    for (std::size_t j = 0; j < k; ++j) std::swap(s.at(s.qinv, c, j), s.at(s.qinv, t, j));
  };
  auto row_swap = [&](std::size_t r1, std::size_t r2) {
    if (r1 == r2) return;
    for (std::size_t j = 0; j < k; ++j) std::swap(s.at(s.a, r1, j), s.at(s.a, r2, j));
  };
  for (std::size_t t = 0; t < k; ++t) {
    while (true) {
      std::size_t pr = k, pc = k;
      i128 best = 0;
      for (std::size_t r = t; r < k; ++r)
        for (std::size_t c = t; c < k; ++c) {
          i128 v = abs128(s.at(s.a, r, c));
          if (v != 0 && (best == 0 || v < best)) {
            best = v;
            pr = r;
            pc = c;
          }
        }
      if (pr == k) break;
      row_swap(t, pr);
      col_swap(pc, t);
      i128 piv = s.at(s.a, t, t);
      bool clean = true;
      for (std::size_t r = t + 1; r < k; ++r) {
        i128 f = s.at(s.a, r, t) / piv;
        if (f != 0)
          for (std::size_t j = t; j < k; ++j) s.at(s.a, r, j) -= f * s.at(s.a, t, j);
        if (s.at(s.a, r, t) != 0) clean = false;
      }
      for (std::size_t c = t + 1; c < k; ++c) {
        i128 f = s.at(s.a, t, c) / piv;
        if (f != 0) col_sub(c, t, f);
        if (s.at(s.a, t, c) != 0) clean = false;
      }
      if (!clean) continue;
      bool divides = true;
      for (std::size_t r = t + 1; r < k && divides; ++r)
        for (std::size_t c = t + 1; c < k; ++c)
          if (s.at(s.a, r, c) % piv != 0) {
            for (std::size_t j = t; j < k; ++j) s.at(s.a, t, j) += s.at(s.a, r, j);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (s.at(s.a, t, t) < 0)
      for (std::size_t j = t; j < k; ++j) s.at(s.a, t, j) = -s.at(s.a, t, j);
  }
  return s;
}

}  // namespace

Quotient quotient(const Subgroup& k) {
  const FiniteAbelianGroup& g = k.ambient();
  std::size_t r = g.rank();
  std::vector<i128> a(k.basis().begin(), k.basis().end());
  Smith s = smith(std::move(a), r);
  Vec orders;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < r; ++i) {
    i128 d = s.a[i * r + i];
    if (d > 1) {
      orders.push_back(static_cast<Int>(d));
      keep.push_back(i);
    }
  }
  FiniteAbelianGroup qg(orders);
  Vec mat(keep.size() * r);
  for (std::size_t a_ = 0; a_ < keep.size(); ++a_)
    for (std::size_t j = 0; j < r; ++j) mat[a_ * r + j] = mod(s.q[j * r + keep[a_]], orders[a_]);
  Quotient out{qg, GroupHom(g, qg, std::move(mat)), {}};
  for (std::size_t i : keep) {
    Vec lift(r);
    for (std::size_t j = 0; j < r; ++j) lift[j] = mod(s.qinv[i * r + j], g.orders()[j]);
    out.lifts.push_back(std::move(lift));
  }
  return out;
}

Structure structure(const Subgroup& x) {
  const FiniteAbelianGroup& g = x.ambient();
  std::size_t k = g.rank();
  const Vec& d = g.orders();
  // Relations among the HNF rows: C = diag(d) H^{-1}.
  std::vector<i128> c(k * k, 0);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t j = r; j < k; ++j) {
      i128 acc = (j == r) ? d[r] : 0;
      for (std::size_t i = r; i < j; ++i) acc -= c[r * k + i] * x.basis()[i * k + j];
      i128 h = x.basis()[j * k + j];
      if (acc % h != 0) throw Error(ErrorCode::precondition, "internal: non-integral relation matrix");
      c[r * k + j] = acc / h;
    }
  }
  Smith s = smith(std::move(c), k);
  Structure out;
  for (std::size_t i = 0; i < k; ++i) {
    i128 o = s.a[i * k + i];
    if (o <= 1) continue;
    out.orders.push_back(static_cast<Int>(o));
    Vec gen(k, 0);
    for (std::size_t j = 0; j < k; ++j) {
      i128 acc = 0;
      for (std::size_t t = 0; t < k; ++t) acc += s.qinv[i * k + t] * x.basis()[t * k + j];
      gen[j] = mod(acc, d[j]);
    }
    out.generators.push_back(std::move(gen));
  }
  return out;
}

// ---------------------------------------------------------------------------
// HomCoordinates

HomCoordinates::HomCoordinates(FiniteAbelianGroup domain, FiniteAbelianGroup codomain)
    : domain_(std::move(domain)), codomain_(std::move(codomain)) {
  std::size_t n = codomain_.rank(), m = domain_.rank();
  Vec orders(n * m);
  step_.resize(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Int g = std::gcd(domain_.orders()[j], codomain_.orders()[i]);
      orders[i * m + j] = g;
      step_[i * m + j] = codomain_.orders()[i] / g;
    }
  group_ = FiniteAbelianGroup(std::move(orders));
}

GroupHom HomCoordinates::to_hom(std::span<const Int> coords) const {
  Vec mat(step_.size());
  std::size_t m = domain_.rank();
  for (std::size_t idx = 0; idx < mat.size(); ++idx)
    mat[idx] = mod(static_cast<i128>(coords[idx]) * step_[idx], codomain_.orders()[idx / m]);
  return GroupHom(domain_, codomain_, std::move(mat));
}

Vec HomCoordinates::from_hom(const GroupHom& h) const {
  Vec c(step_.size());
  for (std::size_t idx = 0; idx < c.size(); ++idx) c[idx] = mod(h.matrix()[idx] / step_[idx], group_.orders()[idx]);
  return c;
}

// ---------------------------------------------------------------------------
// Streaming subgroup enumeration

namespace {

Vec divisors(Int n) {
  Vec out;
  for (Int d = 1; d * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      if (d * d != n) out.push_back(n / d);
    }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Visit>
struct HnfWalker {
  const Vec& d;
  std::size_t k;
  Vec h;
  Vec scratch;
  std::vector<Vec> divs;
  Visit& visit;
  bool stop = false;

  // w (columns > i) lies in the lattice of rows > i
  bool in_lower(std::size_t i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      Int x = mod(scratch[j], d[j]);
      if (x == 0) continue;
      const Int* r = h.data() + j * k;
      if (x % r[j] != 0) return false;
      Int q = x / r[j];
      for (std::size_t t = j + 1; t < k; ++t) scratch[t] = mod(static_cast<i128>(scratch[t]) - static_cast<i128>(q) * r[t], d[t]);
    }
    return true;
  }

  void rec(std::ptrdiff_t i) {
    if (stop) return;
    if (i < 0) {
      if (!visit(h)) stop = true;
      return;
    }
    std::size_t ui = static_cast<std::size_t>(i);
    Int* row = h.data() + ui * k;
    for (Int piv : divs[ui]) {
      row[ui] = piv;
      if (piv == d[ui]) {
        rec(i - 1);
        if (stop) return;
        continue;
      }
      Int mult = d[ui] / piv;
      // odometer over the tail entries, each in [0, pivot of that row)
      for (std::size_t j = ui + 1; j < k; ++j) row[j] = 0;
      while (true) {
        for (std::size_t j = ui + 1; j < k; ++j) scratch[j] = static_cast<Int>(static_cast<i128>(row[j]) * mult % d[j]);
        if (in_lower(ui)) {
          rec(i - 1);
          if (stop) return;
        }
        std::size_t j = k;
        while (j > ui + 1) {
          --j;
          if (++row[j] < h[j * k + j]) goto advanced;
          row[j] = 0;
        }
        break;
      advanced:;
      }
      for (std::size_t j = ui + 1; j < k; ++j) row[j] = 0;
    }
    row[ui] = 0;
  }
};

template <typename Visit>
void walk_hnf(const FiniteAbelianGroup& g, Visit& visit) {
  const Vec& d = g.orders();
  std::size_t k = d.size();
  HnfWalker<Visit> w{d, k, Vec(k * k, 0), Vec(k, 0), {}, visit};
  for (Int di : d) w.divs.push_back(divisors(di));
  w.rec(static_cast<std::ptrdiff_t>(k) - 1);
}

}  // namespace

void for_each_subgroup(const FiniteAbelianGroup& g, const std::function<bool(const Subgroup&)>& fn) {
  auto visit = [&](const Vec& h) { return fn(Subgroup::from_hnf(g, h)); };
  walk_hnf(g, visit);
}

std::vector<Subgroup> all_subgroups(const FiniteAbelianGroup& g) {
  std::vector<Subgroup> out;
  for_each_subgroup(g, [&](const Subgroup& s) {
    out.push_back(s);
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t count_subgroups(const FiniteAbelianGroup& g) {
  std::uint64_t n = 0;
  auto visit = [&](const Vec&) {
    ++n;
    return true;
  };
  walk_hnf(g, visit);
  return n;
}

}  // namespace modlab
