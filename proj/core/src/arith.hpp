#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "modlab/abelian.hpp"

namespace modlab::detail {

using i128 = __int128;

inline Int mod(i128 a, Int m) {
  i128 r = a % m;
  if (r < 0) r += m;
  return static_cast<Int>(r);
}

struct Xgcd {
  Int g, s, t;
};

// s*a + t*b = g >= 0
inline Xgcd xgcd(Int a, Int b) {
  Int old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Int q = old_r / r;
    Int tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

inline Int inverse_mod(Int a, Int m) {
  auto x = xgcd(mod(a, m), m);
  if (x.g != 1) throw Error(ErrorCode::precondition, "element is not a unit");
  return mod(x.s, m);
}

// Upper-triangular basis of a full-rank lattice in Z^k that always contains
// diag(moduli) Z^k. Starts from the moduli rows; inserting a vector merges it
// column by column with 2x2 unimodular steps.
class Echelon {
 public:
  explicit Echelon(std::span<const Int> moduli)
      : k_(moduli.size()), mod_(moduli.begin(), moduli.end()), rows_(k_ * k_, 0), scratch_(k_) {
    for (std::size_t i = 0; i < k_; ++i) rows_[i * k_ + i] = mod_[i];
  }
  // Start from an existing canonical basis over the same moduli.
  Echelon(std::span<const Int> moduli, const Vec& hnf)
      : k_(moduli.size()), mod_(moduli.begin(), moduli.end()), rows_(hnf), scratch_(k_) {}

  std::size_t size() const { return k_; }
  Int* row(std::size_t i) { return rows_.data() + i * k_; }
  const Int* row(std::size_t i) const { return rows_.data() + i * k_; }
  Int pivot(std::size_t i) const { return rows_[i * k_ + i]; }

  void insert(std::span<const Int> v) {
    Int* g = scratch_.data();
    bool any = false;
    for (std::size_t j = 0; j < k_; ++j) {
      g[j] = mod(v[j], mod_[j]);
      any = any || g[j] != 0;
    }
    if (!any) return;
    for (std::size_t i = 0; i < k_; ++i) {
      if (g[i] == 0) continue;
      Int* p = row(i);
      auto x = xgcd(p[i], g[i]);
      Int ua = p[i] / x.g, ub = g[i] / x.g;
      p[i] = x.g;
      g[i] = 0;
      for (std::size_t j = i + 1; j < k_; ++j) {
        Int pj = p[j], gj = g[j];
        p[j] = mod(static_cast<i128>(x.s) * pj + static_cast<i128>(x.t) * gj, mod_[j]);
        g[j] = mod(static_cast<i128>(ua) * gj - static_cast<i128>(ub) * pj, mod_[j]);
      }
    }
  }

  // Reduce entries above each pivot into [0, pivot).
  void finish() {
    for (std::size_t i = 0; i < k_; ++i) {
      const Int* p = row(i);
      Int h = p[i];
      for (std::size_t r = 0; r < i; ++r) {
        Int* a = row(r);
        Int q = a[i] / h;
        if (q == 0) continue;
        for (std::size_t j = i; j < k_; ++j)
          a[j] = mod(static_cast<i128>(a[j]) - static_cast<i128>(q) * p[j], mod_[j]);
      }
    }
  }

  // Reduce v (length k) against the rows from `from` on; true iff it reduces
  // to zero on columns >= from. Columns before `from` are ignored.
  bool reduce(Int* v, std::size_t from) const {
    for (std::size_t i = from; i < k_; ++i) {
      Int x = mod(v[i], mod_[i]);
      if (x == 0) {
        v[i] = 0;
        continue;
      }
      const Int* p = row(i);
      if (x % p[i] != 0) return false;
      Int q = x / p[i];
      v[i] = 0;
      for (std::size_t j = i + 1; j < k_; ++j)
        v[j] = mod(static_cast<i128>(v[j]) - static_cast<i128>(q) * p[j], mod_[j]);
    }
    return true;
  }

  // Square block of rows/columns [from, k).
  Vec block(std::size_t from) const {
    std::size_t n = k_ - from;
    Vec out(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] = rows_[(from + i) * k_ + from + j];
    return out;
  }

  const Vec& rows() const { return rows_; }

 private:
  std::size_t k_;
  Vec mod_;
  Vec rows_;
  Vec scratch_;
};

}  // namespace modlab::detail
