#pragma once

// Boundary-class combinatorics for the moduli spaces of stable rational
// curves with n marked points: canonical boundary classes Delta_S (with
// S ~ S^c identified), the Keel relations spanning V_n, the F-nef
// inequalities (one per partition of {1..n} into 4 nonempty blocks), the
// inductive boundary basis B_n of the Picard group, and exact quotient
// coordinates modulo V_n.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fultoncones/linform.hpp"
#include "fultoncones/matrix.hpp"
#include "fultoncones/rational.hpp"

namespace fulton {

constexpr int kMaxN = 12;  // guards accidental exponential blowup

inline void check_n(int n) {
  if (n < 4 || n > kMaxN) throw std::invalid_argument("n must be in 4..12");
}

// Label l in {1..n} <-> bit (l-1).
inline std::uint32_t full_mask(int n) { return (1u << n) - 1; }
inline std::uint32_t bit_of(int label) { return 1u << (label - 1); }

inline std::vector<int> mask_members(std::uint32_t mask) {
  std::vector<int> m;
  for (int l = 1; mask; ++l, mask >>= 1)
    if (mask & 1) m.push_back(l);
  return m;
}

inline std::uint32_t members_mask(const std::vector<int>& members, int n) {
  std::uint32_t m = 0;
  for (int l : members) {
    if (l < 1 || l > n) throw std::invalid_argument("label out of range");
    m |= bit_of(l);
  }
  return m;
}

// A canonical boundary class: the subset S (|S| < n/2, ties broken by
// demanding 1 in S) representing the pair {S, S^c}.
struct BoundaryClass {
  int n = 0;
  std::uint32_t mask = 0;

  std::vector<int> members() const { return mask_members(mask); }
  int size() const { return std::popcount(mask); }

  std::string label() const {
    std::string s;
    for (int l : members()) {
      if (!s.empty()) s += ',';
      s += std::to_string(l);
    }
    return s;
  }

  friend bool operator==(const BoundaryClass& a, const BoundaryClass& b) {
    return a.n == b.n && a.mask == b.mask;
  }
};

// Lexicographic order on sorted member tuples ({1,2} < {1,2,3} < {1,3}),
// matching the printed generator listings.
inline bool class_less(const BoundaryClass& a, const BoundaryClass& b) {
  auto ma = a.members(), mb = b.members();
  return std::lexicographical_compare(ma.begin(), ma.end(), mb.begin(), mb.end());
}

inline std::uint32_t canonical_mask(int n, std::uint32_t raw) {
  std::uint32_t comp = full_mask(n) & ~raw;
  int s = std::popcount(raw), c = n - s;
  if (s < c) return raw;
  if (s > c) return comp;
  return (raw & 1u) ? raw : comp;  // tie: the half containing label 1
}

inline BoundaryClass canonical_class(int n, std::uint32_t raw) {
  check_n(n);
  int s = std::popcount(raw & full_mask(n));
  if ((raw & ~full_mask(n)) != 0 || s < 2 || s > n - 2)
    throw std::invalid_argument("invalid boundary divisor");
  return BoundaryClass{n, canonical_mask(n, raw)};
}

inline BoundaryClass canonical_class(int n, const std::vector<int>& members) {
  check_n(n);
  return canonical_class(n, members_mask(members, n));
}

// Fixed coordinate order on all canonical classes (the ambient space W_n).
struct AmbientIndex {
  int n = 0;
  std::vector<BoundaryClass> classes;
  std::unordered_map<std::uint32_t, int> pos;

  std::size_t N() const { return classes.size(); }

  int index_of(std::uint32_t canonical) const {
    auto it = pos.find(canonical);
    if (it == pos.end()) throw std::invalid_argument("unknown class");
    return it->second;
  }
  int index_of(const BoundaryClass& c) const { return index_of(c.mask); }
  int index_of_raw(std::uint32_t raw) const { return index_of(canonical_mask(n, raw)); }

  const BoundaryClass& at(std::size_t i) const { return classes.at(i); }
  std::string label(std::size_t i) const { return classes.at(i).label(); }
};

inline AmbientIndex enumerate_classes(int n) {
  check_n(n);
  AmbientIndex ix;
  ix.n = n;
  for (std::uint32_t m = 0; m <= full_mask(n); ++m) {
    int s = std::popcount(m);
    if (s < 2 || s > n - 2) continue;
    if (canonical_mask(n, m) != m) continue;
    ix.classes.push_back(BoundaryClass{n, m});
  }
  std::sort(ix.classes.begin(), ix.classes.end(), class_less);
  for (std::size_t i = 0; i < ix.classes.size(); ++i)
    ix.pos[ix.classes[i].mask] = static_cast<int>(i);
  if (ix.N() != (1u << (n - 1)) - static_cast<std::size_t>(n) - 1)
    throw std::logic_error("class count mismatch");
  return ix;
}

// Dimension bookkeeping.
inline std::size_t dim_Wn(int n) { check_n(n); return (std::size_t{1} << (n - 1)) - n - 1; }
inline std::size_t dim_Vn(int n) { check_n(n); return static_cast<std::size_t>(n) * (n - 3) / 2; }
inline std::size_t dim_Pic(int n) {
  check_n(n);
  return (std::size_t{1} << (n - 1)) - static_cast<std::size_t>(n) * (n - 1) / 2 - 1;
}

// The Keel relation indexed by four distinct labels: the classes containing
// {a,b} and avoiding {c,d} minus those containing {a,c} and avoiding {b,d},
// with complement-identified terms merged. Entries land in {-1,0,+1}.
inline LinForm keel_relation(const AmbientIndex& ix, int a, int b, int c, int d) {
  int labs[4] = {a, b, c, d};
  for (int l : labs)
    if (l < 1 || l > ix.n) throw std::invalid_argument("label out of range");
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (labs[i] == labs[j]) throw std::invalid_argument("labels must be distinct");

  LinForm f(ix.N());
  std::uint32_t rest = full_mask(ix.n) & ~(bit_of(a) | bit_of(b) | bit_of(c) | bit_of(d));
  std::uint32_t ab = bit_of(a) | bit_of(b), ac = bit_of(a) | bit_of(c);
  std::uint32_t t = 0;
  while (true) {
    f.c[ix.index_of_raw(ab | t)] += 1;
    f.c[ix.index_of_raw(ac | t)] -= 1;
    if (t == rest) break;
    t = (t - rest) & rest;  // next submask
  }
  f.normalize();
  return f;
}

inline LinForm keel_relation(int n, int a, int b, int c, int d) {
  return keel_relation(enumerate_classes(n), a, b, c, d);
}

namespace detail {

// Echelon accumulator for incremental exact rank maintenance.
struct EchelonRows {
  std::vector<std::vector<Rat>> rows;  // each with leading 1 at its pivot
  std::vector<std::size_t> pivots;

  bool try_add(std::vector<Rat> v) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (v[pivots[i]] == 0) continue;
      Rat f = v[pivots[i]];
      for (std::size_t j = 0; j < v.size(); ++j) v[j] -= f * rows[i][j];
    }
    std::size_t p = 0;
    while (p < v.size() && v[p] == 0) ++p;
    if (p == v.size()) return false;
    Rat inv = v[p];
    for (auto& x : v) x /= inv;
    rows.push_back(std::move(v));
    pivots.push_back(p);
    return true;
  }

  bool try_add(const LinForm& f) {
    std::vector<Rat> v(f.dim());
    for (std::size_t j = 0; j < f.dim(); ++j) v[j] = Rat(static_cast<long>(f.c[j]));
    return try_add(std::move(v));
  }
};

// The quadruples generating the relation vectors exactly as printed for
// n = 4..7; larger n reuses the interleaved pair pattern before completion.
inline std::vector<std::array<int, 4>> relation_seed_quadruples(int n) {
  std::vector<std::array<int, 4>> q;
  int kmax = (n == 7) ? 6 : n;
  for (int k = 4; k <= kmax; ++k) {
    q.push_back({1, 2, 3, k});
    q.push_back({1, 2, k, 3});
  }
  if (n == 5) q.push_back({1, 2, 4, 5});
  if (n == 6) {
    q.push_back({1, 2, 4, 5});
    q.push_back({1, 2, 4, 6});
    q.push_back({1, 2, 5, 6});
  }
  if (n == 7) q.push_back({1, 2, 3, 7});
  return q;
}

}  // namespace detail

// M = n(n-3)/2 independent Keel relations: the printed generators first, then
// (when needed) a deterministic completion scanning ordered quadruples
// lexicographically and keeping the rank-increasing ones.
inline std::vector<LinForm> relation_basis(const AmbientIndex& ix) {
  const std::size_t M = dim_Vn(ix.n);
  std::vector<LinForm> out;
  detail::EchelonRows ech;
  auto push = [&](int a, int b, int c, int d) {
    LinForm f = keel_relation(ix, a, b, c, d);
    if (!ech.try_add(f)) return false;
    out.push_back(std::move(f));
    return true;
  };
  for (auto [a, b, c, d] : detail::relation_seed_quadruples(ix.n))
    if (!push(a, b, c, d)) throw std::logic_error("dependent seed relation");
  for (int a = 1; a <= ix.n && out.size() < M; ++a)
    for (int b = 1; b <= ix.n && out.size() < M; ++b)
      for (int c = 1; c <= ix.n && out.size() < M; ++c)
        for (int d = 1; d <= ix.n && out.size() < M; ++d) {
          if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
          push(a, b, c, d);
        }
  if (out.size() != M) throw std::logic_error("relation basis rank deficit");
  return out;
}

inline std::vector<LinForm> relation_basis(int n) {
  return relation_basis(enumerate_classes(n));
}

// A partition of {1..n} into four disjoint nonempty blocks, canonicalized by
// sorting blocks by minimum element.
struct Partition4 {
  std::array<std::uint32_t, 4> blocks{};
};

inline std::vector<Partition4> enumerate_partitions4(int n) {
  check_n(n);
  std::vector<Partition4> out;
  std::array<std::uint32_t, 4> blocks{};
  auto rec = [&](auto&& self, int label, int used) -> void {
    if (label > n) {
      if (used == 4) out.push_back(Partition4{blocks});
      return;
    }
    if (n - label + 1 < 4 - used) return;  // not enough labels left
    for (int b = 0; b < used; ++b) {
      blocks[b] |= bit_of(label);
      self(self, label + 1, used);
      blocks[b] &= ~bit_of(label);
    }
    if (used < 4) {
      blocks[used] = bit_of(label);
      self(self, label + 1, used + 1);
      blocks[used] = 0;
    }
  };
  rec(rec, 1, 0);
  return out;
}

// The F-nef inequality of a partition: w_{I u J} + w_{I u K} + w_{I u L}
// - w_I - w_J - w_K - w_L, with singleton blocks contributing nothing and all
// terms folded onto canonical classes. Symmetric in the four blocks.
inline LinForm fnef_form(const AmbientIndex& ix, const Partition4& p) {
  LinForm f(ix.N());
  f.c[ix.index_of_raw(p.blocks[0] | p.blocks[1])] += 1;
  f.c[ix.index_of_raw(p.blocks[0] | p.blocks[2])] += 1;
  f.c[ix.index_of_raw(p.blocks[0] | p.blocks[3])] += 1;
  for (std::uint32_t b : p.blocks)
    if (std::popcount(b) >= 2) f.c[ix.index_of_raw(b)] -= 1;
  f.normalize();
  return f;
}

// Forms are returned sorted by coefficient-lex order (this reproduces the
// printed n=5 listing).
inline std::vector<LinForm> fnef_forms(const AmbientIndex& ix) {
  std::vector<LinForm> out;
  std::unordered_set<LinForm, LinFormHash> seen;
  for (const auto& p : enumerate_partitions4(ix.n)) {
    LinForm f = fnef_form(ix, p);
    if (!seen.insert(f).second) throw std::logic_error("duplicate F-nef form");
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<LinForm> fnef_forms(int n) { return fnef_forms(enumerate_classes(n)); }

namespace detail {

// Literal (non-canonicalized) member sets of the inductive bases B_4..B_n.
// The recursion operates on literal subsets; complements are taken on literal
// sets and canonicalization happens only when a level is read off.
inline std::vector<std::vector<std::uint32_t>> basis_literal_levels(int n) {
  std::vector<std::vector<std::uint32_t>> levels(n + 1);
  levels[4] = {bit_of(2) | bit_of(3)};
  for (int k = 5; k <= n; ++k) {
    std::set<std::uint32_t> level(levels[k - 1].begin(), levels[k - 1].end());
    // All B with {k-2, k-1} in B, B in {1..k-1}, B a valid class at level k.
    std::uint32_t req = bit_of(k - 2) | bit_of(k - 1);
    std::uint32_t rest = full_mask(k - 1) & ~req;
    std::uint32_t t = 0;
    while (true) {
      std::uint32_t b = req | t;
      if (std::popcount(b) <= k - 2) level.insert(b);
      if (t == rest) break;
      t = (t - rest) & rest;
    }
    // Complements B^c \ {k} of the classes new at the previous level.
    std::set<std::uint32_t> prev2;
    if (k >= 6) prev2.insert(levels[k - 2].begin(), levels[k - 2].end());
    for (std::uint32_t b : levels[k - 1])
      if (!prev2.count(b)) level.insert(full_mask(k - 1) & ~b);
    levels[k].assign(level.begin(), level.end());
  }
  return levels;
}

}  // namespace detail

// The inductive basis B_n of Pic, as sorted canonical classes.
inline std::vector<BoundaryClass> basis_Bn(int n) {
  check_n(n);
  auto levels = detail::basis_literal_levels(n);
  std::set<std::uint32_t> canon;
  for (std::uint32_t b : levels[n]) canon.insert(canonical_class(n, b).mask);
  std::vector<BoundaryClass> out;
  for (std::uint32_t m : canon) out.push_back(BoundaryClass{n, m});
  std::sort(out.begin(), out.end(), class_less);
  if (out.size() != dim_Pic(n)) throw std::logic_error("basis size mismatch");
  return out;
}

// Exact expansions of every class over a boundary basis, modulo V_n.
struct QuotientCoords {
  AmbientIndex full;
  std::vector<BoundaryClass> basis;              // sorted, size dim_Pic(n)
  std::vector<std::vector<Rat>> expansion;       // full-class index -> basis coords
  std::unordered_map<std::uint32_t, int> basis_pos;

  int n() const { return full.n; }
  std::size_t dim() const { return basis.size(); }

  const std::vector<Rat>& of(const BoundaryClass& c) const {
    return expansion.at(static_cast<std::size_t>(full.index_of(c)));
  }

  bool in_basis(const BoundaryClass& c) const { return basis_pos.count(c.mask) > 0; }

  // Primitive integer vector spanning the same direction as the expansion.
  std::vector<std::int64_t> primitive_direction(const BoundaryClass& c) const {
    const auto& e = of(c);
    Int l = 1;
    for (const auto& q : e) l = lcm(l, q.get_den());
    std::vector<std::int64_t> v(e.size());
    Int g = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      Int z = e[i].get_num() * (l / e[i].get_den());
      g = gcd(g, z);
      if (!z.fits_slong_p()) throw std::overflow_error("direction overflow");
      v[i] = z.get_si();
    }
    if (g > 1 && g.fits_slong_p()) {
      std::int64_t gi = g.get_si();
      for (auto& x : v) x /= gi;
    }
    return v;
  }
};

// Requires the basis to span a complement of V_n ("not a complement" error
// otherwise); basis elements expand to unit vectors.
inline QuotientCoords quotient_coordinates(const AmbientIndex& ix,
                                           std::vector<BoundaryClass> basis) {
  const std::size_t N = ix.N(), Nbar = dim_Pic(ix.n), M = dim_Vn(ix.n);
  if (basis.size() != Nbar) throw std::invalid_argument("basis size must be dim Pic");
  std::sort(basis.begin(), basis.end(), class_less);

  // Rows: one unit row per basis class, then the relation basis of V_n.
  Mat A(N, N);
  for (std::size_t i = 0; i < Nbar; ++i) {
    if (basis[i].n != ix.n) throw std::invalid_argument("basis class has wrong n");
    if (i > 0 && basis[i].mask == basis[i - 1].mask)
      throw std::invalid_argument("duplicate basis class");
    A.at(i, static_cast<std::size_t>(ix.index_of(basis[i]))) = 1;
  }
  std::vector<LinForm> rels = relation_basis(ix);
  for (std::size_t r = 0; r < M; ++r)
    for (std::size_t c = 0; c < N; ++c)
      A.at(Nbar + r, c) = Rat(static_cast<long>(rels[r].c[c]));

  // Solve A^T x = e_S for all S at once: rref of [A^T | I].
  Mat aug(N, 2 * N);
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t c = 0; c < N; ++c) aug.at(c, r) = A.at(r, c);
  for (std::size_t r = 0; r < N; ++r) aug.at(r, N + r) = 1;
  RrefResult rr = rref(std::move(aug));
  for (std::size_t i = 0; i < rr.pivots.size() && i < N; ++i)
    if (rr.pivots[i] != i) throw std::runtime_error("not a complement");
  if (rr.pivots.size() < N || rr.pivots[N - 1] != N - 1)
    throw std::runtime_error("not a complement");

  QuotientCoords qc;
  qc.full = ix;
  qc.basis = std::move(basis);
  for (std::size_t i = 0; i < Nbar; ++i) qc.basis_pos[qc.basis[i].mask] = static_cast<int>(i);
  qc.expansion.assign(N, {});
  for (std::size_t s = 0; s < N; ++s) {
    std::vector<Rat> coeff(Nbar);
    for (std::size_t i = 0; i < Nbar; ++i) coeff[i] = rr.m.at(i, N + s);
    qc.expansion[s] = std::move(coeff);
  }
  return qc;
}

inline QuotientCoords quotient_coordinates(int n, const std::vector<BoundaryClass>& basis) {
  return quotient_coordinates(enumerate_classes(n), basis);
}

// Parses "1,2,5" into a canonical class.
inline BoundaryClass parse_class_label(int n, const std::string& text) {
  std::vector<int> members;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string tok = text.substr(start, comma == std::string::npos ? comma : comma - start);
    if (tok.empty()) throw std::invalid_argument("bad class label: '" + text + "'");
    members.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return canonical_class(n, members);
}

}  // namespace fulton
