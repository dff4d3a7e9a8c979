#pragma once

// Exact rational linear programming over cones: feasibility of x >= 0 with
// A x = b (phase-1 simplex, Bland's rule), Farkas certificates of conical
// membership, boundedness of a linear form over a cone, containment indices,
// and LP-based facet reduction.

#include <cstdint>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fultoncones/cone.hpp"
#include "fultoncones/linform.hpp"
#include "fultoncones/matrix.hpp"
#include "fultoncones/rational.hpp"

namespace fulton {

struct NonnegSolve {
  bool feasible = false;
  std::vector<Rat> x;  // feasible: x >= 0 with sum_j x[j] * columns[j] = b
  std::vector<Rat> y;  // infeasible: y . columns[j] <= 0 for all j, y . b > 0
};

// Decides whether b lies in the conical hull of the columns. Exact rational
// phase-1 simplex; Bland's rule (smallest-index entering column, smallest
// basic index on ratio ties) guarantees termination.
inline NonnegSolve solve_nonneg(const std::vector<std::vector<Rat>>& columns,
                                const std::vector<Rat>& b) {
  const std::size_t m = columns.size();
  const std::size_t d = b.size();
  for (const auto& col : columns)
    if (col.size() != d) throw std::invalid_argument("column dimension mismatch");

  // Tableau over [real columns | artificial columns | rhs], rows flipped so
  // that the right-hand side is nonnegative.
  std::vector<bool> flip(d, false);
  std::vector<std::vector<Rat>> t(d, std::vector<Rat>(m + d + 1, Rat(0)));
  for (std::size_t i = 0; i < d; ++i) {
    flip[i] = sign(b[i]) < 0;
    for (std::size_t j = 0; j < m; ++j) t[i][j] = flip[i] ? Rat(-columns[j][i]) : columns[j][i];
    t[i][m + i] = 1;
    t[i][m + d] = flip[i] ? Rat(-b[i]) : b[i];
  }
  std::vector<std::size_t> basis(d);
  for (std::size_t i = 0; i < d; ++i) basis[i] = m + i;
  std::vector<bool> art_left(d, false);  // artificials may not re-enter

  // Reduced costs for minimizing the sum of artificials.
  std::vector<Rat> z(m + d, Rat(0));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < d; ++i) z[j] -= t[i][j];

  const std::size_t npos = static_cast<std::size_t>(-1);
  for (;;) {
    std::size_t enter = npos;
    for (std::size_t j = 0; j < m + d; ++j) {
      if (j >= m && art_left[j - m]) continue;
      if (sign(z[j]) < 0) {
        enter = j;
        break;
      }
    }
    if (enter == npos) break;

    std::size_t leave = npos;
    Rat best;
    for (std::size_t i = 0; i < d; ++i) {
      if (sign(t[i][enter]) <= 0) continue;
      Rat ratio = t[i][m + d] / t[i][enter];
      if (leave == npos || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == npos) throw std::logic_error("phase-1 objective unbounded");

    // Pivot on (leave, enter); touch only the nonzero columns of the pivot row.
    Rat piv = t[leave][enter];
    std::vector<std::size_t> nz;
    nz.reserve(m + d + 1);
    for (std::size_t j = 0; j <= m + d; ++j) {
      if (sign(t[leave][j]) == 0) continue;
      t[leave][j] /= piv;
      nz.push_back(j);
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (i == leave || sign(t[i][enter]) == 0) continue;
      Rat f = t[i][enter];
      for (auto j : nz) t[i][j] -= f * t[leave][j];
    }
    if (sign(z[enter]) != 0) {
      Rat f = z[enter];
      for (auto j : nz)
        if (j < m + d) z[j] -= f * t[leave][j];
    }
    if (basis[leave] >= m) art_left[basis[leave] - m] = true;
    basis[leave] = enter;
  }

  Rat val(0);
  for (std::size_t i = 0; i < d; ++i)
    if (basis[i] >= m) val += t[i][m + d];

  NonnegSolve out;
  if (sign(val) > 0) {
    // Simplex multipliers pi_i = 1 - (reduced cost of artificial i) give the
    // separating functional; undo the row flips.
    out.y.assign(d, Rat(0));
    for (std::size_t i = 0; i < d; ++i) {
      Rat pi = Rat(1) - z[m + i];
      out.y[i] = flip[i] ? Rat(-pi) : pi;
    }
  } else {
    out.feasible = true;
    out.x.assign(m, Rat(0));
    for (std::size_t i = 0; i < d; ++i)
      if (basis[i] < m) out.x[basis[i]] = t[i][m + d];
  }
  return out;
}

// Conical-combination witness: target = sum over support of multiplier * form.
struct FarkasCertificate {
  LinForm target;
  std::vector<std::pair<std::size_t, Rat>> support;  // ascending indices, multipliers > 0
};

inline bool verify_certificate(const ConeH& inner, const FarkasCertificate& cert) {
  if (cert.target.dim() != inner.dim()) return false;
  std::vector<Rat> acc(inner.dim(), Rat(0));
  std::size_t prev = static_cast<std::size_t>(-1);
  bool first = true;
  for (const auto& [idx, mult] : cert.support) {
    if (idx >= inner.size()) return false;
    if (!first && idx <= prev) return false;
    first = false;
    prev = idx;
    if (sign(mult) < 0) return false;
    const LinForm& f = inner.forms[idx];
    for (std::size_t i = 0; i < inner.dim(); ++i)
      if (f.c[i] != 0) acc[i] += mult * Rat(static_cast<long>(f.c[i]));
  }
  for (std::size_t i = 0; i < inner.dim(); ++i)
    if (acc[i] != Rat(static_cast<long>(cert.target.c[i]))) return false;
  return true;
}

// Outcome of minimizing a linear form over a cone: bounded (minimum 0, with
// the form certified as a conical combination of the cone's forms) or
// unbounded (with an integer point of the cone where the form is negative).
struct Verdict {
  bool bounded = false;
  FarkasCertificate certificate;
  std::vector<std::int64_t> witness;
};

// Reusable accelerator for many boundedness queries against one fixed inner
// cone: its lineality space, a pool of known interior/boundary points, and a
// cache of verdicts keyed by the target form. Never changes any verdict, only
// how fast one is reached.
struct GammaState {
  bool lineality_ready = false;
  std::vector<std::vector<std::int64_t>> lineality;
  std::vector<std::vector<std::int64_t>> pool;
  std::unordered_map<LinForm, Verdict, LinFormHash> cache;
};

namespace detail {

inline std::vector<std::int64_t> primitive_int_vector(const std::vector<Rat>& v) {
  Int lcm = 1;
  for (const auto& q : v) lcm = ::lcm(lcm, q.get_den());
  std::vector<Int> scaled(v.size());
  Int content = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    scaled[i] = v[i].get_num() * (lcm / v[i].get_den());
    content = ::gcd(content, scaled[i]);
  }
  if (content == 0) content = 1;
  std::vector<std::int64_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Int e = scaled[i] / content;
    if (!e.fits_slong_p()) throw std::overflow_error("witness entry overflow");
    out[i] = e.get_si();
  }
  return out;
}

inline void ensure_lineality(GammaState& st, const ConeH& inner) {
  if (st.lineality_ready) return;
  std::vector<std::vector<std::int64_t>> rows;
  rows.reserve(inner.size());
  for (const auto& f : inner.forms) rows.push_back(f.c);
  st.lineality = null_space_int(rows, inner.dim());
  st.lineality_ready = true;
}

inline void pool_add(GammaState& st, std::vector<std::int64_t> w) {
  for (const auto& p : st.pool)
    if (p == w) return;
  st.pool.push_back(std::move(w));
}

// Plain LP decision, no shared state.
inline Verdict lp_min_over_cone(const ConeH& inner, const LinForm& target) {
  if (target.dim() != inner.dim()) throw std::invalid_argument("target dimension mismatch");
  std::vector<std::vector<Rat>> cols(inner.size(), std::vector<Rat>(inner.dim(), Rat(0)));
  for (std::size_t j = 0; j < inner.size(); ++j)
    for (std::size_t i = 0; i < inner.dim(); ++i)
      cols[j][i] = Rat(static_cast<long>(inner.forms[j].c[i]));
  std::vector<Rat> b(inner.dim());
  for (std::size_t i = 0; i < inner.dim(); ++i) b[i] = Rat(static_cast<long>(target.c[i]));

  auto s = solve_nonneg(cols, b);
  Verdict v;
  if (s.feasible) {
    v.bounded = true;
    v.certificate.target = target;
    for (std::size_t j = 0; j < s.x.size(); ++j)
      if (sign(s.x[j]) != 0) v.certificate.support.emplace_back(j, s.x[j]);
  } else {
    std::vector<Rat> w(inner.dim());
    for (std::size_t i = 0; i < inner.dim(); ++i) w[i] = -s.y[i];
    v.witness = primitive_int_vector(w);
    if (target.eval(v.witness) >= 0) throw std::logic_error("invalid unboundedness witness");
    for (const auto& f : inner.forms)
      if (f.eval(v.witness) < 0) throw std::logic_error("unboundedness witness outside cone");
  }
  return v;
}

}  // namespace detail

// Is min of target over inner bounded (= 0, with Farkas certificate) or does
// inner contain a point with target < 0? Uses and updates the accelerator.
inline Verdict min_over_cone(const ConeH& inner, const LinForm& target, GammaState& st) {
  auto it = st.cache.find(target);
  if (it != st.cache.end()) return it->second;

  detail::ensure_lineality(st, inner);
  for (const auto& l : st.lineality) {
    std::int64_t e = target.eval(l);
    if (e == 0) continue;
    Verdict v;
    v.witness = l;
    if (e > 0)
      for (auto& x : v.witness) x = -x;
    st.cache.emplace(target, v);
    return v;
  }
  for (const auto& w : st.pool) {
    if (target.eval(w) >= 0) continue;
    Verdict v;
    v.witness = w;
    st.cache.emplace(target, v);
    return v;
  }

  Verdict v = detail::lp_min_over_cone(inner, target);
  if (!v.bounded) detail::pool_add(st, v.witness);
  st.cache.emplace(target, v);
  return v;
}

inline Verdict min_over_cone(const ConeH& inner, const LinForm& target) {
  GammaState st;
  return min_over_cone(inner, target, st);
}

struct ContainOptions {
  int workers = 1;
  GammaState* state = nullptr;
};

struct GammaResult {
  std::size_t gamma = 0;
  std::vector<std::size_t> violated;  // ascending indices into outer.forms
};

// Gamma(inner, outer) = number of outer forms whose minimum over inner is
// unbounded below, i.e. the number of outer half-spaces not containing inner.
inline GammaResult containment_index(const ConeH& inner, const ConeH& outer,
                                     const ContainOptions& opts = {}) {
  if (inner.dim() != outer.dim()) throw std::invalid_argument("cone dimension mismatch");
  GammaState local;
  GammaState& st = opts.state ? *opts.state : local;
  detail::ensure_lineality(st, inner);

  std::vector<char> bounded(outer.size(), 0);
  std::vector<std::size_t> unknown;
  for (std::size_t j = 0; j < outer.size(); ++j) {
    const LinForm& f = outer.forms[j];
    if (auto it = st.cache.find(f); it != st.cache.end()) {
      bounded[j] = it->second.bounded;
      continue;
    }
    bool resolved = false;
    for (const auto& l : st.lineality) {
      std::int64_t e = f.eval(l);
      if (e == 0) continue;
      Verdict v;
      v.witness = l;
      if (e > 0)
        for (auto& x : v.witness) x = -x;
      st.cache.emplace(f, std::move(v));
      resolved = true;
      break;
    }
    if (resolved) continue;
    for (const auto& w : st.pool) {
      if (f.eval(w) >= 0) continue;
      Verdict v;
      v.witness = w;
      st.cache.emplace(f, std::move(v));
      resolved = true;
      break;
    }
    if (!resolved) unknown.push_back(j);
  }

  if (opts.workers <= 1 || unknown.size() < 2) {
    for (auto j : unknown) bounded[j] = min_over_cone(inner, outer.forms[j], st).bounded;
  } else {
    const std::size_t nw = std::min<std::size_t>(opts.workers, unknown.size());
    std::vector<Verdict> results(unknown.size());
    std::vector<std::thread> threads;
    threads.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w)
      threads.emplace_back([&, w] {
        for (std::size_t k = w; k < unknown.size(); k += nw)
          results[k] = detail::lp_min_over_cone(inner, outer.forms[unknown[k]]);
      });
    for (auto& th : threads) th.join();
    for (std::size_t k = 0; k < unknown.size(); ++k) {
      if (!results[k].bounded) detail::pool_add(st, results[k].witness);
      st.cache.emplace(outer.forms[unknown[k]], std::move(results[k]));
    }
  }
  for (auto j : unknown) bounded[j] = st.cache.at(outer.forms[j]).bounded;

  GammaResult out;
  for (std::size_t j = 0; j < outer.size(); ++j)
    if (!bounded[j]) out.violated.push_back(j);
  out.gamma = out.violated.size();
  return out;
}

struct ContainsResult {
  bool contained = false;
  std::vector<std::size_t> violated;
  std::vector<FarkasCertificate> certificates;  // aligned with outer.forms when contained
};

// inner is contained in outer iff every outer form is a conical combination
// of inner forms; on success, one certificate per outer form.
inline ContainsResult contains(const ConeH& inner, const ConeH& outer,
                               const ContainOptions& opts = {}) {
  GammaState local;
  ContainOptions o = opts;
  if (!o.state) o.state = &local;
  GammaResult g = containment_index(inner, outer, o);
  ContainsResult out;
  out.violated = g.violated;
  out.contained = g.gamma == 0;
  if (out.contained) {
    out.certificates.reserve(outer.size());
    for (const auto& f : outer.forms) out.certificates.push_back(o.state->cache.at(f).certificate);
  }
  return out;
}

// Minimal defining sub-list: scans forms in canonical order and removes each
// that is a conical combination of the forms still active. Deterministic.
inline ConeH facet_reduce(const ConeH& c) {
  std::vector<bool> active(c.size(), true);
  for (std::size_t j = 0; j < c.size(); ++j) {
    std::vector<std::vector<Rat>> cols;
    cols.reserve(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k == j || !active[k]) continue;
      std::vector<Rat> col(c.dim());
      for (std::size_t i = 0; i < c.dim(); ++i) col[i] = Rat(static_cast<long>(c.forms[k].c[i]));
      cols.push_back(std::move(col));
    }
    std::vector<Rat> b(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i) b[i] = Rat(static_cast<long>(c.forms[j].c[i]));
    if (solve_nonneg(cols, b).feasible) active[j] = false;
  }
  std::vector<LinForm> kept;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (active[j]) kept.push_back(c.forms[j]);
  return make_cone(c.labels, std::move(kept));
}

// Minkowski sum with the line through g: parameter elimination, then LP facet
// reduction. Reference implementation; the filtration engine uses the
// generator-rank fast path instead.
inline ConeH sum_line(const ConeH& c, const std::vector<std::int64_t>& g) {
  auto cand = sum_candidates(c, g, /*line=*/true);
  std::vector<LinForm> forms;
  forms.reserve(cand.items.size());
  for (auto& s : cand.items) forms.push_back(std::move(s.form));
  return facet_reduce(make_cone(c.labels, std::move(forms)));
}

// Minkowski sum with the ray spanned by g.
inline ConeH sum_ray(const ConeH& c, const std::vector<std::int64_t>& g) {
  auto cand = sum_candidates(c, g, /*line=*/false);
  std::vector<LinForm> forms;
  forms.reserve(cand.items.size());
  for (auto& s : cand.items) forms.push_back(std::move(s.form));
  return facet_reduce(make_cone(c.labels, std::move(forms)));
}

}  // namespace fulton
