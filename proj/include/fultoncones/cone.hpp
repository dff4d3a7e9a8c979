#pragma once

// Homogeneous polyhedral cones in H-representation, and the parameter
// elimination step behind Minkowski sums with a single line or ray.
//
// A ConeH holds normalized integer inequalities "form(x) >= 0" over labeled
// coordinates, sorted in descending coefficient-lex order (so the positive
// orthant lists w_1 >= 0, w_2 >= 0, ... in coordinate order), with no
// duplicates and no zero form.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fultoncones/linform.hpp"
#include "fultoncones/matrix.hpp"

namespace fulton {

struct ConeH {
  std::vector<std::string> labels;
  std::vector<LinForm> forms;

  std::size_t dim() const { return labels.size(); }
  std::size_t size() const { return forms.size(); }
};

inline bool cone_form_before(const LinForm& a, const LinForm& b) { return b < a; }

// Normalizes, drops zero forms, dedupes, and sorts into canonical order.
inline ConeH make_cone(std::vector<std::string> labels, std::vector<LinForm> forms) {
  for (auto& f : forms) {
    if (f.dim() != labels.size()) throw std::invalid_argument("form/label dimension mismatch");
    f.normalize();
  }
  forms.erase(std::remove_if(forms.begin(), forms.end(), [](const LinForm& f) { return f.is_zero(); }),
              forms.end());
  std::sort(forms.begin(), forms.end(), cone_form_before);
  forms.erase(std::unique(forms.begin(), forms.end()), forms.end());
  ConeH c;
  c.labels = std::move(labels);
  c.forms = std::move(forms);
  return c;
}

inline ConeH positive_orthant(std::vector<std::string> labels) {
  std::vector<LinForm> forms;
  forms.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    LinForm f(labels.size());
    f.c[i] = 1;
    forms.push_back(std::move(f));
  }
  return make_cone(std::move(labels), std::move(forms));
}

inline bool satisfies(const ConeH& c, const std::vector<std::int64_t>& x) {
  for (const auto& f : c.forms)
    if (f.eval(x) < 0) return false;
  return true;
}

inline bool satisfies(const ConeH& c, const std::vector<Rat>& x) {
  for (const auto& f : c.forms)
    if (sign(f.eval(x)) < 0) return false;
  return true;
}

// Intersects with {x_j = 0 for dropped j} and re-expresses in the kept
// coordinates. Zero forms are dropped and duplicates merged; no facet
// reduction is performed.
inline ConeH restrict_to_section(const ConeH& c, const std::vector<std::size_t>& keep) {
  std::vector<std::string> labels;
  labels.reserve(keep.size());
  for (auto k : keep) {
    if (k >= c.dim()) throw std::invalid_argument("keep index out of range");
    labels.push_back(c.labels[k]);
  }
  std::vector<LinForm> forms;
  for (const auto& f : c.forms) {
    LinForm g(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) g.c[i] = f.c[keep[i]];
    if (!g.is_zero()) forms.push_back(std::move(g));
  }
  return make_cone(std::move(labels), std::move(forms));
}

// One candidate inequality of the enlarged cone C + Q<g> (or C + Q>=0 g),
// with provenance into the parent cone's form list: either a surviving form
// or the combination (alpha * neg + beta * pos) / content.
struct SumCandidate {
  LinForm form;
  bool is_combo = false;
  std::size_t survivor = 0;     // index of surviving parent form
  std::size_t parent_pos = 0;   // combo: index of the H(g) > 0 parent
  std::size_t parent_neg = 0;   // combo: index of the H(g) < 0 parent
  std::int64_t alpha = 0;       // combo: multiplier of the negative parent (= H_pos(g))
  std::int64_t beta = 0;        // combo: multiplier of the positive parent (= -H_neg(g))
  std::int64_t content = 1;     // gcd divided out of the raw combination
};

struct SumCandidates {
  std::vector<SumCandidate> items;   // deduplicated, deterministic order
  std::size_t raw_count = 0;         // distinct inequalities after elimination
  bool raw_count_pruned = false;     // true when raw_count reflects post-prune candidates
};

namespace detail {

struct U128Hash {
  // Two independent 64-bit FNV-1a streams over the normalized coefficients;
  // used only to count distinct combinations without storing them.
  static std::pair<std::uint64_t, std::uint64_t> of(const LinForm& f) {
    std::uint64_t h1 = 1469598103934665603ull, h2 = 0xcbf29ce484222325ull ^ 0x9e3779b97f4a7c15ull;
    for (auto v : f.c) {
      auto u = static_cast<std::uint64_t>(v);
      for (int k = 0; k < 8; ++k) {
        std::uint64_t byte = (u >> (8 * k)) & 0xff;
        h1 = (h1 ^ byte) * 1099511628211ull;
        h2 = (h2 ^ (byte + 0x9e)) * 0x100000001b3ull;
      }
    }
    return {h1, h2};
  }
};

}  // namespace detail

// Eliminates the parameter t from {x - t*g in C} (line) or {x - t*g in C,
// t >= 0} (ray): survivors are the forms with H(g) = 0 (plus H(g) > 0 for a
// ray), and each (H+, H-) pair contributes H+(g)*H- + |H-(g)|*H+.
//
// max_support > 0 discards combinations with more than max_support nonzero
// entries; callers use this only when such forms are provably redundant.
// raw_count always counts the distinct unpruned candidates unless that count
// would require excessive memory (raw_count_pruned flags the fallback).
inline SumCandidates sum_candidates(const ConeH& c, const std::vector<std::int64_t>& g,
                                    bool line, std::size_t max_support = 0) {
  if (g.size() != c.dim()) throw std::invalid_argument("generator dimension mismatch");
  bool zero = true;
  for (auto v : g) zero = zero && v == 0;
  if (zero) throw std::invalid_argument("zero generator");

  std::vector<std::size_t> pos, neg;
  std::vector<std::int64_t> eval(c.size());
  SumCandidates out;
  for (std::size_t j = 0; j < c.size(); ++j) {
    eval[j] = c.forms[j].eval(g);
    if (eval[j] > 0) pos.push_back(j);
    else if (eval[j] < 0) neg.push_back(j);
    SumCandidate s;
    if (eval[j] == 0 || (!line && eval[j] > 0)) {
      s.form = c.forms[j];
      s.survivor = j;
      out.items.push_back(std::move(s));
    }
  }

  std::unordered_set<LinForm, LinFormHash> seen;
  for (const auto& s : out.items) seen.insert(s.form);
  const std::size_t survivors = out.items.size();

  // Exact storage of every distinct combination is fine for moderate pair
  // counts; beyond that, count distinct combinations by 128-bit hash and
  // store only the ones that can still be facets.
  const std::size_t pair_count = pos.size() * neg.size();
  const bool exact_store = pair_count <= 400000;
  const bool exact_raw = pair_count <= 30000000;

  std::vector<std::pair<std::uint64_t, std::uint64_t>> combo_hashes;
  if (!exact_store && exact_raw) combo_hashes.reserve(pair_count);
  std::unordered_set<std::uint64_t> survivor_h1;
  if (!exact_store)
    for (const auto& s : out.items) survivor_h1.insert(detail::U128Hash::of(s.form).first);

  for (auto p : pos) {
    for (auto m : neg) {
      LinForm combo = combine(eval[p], c.forms[m], -eval[m], c.forms[p]);
      LinForm normal = combo.normalized();
      if (normal.is_zero()) continue;  // opposite forms cancel; not an inequality
      std::int64_t content = 1;  // gcd divided out by normalization
      for (std::size_t i = 0; i < combo.dim(); ++i)
        if (normal.c[i] != 0) {
          content = combo.c[i] / normal.c[i];
          break;
        }
      if (exact_store) {
        if (!seen.insert(normal).second) continue;
        SumCandidate s;
        s.is_combo = true;
        s.parent_pos = p;
        s.parent_neg = m;
        s.alpha = eval[p];
        s.beta = -eval[m];
        s.content = content;
        s.form = std::move(normal);
        out.items.push_back(std::move(s));
      } else {
        auto h = detail::U128Hash::of(normal);
        if (exact_raw && !survivor_h1.count(h.first)) combo_hashes.push_back(h);
        if (max_support > 0 && normal.support_size() > max_support) continue;
        if (!seen.insert(normal).second) continue;
        SumCandidate s;
        s.is_combo = true;
        s.parent_pos = p;
        s.parent_neg = m;
        s.alpha = eval[p];
        s.beta = -eval[m];
        s.content = content;
        s.form = std::move(normal);
        out.items.push_back(std::move(s));
      }
    }
  }

  if (exact_store) {
    out.raw_count = out.items.size();
    if (max_support > 0) {
      std::vector<SumCandidate> kept;
      for (auto& s : out.items)
        if (!s.is_combo || s.form.support_size() <= max_support) kept.push_back(std::move(s));
      out.items = std::move(kept);
    }
  } else if (exact_raw) {
    std::sort(combo_hashes.begin(), combo_hashes.end());
    combo_hashes.erase(std::unique(combo_hashes.begin(), combo_hashes.end()),
                       combo_hashes.end());
    out.raw_count = survivors + combo_hashes.size();
  } else {
    out.raw_count = out.items.size();
    out.raw_count_pruned = true;
  }
  return out;
}

// V-representation knowledge of a cone built as "orthant + added generators":
// the d unit rays plus the listed rays (or lines, in which case their span is
// part of the lineality space).
struct GeneratorSet {
  std::size_t dim = 0;
  bool lines = false;
  std::vector<std::vector<std::int64_t>> added;
};

// Exact facet test for a VALID inequality H of the cone described by gens
// (which must be full-dimensional, as orthant-containing cones are): the face
// {H = 0} is spanned by the unit rays on H's zero coordinates plus the added
// generators with H(g) = 0, so H is a facet iff the zero-eval added
// generators projected onto H's support have rank (support size - 1).
inline bool is_facet_by_rank(const LinForm& h, const GeneratorSet& gens) {
  if (h.dim() != gens.dim) throw std::invalid_argument("dimension mismatch");
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < h.dim(); ++i)
    if (h.c[i] != 0) support.push_back(i);
  if (support.empty()) return false;

  std::vector<std::vector<std::int64_t>> proj;
  for (const auto& g : gens.added) {
    std::int64_t e = h.eval(g);
    if (gens.lines && e != 0) throw std::logic_error("inequality not valid on a line generator");
    if (e != 0) continue;
    std::vector<std::int64_t> row(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) row[i] = g[support[i]];
    proj.push_back(std::move(row));
  }
  if (proj.size() + 1 < support.size()) return false;
  return int_rank(proj, support.size()) == support.size() - 1;
}

struct SumStepResult {
  ConeH cone;                      // the enlarged cone, facets only
  std::size_t raw_count = 0;       // distinct inequalities after elimination
  bool raw_count_pruned = false;
  std::vector<SumCandidate> kept;  // the facet candidates (with provenance)
};

// One filtration step on an orthant-plus-generators cone: parameter
// elimination followed by the exact generator-rank facet test. gens must
// describe c's added generators; g is appended to it. Surviving parent facets
// stay facets (their face can only gain the new generator, or is untouched
// when it evaluates positively), so only the fresh combinations are tested.
// Any facet's support size is at most (number of added generators) + 1, which
// justifies pruning larger combinations before the rank test.
inline SumStepResult sum_step_rank(const ConeH& c, GeneratorSet& gens,
                                   const std::vector<std::int64_t>& g, bool line) {
  if (gens.dim != c.dim()) throw std::invalid_argument("generator set dimension mismatch");
  SumCandidates cand = sum_candidates(c, g, line, gens.added.size() + 2);
  gens.added.push_back(g);

  SumStepResult out;
  out.raw_count = cand.raw_count;
  out.raw_count_pruned = cand.raw_count_pruned;
  std::vector<LinForm> forms;
  for (auto& s : cand.items) {
    if (s.is_combo && !is_facet_by_rank(s.form, gens)) continue;
    forms.push_back(s.form);
    out.kept.push_back(std::move(s));
  }
  out.cone = make_cone(c.labels, std::move(forms));
  return out;
}

}  // namespace fulton
