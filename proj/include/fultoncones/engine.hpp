#pragma once

// Incremental Minkowski-sum filtrations of cones attached to the moduli
// combinatorics: the ambient filtration (positive orthant plus one relation
// line per step, containment measured against the F-nef cone) and the
// quotient filtration (orthant of a Picard-group basis plus one boundary-ray
// per step, containment measured against the restricted F-nef cone), with
// certificate bookkeeping, greedy direction selection, effective
// representations, and the theorem-level certificate bundles.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fultoncones/cone.hpp"
#include "fultoncones/lp.hpp"
#include "fultoncones/moduli.hpp"

namespace fulton {

inline std::vector<std::string> class_labels(const AmbientIndex& ix) {
  std::vector<std::string> out;
  out.reserve(ix.N());
  for (std::size_t i = 0; i < ix.N(); ++i) out.push_back(ix.label(i));
  return out;
}

inline std::vector<std::string> class_labels(const std::vector<BoundaryClass>& cs) {
  std::vector<std::string> out;
  out.reserve(cs.size());
  for (const auto& c : cs) out.push_back(c.label());
  return out;
}

inline ConeH fnef_cone(const AmbientIndex& ix) {
  return make_cone(class_labels(ix), fnef_forms(ix));
}

// The F-nef cone expressed in the coordinates of a Picard basis: substitute 0
// for the non-basis coordinates of the ambient description (a section of the
// quotient by the relation space, on which every F-nef form vanishes).
inline ConeH restricted_fnef_cone(const QuotientCoords& qc) {
  ConeH full = fnef_cone(qc.full);
  std::vector<std::size_t> keep;
  keep.reserve(qc.basis.size());
  for (const auto& c : qc.basis) keep.push_back(static_cast<std::size_t>(qc.full.index_of(c)));
  return restrict_to_section(full, keep);
}

struct StepRecord {
  std::size_t step = 0;
  std::string generator_label = "-";
  std::vector<std::int64_t> generator;  // empty at step 0
  std::size_t raw_count = 0;            // distinct inequalities after elimination
  bool raw_count_pruned = false;
  std::size_t facet_count = 0;
  std::size_t gamma = 0;
  std::vector<std::size_t> violated;  // ascending indices into the step's cone forms
  std::size_t enlarged = 0;           // previous violated half-spaces enlarged by the generator
  std::size_t prev_gamma = 0;
};

struct FiltrationReport {
  int n = 0;
  std::string mode;  // "ambient-line" or "quotient-ray"
  bool contained = false;
  bool budget_exhausted = false;
  std::vector<StepRecord> steps;
};

struct FiltrationRun {
  ConeH inner;
  GeneratorSet gens;
  std::vector<ConeH> cones;  // cones[i] belongs to report.steps[i]
  GammaState state;          // verdicts (with certificates) for every facet seen
  FiltrationReport report;
};

struct EngineOptions {
  int workers = 1;
  std::size_t max_steps = static_cast<std::size_t>(-1);
  bool allow_deep_ambient7 = false;  // permit ambient n=7 steps beyond 7
  bool stop_on_containment = false;
  bool greedy = false;  // quotient mode: pick each direction by the greedy rule
};

namespace detail {

// When both parents of a combination are bounded over the inner cone, the
// combination inherits a certificate: (alpha * cert_neg + beta * cert_pos) /
// content, since form = (alpha * neg + beta * pos) / content.
inline void compose_certificate(GammaState& st, const SumCandidate& s, const ConeH& prev) {
  if (!s.is_combo || st.cache.count(s.form)) return;
  auto a = st.cache.find(prev.forms[s.parent_neg]);
  auto b = st.cache.find(prev.forms[s.parent_pos]);
  if (a == st.cache.end() || !a->second.bounded) return;
  if (b == st.cache.end() || !b->second.bounded) return;
  Rat ca = rat_of(s.alpha, s.content), cb = rat_of(s.beta, s.content);
  const auto& sa = a->second.certificate.support;
  const auto& sb = b->second.certificate.support;
  Verdict v;
  v.bounded = true;
  v.certificate.target = s.form;
  auto& sup = v.certificate.support;
  std::size_t i = 0, j = 0;
  while (i < sa.size() || j < sb.size()) {
    if (j == sb.size() || (i < sa.size() && sa[i].first < sb[j].first)) {
      sup.emplace_back(sa[i].first, Rat(ca * sa[i].second));
      ++i;
    } else if (i == sa.size() || sb[j].first < sa[i].first) {
      sup.emplace_back(sb[j].first, Rat(cb * sb[j].second));
      ++j;
    } else {
      sup.emplace_back(sa[i].first, Rat(ca * sa[i].second + cb * sb[j].second));
      ++i;
      ++j;
    }
  }
  st.cache.emplace(s.form, std::move(v));
}

inline FiltrationRun start_filtration(int n, std::string mode, ConeH inner, ConeH start,
                                      bool lines, int workers) {
  FiltrationRun run;
  run.inner = std::move(inner);
  run.gens.dim = start.dim();
  run.gens.lines = lines;
  run.report.n = n;
  run.report.mode = std::move(mode);

  StepRecord r0;
  r0.raw_count = start.size();
  r0.facet_count = start.size();
  GammaResult g = containment_index(run.inner, start, {workers, &run.state});
  r0.gamma = g.gamma;
  r0.violated = std::move(g.violated);
  run.report.steps.push_back(std::move(r0));
  run.cones.push_back(std::move(start));
  return run;
}

inline void filtration_step(FiltrationRun& run, const std::vector<std::int64_t>& g,
                            const std::string& label, int workers) {
  const bool line = run.gens.lines;
  const ConeH& prev = run.cones.back();
  const StepRecord& prevRec = run.report.steps.back();

  StepRecord rec;
  rec.step = run.report.steps.size();
  rec.generator_label = label;
  rec.generator = g;
  rec.prev_gamma = prevRec.gamma;
  for (auto j : prevRec.violated) {
    std::int64_t e = prev.forms[j].eval(g);
    if (line ? e != 0 : e < 0) ++rec.enlarged;
  }

  SumStepResult sr = sum_step_rank(prev, run.gens, g, line);
  for (const auto& s : sr.kept) compose_certificate(run.state, s, prev);
  rec.raw_count = sr.raw_count;
  rec.raw_count_pruned = sr.raw_count_pruned;
  rec.facet_count = sr.cone.size();
  run.cones.push_back(std::move(sr.cone));

  GammaResult gr = containment_index(run.inner, run.cones.back(), {workers, &run.state});
  rec.gamma = gr.gamma;
  rec.violated = std::move(gr.violated);
  run.report.steps.push_back(std::move(rec));
}

inline void finish_report(FiltrationRun& run) {
  run.report.contained = run.report.steps.back().gamma == 0;
  run.report.budget_exhausted = !run.report.contained;
}

}  // namespace detail

// Ambient filtration: E^(0) = positive orthant of W_n, E^(i) = E^(i-1) plus
// the line through the i-th relation-basis vector; Gamma against the F-nef
// cone at every step.
inline FiltrationRun run_ambient_filtration(int n, const EngineOptions& opts = {}) {
  if (n < 4 || n > 7) throw std::invalid_argument("filtrations support n = 4..7");
  AmbientIndex ix = enumerate_classes(n);
  std::vector<LinForm> rels = relation_basis(ix);

  std::size_t budget = 2 * rels.size();
  std::size_t planned = std::min({rels.size(), opts.max_steps, budget});
  if (n == 7 && planned > 7) {
    if (opts.max_steps != static_cast<std::size_t>(-1) && !opts.allow_deep_ambient7)
      throw std::invalid_argument(
          "ambient n=7 steps beyond 7 are refused without an explicit override");
    if (!opts.allow_deep_ambient7) planned = 7;
  }

  FiltrationRun run = detail::start_filtration(
      n, "ambient-line", fnef_cone(ix), positive_orthant(class_labels(ix)), true, opts.workers);
  for (std::size_t s = 0; s < planned; ++s) {
    if (opts.stop_on_containment && run.report.steps.back().gamma == 0) break;
    detail::filtration_step(run, rels[s].c, "v" + std::to_string(s + 1), opts.workers);
  }
  detail::finish_report(run);
  return run;
}

// The canonical quotient step order: all classes outside the basis in
// label-lex order, with the greedy first picks (which the tables follow)
// moved to the front for n = 6 and n = 7.
inline std::vector<BoundaryClass> default_quotient_order(const QuotientCoords& qc) {
  std::vector<BoundaryClass> rest;
  for (const auto& c : qc.full.classes)
    if (!qc.in_basis(c)) rest.push_back(c);

  std::vector<std::vector<int>> prefix;
  if (qc.n() == 6) prefix = {{1, 2, 3}};
  if (qc.n() == 7) prefix = {{1, 2, 3}, {4, 6, 7}, {1, 3, 5}, {2, 4, 6}, {3, 5, 7}};
  std::vector<BoundaryClass> out;
  for (const auto& members : prefix) {
    BoundaryClass c = canonical_class(qc.n(), members);
    for (std::size_t i = 0; i < rest.size(); ++i)
      if (rest[i] == c) {
        out.push_back(c);
        rest.erase(rest.begin() + i);
        break;
      }
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

struct GreedyPick {
  BoundaryClass cls;
  std::size_t hits = 0;
};

// The direction (among candidates) whose ray enlarges the most violated
// half-spaces of the current cone; ties go to the label-lex smallest class.
inline GreedyPick greedy_select(const ConeH& cone, const std::vector<std::size_t>& violated,
                                const std::vector<BoundaryClass>& candidates,
                                const QuotientCoords& qc) {
  if (violated.empty()) throw std::invalid_argument("greedy selection needs violated half-spaces");
  if (candidates.empty()) throw std::invalid_argument("greedy selection needs candidates");
  GreedyPick best;
  bool have = false;
  for (const auto& c : candidates) {
    std::vector<std::int64_t> dir = qc.primitive_direction(c);
    std::size_t hits = 0;
    for (auto j : violated)
      if (cone.forms[j].eval(dir) < 0) ++hits;
    if (!have || hits > best.hits) {
      best = {c, hits};
      have = true;
    }
  }
  if (best.hits == 0)
    throw std::runtime_error("greedy dead end: no candidate enlarges a violated half-space");
  return best;
}

// Quotient filtration: E^(0) = positive orthant of the basis coordinates,
// each step adds the ray of one non-basis boundary class (explicit order,
// the built-in default, or greedy); Gamma against the restricted F-nef cone.
inline FiltrationRun run_quotient_filtration(int n, const std::vector<BoundaryClass>& basis,
                                             std::vector<BoundaryClass> order,
                                             const EngineOptions& opts = {}) {
  if (n < 4 || n > 7) throw std::invalid_argument("filtrations support n = 4..7");
  AmbientIndex ix = enumerate_classes(n);
  QuotientCoords qc = quotient_coordinates(ix, basis);
  if (order.empty() && !opts.greedy) order = default_quotient_order(qc);
  for (const auto& c : order) {
    if (c.n != n) throw std::invalid_argument("order class has wrong n");
    if (qc.in_basis(c)) throw std::invalid_argument("order class lies in the basis");
  }
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (order[i] == order[j]) throw std::invalid_argument("duplicate class in order");

  const std::size_t budget = dim_Vn(n);  // number of non-basis classes
  std::size_t planned = std::min(opts.greedy ? budget : order.size(),
                                 std::min(opts.max_steps, budget));

  FiltrationRun run = detail::start_filtration(n, "quotient-ray", restricted_fnef_cone(qc),
                                               positive_orthant(class_labels(qc.basis)), false,
                                               opts.workers);
  std::vector<BoundaryClass> remaining;
  if (opts.greedy)
    for (const auto& c : qc.full.classes)
      if (!qc.in_basis(c)) remaining.push_back(c);

  for (std::size_t s = 0; s < planned; ++s) {
    if (run.report.steps.back().gamma == 0 && (opts.greedy || opts.stop_on_containment)) break;
    BoundaryClass next{n, 0};
    if (opts.greedy) {
      GreedyPick pick =
          greedy_select(run.cones.back(), run.report.steps.back().violated, remaining, qc);
      next = pick.cls;
      for (std::size_t i = 0; i < remaining.size(); ++i)
        if (remaining[i] == next) {
          remaining.erase(remaining.begin() + i);
          break;
        }
    } else {
      next = order[s];
    }
    detail::filtration_step(run, qc.primitive_direction(next), next.label(), opts.workers);
  }
  detail::finish_report(run);
  return run;
}

// Rewrites a divisor vector a as b = a + sum_m t_m v^(m) with b >= 0
// coordinatewise (the v^(m) being the relation basis), or produces a
// separating witness s >= 0 with s . v^(m) = 0 for all m and s . a < 0.
struct EffectiveRepresentation {
  bool feasible = false;
  std::vector<Rat> t;        // relation-basis multipliers
  std::vector<Rat> b;        // the nonnegative representative
  std::vector<Rat> witness;  // infeasible case
};

inline EffectiveRepresentation effective_representation(const AmbientIndex& ix,
                                                        const std::vector<Rat>& a) {
  const std::size_t N = ix.N();
  if (a.size() != N) throw std::invalid_argument("divisor dimension mismatch");
  std::vector<LinForm> rels = relation_basis(ix);
  const std::size_t M = rels.size();

  // An already-nonnegative divisor is its own representative.
  bool nonneg = true;
  for (const auto& q : a) nonneg = nonneg && sign(q) >= 0;
  if (nonneg) {
    EffectiveRepresentation out;
    out.feasible = true;
    out.t.assign(M, Rat(0));
    out.b = a;
    return out;
  }

  // b - sum t_m v^(m) = a with b >= 0 and t free: columns [V | -V | -I],
  // right-hand side -a, over nonnegative variables (t+, t-, b).
  std::vector<std::vector<Rat>> cols(2 * M + N, std::vector<Rat>(N, Rat(0)));
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t i = 0; i < N; ++i) {
      cols[m][i] = rat_of(rels[m].c[i]);
      cols[M + m][i] = rat_of(-rels[m].c[i]);
    }
  for (std::size_t i = 0; i < N; ++i) cols[2 * M + i][i] = -1;
  std::vector<Rat> rhs(N);
  for (std::size_t i = 0; i < N; ++i) rhs[i] = -a[i];

  NonnegSolve s = solve_nonneg(cols, rhs);
  EffectiveRepresentation out;
  if (s.feasible) {
    out.feasible = true;
    out.t.resize(M);
    for (std::size_t m = 0; m < M; ++m) out.t[m] = s.x[m] - s.x[M + m];
    out.b.assign(a.begin(), a.end());
    for (std::size_t m = 0; m < M; ++m) {
      if (sign(out.t[m]) == 0) continue;
      for (std::size_t i = 0; i < N; ++i)
        if (rels[m].c[i] != 0) out.b[i] += out.t[m] * rat_of(rels[m].c[i]);
    }
    for (std::size_t i = 0; i < N; ++i) {
      if (sign(out.b[i]) < 0) throw std::logic_error("effective representative not nonnegative");
      if (out.b[i] != s.x[2 * M + i]) throw std::logic_error("effective representative mismatch");
    }
  } else {
    out.witness = std::move(s.y);
    Rat dot(0);
    for (std::size_t i = 0; i < N; ++i) {
      if (sign(out.witness[i]) < 0) throw std::logic_error("separating witness not nonnegative");
      dot += out.witness[i] * a[i];
    }
    if (sign(dot) >= 0) throw std::logic_error("separating witness does not separate");
    for (const auto& r : rels) {
      Rat rd(0);
      for (std::size_t i = 0; i < N; ++i)
        if (r.c[i] != 0) rd += out.witness[i] * rat_of(r.c[i]);
      if (sign(rd) != 0) throw std::logic_error("separating witness not orthogonal to relations");
    }
  }
  return out;
}

// Worst-case facet bound for d elimination rounds starting from N
// inequalities: N^(2^d) / 4^(2^d - 1).
inline Rat worst_case_bound(std::size_t N, std::size_t d) {
  if (N == 0) throw std::invalid_argument("N must be positive");
  if (d > 16) throw std::invalid_argument("d must be at most 16");
  unsigned long e = 1ul << d;
  Int num, den;
  mpz_pow_ui(num.get_mpz_t(), Int(static_cast<long>(N)).get_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), Int(4).get_mpz_t(), e - 1);
  Rat q(num);
  q /= Rat(den);
  return q;
}

// The full containment proof for one n: runs the canonical filtration to
// Gamma = 0 and returns one verified Farkas certificate per facet of the
// final cone (each certifying that facet as valid on the F-nef cone).
struct ProofBundle {
  FiltrationRun run;
  std::vector<FarkasCertificate> certificates;  // aligned with run.cones.back().forms
};

inline ProofBundle verify_theorem(int n, int workers = 1) {
  if (n < 5 || n > 7) throw std::invalid_argument("verify_theorem supports n = 5, 6, 7");
  EngineOptions opts;
  opts.workers = workers;
  opts.stop_on_containment = true;

  ProofBundle out;
  if (n == 5) {
    out.run = run_ambient_filtration(5, opts);
  } else {
    std::vector<BoundaryClass> order;
    if (n == 6) order = {canonical_class(6, {1, 2, 3})};
    else
      for (auto members : std::vector<std::vector<int>>{
               {1, 2, 3}, {4, 6, 7}, {1, 3, 5}, {2, 4, 6}, {3, 5, 7}})
        order.push_back(canonical_class(7, members));
    out.run = run_quotient_filtration(n, basis_Bn(n), order, opts);
  }
  if (!out.run.report.contained)
    throw std::logic_error("theorem filtration failed to reach containment");

  const ConeH& final_cone = out.run.cones.back();
  out.certificates.reserve(final_cone.size());
  for (const auto& f : final_cone.forms) {
    const Verdict& v = out.run.state.cache.at(f);
    if (!v.bounded) throw std::logic_error("missing certificate for contained cone");
    if (!verify_certificate(out.run.inner, v.certificate))
      throw std::logic_error("certificate failed arithmetic verification");
    out.certificates.push_back(v.certificate);
  }
  return out;
}

}  // namespace fulton
