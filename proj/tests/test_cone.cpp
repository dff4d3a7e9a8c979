#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "fultoncones/cone.hpp"
#include "fultoncones/engine.hpp"
#include "fultoncones/lp.hpp"
#include "fultoncones/moduli.hpp"
#include "golden.hpp"
#include "oracle.hpp"

using namespace fulton;

namespace {

LinForm form_of(std::vector<std::int64_t> c) {
  LinForm f;
  f.c = std::move(c);
  return f;
}

std::vector<std::string> letters(std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

// Runs the ambient filtration chain at level n with sum_step_rank and returns
// the cones E^(0)..E^(k); cross-checks every step against the LP-based
// facet_reduce path and the subset-enumeration oracle.
std::vector<ConeH> checked_ambient_chain(int n) {
  AmbientIndex ix = enumerate_classes(n);
  std::vector<ConeH> cones = {positive_orthant(class_labels(ix))};
  GeneratorSet gens{ix.N(), true, {}};
  for (const LinForm& v : relation_basis(ix)) {
    const ConeH& prev = cones.back();
    SumStepResult step = sum_step_rank(prev, gens, v.c, true);
    ConeH via_lp = sum_line(prev, v.c);
    REQUIRE(step.cone.forms == via_lp.forms);
    REQUIRE(oracle::facets_match(step.cone));
    REQUIRE(oracle::sum_is_correct(prev, v.c, true, step.cone));
    cones.push_back(step.cone);
  }
  return cones;
}

}  // namespace

TEST_CASE("make_cone canonicalizes forms") {
  auto labels = letters(3);
  std::vector<LinForm> forms = {
      form_of({0, 2, 0}),   // scales to a unit form
      form_of({3, 0, 0}),   // scales to a unit form
      form_of({1, 0, 0}),   // duplicate after normalization
      form_of({0, 0, 0}),   // dropped
      form_of({0, 0, -5}),  // normalizes to (0,0,-1), stays distinct
      form_of({0, 0, 1}),
  };
  ConeH c = make_cone(labels, forms);
  REQUIRE(c.dim() == 3);
  REQUIRE(c.size() == 4);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    REQUIRE(cone_form_before(c.forms[i], c.forms[i + 1]));
  }
  ConeH again = make_cone(c.labels, c.forms);
  REQUIRE(again.forms == c.forms);  // idempotent

  ConeH orthant = positive_orthant(labels);
  REQUIRE(orthant.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t nnz = 0, unit = 0;
    for (std::size_t j = 0; j < 3; ++j)
      if (orthant.forms[i].c[j] != 0) {
        ++nnz;
        unit = j;
      }
    REQUIRE(nnz == 1);
    REQUIRE(orthant.forms[i].c[unit] == 1);
  }
}

TEST_CASE("satisfies checks all inequalities") {
  ConeH orthant = positive_orthant(letters(4));
  REQUIRE(satisfies(orthant, std::vector<std::int64_t>{0, 0, 0, 0}));
  REQUIRE(satisfies(orthant, std::vector<std::int64_t>{1, 2, 0, 5}));
  REQUIRE_FALSE(satisfies(orthant, std::vector<std::int64_t>{1, -1, 0, 0}));
  REQUIRE(satisfies(orthant, std::vector<Rat>{Rat(1, 2), Rat(0), Rat(3), Rat(0)}));
  REQUIRE_FALSE(satisfies(orthant, std::vector<Rat>{Rat(-1, 7), Rat(0), Rat(0), Rat(0)}));
}

TEST_CASE("restrict_to_section substitutes zero and drops dead forms") {
  auto labels = letters(3);
  ConeH c = make_cone(labels, {form_of({1, 1, 0}), form_of({0, 0, 1}), form_of({1, 0, -2})});
  ConeH r = restrict_to_section(c, {0, 1});
  REQUIRE(r.labels == std::vector<std::string>{"a", "b"});
  // (0,0,1) restricts to the zero form and disappears; (1,0,-2) -> (1,0);
  // (1,1,0) -> (1,1).
  REQUIRE(r.size() == 2);
  ConeH expect = make_cone(r.labels, {form_of({1, 1}), form_of({1, 0})});
  REQUIRE(r.forms == expect.forms);

  // Both restricted forms are facets: neither implies the other.
  REQUIRE(facet_reduce(r).size() == 2);

  // facet_reduce does prune true redundancy: a+b >= 0 inside the orthant.
  ConeH padded = make_cone(r.labels, {form_of({1, 0}), form_of({0, 1}), form_of({1, 1})});
  REQUIRE(facet_reduce(padded).forms == positive_orthant(r.labels).forms);
}

TEST_CASE("sum with a generator already in the cone is unchanged") {
  ConeH orthant = positive_orthant(letters(4));
  GeneratorSet gens{4, false, {}};
  SumStepResult step = sum_step_rank(orthant, gens, {1, 2, 0, 0}, false);
  REQUIRE(step.cone.forms == orthant.forms);
  REQUIRE(step.raw_count == 4);  // nothing eliminated, nothing combined

  // A generator inside the lineality of every form changes nothing either.
  ConeH half = make_cone(letters(2), {form_of({1, 0})});
  GeneratorSet g2{2, true, {}};
  SumStepResult s2 = sum_step_rank(half, g2, {0, 1}, true);
  REQUIRE(s2.cone.forms == half.forms);
}

TEST_CASE("first elimination step reproduces the printed system") {
  AmbientIndex ix = enumerate_classes(5);
  auto labels = class_labels(ix);
  ConeH orthant = positive_orthant(labels);
  std::vector<LinForm> rels = relation_basis(ix);
  REQUIRE(rels.size() == 5);

  SumCandidates cand = sum_candidates(orthant, rels[0].c, true);
  REQUIRE(cand.raw_count == 10);
  REQUIRE_FALSE(cand.raw_count_pruned);
  std::size_t combos = 0;
  for (const auto& s : cand.items) {
    if (!s.is_combo) continue;
    ++combos;
    REQUIRE(s.alpha == 1);
    REQUIRE(s.beta == 1);
    REQUIRE(s.content == 1);
    // parents must evaluate with opposite signs on the generator
    REQUIRE(orthant.forms[s.parent_pos].eval(rels[0].c) > 0);
    REQUIRE(orthant.forms[s.parent_neg].eval(rels[0].c) < 0);
    LinForm recombined = combine(s.alpha, orthant.forms[s.parent_neg], s.beta,
                                 orthant.forms[s.parent_pos]);
    REQUIRE(recombined == s.form);  // content is 1 here, so no rescale
  }
  REQUIRE(combos == 4);

  GeneratorSet gens{ix.N(), true, {}};
  SumStepResult step = sum_step_rank(orthant, gens, rels[0].c, true);
  std::vector<LinForm> printed;
  for (const auto& t : golden::e5_step1_system()) printed.push_back(golden::parse_terms(ix, t));
  ConeH expect = make_cone(labels, printed);
  REQUIRE(step.cone.forms == expect.forms);
}

TEST_CASE("five-point chain: facet counts, raw count, final facets") {
  AmbientIndex ix = enumerate_classes(5);
  std::vector<ConeH> cones = checked_ambient_chain(5);
  REQUIRE(cones.size() == 6);

  // Facet counts along the chain, starting from the orthant.
  std::vector<int> facets;
  for (const auto& c : cones) facets.push_back(static_cast<int>(c.size()));
  REQUIRE(facets == std::vector<int>{10, 10, 12, 11, 10, 10});
  // The five published counts cover the orthant and the first four sums.
  for (std::size_t i = 0; i < golden::e5_facet_counts().size(); ++i)
    REQUIRE(facets[i] == golden::e5_facet_counts()[i]);

  // Raw (pre-reduction) count at the second step.
  ConeH e1 = cones[1];
  GeneratorSet gens{ix.N(), true, {relation_basis(ix)[0].c}};
  SumStepResult step2 = sum_step_rank(e1, gens, relation_basis(ix)[1].c, true);
  REQUIRE(step2.raw_count == static_cast<std::size_t>(golden::e5_raw_counts()[0]));

  std::vector<LinForm> printed;
  for (const auto& t : golden::e5_facets()) printed.push_back(golden::parse_terms(ix, t));
  ConeH expect = make_cone(cones.back().labels, printed);
  REQUIRE(cones.back().forms == expect.forms);
}

TEST_CASE("four-point chain collapses onto the F-nef cone") {
  AmbientIndex ix = enumerate_classes(4);
  std::vector<ConeH> cones = checked_ambient_chain(4);
  REQUIRE(cones.size() == 3);
  REQUIRE(cones[1].size() == 2);
  REQUIRE(cones[2].size() == 1);
  ConeH fnef = fnef_cone(ix);
  REQUIRE(fnef.size() == 1);
  REQUIRE(cones.back().forms == fnef.forms);
  // Equality of the two cones, certified in both directions.
  REQUIRE(contains(fnef, cones.back()).contained);
  REQUIRE(contains(cones.back(), fnef).contained);
}

TEST_CASE("line sum agrees with two opposite ray sums") {
  AmbientIndex ix = enumerate_classes(5);
  ConeH orthant = positive_orthant(class_labels(ix));
  std::vector<LinForm> rels = relation_basis(ix);
  const LinForm& v = rels[2];
  ConeH by_line = sum_line(orthant, v.c);
  std::vector<std::int64_t> neg = v.c;
  for (auto& x : neg) x = -x;
  ConeH by_rays = sum_ray(sum_ray(orthant, v.c), neg);
  REQUIRE(by_line.forms == by_rays.forms);
}

TEST_CASE("ray sums keep strictly positive survivors") {
  // Orthant in 3 variables plus the ray (1,-1,0): x >= 0 survives because the
  // new generator satisfies it strictly; y >= 0 dies; x+y >= 0 is the combo.
  ConeH orthant = positive_orthant(letters(3));
  ConeH s = sum_ray(orthant, {1, -1, 0});
  ConeH expect =
      make_cone(orthant.labels, {form_of({1, 0, 0}), form_of({0, 0, 1}), form_of({1, 1, 0})});
  REQUIRE(s.forms == expect.forms);
  REQUIRE(oracle::facets_match(s));
  REQUIRE(oracle::sum_is_correct(orthant, {1, -1, 0}, false, s));

  // Same data as a line sum: x >= 0 must now die as well.
  ConeH l = sum_line(orthant, {1, -1, 0});
  ConeH expect_l = make_cone(orthant.labels, {form_of({0, 0, 1}), form_of({1, 1, 0})});
  REQUIRE(l.forms == expect_l.forms);
}

TEST_CASE("combination contents are divided out") {
  // 3x - y >= 0 (evaluation 2 on the line (1,1)) and x - 2y >= 0 (evaluation
  // -1): raw combo 2*(1,-2) + 1*(3,-1) = (5,-5), stored primitive (1,-1) with
  // content 5.
  ConeH c = make_cone(letters(2), {form_of({3, -1}), form_of({1, -2})});
  SumCandidates cand = sum_candidates(c, {1, 1}, true);
  REQUIRE(cand.items.size() == 1);
  const auto& s = cand.items[0];
  REQUIRE(s.is_combo);
  REQUIRE(s.form == form_of({1, -1}));
  REQUIRE(s.alpha == 2);
  REQUIRE(s.beta == 1);
  REQUIRE(s.content == 5);
  // the provenance identity: content * form == alpha * neg + beta * pos
  LinForm raw_combo = combine(s.alpha, c.forms[s.parent_neg], s.beta, c.forms[s.parent_pos]);
  LinForm scaled = s.form;
  for (auto& x : scaled.c) x *= s.content;
  REQUIRE(raw_combo == scaled);

  // 2x + y >= 0 and -2x + y >= 0 with the line (1, 0): raw combo (0, 4),
  // content 4.
  ConeH c2 = make_cone(letters(2), {form_of({2, 1}), form_of({-2, 1})});
  SumCandidates cand2 = sum_candidates(c2, {1, 0}, true);
  REQUIRE(cand2.items.size() == 1);
  REQUIRE(cand2.items[0].form == form_of({0, 1}));
  REQUIRE(cand2.items[0].content == 4);
}

TEST_CASE("facet test by generator rank") {
  AmbientIndex ix = enumerate_classes(5);
  ConeH orthant = positive_orthant(class_labels(ix));
  GeneratorSet none{ix.N(), true, {}};

  LinForm unit(ix.N());
  unit.c[3] = 1;
  REQUIRE(is_facet_by_rank(unit, none));

  LinForm pair(ix.N());
  pair.c[3] = 1;
  pair.c[7] = 1;
  REQUIRE_FALSE(is_facet_by_rank(pair, none));  // valid but redundant

  // A line generator with a nonzero evaluation marks an invalid inequality.
  GeneratorSet gens{ix.N(), true, {relation_basis(ix)[0].c}};
  LinForm bad(ix.N());
  bad.c[0] = 1;  // the first coordinate of v1 is +1
  REQUIRE(relation_basis(ix)[0].c[0] != 0);
  REQUIRE_THROWS_AS(is_facet_by_rank(bad, gens), std::logic_error);
  (void)orthant;
}

TEST_CASE("dimension mismatches are rejected") {
  ConeH orthant = positive_orthant(letters(3));
  GeneratorSet gens{4, false, {}};
  REQUIRE_THROWS_AS(sum_step_rank(orthant, gens, {1, 0, 0, 0}, false), std::invalid_argument);
}
