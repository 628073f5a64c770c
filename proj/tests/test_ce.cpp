#include <gtest/gtest.h>

#include "linfty/ce.hpp"
#include "linfty/koszul.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace linfty;

namespace {

SymElem<Rat> xi(BasisElem e) { return unit_word<Rat>({e}); }

std::map<int, size_t> dims_of(const std::map<int, CEDegree>& h) {
  std::map<int, size_t> out;
  for (const auto& [q, d] : h)
    out[q] = d.dim;
  return out;
}

Structure<Rat> empty_structure() { return {GradedSpace(), {}}; }

} // namespace

TEST(CE, E1Presentation) {
  auto p = build_ce(fixtures::e1());
  BasisElem e1{1, 0}, e2{2, 0};
  EXPECT_EQ(p.q.at(e2), xi(e1));
  EXPECT_TRUE(p.q.at(e1).empty());
  EXPECT_TRUE(q_square_check(p).pass);
  EXPECT_EQ(ce_degree({e1, e2}), -3);
}

TEST(CE, E2CurvatureGivesConstant) {
  auto p = build_ce(fixtures::e2());
  EXPECT_EQ(p.q.at({1, 0}), unit_word<Rat>({}));
  EXPECT_TRUE(q_square_check(p).pass);
}

TEST(CE, BogusCurvatureFailsOnTopGenerator) {
  auto s = fixtures::e1();
  s.ops[{}] = {{{1, 0}, Rat(1)}};
  EXPECT_FALSE(check_relations(s).pass);
  auto rep = q_square_check(build_ce(s));
  EXPECT_FALSE(rep.pass);
  ASSERT_TRUE(rep.generator.has_value());
  EXPECT_EQ(*rep.generator, (BasisElem{2, 0}));
}

TEST(CE, QIsALeftDerivation) {
  testkit::Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    auto sp = testkit::random_space(rng);
    auto p = build_ce(testkit::random_structure(rng, sp, t % 2 == 1));
    auto words = canonical_words(sp, 6, 3);
    for (const auto& a : words)
      for (const auto& b : words) {
        auto ab = sym_product(unit_word<Rat>(a), unit_word<Rat>(b));
        auto lhs = apply_derivation(p.q, ab, true);
        auto rhs = sym_product(apply_derivation(p.q, unit_word<Rat>(a), true), unit_word<Rat>(b));
        Rat sign = is_odd(word_degree(a)) ? Rat(-1) : Rat(1);
        add_scaled(rhs, sign, sym_product(unit_word<Rat>(a), apply_derivation(p.q, unit_word<Rat>(b), true)));
        ASSERT_EQ(lhs, rhs);
      }
  }
}

TEST(CE, RelationsMatchQSquareOnFixtures) {
  for (const auto& s : {fixtures::e1(), fixtures::e2(), fixtures::e4(), fixtures::e5(), fixtures::e5_target()})
    EXPECT_EQ(check_relations(s).pass, q_square_check(build_ce(s)).pass);
}

TEST(CE, RelationsMatchQSquareRandom) {
  testkit::Rng rng(31);
  std::uniform_int_distribution<int> coin(0, 1);
  int broken = 0;
  for (int t = 0; t < 50; ++t) {
    auto sp = testkit::random_space(rng);
    auto s = testkit::random_structure(rng, sp, t % 3 == 0);
    EXPECT_TRUE(check_relations(s).pass);
    EXPECT_TRUE(q_square_check(build_ce(s)).pass);
    if (s.ops.empty() || !coin(rng))
      continue;
    // perturb one coefficient; both sides must agree on the verdict
    auto it = s.ops.begin();
    std::advance(it, rng() % s.ops.size());
    it->second.begin()->second += Rat(1);
    if (it->second.begin()->second.is_zero())
      it->second.erase(it->second.begin());
    if (it->second.empty())
      s.ops.erase(it);
    bool rel = check_relations(s).pass;
    broken += rel ? 0 : 1;
    EXPECT_EQ(rel, q_square_check(build_ce(s)).pass);
  }
  EXPECT_GT(broken, 0);
}

TEST(CE, CohomologyFixtures) {
  auto e1 = dims_of(ce_cohomology(build_ce(fixtures::e1()), 4));
  EXPECT_EQ(e1, (std::map<int, size_t>{{-4, 0}, {-3, 0}, {-2, 0}, {-1, 0}, {0, 1}}));
  for (const auto& [q, d] : ce_cohomology(build_ce(fixtures::e2()), 4))
    EXPECT_EQ(d.dim, 0u) << q;
  auto z = ce_cohomology(build_ce(fixtures::zero(GradedSpace({{1, {"a"}}}))), 4);
  EXPECT_EQ(z[0].dim, 1u);
  EXPECT_EQ(z[-1].dim, 1u);
  EXPECT_EQ(z[-1].representatives[0], xi({1, 0}));
  EXPECT_EQ(z[-2].dim, 0u);
}

TEST(CE, CohomologyMatchesFreeAlgebraOnTangentCohomology) {
  testkit::Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    auto sp = testkit::random_space(rng, 5, 4);
    auto s = testkit::random_structure(rng, sp, false);
    std::map<int, size_t> gens;
    for (const auto& [k, d] : testkit::dense_cohomology_dims(tangent_complex(s)))
      if (d)
        gens[k] = d;
    EXPECT_EQ(dims_of(ce_cohomology(build_ce(s), 5)), testkit::free_algebra_dims(gens, 5)) << "trial " << t;
  }
}

TEST(CE, PolynomialBaseCohomologyRejected) {
  EXPECT_THROW(ce_cohomology(build_ce(fixtures::b1()), 2), Error);
}

TEST(CE, ClassicalPointCountIsH0) {
  testkit::Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    auto sp = testkit::random_space(rng);
    auto s = testkit::random_structure(rng, sp, t % 2 == 1);
    EXPECT_EQ(ce_cohomology(build_ce(s), 0).at(0).dim, s.is_curved() ? 0u : 1u);
  }
  EXPECT_EQ(ce_cohomology(build_ce(fixtures::e2()), 0).at(0).dim, 0u);
}

TEST(CE, PullbackIdentityAndRejectsNonMorphism) {
  auto s = fixtures::e4();
  auto id = identity_morphism(s);
  auto f = ce_pullback(id);
  for (const auto& e : s.space.basis())
    EXPECT_EQ(f.images.at(e), xi(e));
  EXPECT_TRUE(quasi_iso_check(id, 4).pass);
  auto bad = id;
  bad.components.clear();
  bad.components[{*s.space.find("h")}] = {{*s.space.find("h"), Rat(1)}};
  EXPECT_THROW(ce_pullback(bad), Error);
}

TEST(CE, TransferInclusionIsQuasiIso) {
  auto t = transfer(fixtures::e4(), fixtures::e4_contraction());
  auto rep = quasi_iso_check(t.phi, 4);
  EXPECT_EQ(rep.chain_map.status, Status::Pass);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(etale_pair(t.phi).etale);
}

TEST(CE, E1ToZeroIsQuasiIso) {
  Morphism<Rat> m{fixtures::e1(), empty_structure(), {}};
  auto rep = quasi_iso_check(m, 4);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.degrees.at(0).source_dim, 1u);
  EXPECT_EQ(rep.degrees.at(0).target_dim, 1u);
}

TEST(CE, RandomTransferInclusionsAreQuasiIsos) {
  testkit::Rng rng(44);
  for (int t = 0; t < 8; ++t) {
    auto inst = testkit::random_transfer_instance(rng, t % 2 == 1);
    auto tr = transfer(inst.structure, inst.contraction);
    auto rep = quasi_iso_check(tr.phi, 4);
    EXPECT_TRUE(rep.pass) << "trial " << t;
  }
}

TEST(CE, QuasiSmoothPointsAgreeWithEtale) {
  GradedSpace one({{1, {"a"}}}), two({{1, {"a", "b"}}}), other({{1, {"c"}}});
  std::vector<Morphism<Rat>> suite;
  auto lin = [](const GradedSpace& s, const GradedSpace& t, std::vector<std::pair<int, int>> pairs) {
    MultiMap<Rat> c;
    for (auto [i, j] : pairs)
      c[{BasisElem{1, i}}] = {{BasisElem{1, j}, Rat(1)}};
    (void)s;
    (void)t;
    return c;
  };
  Structure<Rat> a{one, {}}, ab{two, {}}, c{other, {}}, e{GradedSpace(), {}};
  Structure<Rat> a_curved{one, {{Word{}, {{BasisElem{1, 0}, Rat(1)}}}}};
  Structure<Rat> c_curved{other, {{Word{}, {{BasisElem{1, 0}, Rat(1)}}}}};
  suite.push_back({e, e, {}});
  suite.push_back({a, c, lin(one, other, {{0, 0}})});
  suite.push_back({a, e, {}});
  suite.push_back({e, a, {}});
  suite.push_back({ab, c, lin(two, other, {{0, 0}})});
  suite.push_back({a_curved, c_curved, lin(one, other, {{0, 0}})});
  suite.push_back({a_curved, e, {}});
  suite.push_back({c, a, {}});
  int agree = 0;
  for (const auto& m : suite) {
    bool qi = quasi_iso_check(m, 4).pass;
    bool we = weak_equivalence_check(m).status == Status::Pass;
    EXPECT_EQ(qi, we) << format_word(m.source.space, {});
    agree += qi ? 1 : 0;
  }
  EXPECT_GE(agree, 3);
}

TEST(CE, BigradingAudit) {
  auto e1 = bigrading_audit(build_ce(fixtures::e1()));
  ASSERT_EQ(e1.components.size(), 1u);
  EXPECT_EQ(e1.components[0].name, "delta");
  EXPECT_EQ(e1.components[0].shift_k, 1);
  EXPECT_EQ(e1.components[0].shift_l, 0);
  auto e4 = bigrading_audit(build_ce(fixtures::e4()));
  EXPECT_TRUE(e4.pass);
  bool saw_q2 = false;
  for (const auto& c : e4.components)
    if (c.name == "q2") {
      saw_q2 = true;
      EXPECT_EQ(c.shift_k, 2);
      EXPECT_EQ(c.shift_l, -1);
    }
  EXPECT_TRUE(saw_q2);
  EXPECT_TRUE(bigrading_audit(build_ce(fixtures::zero(GradedSpace({{1, {"a"}}})))).components.empty());
  auto e2 = bigrading_audit(build_ce(fixtures::e2()));
  ASSERT_EQ(e2.components.size(), 1u);
  EXPECT_EQ(e2.components[0].shift_k, 0);
  EXPECT_EQ(e2.components[0].shift_l, 1);
}

TEST(CE, HeqOnE4) {
  auto t = transfer(fixtures::e4(), fixtures::e4_contraction());
  auto rep = heq_check(t, 4);
  EXPECT_EQ(rep.status, Status::Pass) << rep.detail;
  EXPECT_GT(rep.words_checked, 10u);
  auto h = transfer_homotopy_h(t);
  EXPECT_TRUE(apply_h(h, unit_word<Rat>({})).empty());
}

TEST(CE, HeqOnZeroContraction) {
  auto s = fixtures::e2();
  s.ops.clear();
  auto t = transfer(s, trivial_contraction(s.space));
  EXPECT_EQ(heq_check(t, 4).status, Status::Pass);
  auto h = transfer_homotopy_h(t);
  for (const auto& w : canonical_words(s.space, 4, 4))
    EXPECT_TRUE(apply_h(h, unit_word<Rat>(w)).empty());
}

TEST(CE, HeqRandom) {
  testkit::Rng rng(99);
  for (int t = 0; t < 10; ++t) {
    auto inst = testkit::random_transfer_instance(rng, false);
    auto tr = transfer(inst.structure, inst.contraction);
    auto rep = heq_check(tr, 4);
    EXPECT_EQ(rep.status, Status::Pass) << "trial " << t << ": " << rep.detail;
  }
}

TEST(CE, HeqNeedsEtaTilde) {
  auto t = transfer(fixtures::e4(), fixtures::e4_contraction());
  t.etatilde = GradedMap<Rat>();
  EXPECT_THROW(transfer_homotopy_h(t), Error);
}

TEST(Koszul, EtaExamples) {
  auto c1 = KoszulChart::euler(1, 1);
  EXPECT_EQ(koszul_eta(c1, {{3}, 0}), (KoszulElem{{{{2}, 1u}, Rat(1)}}));
  EXPECT_TRUE(koszul_eta(c1, {{2}, 1u}).empty());
  auto c2 = KoszulChart::euler(2, 1);
  EXPECT_TRUE(koszul_eta(c2, {{0, 2}, 0}).empty());
}

TEST(Koszul, NonEulerRejected) {
  KoszulChart c{2, 1, {Poly::variable(0) + Poly::variable(1)}};
  EXPECT_THROW(koszul_eta(c, {{1}, 0}), Error);
}

TEST(Koszul, IdentityExhaustive) {
  for (size_t n = 1; n <= 3; ++n)
    for (size_t k = 1; k <= std::min<size_t>(n, 2); ++k) {
      auto rep = koszul_identity_check(KoszulChart::euler(n, k), 6);
      EXPECT_TRUE(rep.pass) << n << "," << k << ": " << rep.witness;
      EXPECT_GT(rep.monomials_checked, 0u);
    }
}

TEST(Koszul, NegativeCohomologyVanishesOnWindow) {
  for (size_t n = 1; n <= 3; ++n)
    for (size_t k = 1; k <= std::min<size_t>(n, 2); ++k)
      for (const auto& [deg, dim] : koszul_window_cohomology(KoszulChart::euler(n, k), 5))
        EXPECT_EQ(dim, 0u) << n << "," << k << " degree " << deg;
  KoszulChart sheared{2, 1, {Poly::variable(0) + Poly::variable(1)}};
  for (const auto& [deg, dim] : koszul_window_cohomology(sheared, 5))
    EXPECT_EQ(dim, 0u);
  KoszulChart degenerate{2, 1, {Poly::variable(1)}};
  EXPECT_THROW(koszul_window_cohomology(degenerate, 3), Error);
}
