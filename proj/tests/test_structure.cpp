#include <gtest/gtest.h>

#include "linfty/structure.hpp"
#include "linfty/transfer.hpp"
#include "support/random_instances.hpp"

using namespace linfty;

namespace {

BasisElem el(const GradedSpace& sp, const char* label) { return *sp.find(label); }

Morphism<Rat> as_morphism(const Structure<Rat>& src, const Structure<Rat>& tgt, const MultiMap<Rat>& table) {
  return {src, tgt, table};
}

} // namespace

TEST(Structure, FixtureRelations) {
  EXPECT_TRUE(check_relations(fixtures::e1()).pass);
  EXPECT_TRUE(check_relations(fixtures::e2()).pass);
  EXPECT_TRUE(check_relations(fixtures::e4()).pass);
  EXPECT_TRUE(check_relations(fixtures::e5()).pass);
  EXPECT_TRUE(fixtures::e2().is_curved());
  EXPECT_EQ(fixtures::e4().amplitude(), 5);
}

TEST(Structure, BogusCurvatureDefect) {
  auto s = fixtures::e1();
  s.ops[{}] = {{{1, 0}, Rat(1)}};
  auto rep = check_relations(s);
  EXPECT_FALSE(rep.pass);
  EXPECT_TRUE(rep.word.empty());
  EXPECT_EQ(rep.defect, (Vec<Rat>{{{2, 0}, Rat(1)}}));
}

TEST(Structure, ValidationErrors) {
  auto s = fixtures::e4();
  auto h = el(s.space, "h"), b = el(s.space, "b"), m = el(s.space, "m");
  s.ops[{h, h}] = {{m, Rat(1)}};
  try {
    validate_structure(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegreeRuleViolation);
    EXPECT_NE(std::string(e.what()).find("(h,h)"), std::string::npos);
  }
  auto t = fixtures::e1();
  t.ops[{BasisElem{1, 0}, BasisElem{1, 0}}] = {};
  EXPECT_THROW(validate_structure(t), Error);
  auto u = fixtures::e4();
  u.ops[{b, h}] = {};
  try {
    validate_structure(u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonCanonicalWord);
  }
}

TEST(Structure, ArityBoundHoldsOnRandomStructures) {
  testkit::Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    auto sp = testkit::random_space(rng);
    auto s = testkit::random_structure(rng, sp, t % 2 == 0);
    for (const auto& [w, v] : s.ops)
      EXPECT_TRUE(w.empty() || static_cast<int>(w.size()) <= s.amplitude() - 1);
  }
}

TEST(Morphism, IdentityAndSwapFailure) {
  EXPECT_TRUE(check_morphism(identity_morphism(fixtures::e1())).pass);
  GradedSpace sp({{1, {"a", "b"}}, {2, {"c"}}});
  Structure<Rat> s{sp, {}};
  s.ops[{BasisElem{1, 0}}] = {{{2, 0}, Rat(1)}};
  MultiMap<Rat> swap;
  swap[{BasisElem{1, 0}}] = {{{1, 1}, Rat(1)}};
  swap[{BasisElem{1, 1}}] = {{{1, 0}, Rat(1)}};
  swap[{BasisElem{2, 0}}] = {{{2, 0}, Rat(1)}};
  auto rep = check_morphism(as_morphism(s, s, swap));
  EXPECT_FALSE(rep.pass);
  EXPECT_FALSE(rep.defect.empty());
}

TEST(Morphism, ComposeWithIdentity) {
  auto t = transfer(fixtures::e4(), fixtures::e4_contraction());
  EXPECT_EQ(compose(identity_morphism(t.source), t.phi), t.phi);
  EXPECT_EQ(compose(t.phi, identity_morphism(t.mu)), t.phi);
  auto pi_phi = compose(t.pitilde, t.phi);
  EXPECT_EQ(pi_phi.components, identity_morphism(t.mu).components);
  EXPECT_THROW(compose(t.phi, t.phi), Error);
}

TEST(Morphism, CompositionIsAssociativeAndClosed) {
  testkit::Rng rng(9);
  for (int t = 0; t < 15; ++t) {
    auto sp = testkit::random_space(rng);
    auto s0 = testkit::random_structure(rng, sp, t % 2 == 1);
    auto p1 = testkit::random_automorphism(rng, sp);
    auto s1 = gauge_conjugate(s0, p1);
    auto p2 = testkit::random_automorphism(rng, sp);
    auto s2 = gauge_conjugate(s1, p2);
    auto p3 = testkit::random_automorphism(rng, sp);
    auto s3 = gauge_conjugate(s2, p3);
    Morphism<Rat> m1{s1, s0, p1}, m2{s2, s1, p2}, m3{s3, s2, p3};
    ASSERT_TRUE(check_morphism(m1).pass);
    ASSERT_TRUE(check_morphism(m2).pass);
    ASSERT_TRUE(check_morphism(m3).pass);
    auto left = compose(m1, compose(m2, m3));
    auto right = compose(compose(m1, m2), m3);
    EXPECT_EQ(left, right);
    EXPECT_TRUE(check_morphism(left).pass);
  }
}

TEST(Morphism, EtaleExamples) {
  EXPECT_TRUE(etale_pair(identity_morphism(fixtures::e1())).etale);
  Morphism<Rat> to_zero{fixtures::e1(), fixtures::zero(GradedSpace()), {}};
  EXPECT_TRUE(etale_pair(to_zero).etale);
  auto t = transfer(fixtures::e4(), fixtures::e4_contraction());
  EXPECT_TRUE(etale_pair(t.phi).etale);
  try {
    etale_pair(identity_morphism(fixtures::e2()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotClassical);
  }
  Morphism<Rat> forget{fixtures::e5(), fixtures::e5_target(), fixtures::e5_projection().components};
  EXPECT_TRUE(etale_pair(forget).etale);
  Morphism<Rat> collapse{fixtures::e5_target(), fixtures::zero(GradedSpace()), {}};
  EXPECT_FALSE(etale_pair(collapse).etale);
}

TEST(Gauge, Examples) {
  auto e1 = fixtures::e1();
  EXPECT_EQ(gauge_conjugate(e1, identity_morphism(e1).components), e1);
  MultiMap<Rat> twice;
  twice[{BasisElem{1, 0}}] = {{{1, 0}, Rat(2)}};
  twice[{BasisElem{2, 0}}] = {{{2, 0}, Rat(2)}};
  auto g = gauge_conjugate(e1, twice);
  EXPECT_EQ(g.ops.at({BasisElem{1, 0}}), (Vec<Rat>{{{2, 0}, Rat(1)}}));
  EXPECT_TRUE(check_morphism(Morphism<Rat>{g, e1, twice}).pass);

  auto e4 = fixtures::e4();
  auto psi = identity_morphism(e4).components;
  auto h = el(e4.space, "h");
  psi[{h, h}] = {{el(e4.space, "m"), Rat(1)}};
  auto g4 = gauge_conjugate(e4, psi);
  EXPECT_NE(g4, e4);
  EXPECT_TRUE(check_relations(g4).pass);
  EXPECT_TRUE(check_morphism(Morphism<Rat>{g4, e4, psi}).pass);
}

TEST(Gauge, RoundTripAndRelations) {
  testkit::Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    auto sp = testkit::random_space(rng);
    auto s = testkit::random_structure(rng, sp, t % 3 == 0);
    auto psi = testkit::random_automorphism(rng, sp);
    auto g = gauge_conjugate(s, psi);
    EXPECT_TRUE(check_relations(g).pass);
    EXPECT_TRUE(check_morphism(Morphism<Rat>{g, s, psi}).pass);
    EXPECT_EQ(gauge_conjugate(g, inverse_morphism(sp, psi)), s);
  }
}

TEST(Gauge, SingularLinearPartRejected) {
  auto e1 = fixtures::e1();
  MultiMap<Rat> bad;
  bad[{BasisElem{1, 0}}] = {{{1, 0}, Rat(1)}};
  EXPECT_THROW(gauge_conjugate(e1, bad), Error);
}
