#include <gtest/gtest.h>

#include "linfty/bundle.hpp"
#include "support/random_instances.hpp"

using namespace linfty;

namespace {

const Poly x = Poly::variable(0);
const Poly y = Poly::variable(1);

void expect_all_pass(const std::vector<Verdict>& vs) {
  for (const auto& v : vs)
    EXPECT_NE(v.status, Status::Fail) << v.name << ": " << v.detail;
}

Status status_of(const std::vector<Verdict>& vs, const std::string& name) {
  for (const auto& v : vs)
    if (v.name == name)
      return v.status;
  ADD_FAILURE() << "no verdict " << name;
  return Status::Fail;
}

BundleMorphism identity_on(const BundleChart& b) {
  auto m = constant_morphism(identity_morphism(fiber_at(b, Point(b.base_dim(), Rat(0)))), b.coords);
  m.source = b;
  m.target = b;
  return m;
}

} // namespace

TEST(Bundle, ClassicalLocus) {
  auto b = fixtures::b1();
  EXPECT_TRUE(classical_check(b, {Rat(0)}));
  EXPECT_FALSE(classical_check(b, {Rat(1)}));
  auto f = fiber_at(b, {Rat(0)});
  EXPECT_FALSE(f.is_curved());
  EXPECT_TRUE(check_relations(f).pass);
}

TEST(Bundle, PointFromRejectsMissingCoordinate) {
  EXPECT_THROW(point_from({}, {"x"}), Error);
  EXPECT_THROW(point_from({{"z", Rat(0)}}, {"x"}), Error);
  EXPECT_EQ(point_from({{"x", Rat(3)}}, {"x"}), Point{Rat(3)});
}

TEST(Bundle, TangentComplexOfB1IsAcyclic) {
  auto c = tangent_at(fixtures::b1(), {Rat(0)});
  EXPECT_EQ(c.differential().block(0), RatMatrix({{Rat(1)}}));
  for (const auto& [k, g] : cohomology(c))
    EXPECT_EQ(g.dim, 0u) << k;
  EXPECT_THROW(tangent_at(fixtures::b1(), {Rat(1)}), Error);
}

TEST(Bundle, EtaleToPoint) {
  EXPECT_TRUE(etale_at(fixtures::to_point(fixtures::b1()), {Rat(0)}).etale);
  auto degenerate = fixtures::to_point(fixtures::b1_degenerate());
  EXPECT_EQ(tangent_at(degenerate.source, {Rat(0)}).differential().block(0), RatMatrix({{Rat(0)}}));
  EXPECT_FALSE(etale_at(degenerate, {Rat(0)}).etale);
  EXPECT_TRUE(etale_at(identity_on(fixtures::b1()), {Rat(0)}).etale);
}

TEST(Bundle, BundleMorphismIdentityHolds) {
  EXPECT_TRUE(check_bundle_morphism(fixtures::to_point(fixtures::b1())).pass);
  EXPECT_TRUE(check_bundle_morphism(identity_on(fixtures::b1())).pass);
}

TEST(Bundle, FibrationChecks) {
  auto reps = fibration_check(fixtures::to_point(fixtures::b1()), {{Rat(0)}, {Rat(1)}});
  ASSERT_EQ(reps.size(), 2u);
  for (const auto& r : reps)
    expect_all_pass(r.verdicts);

  BundleChart line{{"x"}, {GradedSpace(), {}}};
  BundleMorphism square{line, line, {x * x}, {}};
  auto sq = fibration_check(square, {{Rat(0)}, {Rat(1)}});
  EXPECT_EQ(status_of(sq[0].verdicts, "submersion"), Status::Fail);
  EXPECT_EQ(status_of(sq[1].verdicts, "submersion"), Status::Pass);

  BundleChart with_fiber{{}, {GradedSpace({{2, {"a"}}}), {}}};
  BundleMorphism zero{point_chart(Structure<Rat>{GradedSpace({{2, {"b"}}}), {}}), with_fiber, {}, {}};
  auto z = fibration_check(zero, {{}});
  EXPECT_EQ(status_of(z[0].verdicts, "surjective"), Status::Fail);
  EXPECT_NE(z[0].verdicts[1].detail.find("degree 2"), std::string::npos);
}

TEST(Bundle, LastcaseToPoint) {
  auto s = lastcase_split(fixtures::to_point(fixtures::b1()), {{Rat(0)}});
  EXPECT_EQ(s.kernel.space.dim(1), 1u);
  ASSERT_EQ(s.u.size(), 1u);
  EXPECT_EQ(s.u[0], x);
  EXPECT_EQ(s.subbundle.e1.total_dim(), 0u);
  expect_all_pass(s.verdicts);
  ASSERT_EQ(s.points.size(), 1u);
  expect_all_pass(s.points[0].verdicts);
}

TEST(Bundle, LastcaseIdentity) {
  auto s = lastcase_split(identity_on(fixtures::b1()), {{Rat(0)}});
  EXPECT_EQ(s.kernel.space.total_dim(), 0u);
  EXPECT_TRUE(s.u.empty());
  EXPECT_EQ(s.subbundle.e1.dim(1), 1u);
  expect_all_pass(s.verdicts);
  expect_all_pass(s.points[0].verdicts);
}

TEST(Bundle, LastcaseDegenerateFailsRegularity) {
  try {
    lastcase_split(fixtures::to_point(fixtures::b1_degenerate()), {{Rat(0)}});
    FAIL() << "expected RegularityFails";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RegularityFails);
    EXPECT_NE(std::string(e.what()).find("x=0"), std::string::npos);
  }
}

TEST(Bundle, LastcaseNonConstantKernel) {
  BundleChart src{{"x"}, {GradedSpace({{1, {"e"}}}), {}}};
  BundleChart tgt{{"x"}, {GradedSpace({{1, {"f"}}}), {}}};
  BundleMorphism m{src, tgt, {x}, {}};
  m.components[{BasisElem{1, 0}}] = {{{1, 0}, x}};
  try {
    lastcase_split(m, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConstantKernel);
  }
}

TEST(Bundle, SplitReconstructsWithMixedCurvature) {
  // L1 = <a, k>, L'1 = <b>, phi(a) = b, curvature (y) a + (x) k over base (x, y) -> (y).
  BundleChart src{{"x", "y"}, {GradedSpace({{1, {"a", "k"}}}), {}}};
  src.fiber.ops[{}] = {{{1, 0}, y}, {{1, 1}, x + x * y}};
  BundleChart tgt{{"y"}, {GradedSpace({{1, {"b"}}}), {}}};
  tgt.fiber.ops[{}] = {{{1, 0}, Poly::variable(0)}};
  BundleMorphism m{src, tgt, {y}, {}};
  m.components[{BasisElem{1, 0}}] = {{{1, 0}, Poly(1)}};
  EXPECT_TRUE(check_bundle_morphism(m).pass);
  auto s = lastcase_split(m, {{Rat(0), Rat(0)}});
  ASSERT_EQ(s.u.size(), 1u);
  EXPECT_EQ(s.u[0], x + x * y);
  expect_all_pass(s.verdicts);
  expect_all_pass(s.points[0].verdicts);
  auto r = recap_pipeline(m, {{Rat(0), Rat(0)}});
  // u is not affine here
  EXPECT_FALSE(r.section.has_value());
  EXPECT_NE(r.section_note.find("SectionNotSynthesizable"), std::string::npos);
  expect_all_pass(r.verdicts);
}

TEST(Bundle, RecapToPointSynthesizesInclusion) {
  auto r = recap_pipeline(fixtures::to_point(fixtures::b1()), {{Rat(0)}});
  ASSERT_TRUE(r.section.has_value());
  ASSERT_EQ(r.section->base.size(), 1u);
  EXPECT_TRUE(r.section->base[0].is_zero());
  expect_all_pass(r.verdicts);
}

TEST(Bundle, RecapIdentity) {
  auto r = recap_pipeline(identity_on(fixtures::b1()), {{Rat(0)}});
  ASSERT_TRUE(r.section.has_value());
  EXPECT_EQ(r.section->base, std::vector<Poly>{x});
  EXPECT_EQ(status_of(r.verdicts, "step1"), Status::Skipped);
  expect_all_pass(r.verdicts);
}

TEST(Bundle, RecapE5OverLine) {
  auto p = fixtures::e5_projection();
  auto m = constant_morphism(p, {"y"});
  auto r = recap_pipeline(m, {{Rat(0)}, {Rat(2)}});
  EXPECT_EQ(r.step1.chain.size(), 1u);
  EXPECT_TRUE(r.split.u.empty());
  ASSERT_TRUE(r.section.has_value());
  EXPECT_EQ(r.section->base, std::vector<Poly>{x});
  expect_all_pass(r.verdicts);
}

TEST(Bundle, RecapRejectsCurvedStep1) {
  auto p = fixtures::e5_projection();
  auto m = constant_morphism(p, {"y"});
  m.source.fiber.ops[{}] = {};
  auto& curv = m.source.fiber.ops[{}];
  curv[*m.source.fiber.space.find("x")] = x;
  m.target.fiber.ops[{}] = {{*m.target.fiber.space.find("x'"), x}};
  try {
    recap_pipeline(m, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisFailed);
  }
}

TEST(Bundle, TubularExamples) {
  auto t1 = tubular_psi({x}, 1, 1);
  EXPECT_EQ(t1.psi(0, 0), Poly(1));
  auto t2 = tubular_psi({x + x * x}, 1, 1);
  EXPECT_EQ(t2.psi(0, 0), Poly(1) + x);
  expect_all_pass(t2.verdicts);
  auto t3 = tubular_psi({y * x}, 1, 2);
  EXPECT_EQ(t3.psi(0, 0), y);
  expect_all_pass(t3.verdicts);
  EXPECT_THROW(tubular_psi({y}, 1, 2), Error);
}

TEST(Bundle, TubularRandomPolynomials) {
  testkit::Rng rng(77);
  std::uniform_int_distribution<int> coef(-3, 3), ex(0, 3);
  for (int trial = 0; trial < 10; ++trial) {
    size_t n = 3, k = 1 + trial % 2;
    std::vector<Poly> u;
    for (int j = 0; j < 2; ++j) {
      Poly p;
      for (int t = 0; t < 4; ++t) {
        std::vector<int> e(n);
        for (auto& v : e)
          v = ex(rng);
        e[t % k] += 1; // vanish on Y
        p += Poly::monomial(e, Rat(coef(rng)));
      }
      u.push_back(p);
    }
    auto t = tubular_psi(u, k, n);
    expect_all_pass(t.verdicts);
  }
}
