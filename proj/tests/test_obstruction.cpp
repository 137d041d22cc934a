#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "curvlab/obstruction.hpp"
#include "curvlab/random.hpp"
#include "support.hpp"

using namespace curvlab;
using curvlab::testing::comp;

namespace {

/// Ricci-flat, anti-self-dual, Kaehler for the unitary J, and free of
/// distinct-index components in the standard frame.
CurvatureOperator ricci_flat_witness() {
  const Vec6 f1 = (Bivector::basis(1, 2) - Bivector::basis(3, 4)).coeffs();
  const Vec6 f2 = (Bivector::basis(1, 3) + Bivector::basis(2, 4)).coeffs();
  return CurvatureOperator(Mat6(f1 * f2.transpose() + f2 * f1.transpose()));
}

std::array<double, 3> sorted_squares(const KahlerCoeffs& a) {
  std::array<double, 3> s{a.a12 * a.a12, a.a13 * a.a13, a.a14 * a.a14};
  std::sort(s.begin(), s.end());
  return s;
}

const CSystemCase& case_with(const std::vector<CSystemCase>& cases, const std::string& label) {
  for (const CSystemCase& c : cases)
    if (c.label() == label) return c;
  throw std::runtime_error("no case " + label);
}

}  // namespace

TEST(DistinctIndex, InvariantOperators) {
  std::mt19937_64 rng(70);
  for (int t = 0; t < 10; ++t) {
    const FrameRotation q = random_rotation(rng);
    EXPECT_LE(distinct_index_residual(CurvatureOperator::identity(), q), 1e-28);
    // * commutes with every induced rotation: R'1234 = R'1423 = 1, R'1324 = -1 in every frame
    EXPECT_NEAR(distinct_index_residual(CurvatureOperator::hodge_star(), q), 3.0, 1e-12);
  }
}

TEST(DistinctIndex, MatchesComponentOracle) {
  std::mt19937_64 rng(71);
  const CurvatureOperator r = random_symmetric_operator(rng);
  const FrameRotation q = random_rotation(rng);
  const CurvatureOperator rr = conjugate(r, q);
  const double a = comp(rr, 1, 2, 3, 4), b = comp(rr, 1, 3, 2, 4), c = comp(rr, 1, 4, 2, 3);
  EXPECT_NEAR(distinct_index_residual(r, q), a * a + b * b + c * c, 1e-12);
}

TEST(DistinctIndex, Cp2CertificateIsExactToRoundoff) {
  EXPECT_LE(distinct_index_residual(build_const_hol_sec(1.0), cp2_example_frame()), 1e-18);
  EXPECT_LE(distinct_index_residual(build_const_hol_sec(2.0), cp2_example_frame()), 4e-18);
  const Mat4 q = cp2_example_frame().matrix();
  EXPECT_LE((q.transpose() * q - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(q.determinant(), 1.0, 1e-15);
}

TEST(DistinctIndex, BianchiCouplesTheThreeComponents) {
  // R1234 - R1324 + R1423 = 0 in every frame when b(R) = 0
  std::mt19937_64 rng(72);
  for (int t = 0; t < 50; ++t) {
    const CurvatureOperator rr = conjugate(random_bianchi_operator(rng), random_rotation(rng));
    EXPECT_NEAR(rr(1, 2, 3, 4) - rr(1, 3, 2, 4) + rr(1, 4, 2, 3), 0.0, 1e-12);
  }
}

TEST(FrameSearch, ZeroAndDiagonalOperatorsStopAtIdentity) {
  const FrameSearchResult z = frame_search(CurvatureOperator(), 4, 0);
  EXPECT_TRUE(z.found);
  EXPECT_EQ(z.residual, 0.0);
  EXPECT_EQ(z.restart, 0);
  EXPECT_EQ(z.iterations, 0);
  const auto [p, j] = build_surface_product(1.0, 1.0);
  const FrameSearchResult s = frame_search(p, 4, 0);
  EXPECT_TRUE(s.found);
  EXPECT_EQ(s.residual, 0.0);
  EXPECT_EQ(s.restart, 0);
}

TEST(FrameSearch, RecoversCp2Coefficients) {
  for (double c : {1.0, -0.5}) {
    const FrameSearchResult res = frame_search(build_const_hol_sec(c), 32, 0);
    ASSERT_TRUE(res.found);
    EXPECT_LE(res.residual, 1e-12);
    for (double s : sorted_squares(coeffs_in_frame(ComplexStructure::from_unitary_frame(), res.frame)))
      EXPECT_NEAR(s, 1.0 / 3.0, 1e-6);
  }
}

TEST(FrameSearch, DeterministicForFixedSeed) {
  const CurvatureOperator r = build_const_hol_sec(1.0);
  const FrameSearchResult a = frame_search(r, 16, 7), b = frame_search(r, 16, 7);
  EXPECT_EQ(a.frame.matrix(), b.frame.matrix());
  EXPECT_EQ(a.residual, b.residual);
  EXPECT_EQ(a.restart, b.restart);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(FrameSearch, RecoversFramesOfRandomlyRotatedOperators) {
  std::mt19937_64 rng(73);
  for (int t = 0; t < 5; ++t) {
    const CurvatureOperator r = conjugate(build_const_hol_sec(1.0), random_rotation(rng));
    const FrameSearchResult res = frame_search(r, 32, 1);
    EXPECT_TRUE(res.found);
    EXPECT_LE(distinct_index_residual(r, res.frame), kFrameFoundThreshold);
  }
}

TEST(ScalarSign, ConstHolSecAtFoundFrame) {
  for (double c : {1.0, -1.0}) {
    const CurvatureOperator r = build_const_hol_sec(c);
    const FrameSearchResult res = frame_search(r);
    const ScalarSignReport rep = scalar_sign_check(r, ComplexStructure::from_unitary_frame(), res.frame);
    EXPECT_TRUE(rep.consistent);
    EXPECT_EQ(rep.sign, c > 0 ? 1 : -1);
    EXPECT_NEAR(rep.r, 6.0 * c, 1e-10);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(rep.pair_sums[k], c, 1e-8);
  }
}

TEST(ScalarSign, ProductOperators) {
  const auto [p, j] = build_surface_product(1.0, 1.0);
  const ScalarSignReport a = scalar_sign_check(p, j, FrameRotation::identity());
  EXPECT_TRUE(a.consistent);
  EXPECT_EQ(a.sign, 1);
  EXPECT_EQ(a.pair_sums[0], 2.0);
  const auto [c, jc] = build_surface_product(1.0, -1.0);
  const ScalarSignReport b = scalar_sign_check(c, jc, FrameRotation::identity());
  EXPECT_TRUE(b.consistent);
  EXPECT_EQ(b.sign, 0);
}

TEST(ScalarSign, Preconditions) {
  const ComplexStructure j = ComplexStructure::from_unitary_frame();
  // R1234 = c/2 in the unitary frame
  EXPECT_THROW(scalar_sign_check(build_const_hol_sec(1.0), j, FrameRotation::identity()), PreconditionError);
  EXPECT_THROW(scalar_sign_check(CurvatureOperator::identity(), j, FrameRotation::identity()), PreconditionError);
}

TEST(SelfDualClassify, Branches) {
  const ComplexStructure j = ComplexStructure::from_unitary_frame();
  const ObstructionReport cp2 = selfdual_classify(build_const_hol_sec(1.0), j, cp2_example_frame());
  EXPECT_EQ(cp2.verdict, Verdict::special_frame_branch);
  EXPECT_EQ(cp2.cases.size(), 16u);
  EXPECT_LE(*cp2.residual("coefficient_deviation"), 1e-12);

  const auto [c, jc] = build_surface_product(2.0, -2.0);
  EXPECT_EQ(selfdual_classify(c, jc, FrameRotation::identity()).verdict, Verdict::conformally_flat_branch);
  EXPECT_EQ(selfdual_classify(CurvatureOperator(), j, FrameRotation::identity()).verdict, Verdict::flat);
}

TEST(SelfDualClassify, Preconditions) {
  const ComplexStructure j = ComplexStructure::from_unitary_frame();
  EXPECT_THROW(selfdual_classify(build_const_hol_sec(1.0), j, FrameRotation::identity()), PreconditionError);
  const auto [p, jp] = build_surface_product(1.0, 1.0);  // W- != 0
  EXPECT_THROW(selfdual_classify(p, jp, FrameRotation::identity()), PreconditionError);
  EXPECT_THROW(selfdual_classify(CurvatureOperator::identity(), j, FrameRotation::identity()), PreconditionError);
}

TEST(CSystem, DeterminantOfFullSystem) {
  EXPECT_EQ(c_system_determinant(), Rational(-9));
  const std::array<RationalVector, 4> rel = c_system_relations();
  EXPECT_EQ(rel[0], (RationalVector{Rational(0), Rational(1), Rational(1), Rational(1)}));
  EXPECT_EQ(rel[3], (RationalVector{Rational(1), Rational(1), Rational(-1), Rational(0)}));
}

TEST(CSystem, RationalDeterminantAndNullspace) {
  std::array<std::array<Rational, 3>, 3> m{{{Rational(2), Rational(0), Rational(1)},
                                            {Rational(1, 2), Rational(3), Rational(0)},
                                            {Rational(0), Rational(1), Rational(1)}}};
  // 2 (3 - 0) - 0 + 1 (1/2 - 0)
  EXPECT_EQ(rational_determinant<3>(m), Rational(13, 2));
  EXPECT_EQ(rational_nullspace(RationalMatrix{}).size(), 4u);
  const RationalMatrix one{{Rational(1), Rational(1), Rational(0), Rational(0)}};
  EXPECT_EQ(rational_nullspace(one).size(), 3u);
}

TEST(CSystem, AllCasesVerifiedExactly) {
  const std::vector<CSystemCase> cases = c_system_solve();
  ASSERT_EQ(cases.size(), 16u);
  for (const CSystemCase& c : cases) {
    EXPECT_TRUE(c.verified) << c.label();
    for (const RationalVector& v : c.nullspace)
      for (const RationalVector& eq : c.equations) {
        Rational s(0);
        for (int k = 0; k < 4; ++k) s += eq[k] * v[k];
        EXPECT_EQ(s, Rational(0)) << c.label();
      }
  }
  EXPECT_TRUE(case_with(cases, "rel1,rel2,rel3,rel4").nullspace.empty());
  EXPECT_TRUE(case_with(cases, "c1=0,c2=0,c3=0,c4=0").nullspace.empty());
}

TEST(CSystem, ReducedSkewCaseHasDiagonalKernel) {
  const std::vector<CSystemCase> cases = c_system_solve();
  const CSystemCase& c = case_with(cases, "c1=0,rel2,rel3,rel4");
  ASSERT_EQ(c.nullspace.size(), 1u);
  const RationalVector& v = c.nullspace[0];
  EXPECT_EQ(v[0], Rational(0));
  EXPECT_NE(v[1], Rational(0));
  EXPECT_EQ(v[1], v[2]);
  EXPECT_EQ(v[2], v[3]);
}

TEST(CSystem, OtherCasesWithSolutions) {
  const std::vector<CSystemCase> cases = c_system_solve();
  const CSystemCase& a = case_with(cases, "rel1,c2=0,c3=0,c4=0");
  ASSERT_EQ(a.nullspace.size(), 1u);
  EXPECT_EQ(a.nullspace[0], (RationalVector{Rational(1), Rational(0), Rational(0), Rational(0)}));
  const CSystemCase& b = case_with(cases, "rel1,rel2,rel3,c4=0");
  ASSERT_EQ(b.nullspace.size(), 1u);
  const RationalVector& v = b.nullspace[0];
  EXPECT_EQ(v[3], Rational(0));
  EXPECT_EQ(v[0], v[1]);
  EXPECT_EQ(v[0], -v[2]);
}

TEST(RicciFlatNullspace, ConstraintCounts) {
  EXPECT_EQ(ricciflat_nullspace({1.0, 0.0, 0.0}).constraint_rows, 62);
  EXPECT_EQ(ricciflat_nullspace({1.0, 0.0, 0.0}, false).constraint_rows, 59);
  EXPECT_THROW(ricciflat_nullspace({1.0, 1.0, 0.0}), InvalidArgument);
}

TEST(RicciFlatNullspace, BasisSatisfiesEveryConstraint) {
  std::mt19937_64 rng(74);
  const double s = 1.0 / std::sqrt(3.0);
  std::vector<KahlerCoeffs> triples{{1.0, 0.0, 0.0}, {s, s, s}};
  for (int t = 0; t < 5; ++t) triples.push_back(random_unit_coeffs(rng));
  for (const KahlerCoeffs& a : triples) {
    const ComplexStructure j = ComplexStructure::from_coeffs(a);
    for (bool distinct : {true, false}) {
      const RicciFlatNullspace ns = ricciflat_nullspace(a, distinct);
      ASSERT_EQ(static_cast<int>(ns.basis.size()), ns.dimension);
      for (const CurvatureOperator& r : ns.basis) {
        EXPECT_NEAR(r.frobenius_norm(), 1.0, 1e-10);
        EXPECT_LE(std::abs(bianchi_defect(r)), 1e-10);
        EXPECT_LE(kaehler_residuals(r, j, FrameRotation::identity()).max_residual(), 1e-10);
        EXPECT_LE(ricci(r).cwiseAbs().maxCoeff(), 1e-10);
        // Ricci-flat Kaehler: r = 0 forces W+ = 0
        EXPECT_LE(decompose(r).weyl_plus.frobenius_norm(), 1e-10);
        if (distinct) EXPECT_LE(distinct_index_residual(r, FrameRotation::identity()), 1e-20);
      }
    }
  }
}

TEST(RicciFlatNullspace, ControlIsAntiSelfDualWeylSpace) {
  // Without the distinct-index rows the space is all of W- (symmetric traceless 3x3)
  std::mt19937_64 rng(75);
  EXPECT_EQ(ricciflat_nullspace({1.0, 0.0, 0.0}, false).dimension, 5);
  EXPECT_EQ(ricciflat_nullspace(random_unit_coeffs(rng), false).dimension, 5);
}

TEST(RicciFlatNullspace, ComputedDimensionWithDistinctIndexRows) {
  // Three rows cut the five-dimensional W- space down to two dimensions at most
  // generically; the computed value is recorded here and cross-checked with an
  // explicit member for the unitary frame.
  const RicciFlatNullspace ns = ricciflat_nullspace({1.0, 0.0, 0.0});
  EXPECT_EQ(ns.dimension, 3);
  const CurvatureOperator w = ricci_flat_witness();
  EXPECT_GT(w.frobenius_norm(), 1.0);
  EXPECT_EQ(distinct_index_residual(w, FrameRotation::identity()), 0.0);
  EXPECT_LE(ricci(w).norm(), 1e-15);
  EXPECT_LE(kaehler_residuals(w, ComplexStructure::from_unitary_frame(), FrameRotation::identity()).max_residual(),
            1e-15);
  // w lies in the span of the computed basis
  Mat6 proj = w.matrix();
  for (const CurvatureOperator& b : ns.basis) proj -= frobenius_inner(w.matrix(), b.matrix()) * b.matrix();
  EXPECT_LE(proj.norm(), 1e-10);
}

TEST(RicciFlatNullspace, StableUnderThreshold) {
  const double s = 1.0 / std::sqrt(3.0);
  for (const KahlerCoeffs& a : {KahlerCoeffs{1.0, 0.0, 0.0}, KahlerCoeffs{s, s, s}}) {
    const int base = ricciflat_nullspace(a).dimension;
    EXPECT_EQ(ricciflat_nullspace(a, true, 1e-6).dimension, base);
    EXPECT_EQ(ricciflat_nullspace(a, true, 1e-13).dimension, base);
  }
}

TEST(ObstructionSuite, Verdicts) {
  const ComplexStructure j = ComplexStructure::from_unitary_frame();
  EXPECT_EQ(run_obstruction_suite(build_const_hol_sec(1.0), j).verdict, Verdict::special_frame_branch);
  EXPECT_EQ(run_obstruction_suite(CurvatureOperator(), j).verdict, Verdict::flat);
  const auto [c, jc] = build_surface_product(1.0, -1.0);
  EXPECT_EQ(run_obstruction_suite(c, jc).verdict, Verdict::conformally_flat_branch);
  const ObstructionReport notk = run_obstruction_suite(CurvatureOperator::identity(), j);
  EXPECT_EQ(notk.verdict, Verdict::inconclusive);
  EXPECT_FALSE(notk.notes.empty());
  const auto [p, jp] = build_surface_product(1.0, 1.0);
  EXPECT_EQ(run_obstruction_suite(p, jp).verdict, Verdict::inconclusive);
}

TEST(ObstructionSuite, RicciFlatBranchReportsNullspace) {
  const ObstructionReport rep = run_obstruction_suite(ricci_flat_witness(), ComplexStructure::from_unitary_frame());
  EXPECT_EQ(rep.verdict, Verdict::inconclusive);
  ASSERT_TRUE(rep.residual("nullspace_dimension"));
  EXPECT_EQ(*rep.residual("nullspace_dimension"), 3.0);
}

TEST(ObstructionSuite, VerdictNames) {
  for (Verdict v : {Verdict::flat, Verdict::conformally_flat_branch, Verdict::special_frame_branch, Verdict::violation,
                    Verdict::inconclusive})
    EXPECT_EQ(verdict_from_string(to_string(v)), v);
  EXPECT_THROW(verdict_from_string("maybe"), InvalidArgument);
}
