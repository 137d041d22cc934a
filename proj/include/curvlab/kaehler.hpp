#pragma once

// Complex structures on R^4 compatible with the orientation, their action on
// bivectors, and the algebraic Kaehler conditions on curvature operators.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "curvlab/bivector.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/error.hpp"

namespace curvlab {

/// Components of the Kaehler form in Lambda^2_+ of some frame:
///   I = a12 (e12 + e34) + a13 (e13 - e24) + a14 (e14 + e23).
struct KahlerCoeffs {
  double a12 = 1.0;
  double a13 = 0.0;
  double a14 = 0.0;

  Eigen::Vector3d vector() const { return {a12, a13, a14}; }
  double squared_norm() const { return a12 * a12 + a13 * a13 + a14 * a14; }
  double operator[](int k) const { return k == 0 ? a12 : (k == 1 ? a13 : a14); }
};

/// I_ij = <J e_i, e_j> as a bivector.
inline Bivector kaehler_form(const Mat4& j) {
  Vec6 c;
  for (int p = 0; p < 6; ++p) {
    const auto [a, b] = kPairs[p];
    c(p) = j(b, a);
  }
  return Bivector(c);
}

/// Orthogonal J with J^2 = -Id whose Kaehler form is self-dual.
class ComplexStructure {
 public:
  static constexpr double kTolerance = 1e-12;

  ComplexStructure() : ComplexStructure(unitary()) {}

  explicit ComplexStructure(const Mat4& j) : j_(j) {
    if (!j.allFinite()) throw InvalidArgument("ComplexStructure: non-finite entry");
    if ((j * j + Mat4::Identity()).cwiseAbs().maxCoeff() > kTolerance)
      throw InvalidArgument("ComplexStructure: J^2 != -Id");
    if ((j.transpose() * j - Mat4::Identity()).cwiseAbs().maxCoeff() > kTolerance)
      throw InvalidArgument("ComplexStructure: J is not orthogonal");
    if (sd_project(curvlab::kaehler_form(j), Chirality::minus).norm() > kTolerance)
      throw InvalidArgument("ComplexStructure: Kaehler form is not self-dual (orientation incompatible)");
  }

  /// J e1 = e2, J e2 = -e1, J e3 = e4, J e4 = -e3.
  static ComplexStructure from_unitary_frame() { return ComplexStructure(unitary()); }

  /// J(e1) = a12 e2 + a13 e3 + a14 e4,  J(e2) = -a12 e1 + a14 e3 - a13 e4,
  /// J(e3) = -a13 e1 - a14 e2 + a12 e4, J(e4) = -a14 e1 + a13 e2 - a12 e3.
  static ComplexStructure from_coeffs(const KahlerCoeffs& a) {
    Mat4 j;
    j.col(0) << 0.0, a.a12, a.a13, a.a14;
    j.col(1) << -a.a12, 0.0, a.a14, -a.a13;
    j.col(2) << -a.a13, -a.a14, 0.0, a.a12;
    j.col(3) << -a.a14, a.a13, -a.a12, 0.0;
    return ComplexStructure(j);
  }

  const Mat4& matrix() const noexcept { return j_; }
  Bivector kaehler_form() const { return curvlab::kaehler_form(j_); }

  /// The same structure expressed in the frame f_i = Q e_i: Q^T J Q.
  ComplexStructure in_frame(const FrameRotation& q) const {
    return ComplexStructure(Mat4(q.matrix().transpose() * j_ * q.matrix()));
  }

 private:
  static Mat4 unitary() {
    Mat4 j = Mat4::Zero();
    j(1, 0) = 1.0;
    j(0, 1) = -1.0;
    j(3, 2) = 1.0;
    j(2, 3) = -1.0;
    return j;
  }

  Mat4 j_;
};

/// Reads (a12, a13, a14) off the self-dual expansion of I in the frame Q e_i.
inline KahlerCoeffs coeffs_in_frame(const ComplexStructure& j, const FrameRotation& q) {
  const Bivector form = kaehler_form(Mat4(q.matrix().transpose() * j.matrix() * q.matrix()));
  if (sd_project(form, Chirality::minus).norm() > 1e-9)
    throw InvalidArgument("coeffs_in_frame: Kaehler form not self-dual in the rotated frame");
  return {0.5 * (form[0] + form[5]), 0.5 * (form[1] - form[4]), 0.5 * (form[2] + form[3])};
}

/// The induced operator J(v ^ w) = Jv ^ Jw. Symmetric and an involution; the
/// identity on Lambda^2_-, with (-1)-eigenspace I^perp inside Lambda^2_+.
inline Mat6 extend_to_bivectors(const ComplexStructure& j) { return second_compound(j.matrix()); }

/// A frame reordered within its orientation so that a12 > 0, a13 >= 0, a14 >= 0.
struct NormalizedFrame {
  FrameRotation frame;
  Mat4 permutation;  // signed permutation P with det +1; frame = Q P
  KahlerCoeffs coeffs;
};

/// Searches the 192 orientation-preserving signed permutations in a fixed order
/// and returns the first one achieving the sign normalization.
inline NormalizedFrame normalize_coeffs(const ComplexStructure& j, const FrameRotation& q, double tol = 1e-12) {
  std::array<int, 4> perm{0, 1, 2, 3};
  do {
    for (int signs = 0; signs < 16; ++signs) {
      Mat4 p = Mat4::Zero();
      for (int c = 0; c < 4; ++c) p(perm[c], c) = (signs >> c) & 1 ? -1.0 : 1.0;
      if (p.determinant() < 0.0) continue;
      const FrameRotation candidate(Mat4(q.matrix() * p));
      const KahlerCoeffs a = coeffs_in_frame(j, candidate);
      if (a.a12 > tol && a.a13 >= -tol && a.a14 >= -tol) return {candidate, p, a};
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  throw Error("normalize_coeffs: no admissible reordering");  // unreachable for unit coefficients
}

/// The twelve componentwise Kaehler identities, plus the operator form RJ = JR = R.
struct KaehlerResiduals {
  std::array<double, 12> identities{};
  double commutator = 0.0;   // max |R J - J R|
  double fixed_point = 0.0;  // max |R J - R|
  KahlerCoeffs coeffs;

  double max_identity() const {
    double m = 0.0;
    for (double v : identities) m = std::max(m, std::abs(v));
    return m;
  }
  double max_operator() const { return std::max(commutator, fixed_point); }
  double max_residual() const { return std::max(max_identity(), max_operator()); }

  /// True when the two formulations agree on whether R is Kaehler. They can
  /// disagree in frames where some a1j vanish: the componentwise identities then
  /// lose rank while the operator form does not.
  bool consistent(double tol) const { return (max_identity() <= tol) == (max_operator() <= tol); }
};

namespace detail {

/// Numerators N_j of the scalar-curvature relations r = 2 N_j / a1j^2.
inline std::array<double, 3> scalar_numerators(const CurvatureOperator& r) {
  return {r(1, 2, 1, 2) + r(3, 4, 3, 4) + 2.0 * r(1, 2, 3, 4), r(1, 3, 1, 3) + r(2, 4, 2, 4) - 2.0 * r(1, 3, 2, 4),
          r(1, 4, 1, 4) + r(2, 3, 2, 3) + 2.0 * r(1, 4, 2, 3)};
}

}  // namespace detail

/// Evaluates the identities with the components of R and the coefficients of J
/// both taken in the frame Q e_i.
inline KaehlerResiduals kaehler_residuals(const CurvatureOperator& curvature, const ComplexStructure& j,
                                          const FrameRotation& q) {
  const CurvatureOperator rr = conjugate(curvature, q);
  const KahlerCoeffs a = coeffs_in_frame(j, q);
  const Mat4 ric = ricci(rr);
  auto R = [&](int i, int jj, int k, int l) { return rr(i, jj, k, l); };
  auto rho = [&](int x, int y) { return ric(x - 1, y - 1); };
  const double a12 = a.a12, a13 = a.a13, a14 = a.a14;

  const double n12 = R(1, 2, 1, 2) + R(3, 4, 3, 4) + 2.0 * R(1, 2, 3, 4);
  const double n13_1324 = R(1, 3, 1, 3) + R(2, 4, 2, 4) - 2.0 * R(1, 3, 2, 4);
  const double n13_2413 = R(1, 3, 1, 3) + R(2, 4, 2, 4) - 2.0 * R(2, 4, 1, 3);
  const double n14 = R(1, 4, 1, 4) + R(2, 3, 2, 3) + 2.0 * R(1, 4, 2, 3);
  const double x12_13 = (R(1, 2, 1, 3) - R(4, 2, 4, 3)) + (R(2, 1, 2, 4) - R(3, 1, 3, 4));
  const double x12_14 = (R(1, 2, 1, 4) - R(3, 2, 3, 4)) - (R(2, 1, 2, 3) - R(4, 1, 4, 3));

  KaehlerResiduals out;
  out.coeffs = a;
  auto& e = out.identities;
  e[0] = a12 * x12_13 - a13 * n12;
  e[1] = a12 * x12_14 - a14 * n12;
  e[2] = a13 * x12_13 - a12 * n13_2413;
  e[3] = a13 * ((R(1, 3, 1, 4) - R(2, 3, 2, 4)) - (R(4, 1, 4, 2) - R(3, 1, 3, 2))) - a14 * n13_1324;
  e[4] = a14 * x12_14 - a12 * n14;
  e[5] = a14 * ((R(1, 3, 1, 4) - R(2, 3, 2, 4)) + (R(3, 1, 3, 2) - R(4, 1, 4, 2))) - a13 * n14;
  e[6] = a12 * (rho(2, 3) + rho(1, 4)) - a13 * (R(1, 2, 1, 2) - R(3, 4, 3, 4));
  e[7] = a12 * (rho(2, 4) - rho(1, 3)) - a14 * (R(1, 2, 1, 2) - R(3, 4, 3, 4));
  e[8] = a13 * (rho(2, 3) - rho(1, 4)) - a12 * (R(1, 3, 1, 3) - R(2, 4, 2, 4));
  e[9] = a13 * (rho(3, 4) + rho(1, 2)) - a14 * (R(1, 3, 1, 3) - R(2, 4, 2, 4));
  e[10] = a14 * (rho(2, 4) + rho(1, 3)) - a12 * (R(1, 4, 1, 4) - R(2, 3, 2, 3));
  e[11] = a14 * (rho(3, 4) - rho(1, 2)) - a13 * (R(1, 4, 1, 4) - R(2, 3, 2, 3));

  const Mat6 jext = extend_to_bivectors(j.in_frame(q));
  const Mat6& m = rr.matrix();
  out.commutator = (m * jext - jext * m).cwiseAbs().maxCoeff();
  out.fixed_point = (m * jext - m).cwiseAbs().maxCoeff();
  return out;
}

/// Kaehler in both formulations.
inline bool is_kaehler(const KaehlerResiduals& res, double tol) { return res.max_residual() <= tol; }

/// Lines with a1j^2 below this are treated as degenerate (0/0).
inline constexpr double kMinCoefficientSquared = 1e-6;

struct ScalarCandidate {
  int line;  // j in {2, 3, 4}: the relation using a_1j
  double value;
};

/// Scalar curvature recovered from each relation r = 2 N_j / a1j^2 with a1j
/// bounded away from zero. For degenerate lines the numerator must instead
/// match (r/2) a1j^2 (which vanishes with a1j); a mismatch is reported as a
/// precondition failure.
inline std::vector<ScalarCandidate> scalar_from_kaehler(const CurvatureOperator& curvature, const ComplexStructure& j,
                                                        const FrameRotation& q, double tol = 1e-9) {
  const KaehlerResiduals res = kaehler_residuals(curvature, j, q);
  if (!is_kaehler(res, tol)) throw PreconditionError("scalar_from_kaehler: operator is not Kaehler for J");
  const CurvatureOperator rr = conjugate(curvature, q);
  const std::array<double, 3> numerators = detail::scalar_numerators(rr);
  const double r = scalar_curvature(rr);
  std::vector<ScalarCandidate> out;
  for (int k = 0; k < 3; ++k) {
    const double a2 = res.coeffs[k] * res.coeffs[k];
    if (a2 >= kMinCoefficientSquared) {
      out.push_back({k + 2, 2.0 * numerators[k] / a2});
    } else if (std::abs(numerators[k] - 0.5 * r * a2) > tol * std::max(1.0, std::abs(r))) {
      throw PreconditionError("scalar_from_kaehler: degenerate relation has nonvanishing numerator");
    }
  }
  return out;
}

struct KahlerBlockForm {
  double r = 0.0;
  KahlerCoeffs coeffs;
  Mat3 weyl_plus_block;    // W+ + r/12 Id
  Mat3 mixed_block;        // s(rho - r/4 Id), rows in Lambda^2_+
  Mat3 weyl_minus_block;   // W- + r/12 Id
  Mat3 weyl_minus_correction;
  Eigen::Vector3d weyl_plus_singular_values;
  Eigen::Vector3d mixed_singular_values;
  bool weyl_plus_rank_one = false;
  bool mixed_rank_one = false;
  double weyl_plus_formula_defect = 0.0;   // max |W+ - (r/4)(a a^T - Id/3)|
  double weyl_minus_formula_defect = 0.0;  // max |W- - (r/4)(a a^T - Id/3) - correction|
};

/// sigma_2 <= max(1e-8 sigma_1, 1e-10).
inline bool numerically_rank_one(const Eigen::Vector3d& singular_values) {
  return singular_values(1) <= std::max(1e-8 * singular_values(0), 1e-10);
}

/// Block form of a Kaehler operator in the adapted basis of Q, with rank
/// certificates and the closed-form Weyl blocks checked entrywise.
inline KahlerBlockForm kaehler_block_form(const CurvatureOperator& curvature, const ComplexStructure& j,
                                          const FrameRotation& q, double tol = 1e-9) {
  const KaehlerResiduals res = kaehler_residuals(curvature, j, q);
  if (!is_kaehler(res, tol)) throw PreconditionError("kaehler_block_form: operator is not Kaehler for J");
  const CurvatureOperator rr = conjugate(curvature, q);
  const FrameRotation id = FrameRotation::identity();

  KahlerBlockForm out;
  out.r = scalar_curvature(rr);
  out.coeffs = res.coeffs;
  out.weyl_plus_block = weyl_block(rr, Chirality::plus, id);
  out.weyl_minus_block = weyl_block(rr, Chirality::minus, id);
  out.mixed_block = mixed_block(rr, id);
  out.weyl_plus_singular_values = Eigen::JacobiSVD<Mat3>(out.weyl_plus_block).singularValues();
  out.mixed_singular_values = Eigen::JacobiSVD<Mat3>(out.mixed_block).singularValues();
  out.weyl_plus_rank_one = numerically_rank_one(out.weyl_plus_singular_values);
  out.mixed_rank_one = numerically_rank_one(out.mixed_singular_values);

  auto R = [&](int i, int jj, int k, int l) { return rr(i, jj, k, l); };
  Mat3& c = out.weyl_minus_correction;
  c(0, 0) = -2.0 * R(1, 2, 3, 4);
  c(0, 1) = c(1, 0) = -(R(2, 1, 2, 4) - R(3, 1, 3, 4));
  c(0, 2) = c(2, 0) = R(2, 1, 2, 3) - R(4, 1, 4, 3);
  c(1, 1) = 2.0 * R(2, 4, 1, 3);
  c(1, 2) = c(2, 1) = -(R(3, 1, 3, 2) - R(4, 1, 4, 2));
  c(2, 2) = -2.0 * R(1, 4, 2, 3);

  const Eigen::Vector3d a = res.coeffs.vector();
  const Mat3 closed = out.r / 4.0 * (a * a.transpose() - Mat3::Identity() / 3.0);
  const Mat3 shift = out.r / 12.0 * Mat3::Identity();
  out.weyl_plus_formula_defect = (out.weyl_plus_block - shift - closed).cwiseAbs().maxCoeff();
  out.weyl_minus_formula_defect = (out.weyl_minus_block - shift - closed - c).cwiseAbs().maxCoeff();
  return out;
}

/// Constant holomorphic sectional curvature c for the unitary J:
///   R_ijkl = c/4 (d_ik d_jl - d_il d_jk + J_ik J_jl - J_il J_jk + 2 J_ij J_kl),
/// J_ij = <J e_i, e_j>. As an operator: c/4 (Id + J_ext + 2 I I^T).
inline CurvatureOperator build_const_hol_sec(double c) {
  const ComplexStructure j = ComplexStructure::from_unitary_frame();
  const Vec6 form = j.kaehler_form().coeffs();
  const Mat6 m = c / 4.0 * (Mat6::Identity() + extend_to_bivectors(j) + 2.0 * form * form.transpose());
  return CurvatureOperator(m);
}

/// Product of surfaces of curvature k1 (e1, e2 plane) and k2 (e3, e4 plane),
/// with the product complex structure.
inline std::pair<CurvatureOperator, ComplexStructure> build_surface_product(double k1, double k2) {
  Mat6 m = Mat6::Zero();
  m(0, 0) = k1;
  m(5, 5) = k2;
  return {CurvatureOperator(m), ComplexStructure::from_unitary_frame()};
}

}  // namespace curvlab
