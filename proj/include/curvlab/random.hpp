#pragma once

// Seeded samplers for frames and curvature operators. All draws go through a
// caller-owned std::mt19937_64, so sequences are reproducible per seed.

#include <random>
#include <utility>

#include <Eigen/Dense>

#include "curvlab/bivector.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/kaehler.hpp"

namespace curvlab {

template <typename Derived>
void fill_normal(Eigen::MatrixBase<Derived>& m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = normal(rng);
}

/// Haar-distributed element of SO(4): QR of a Gaussian matrix with the sign of
/// R's diagonal folded into Q, then one column flipped if det = -1.
inline FrameRotation random_rotation(std::mt19937_64& rng) {
  Mat4 g;
  fill_normal(g, rng);
  Eigen::HouseholderQR<Mat4> qr(g);
  Mat4 q = qr.householderQ();
  const Mat4 r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < 4; ++k)
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return FrameRotation::reorthonormalized(q);
}

inline Mat4 random_symmetric4(std::mt19937_64& rng) {
  Mat4 g;
  fill_normal(g, rng);
  return 0.5 * (g + g.transpose());
}

inline CurvatureOperator random_symmetric_operator(std::mt19937_64& rng) {
  Mat6 g;
  fill_normal(g, rng);
  return CurvatureOperator(Mat6(0.5 * (g + g.transpose())));
}

/// Random operator satisfying the first Bianchi identity (the *-component removed).
inline CurvatureOperator random_bianchi_operator(std::mt19937_64& rng) {
  const CurvatureOperator r = random_symmetric_operator(rng);
  return r - decompose(r).bianchi_part;
}

/// Uniform point on the unit sphere in R^3, read as Kaehler coefficients.
inline KahlerCoeffs random_unit_coeffs(std::mt19937_64& rng) {
  Eigen::Vector3d v;
  fill_normal(v, rng);
  v.normalize();
  return {v(0), v(1), v(2)};
}

struct KaehlerSample {
  CurvatureOperator curvature;
  ComplexStructure complex_structure;
};

/// Generic algebraic Kaehler curvature: a random symmetric operator compressed
/// to the (+1)-eigenspace of the unitary J on bivectors, with the *-component
/// removed inside that space, then expressed in a random frame together with
/// its complex structure. The family spans all 9 dimensions. When
/// `zero_scalar` is set, a multiple of const_hol_sec(1) cancels r.
inline KaehlerSample random_kaehler(std::mt19937_64& rng, bool zero_scalar = false) {
  const ComplexStructure j = ComplexStructure::from_unitary_frame();
  const Mat6 p = 0.5 * (Mat6::Identity() + extend_to_bivectors(j));
  const Mat6 star = hodge_star_matrix();
  const Mat6 pstar = p * star * p;  // Kaehler, <pstar, *> = tr(P) = 4
  Mat6 m = p * random_symmetric_operator(rng).matrix() * p;
  m -= frobenius_inner(m, star) / frobenius_inner(pstar, star) * pstar;
  CurvatureOperator r{Mat6(0.5 * (m + m.transpose()))};
  if (zero_scalar) r = r - scalar_curvature(r) / 6.0 * build_const_hol_sec(1.0);
  const FrameRotation q = random_rotation(rng);
  return {conjugate(r, q), j.in_frame(q)};
}

}  // namespace curvlab
