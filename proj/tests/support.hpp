#pragma once

// Shared oracles for the test suites. These evaluate the textbook formulas
// directly from 4-index components obtained through wedge products, without
// going through the library's index bookkeeping.

#include <array>
#include <random>

#include <Eigen/Dense>

#include "curvlab/bivector.hpp"
#include "curvlab/curvature.hpp"

namespace curvlab::testing {

inline Vec4 unit(int i) { return Vec4::Unit(i - 1); }

/// R_ijkl = <R(e_i ^ e_j), e_k ^ e_l>, 1-based.
inline double comp(const CurvatureOperator& r, int i, int j, int k, int l) {
  const Vec6 a = wedge(unit(i), unit(j)).coeffs();
  const Vec6 b = wedge(unit(k), unit(l)).coeffs();
  return b.dot(r.matrix() * a);
}

/// Levi-Civita symbol of a permutation of 1..4 (0 if indices repeat).
inline int levi_civita(int a, int b, int c, int d) {
  std::array<int, 4> p{a, b, c, d};
  int sign = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      if (p[i] == p[j]) return 0;
      if (p[i] > p[j]) sign = -sign;
    }
  return sign;
}

/// Ricci contraction through bivector evaluation: sum_i <R(v ^ e_i), w ^ e_i>.
inline Mat4 ricci_oracle(const CurvatureOperator& r) {
  Mat4 out;
  for (int a = 1; a <= 4; ++a)
    for (int b = 1; b <= 4; ++b) {
      double s = 0.0;
      for (int i = 1; i <= 4; ++i) s += wedge(unit(b), unit(i)).dot(r.apply(wedge(unit(a), unit(i))));
      out(a - 1, b - 1) = s;
    }
  return out;
}

/// The explicit component matrix of W+ + r/12 Id.
inline Mat3 weyl_plus_components(const CurvatureOperator& r) {
  auto R = [&](int i, int j, int k, int l) { return comp(r, i, j, k, l); };
  Mat3 m;
  m << R(1, 2, 1, 2) + R(3, 4, 3, 4) + 2 * R(1, 2, 3, 4),
      (R(1, 2, 1, 3) + R(3, 4, 1, 3)) - (R(1, 2, 2, 4) + R(3, 4, 2, 4)),
      (R(1, 2, 1, 4) + R(3, 4, 1, 4)) + (R(1, 2, 2, 3) + R(3, 4, 2, 3)),
      (R(1, 3, 1, 2) - R(2, 4, 1, 2)) + (R(1, 3, 3, 4) - R(2, 4, 3, 4)),
      R(1, 3, 1, 3) + R(2, 4, 2, 4) - 2 * R(1, 3, 2, 4),
      (R(1, 3, 1, 4) - R(2, 4, 1, 4)) + (R(1, 3, 2, 3) - R(2, 4, 2, 3)),
      (R(1, 4, 1, 2) + R(2, 3, 1, 2)) + (R(1, 4, 3, 4) + R(2, 3, 3, 4)),
      (R(1, 4, 1, 3) + R(2, 3, 1, 3)) - (R(1, 4, 2, 4) + R(2, 3, 2, 4)),
      R(1, 4, 1, 4) + R(2, 3, 2, 3) + 2 * R(1, 4, 2, 3);
  return 0.5 * m;
}

/// The explicit component matrix of W- + r/12 Id.
inline Mat3 weyl_minus_components(const CurvatureOperator& r) {
  auto R = [&](int i, int j, int k, int l) { return comp(r, i, j, k, l); };
  Mat3 m;
  m << R(1, 2, 1, 2) + R(3, 4, 3, 4) - 2 * R(1, 2, 3, 4),
      (R(1, 2, 1, 3) - R(3, 4, 1, 3)) + (R(1, 2, 2, 4) - R(3, 4, 2, 4)),
      (R(1, 2, 1, 4) - R(3, 4, 1, 4)) - (R(1, 2, 2, 3) - R(3, 4, 2, 3)),
      (R(1, 3, 1, 2) + R(2, 4, 1, 2)) - (R(1, 3, 3, 4) + R(2, 4, 3, 4)),
      R(1, 3, 1, 3) + R(2, 4, 2, 4) + 2 * R(1, 3, 2, 4),
      (R(1, 3, 1, 4) + R(2, 4, 1, 4)) - (R(1, 3, 2, 3) + R(2, 4, 2, 3)),
      (R(1, 4, 1, 2) - R(2, 3, 1, 2)) - (R(1, 4, 3, 4) - R(2, 3, 3, 4)),
      (R(1, 4, 1, 3) - R(2, 3, 1, 3)) + (R(1, 4, 2, 4) - R(2, 3, 2, 4)),
      R(1, 4, 1, 4) + R(2, 3, 2, 3) - 2 * R(1, 4, 2, 3);
  return 0.5 * m;
}

/// The explicit component matrix of s(rho - r/4)^{+-} (rows self-dual).
inline Mat3 mixed_components(const CurvatureOperator& r) {
  auto R = [&](int i, int j, int k, int l) { return comp(r, i, j, k, l); };
  Mat3 m;
  m << R(1, 2, 1, 2) - R(3, 4, 3, 4), (R(1, 2, 1, 3) + R(3, 4, 1, 3)) + (R(1, 2, 2, 4) + R(3, 4, 2, 4)),
      (R(1, 2, 1, 4) + R(3, 4, 1, 4)) - (R(1, 2, 2, 3) + R(3, 4, 2, 3)),
      (R(1, 3, 1, 2) - R(2, 4, 1, 2)) - (R(1, 3, 3, 4) - R(2, 4, 3, 4)), R(1, 3, 1, 3) - R(2, 4, 2, 4),
      (R(1, 3, 1, 4) - R(2, 4, 1, 4)) - (R(1, 3, 2, 3) - R(2, 4, 2, 3)),
      (R(1, 4, 1, 2) + R(2, 3, 1, 2)) - (R(1, 4, 3, 4) + R(2, 3, 3, 4)),
      (R(1, 4, 1, 3) + R(2, 3, 1, 3)) + (R(1, 4, 2, 4) + R(2, 3, 2, 4)), R(1, 4, 1, 4) - R(2, 3, 2, 3);
  return 0.5 * m;
}

/// The same block written through the Ricci contraction.
inline Mat3 mixed_components_ricci(const CurvatureOperator& r) {
  auto R = [&](int i, int j, int k, int l) { return comp(r, i, j, k, l); };
  const Mat4 p = ricci_oracle(r);
  auto rho = [&](int a, int b) { return p(a - 1, b - 1); };
  Mat3 m;
  m << R(1, 2, 1, 2) - R(3, 4, 3, 4), rho(2, 3) - rho(1, 4), rho(2, 4) + rho(1, 3),  //
      rho(2, 3) + rho(1, 4), R(1, 3, 1, 3) - R(2, 4, 2, 4), rho(3, 4) - rho(1, 2),    //
      rho(2, 4) - rho(1, 3), rho(3, 4) + rho(1, 2), R(1, 4, 1, 4) - R(2, 3, 2, 3);
  return 0.5 * m;
}

}  // namespace curvlab::testing
