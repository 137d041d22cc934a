#pragma once

// Algebraic curvature operators on Lambda^2(R^4) and their invariant
// decomposition  R = I + RIC_0 + W+ + W- + S.
//
// Sign convention: R_XY Z = nabla_[X,Y] Z - nabla_X nabla_Y Z + nabla_Y nabla_X Z,
// R_ijkl = <R_{e_i e_j} e_k, e_l> = <R(e_i ^ e_j), e_k ^ e_l>. With this choice
// R_1212 is the sectional curvature of the (e1, e2) plane and the round sphere
// has R = +Id.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvlab/bivector.hpp"
#include "curvlab/error.hpp"

namespace curvlab {

inline double frobenius_inner(const Mat6& a, const Mat6& b) { return (a.array() * b.array()).sum(); }

/// Symmetric operator on Lambda^2(R^4), stored in the lexicographic basis.
class CurvatureOperator {
 public:
  CurvatureOperator() : m_(Mat6::Zero()) {}

  /// Rejects matrices that are not symmetric to 1e-12 (relative to the largest
  /// entry); the stored matrix is exactly symmetric.
  explicit CurvatureOperator(const Mat6& m) {
    if (!m.allFinite()) throw InvalidArgument("CurvatureOperator: non-finite entry");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw InvalidArgument("CurvatureOperator: matrix is not symmetric");
    m_ = 0.5 * (m + m.transpose());
  }

  static CurvatureOperator identity() { return CurvatureOperator(Mat6(Mat6::Identity())); }
  static CurvatureOperator hodge_star() { return CurvatureOperator(hodge_star_matrix()); }

  const Mat6& matrix() const noexcept { return m_; }

  /// R_ijkl with 1-based indices. Zero whenever i == j or k == l.
  double operator()(int i, int j, int k, int l) const {
    if (i < 1 || i > 4 || j < 1 || j > 4 || k < 1 || k > 4 || l < 1 || l > 4)
      throw InvalidArgument("curvature component index out of range 1..4");
    if (i == j || k == l) return 0.0;
    const PairSlot p = pair_slot(i - 1, j - 1);
    const PairSlot q = pair_slot(k - 1, l - 1);
    return p.sign * q.sign * m_(p.index, q.index);
  }

  Bivector apply(const Bivector& b) const { return Bivector(Vec6(m_ * b.coeffs())); }

  double frobenius_norm() const { return m_.norm(); }

  friend CurvatureOperator operator+(const CurvatureOperator& a, const CurvatureOperator& b) {
    return CurvatureOperator(Mat6(a.m_ + b.m_));
  }
  friend CurvatureOperator operator-(const CurvatureOperator& a, const CurvatureOperator& b) {
    return CurvatureOperator(Mat6(a.m_ - b.m_));
  }
  friend CurvatureOperator operator*(double s, const CurvatureOperator& a) { return CurvatureOperator(Mat6(s * a.m_)); }

 private:
  Mat6 m_;
};

/// One entry of a component table: R_{i j k l} = value, indices 1-based.
struct ComponentEntry {
  int i, j, k, l;
  double value;
};

/// Builds an operator from a sparse component table. Entries related by
/// R_ijkl = -R_jikl = -R_ijlk must agree, as must R_ijkl and R_klij; anything
/// not mentioned is zero.
inline CurvatureOperator from_components(const std::vector<ComponentEntry>& table) {
  Mat6 m = Mat6::Zero();
  Eigen::Matrix<bool, 6, 6> set = Eigen::Matrix<bool, 6, 6>::Constant(false);
  auto agree = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  auto label = [](const ComponentEntry& e) {
    return "R_" + std::to_string(e.i) + std::to_string(e.j) + std::to_string(e.k) + std::to_string(e.l);
  };
  for (const ComponentEntry& e : table) {
    for (int idx : {e.i, e.j, e.k, e.l})
      if (idx < 1 || idx > 4) throw InvalidArgument("from_components: index out of range in " + label(e));
    if (e.i == e.j || e.k == e.l) throw InvalidArgument("from_components: repeated index within a pair in " + label(e));
    const PairSlot p = pair_slot(e.i - 1, e.j - 1);
    const PairSlot q = pair_slot(e.k - 1, e.l - 1);
    const double v = p.sign * q.sign * e.value;
    if (set(p.index, q.index)) {
      if (!agree(m(p.index, q.index), v))
        throw InvalidArgument("from_components: " + label(e) + " conflicts with an antisymmetry-related entry");
      continue;
    }
    if (set(q.index, p.index) && !agree(m(q.index, p.index), v))
      throw InvalidArgument("from_components: " + label(e) + " violates pair symmetry R_ijkl = R_klij");
    m(p.index, q.index) = v;
    m(q.index, p.index) = v;
    set(p.index, q.index) = true;
  }
  return CurvatureOperator(m);
}

/// <rho(R) v, w> = sum_i <R(v ^ e_i), w ^ e_i>, evaluated in the standard frame.
inline Mat4 ricci(const CurvatureOperator& r) {
  Mat4 rho = Mat4::Zero();
  for (int a = 1; a <= 4; ++a)
    for (int b = 1; b <= 4; ++b)
      for (int i = 1; i <= 4; ++i) rho(a - 1, b - 1) += r(a, i, b, i);
  return rho;
}

/// r = 2 tr(R) = tr(rho(R)).
inline double scalar_curvature(const CurvatureOperator& r) { return 2.0 * r.matrix().trace(); }

/// <R, *> in the Frobenius inner product.
inline double star_inner_product(const CurvatureOperator& r) {
  return frobenius_inner(r.matrix(), hodge_star_matrix());
}

/// R_1234 + R_2314 + R_3124: the single independent component of b(R) in
/// dimension 4. Equals <R, *> / 2.
inline double bianchi_defect(const CurvatureOperator& r) { return r(1, 2, 3, 4) + r(2, 3, 1, 4) + r(3, 1, 2, 4); }

inline bool is_symmetric(const Mat4& t, double tol = 1e-12) {
  return (t - t.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, t.cwiseAbs().maxCoeff());
}

/// Right inverse of the Ricci contraction (n = 4):
///   s(T)_ijkl = 1/2 (d_ik T_jl - d_jk T_il + T_ik d_jl - T_jk d_il)
///             - tr(T)/6 (d_ik d_jl - d_jk d_il).
inline CurvatureOperator s_map(const Mat4& t) {
  if (!t.allFinite() || !is_symmetric(t)) throw InvalidArgument("s_map: input is not symmetric");
  const double trace = t.trace();
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  Mat6 m;
  for (int p = 0; p < 6; ++p) {
    const auto [i, j] = kPairs[p];
    for (int q = 0; q < 6; ++q) {
      const auto [k, l] = kPairs[q];
      m(p, q) = 0.5 * (d(i, k) * t(j, l) - d(j, k) * t(i, l) + t(i, k) * d(j, l) - t(j, k) * d(i, l)) -
                trace / 6.0 * (d(i, k) * d(j, l) - d(j, k) * d(i, l));
    }
  }
  return CurvatureOperator(m);
}

struct Decomposition {
  CurvatureOperator scalar_part;
  CurvatureOperator traceless_ricci_part;
  CurvatureOperator weyl_plus;
  CurvatureOperator weyl_minus;
  CurvatureOperator bianchi_part;
  double r = 0.0;

  CurvatureOperator reconstruction() const {
    return scalar_part + traceless_ricci_part + weyl_plus + weyl_minus + bianchi_part;
  }

  std::array<const CurvatureOperator*, 5> parts() const {
    return {&scalar_part, &traceless_ricci_part, &weyl_plus, &weyl_minus, &bianchi_part};
  }
};

/// Orthogonal decomposition into scalar, trace-free Ricci, W+, W- and the
/// component along * (nonzero only for operators violating first Bianchi).
/// The *-component is removed before the Weyl blocks are extracted, so the
/// function is total on symmetric operators.
inline Decomposition decompose(const CurvatureOperator& r) {
  Decomposition d;
  d.r = scalar_curvature(r);
  d.scalar_part = CurvatureOperator(Mat6(d.r / 12.0 * Mat6::Identity()));
  d.traceless_ricci_part = s_map(Mat4(ricci(r) - d.r / 4.0 * Mat4::Identity()));
  d.bianchi_part = CurvatureOperator(Mat6(star_inner_product(r) / 6.0 * hodge_star_matrix()));
  const Mat6 weyl = r.matrix() - d.scalar_part.matrix() - d.traceless_ricci_part.matrix() - d.bianchi_part.matrix();
  const Mat6 pp = sd_projector(Chirality::plus);
  const Mat6 pm = sd_projector(Chirality::minus);
  d.weyl_plus = CurvatureOperator(Mat6(pp * weyl * pp));
  d.weyl_minus = CurvatureOperator(Mat6(pm * weyl * pm));
  return d;
}

/// Components of R in the rotated frame f_i = Q e_i: L^T R L, L = induced_rotation(Q).
inline CurvatureOperator conjugate(const CurvatureOperator& r, const FrameRotation& q) {
  const Mat6 l = induced_rotation(q);
  return CurvatureOperator(Mat6(l.transpose() * r.matrix() * l));
}

/// Full matrix of R in the adapted basis of Q (++ block top-left, -- bottom-right).
inline Mat6 adapted_matrix(const CurvatureOperator& r, const FrameRotation& q = FrameRotation::identity()) {
  const Mat6 a = adapted_basis_matrix(q);
  return a.transpose() * r.matrix() * a;
}

/// 3x3 block of W^sign(R) + (r/12) Id in the adapted basis of Q.
inline Mat3 weyl_block(const CurvatureOperator& r, Chirality sign, const FrameRotation& q) {
  const Decomposition d = decompose(r);
  const CurvatureOperator w = sign == Chirality::plus ? d.weyl_plus : d.weyl_minus;
  const Mat6 full = adapted_matrix(w + d.scalar_part, q);
  const int o = sign == Chirality::plus ? 0 : 3;
  return full.block<3, 3>(o, o);
}

/// Off-diagonal block s(rho(R) - r/4 Id) restricted as Lambda^2_- -> Lambda^2_+
/// (rows indexed by the self-dual adapted elements) in the adapted basis of Q.
inline Mat3 mixed_block(const CurvatureOperator& r, const FrameRotation& q) {
  const Decomposition d = decompose(r);
  return adapted_matrix(d.traceless_ricci_part, q).block<3, 3>(0, 3);
}

}  // namespace curvlab
