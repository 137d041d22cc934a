#pragma once

// Exterior algebra on Lambda^2(R^4).
//
// Storage is always the lexicographic basis
//   e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4
// which is orthonormal for the induced inner product. The adapted
// (self-dual / anti-self-dual) basis is a derived view.

#include <array>
#include <cmath>
#include <initializer_list>
#include <utility>

#include <Eigen/Dense>

#include "curvlab/error.hpp"

namespace curvlab {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat3 = Eigen::Matrix3d;

/// Orthogonality / determinant tolerance for frames and complex structures.
inline constexpr double kFrameTolerance = 1e-9;

enum class Chirality { plus, minus };

/// 0-based (i, j), i < j, for each lexicographic slot.
inline constexpr std::array<std::pair<int, int>, 6> kPairs{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Slot of e_i ^ e_j (0-based, i != j) and the sign relating it to the stored
/// orientation: e_j ^ e_i = -(e_i ^ e_j).
struct PairSlot {
  int index;
  int sign;
};

constexpr PairSlot pair_slot(int i, int j) {
  if (i == j || i < 0 || j < 0 || i > 3 || j > 3) throw InvalidArgument("pair_slot: invalid index pair");
  const int sign = i < j ? 1 : -1;
  if (i > j) std::swap(i, j);
  // (0,1)->0 (0,2)->1 (0,3)->2 (1,2)->3 (1,3)->4 (2,3)->5
  const int index = i == 0 ? j - 1 : (i == 1 ? j + 1 : 5);
  return {index, sign};
}

class Bivector {
 public:
  Bivector() : coeffs_(Vec6::Zero()) {}
  explicit Bivector(const Vec6& coeffs) : coeffs_(coeffs) {}
  Bivector(std::initializer_list<double> values) : coeffs_(Vec6::Zero()) {
    if (values.size() != 6) throw InvalidArgument("Bivector needs exactly 6 coefficients");
    int k = 0;
    for (double v : values) coeffs_(k++) = v;
  }

  /// e_i ^ e_j with 1-based indices, matching the usual component notation.
  static Bivector basis(int i, int j) {
    const PairSlot slot = pair_slot(i - 1, j - 1);
    Vec6 c = Vec6::Zero();
    c(slot.index) = slot.sign;
    return Bivector(c);
  }

  const Vec6& coeffs() const noexcept { return coeffs_; }
  double operator[](int k) const { return coeffs_(k); }

  double dot(const Bivector& other) const { return coeffs_.dot(other.coeffs_); }
  double squared_norm() const { return coeffs_.squaredNorm(); }
  double norm() const { return coeffs_.norm(); }

  friend Bivector operator+(const Bivector& a, const Bivector& b) { return Bivector(a.coeffs_ + b.coeffs_); }
  friend Bivector operator-(const Bivector& a, const Bivector& b) { return Bivector(a.coeffs_ - b.coeffs_); }
  friend Bivector operator-(const Bivector& a) { return Bivector(-a.coeffs_); }
  friend Bivector operator*(double s, const Bivector& a) { return Bivector(s * a.coeffs_); }
  friend Bivector operator*(const Bivector& a, double s) { return Bivector(s * a.coeffs_); }

 private:
  Vec6 coeffs_;
};

/// v ^ w; coefficient of e_i ^ e_j is v_i w_j - v_j w_i.
inline Bivector wedge(const Vec4& v, const Vec4& w) {
  Vec6 c;
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kPairs[k];
    c(k) = v(i) * w(j) - v(j) * w(i);
  }
  return Bivector(c);
}

/// Matrix of the Hodge star in the lexicographic basis. Entries are 0 or +-1
/// and the matrix is its own inverse.
inline Mat6 hodge_star_matrix() {
  Mat6 s = Mat6::Zero();
  s(0, 5) = s(5, 0) = 1.0;   // *(e12) = e34
  s(1, 4) = s(4, 1) = -1.0;  // *(e13) = -e24
  s(2, 3) = s(3, 2) = 1.0;   // *(e14) = e23
  return s;
}

inline Bivector hodge_star(const Bivector& b) { return Bivector(hodge_star_matrix() * b.coeffs()); }

/// Orthogonal projector onto Lambda^2_+ (plus) or Lambda^2_- (minus): (Id +- *) / 2.
inline Mat6 sd_projector(Chirality sign) {
  const double s = sign == Chirality::plus ? 1.0 : -1.0;
  return 0.5 * (Mat6::Identity() + s * hodge_star_matrix());
}

inline Bivector sd_project(const Bivector& b, Chirality sign) {
  return Bivector(sd_projector(sign) * b.coeffs());
}

/// An orientation-preserving orthogonal change of frame f_i = Q e_i (columns of Q).
class FrameRotation {
 public:
  FrameRotation() : q_(Mat4::Identity()) {}

  /// Validates Q^T Q = Id and det Q = +1 to `kFrameTolerance`.
  explicit FrameRotation(const Mat4& q) : q_(q) {
    if (!q.allFinite()) throw InvalidArgument("FrameRotation: non-finite entry");
    const double orth = (q.transpose() * q - Mat4::Identity()).cwiseAbs().maxCoeff();
    if (!std::isfinite(orth) || orth > kFrameTolerance)
      throw InvalidArgument("FrameRotation: matrix is not orthogonal");
    if (std::abs(q.determinant() - 1.0) > kFrameTolerance)
      throw InvalidArgument("FrameRotation: determinant is not +1 (orientation reversing)");
  }

  static FrameRotation identity() { return FrameRotation(); }

  /// Nearest rotation to an almost-orthogonal matrix (polar factor). Used to
  /// remove drift after repeated compositions.
  static FrameRotation reorthonormalized(const Mat4& almost) {
    Eigen::JacobiSVD<Mat4> svd(almost, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return FrameRotation(Mat4(svd.matrixU() * svd.matrixV().transpose()));
  }

  const Mat4& matrix() const noexcept { return q_; }
  Vec4 axis(int i) const { return q_.col(i); }

  friend FrameRotation operator*(const FrameRotation& a, const FrameRotation& b) {
    return FrameRotation(Mat4(a.q_ * b.q_));
  }

 private:
  Mat4 q_;
};

/// Second compound matrix of an arbitrary 4x4 matrix A: the linear map on
/// bivectors with v^w -> (Av)^(Aw).
inline Mat6 second_compound(const Mat4& a) {
  Mat6 l;
  for (int q = 0; q < 6; ++q) {
    const auto [k, m] = kPairs[q];
    for (int p = 0; p < 6; ++p) {
      const auto [i, j] = kPairs[p];
      l(p, q) = a(i, k) * a(j, m) - a(j, k) * a(i, m);
    }
  }
  return l;
}

/// L with L(v^w) = (Qv)^(Qw). Orthogonal, and commutes with the Hodge star.
inline Mat6 induced_rotation(const FrameRotation& q) { return second_compound(q.matrix()); }

/// Induced action of the reflection exchanging axes i and j (1-based). This is
/// the only sanctioned way to flip orientation; the result anticommutes with *.
inline Mat6 induced_axis_swap(int i, int j) {
  if (i == j || i < 1 || j < 1 || i > 4 || j > 4) throw InvalidArgument("induced_axis_swap: invalid axes");
  Mat4 p = Mat4::Identity();
  p(i - 1, i - 1) = p(j - 1, j - 1) = 0.0;
  p(i - 1, j - 1) = p(j - 1, i - 1) = 1.0;
  return second_compound(p);
}

/// Columns: the adapted basis of the standard frame,
///   (e12+e34, e13-e24, e14+e23, e12-e34, e13+e24, e14-e23) / sqrt(2).
/// The first three span Lambda^2_+, the last three Lambda^2_-.
inline Mat6 adapted_basis_matrix() {
  const double h = 1.0 / std::sqrt(2.0);
  Mat6 a = Mat6::Zero();
  a(0, 0) = h, a(5, 0) = h;
  a(1, 1) = h, a(4, 1) = -h;
  a(2, 2) = h, a(3, 2) = h;
  a(0, 3) = h, a(5, 3) = -h;
  a(1, 4) = h, a(4, 4) = h;
  a(2, 5) = h, a(3, 5) = -h;
  return a;
}

/// Adapted basis built from the rotated frame f_i = Q e_i, as lexicographic
/// coordinates (one column per element).
inline Mat6 adapted_basis_matrix(const FrameRotation& q) { return induced_rotation(q) * adapted_basis_matrix(); }

inline std::array<Bivector, 6> adapted_basis(const FrameRotation& q) {
  const Mat6 a = adapted_basis_matrix(q);
  std::array<Bivector, 6> out;
  for (int k = 0; k < 6; ++k) out[k] = Bivector(Vec6(a.col(k)));
  return out;
}

}  // namespace curvlab
