#pragma once

// Diagonal metrics g = sum a_i^2 dx_i^2 written in orthogonal coordinates, and
// their connection and curvature in the associated frame e_i = (1/a_i) d/dx_i.
//
// All derivatives are exact: the frame derivatives e_k(a_i) and e_j e_k(a_i)
// are built symbolically once per metric and evaluated pointwise.

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "curvlab/curvature.hpp"
#include "curvlab/error.hpp"
#include "curvlab/expression.hpp"

namespace curvlab {

/// Scales at or below this are rejected rather than regularized.
inline constexpr double kMinScale = 1e-12;

/// e_k(f) = (1/a_k) df/dx_k, symbolically.
inline ScalarField frame_derivative(const std::array<ScalarField, 4>& scales, int k, const ScalarField& f) {
  return reciprocal(scales[k]) * f.derivative(k + 1);
}

class DiagonalMetric {
 public:
  explicit DiagonalMetric(std::array<ScalarField, 4> scales, std::string domain_note = {})
      : a_(std::move(scales)), domain_note_(std::move(domain_note)) {
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) first_[i][k] = frame_derivative(a_, k, a_[i]);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) second_[i][j][k] = frame_derivative(a_, j, first_[i][k]);
  }

  const std::array<ScalarField, 4>& scales() const noexcept { return a_; }
  const ScalarField& scale(int i) const { return a_.at(i); }
  const std::string& domain_note() const noexcept { return domain_note_; }

  /// e_k(a_i), 0-based.
  const ScalarField& frame_first(int i, int k) const { return first_[i][k]; }
  /// e_j(e_k(a_i)), 0-based.
  const ScalarField& frame_second(int i, int j, int k) const { return second_[i][j][k]; }

  /// Scale values at p; throws if any is not finite or is <= kMinScale.
  std::array<double, 4> scales_at(const Point& p) const {
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) {
      out[i] = a_[i].evaluate(p);
      if (!std::isfinite(out[i]) || out[i] <= kMinScale)
        throw InvalidArgument("DiagonalMetric: scale a" + std::to_string(i + 1) + " is not positive at the point");
    }
    return out;
  }

 private:
  std::array<ScalarField, 4> a_;
  std::string domain_note_;
  std::array<std::array<ScalarField, 4>, 4> first_;
  std::array<std::array<std::array<ScalarField, 4>, 4>, 4> second_;
};

/// Pointwise values of a_i, e_k(a_i) and e_j e_k(a_i).
struct FrameJet {
  std::array<double, 4> a{};
  double d1[4][4]{};     // d1[i][k] = e_k(a_i)
  double d2[4][4][4]{};  // d2[i][j][k] = e_j e_k (a_i)
};

inline FrameJet frame_jet(const DiagonalMetric& m, const Point& p) {
  FrameJet jet;
  jet.a = m.scales_at(p);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      jet.d1[i][k] = m.frame_first(i, k).evaluate(p);
      for (int j = 0; j < 4; ++j) jet.d2[i][j][k] = m.frame_second(i, j, k).evaluate(p);
    }
  return jet;
}

/// coeff[i][j][k]: component along e_k of nabla_{e_i} e_j.
struct ConnectionTable {
  double coeff[4][4][4]{};

  Vec4 covariant(int i, int j) const { return {coeff[i][j][0], coeff[i][j][1], coeff[i][j][2], coeff[i][j][3]}; }
};

namespace detail {

inline ConnectionTable connection_from_jet(const FrameJet& jet) {
  ConnectionTable t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i != j) {
        // nabla_{e_i} e_j = (1/a_i) e_j(a_i) e_i
        t.coeff[i][j][i] = jet.d1[i][j] / jet.a[i];
      } else {
        // nabla_{e_i} e_i = -sum_{j != i} (1/a_i) e_j(a_i) e_j
        for (int k = 0; k < 4; ++k)
          if (k != i) t.coeff[i][i][k] = -jet.d1[i][k] / jet.a[i];
      }
    }
  return t;
}

/// <R_{e_i e_j} e_i, e_l> from the closed-form expression for R_{e_i e_j} e_i
/// (i != j; l == j gives the sectional curvature R_ijij).
inline double same_index_component(const FrameJet& jet, int i, int j, int l) {
  const auto& a = jet.a;
  if (l == j) {
    double v = -jet.d2[j][i][i] / a[j] - jet.d2[i][j][j] / a[i];
    for (int m = 0; m < 4; ++m)
      if (m != i && m != j) v -= (jet.d1[i][m] / a[i]) * (jet.d1[j][m] / a[j]);
    return v;
  }
  return -jet.d2[i][j][l] / a[i] + (jet.d1[i][j] / a[i]) * (jet.d1[j][l] / a[j]);
}

/// nabla_{e_j}(da_i)(e_k) = e_j(e_k(a_i)) - (nabla_{e_j} e_k)(a_i).
inline double hessian(const FrameJet& jet, const ConnectionTable& conn, int i, int j, int k) {
  double v = jet.d2[i][j][k];
  for (int m = 0; m < 4; ++m) v -= conn.coeff[j][k][m] * jet.d1[i][m];
  return v;
}

}  // namespace detail

inline ConnectionTable connection_coeffs(const DiagonalMetric& m, const Point& p) {
  return detail::connection_from_jet(frame_jet(m, p));
}

/// Curvature matrix assembled entry by entry, before symmetrization. Entries
/// sharing one index come from the closed form for R_{e_i e_j} e_i read in
/// the orientation of the row pair; entries with four distinct indices come
/// from the three-distinct-index formula and are identically zero.
inline Mat6 raw_curvature_at(const DiagonalMetric& metric, const Point& p) {
  const FrameJet jet = frame_jet(metric, p);
  const ConnectionTable conn = detail::connection_from_jet(jet);
  Mat6 out = Mat6::Zero();
  for (int pi = 0; pi < 6; ++pi) {
    const auto [a, b] = kPairs[pi];
    for (int qi = 0; qi < 6; ++qi) {
      const auto [c, d] = kPairs[qi];
      if (pi == qi) {
        out(pi, qi) = detail::same_index_component(jet, a, b, b);
        continue;
      }
      int shared = -1;
      if (a == c || a == d) shared = a;
      if (b == c || b == d) shared = b;
      if (shared < 0) {
        // R_{e_a e_b} e_c = (1/a_a) H_a(b, c) e_a - (1/a_b) H_b(a, c) e_b, which has no e_d part.
        const Vec4 v = Vec4::Unit(a) * detail::hessian(jet, conn, a, b, c) / jet.a[a] -
                       Vec4::Unit(b) * detail::hessian(jet, conn, b, a, c) / jet.a[b];
        out(pi, qi) = v(d);
        continue;
      }
      const int j = shared == a ? b : a;
      const int l = shared == c ? d : c;
      const int sign = (shared == a ? 1 : -1) * (shared == c ? 1 : -1);
      out(pi, qi) = sign * detail::same_index_component(jet, shared, j, l);
    }
  }
  return out;
}

/// max |M - M^T| of the raw assembly: the closed forms are not manifestly
/// pair-symmetric, so this measures their mutual consistency.
inline double pair_symmetry_defect(const DiagonalMetric& m, const Point& p) {
  const Mat6 raw = raw_curvature_at(m, p);
  return (raw - raw.transpose()).cwiseAbs().maxCoeff();
}

/// <R_{e_i e_j} e_k, e_i> for distinct i, j, k via the Hessian formula,
/// 0-based. Equals -<R_{e_i e_j} e_i, e_k>, giving a second route to the
/// shared-index entries.
inline double three_index_component(const DiagonalMetric& m, const Point& p, int i, int j, int k) {
  if (i == j || j == k || i == k) throw InvalidArgument("three_index_component: indices must be distinct");
  const FrameJet jet = frame_jet(m, p);
  const ConnectionTable conn = detail::connection_from_jet(jet);
  return detail::hessian(jet, conn, i, j, k) / jet.a[i];
}

/// Curvature operator in the associated frame, sign convention as in curvature.hpp.
inline CurvatureOperator curvature_at(const DiagonalMetric& m, const Point& p) {
  const Mat6 raw = raw_curvature_at(m, p);
  return CurvatureOperator(Mat6(0.5 * (raw + raw.transpose())));
}

/// Independent route: coordinate Christoffel symbols of g_ii = a_i^2 and the
/// coordinate Riemann tensor, differentiated symbolically, then moved to the
/// associated frame and negated into the sign convention used here.
inline CurvatureOperator christoffel_oracle(const DiagonalMetric& m, const Point& p) {
  const std::array<double, 4> a = m.scales_at(p);
  std::array<ScalarField, 4> g;
  for (int i = 0; i < 4; ++i) g[i] = pow(m.scale(i), 2);

  // gamma[k][i][j] = Gamma^k_ij = 1/2 g^kk (d_i g_jk + d_j g_ik - d_k g_ij)
  std::array<std::array<std::array<ScalarField, 4>, 4>, 4> gamma;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        ScalarField s = ScalarField::constant(0.0);
        if (j == k) s = s + g[k].derivative(i + 1);
        if (i == k) s = s + g[k].derivative(j + 1);
        if (i == j) s = s - g[i].derivative(k + 1);
        gamma[k][i][j] = ScalarField::constant(0.5) * reciprocal(g[k]) * s;
      }

  double gv[4][4][4];
  double dgv[4][4][4][4];  // dgv[k][i][j][l] = d_l Gamma^k_ij
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        gv[k][i][j] = gamma[k][i][j].evaluate(p);
        for (int l = 0; l < 4; ++l) dgv[k][i][j][l] = gamma[k][i][j].derivative(l + 1).evaluate(p);
      }

  // R^l_{kij} = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_in Gamma^n_jk - Gamma^l_jn Gamma^n_ik
  auto riemann_up = [&](int l, int k, int i, int j) {
    double v = dgv[l][j][k][i] - dgv[l][i][k][j];
    for (int n = 0; n < 4; ++n) v += gv[l][i][n] * gv[n][j][k] - gv[l][j][n] * gv[n][i][k];
    return v;
  };
  Mat6 out;
  for (int pi = 0; pi < 6; ++pi) {
    const auto [i, j] = kPairs[pi];
    for (int qi = 0; qi < 6; ++qi) {
      const auto [k, l] = kPairs[qi];
      const double standard = a[l] * a[l] * riemann_up(l, k, i, j);  // <R(d_i, d_j) d_k, d_l>
      out(pi, qi) = -standard / (a[i] * a[j] * a[k] * a[l]);
    }
  }
  return CurvatureOperator(Mat6(0.5 * (out + out.transpose())));
}

/// Pointwise complex structure given by its Kaehler coefficients (a12, a13, a14).
struct JField {
  std::array<ScalarField, 3> coeffs;

  /// Values at p; throws if the triple is not unit to 1e-10.
  std::array<double, 3> at(const Point& p) const {
    std::array<double, 3> v{};
    for (int k = 0; k < 3; ++k) v[k] = coeffs[k].evaluate(p);
    if (std::abs(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - 1.0) > 1e-10)
      throw InvalidArgument("JField: coefficients are not unit at the point");
    return v;
  }
};

/// The twelve consequences of nabla J = 0 along the associated frame, as
/// left-minus-right residuals: for each direction e_k (k = 1..4) the three
/// equations for e_k(a12), e_k(a13), e_k(a14), in that order.
inline std::array<double, 12> nabla_J_residuals(const DiagonalMetric& m, const JField& jf, const Point& p) {
  const std::array<double, 4> s = m.scales_at(p);
  const std::array<double, 3> c = jf.at(p);
  const double a12 = c[0], a13 = c[1], a14 = c[2];
  // ej(x, k): e_k applied to the metric scale x (1-based), or to a coefficient.
  auto ea = [&](int k, int i) { return m.frame_first(i - 1, k - 1).evaluate(p); };
  auto ec = [&](int k, int coeff) { return frame_derivative(m.scales(), k - 1, jf.coeffs[coeff]).evaluate(p); };
  return {
      s[0] * ec(1, 0) - (a14 * ea(3, 1) - a13 * ea(4, 1)),
      s[0] * ec(1, 1) - (-a14 * ea(2, 1) + a12 * ea(4, 1)),
      s[0] * ec(1, 2) - (a13 * ea(2, 1) - a12 * ea(3, 1)),
      s[1] * ec(2, 0) - (-a13 * ea(3, 2) - a14 * ea(4, 2)),
      s[1] * ec(2, 1) - (a14 * ea(1, 2) + a12 * ea(3, 2)),
      s[1] * ec(2, 2) - (-a13 * ea(1, 2) + a12 * ea(4, 2)),
      s[2] * ec(3, 0) - (a13 * ea(2, 3) - a14 * ea(1, 3)),
      s[2] * ec(3, 1) - (-a12 * ea(2, 3) - a14 * ea(4, 3)),
      s[2] * ec(3, 2) - (a13 * ea(4, 3) + a12 * ea(1, 3)),
      s[3] * ec(4, 0) - (a14 * ea(2, 4) + a13 * ea(1, 4)),
      s[3] * ec(4, 1) - (a14 * ea(3, 4) - a12 * ea(1, 4)),
      s[3] * ec(4, 2) - (-a12 * ea(2, 4) - a13 * ea(3, 4)),
  };
}

struct UnitaryProductReport {
  /// e3(a1), e4(a1), e3(a2), e4(a2), e1(a3), e2(a3), e1(a4), e2(a4)
  std::array<std::pair<std::string, double>, 8> residuals;
  double tolerance = 0.0;
  bool is_product = false;
};

/// For a frame paired (1,2), (3,4) by J, a local product of surfaces requires
/// a1, a2 to depend only on x1, x2 and a3, a4 only on x3, x4.
inline UnitaryProductReport unitary_product_check(const DiagonalMetric& m, const Point& p, double tol = 1e-9) {
  m.scales_at(p);
  UnitaryProductReport out;
  out.tolerance = tol;
  const std::array<std::pair<int, int>, 8> slots{{{3, 1}, {4, 1}, {3, 2}, {4, 2}, {1, 3}, {2, 3}, {1, 4}, {2, 4}}};
  out.is_product = true;
  for (int n = 0; n < 8; ++n) {
    const auto [k, i] = slots[n];
    const double v = m.frame_first(i - 1, k - 1).evaluate(p);
    out.residuals[n] = {"e" + std::to_string(k) + "(a" + std::to_string(i) + ")", v};
    if (!(std::abs(v) <= tol)) out.is_product = false;
  }
  return out;
}

}  // namespace curvlab
