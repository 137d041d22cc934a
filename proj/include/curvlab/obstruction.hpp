#pragma once

// Necessary conditions for a Kaehler curvature operator to come from
// orthogonal coordinates, evaluated as finite-dimensional checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/rational.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "curvlab/bivector.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/error.hpp"
#include "curvlab/kaehler.hpp"
#include "curvlab/random.hpp"

namespace curvlab {

/// Residual at or below which frame_search reports a frame as found.
inline constexpr double kFrameFoundThreshold = 1e-10;

/// R'_1234^2 + R'_1324^2 + R'_1423^2 for R' = conjugate(R, Q).
inline double distinct_index_residual(const CurvatureOperator& r, const FrameRotation& q) {
  const CurvatureOperator rr = conjugate(r, q);
  const double a = rr(1, 2, 3, 4), b = rr(1, 3, 2, 4), c = rr(1, 4, 2, 3);
  return a * a + b * b + c * c;
}

/// Frame in which the standard J has coefficients (1, 1, 1)/sqrt(3). The new
/// axes f_i = Q e_i are the columns of the returned matrix.
inline FrameRotation cp2_example_frame() {
  const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0), s6 = std::sqrt(6.0);
  Mat4 rows;
  rows << 1.0, 0.0, 0.0, 0.0,                   //
      0.0, 1.0 / s3, 1.0 / s2, 1.0 / s6,        //
      0.0, 1.0 / s3, -1.0 / s2, 1.0 / s6,       //
      0.0, 1.0 / s3, 0.0, -s2 / s3;
  return FrameRotation(Mat4(rows.transpose()));
}

// ---------------------------------------------------------------- frame search

struct FrameSearchResult {
  FrameRotation frame;
  double residual = std::numeric_limits<double>::infinity();
  int restart = 0;      // index of the restart that produced the frame
  int iterations = 0;   // iterations used by that restart
  bool found = false;   // residual <= kFrameFoundThreshold
};

namespace detail {

/// Skew matrix with coordinates theta in the (12,13,14,23,24,34) slots.
inline Mat4 skew_from(const Eigen::Matrix<double, 6, 1>& theta) {
  Mat4 k = Mat4::Zero();
  for (int p = 0; p < 6; ++p) {
    const auto [i, j] = kPairs[p];
    k(i, j) = -theta(p);
    k(j, i) = theta(p);
  }
  return k;
}

/// Derivation induced on bivectors by a skew K: d/dt second_compound(exp(tK)) at 0.
/// second_compound is quadratic, so the symmetric difference is exact.
inline Mat6 induced_derivation(const Mat4& k) {
  const Mat4 id = Mat4::Identity();
  return 0.5 * (second_compound(id + k) - second_compound(id - k));
}

inline Eigen::Vector3d distinct_components(const Mat6& m) {
  const CurvatureOperator r(m);
  return {r(1, 2, 3, 4), r(1, 3, 2, 4), r(1, 4, 2, 3)};
}

struct LocalResult {
  FrameRotation frame;
  double residual;
  int iterations;
};

/// Gauss-Newton on Q exp(K(theta)) with the minimum-norm step and step halving.
inline LocalResult descend(const CurvatureOperator& r, FrameRotation q, int max_iterations = 200) {
  std::array<Mat6, 6> gens;
  for (int p = 0; p < 6; ++p) {
    Eigen::Matrix<double, 6, 1> t = Eigen::Matrix<double, 6, 1>::Zero();
    t(p) = 1.0;
    gens[p] = induced_derivation(skew_from(t));
  }
  Mat6 m = conjugate(r, q).matrix();
  Eigen::Vector3d f = distinct_components(m);
  double value = f.squaredNorm();
  int it = 0;
  for (; it < max_iterations && value > 1e-32; ++it) {
    Eigen::Matrix<double, 3, 6> jac;
    for (int p = 0; p < 6; ++p) {
      const Mat6 dm = gens[p].transpose() * m + m * gens[p];
      jac.col(p) = distinct_components(Mat6(0.5 * (dm + dm.transpose())));
    }
    Eigen::Matrix<double, 6, 1> step = -jac.completeOrthogonalDecomposition().solve(f);
    if (!step.allFinite() || step.norm() == 0.0) step = -jac.transpose() * f;
    bool improved = false;
    for (double scale = 1.0; scale > 1e-12; scale *= 0.5) {
      const Mat4 rot = Mat4(skew_from(scale * step)).exp();
      const FrameRotation trial = FrameRotation::reorthonormalized(q.matrix() * rot);
      const Mat6 tm = conjugate(r, trial).matrix();
      const Eigen::Vector3d tf = distinct_components(tm);
      if (tf.squaredNorm() < value) {
        q = trial;
        m = tm;
        f = tf;
        value = tf.squaredNorm();
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return {q, distinct_index_residual(r, q), it};
}

}  // namespace detail

/// Multi-start local minimization of distinct_index_residual over SO(4).
/// Restart 0 starts at the identity; restart k > 0 at a Haar-random rotation
/// drawn from a generator seeded with (seed, k). Restarts are independent, and
/// the best is chosen by residual, then by lowest restart index.
inline FrameSearchResult frame_search(const CurvatureOperator& r, int restarts = 32, std::uint64_t seed = 0) {
  if (restarts < 1) throw InvalidArgument("frame_search: restarts must be >= 1");
  FrameSearchResult best;
  for (int k = 0; k < restarts; ++k) {
    FrameRotation start;
    if (k > 0) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(k)};
      std::mt19937_64 rng(seq);
      start = random_rotation(rng);
    }
    const detail::LocalResult local = detail::descend(r, start);
    if (local.residual < best.residual) {
      best.frame = local.frame;
      best.residual = local.residual;
      best.restart = k;
      best.iterations = local.iterations;
    }
  }
  best.found = best.residual <= kFrameFoundThreshold;
  return best;
}

// ------------------------------------------------------------ scalar sign check

struct ScalarSignReport {
  std::array<double, 3> pair_sums{};  // R1212+R3434, R1313+R2424, R1414+R2323
  std::array<double, 3> expected{};   // (r/2) a1j^2
  double r = 0.0;
  KahlerCoeffs coeffs;
  int sign = 0;  // common sign of the nonzero pair sums; 0 if all vanish
  bool consistent = false;
};

/// Pair sums in the frame Q, compared with (r/2) a1j^2 to 1e-8 (relative to max(1, |r|)).
inline ScalarSignReport scalar_sign_check(const CurvatureOperator& r, const ComplexStructure& j, const FrameRotation& q,
                                          double tol = 1e-9) {
  const KaehlerResiduals res = kaehler_residuals(r, j, q);
  if (!is_kaehler(res, tol)) throw PreconditionError("scalar_sign_check: operator is not Kaehler for J");
  if (distinct_index_residual(r, q) > tol)
    throw PreconditionError("scalar_sign_check: distinct-index components do not vanish in the frame");
  const CurvatureOperator rr = conjugate(r, q);
  ScalarSignReport out;
  out.r = scalar_curvature(rr);
  out.coeffs = res.coeffs;
  out.pair_sums = {rr(1, 2, 1, 2) + rr(3, 4, 3, 4), rr(1, 3, 1, 3) + rr(2, 4, 2, 4), rr(1, 4, 1, 4) + rr(2, 3, 2, 3)};
  out.consistent = true;
  const double scale = std::max(1.0, std::abs(out.r));
  bool positive = false, negative = false;
  for (int k = 0; k < 3; ++k) {
    out.expected[k] = 0.5 * out.r * res.coeffs[k] * res.coeffs[k];
    if (std::abs(out.pair_sums[k] - out.expected[k]) > 1e-8 * scale) out.consistent = false;
    if (out.pair_sums[k] > tol) positive = true;
    if (out.pair_sums[k] < -tol) negative = true;
  }
  if (positive && negative) out.consistent = false;
  out.sign = positive ? 1 : (negative ? -1 : 0);
  return out;
}

// --------------------------------------------------------------------- c-system

using Rational = boost::rational<std::int64_t>;
using RationalVector = std::array<Rational, 4>;
using RationalMatrix = std::vector<RationalVector>;

/// Rows (c2+c3+c4), (c1+c3-c4), (c1-c2+c4), (c1+c2-c3).
inline std::array<RationalVector, 4> c_system_relations() {
  auto v = [](int a, int b, int c, int d) { return RationalVector{Rational(a), Rational(b), Rational(c), Rational(d)}; };
  return {v(0, 1, 1, 1), v(1, 0, 1, -1), v(1, -1, 0, 1), v(1, 1, -1, 0)};
}

/// One of the 16 cases: for each j either relation_j is imposed or c_j = 0.
struct CSystemCase {
  std::array<bool, 4> relation{};  // true: relation_j active; false: c_j = 0
  RationalMatrix equations;
  RationalMatrix nullspace;  // basis of the solution space
  bool verified = false;     // every basis vector satisfies every equation exactly

  std::string label() const {
    std::string s;
    for (int j = 0; j < 4; ++j) {
      if (j) s += ",";
      s += relation[j] ? "rel" + std::to_string(j + 1) : "c" + std::to_string(j + 1) + "=0";
    }
    return s;
  }
};

namespace detail {

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<int> rref(RationalMatrix& m) {
  std::vector<int> pivots;
  std::size_t row = 0;
  for (int col = 0; col < 4 && row < m.size(); ++col) {
    std::size_t piv = row;
    while (piv < m.size() && m[piv][col] == Rational(0)) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[row], m[piv]);
    const Rational lead = m[row][col];
    for (Rational& x : m[row]) x /= lead;
    for (std::size_t other = 0; other < m.size(); ++other) {
      if (other == row || m[other][col] == Rational(0)) continue;
      const Rational factor = m[other][col];
      for (int c = 0; c < 4; ++c) m[other][c] -= factor * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace detail

/// Exact nullspace of a system with 4 unknowns.
inline RationalMatrix rational_nullspace(RationalMatrix m) {
  const std::vector<int> pivots = detail::rref(m);
  RationalMatrix basis;
  for (int free = 0; free < 4; ++free) {
    if (std::find(pivots.begin(), pivots.end(), free) != pivots.end()) continue;
    RationalVector v{};
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
    basis.push_back(v);
  }
  return basis;
}

/// Exact determinant by fraction-exact elimination.
template <std::size_t N>
Rational rational_determinant(std::array<std::array<Rational, N>, N> m) {
  Rational det = 1;
  for (std::size_t c = 0; c < N; ++c) {
    std::size_t piv = c;
    while (piv < N && m[piv][c] == Rational(0)) ++piv;
    if (piv == N) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < N; ++r) {
      const Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < N; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

inline Rational c_system_determinant() {
  const auto rel = c_system_relations();
  std::array<std::array<Rational, 4>, 4> m;
  for (int i = 0; i < 4; ++i) m[i] = rel[i];
  return rational_determinant(m);
}

/// All 16 cases, indexed by the bitmask of active relations (bit j: relation j+1).
inline std::vector<CSystemCase> c_system_solve() {
  const auto rel = c_system_relations();
  std::vector<CSystemCase> out;
  for (int mask = 0; mask < 16; ++mask) {
    CSystemCase cs;
    for (int j = 0; j < 4; ++j) {
      cs.relation[j] = (mask >> j) & 1;
      if (cs.relation[j]) {
        cs.equations.push_back(rel[j]);
      } else {
        RationalVector unit{};
        unit[j] = 1;
        cs.equations.push_back(unit);
      }
    }
    cs.nullspace = rational_nullspace(cs.equations);
    cs.verified = true;
    for (const RationalVector& v : cs.nullspace)
      for (const RationalVector& eq : cs.equations) {
        Rational s = 0;
        for (int k = 0; k < 4; ++k) s += eq[k] * v[k];
        if (s != Rational(0)) cs.verified = false;
      }
    out.push_back(std::move(cs));
  }
  return out;
}

// ------------------------------------------------------------ Ricci-flat space

struct RicciFlatNullspace {
  int dimension = 0;
  std::vector<CurvatureOperator> basis;
  Eigen::VectorXd singular_values;  // of the constraint matrix, descending
  int constraint_rows = 0;
};

namespace detail {

/// Orthonormal basis of symmetric 6x6 matrices (21 elements) under the Frobenius product.
inline std::vector<Mat6> symmetric_basis() {
  std::vector<Mat6> out;
  for (int p = 0; p < 6; ++p)
    for (int q = p; q < 6; ++q) {
      Mat6 e = Mat6::Zero();
      if (p == q) {
        e(p, p) = 1.0;
      } else {
        e(p, q) = e(q, p) = 1.0 / std::sqrt(2.0);
      }
      out.push_back(e);
    }
  return out;
}

}  // namespace detail

/// Linear space of symmetric operators R with (i) b(R) = 0, (ii) R Kaehler for
/// the structure with coefficients `a` (the twelve identities and R J = R),
/// (iii) rho(R) = 0 and, when `distinct_index` is set, (iv) R1234 = R1324 =
/// R1423 = 0. Rank is decided by the singular values of the constraint matrix
/// with threshold tol * sigma_max.
inline RicciFlatNullspace ricciflat_nullspace(const KahlerCoeffs& a, bool distinct_index = true, double tol = 1e-10) {
  if (!std::isfinite(a.squared_norm()) || std::abs(a.squared_norm() - 1.0) > 1e-12)
    throw InvalidArgument("ricciflat_nullspace: coefficient triple is not unit");
  const ComplexStructure j = ComplexStructure::from_coeffs(a);
  const Mat6 jext = extend_to_bivectors(j);
  const FrameRotation id = FrameRotation::identity();
  const std::vector<Mat6> basis = detail::symmetric_basis();

  auto constraints = [&](const Mat6& m) {
    const CurvatureOperator r(m);
    std::vector<double> row;
    row.push_back(bianchi_defect(r));
    const KaehlerResiduals res = kaehler_residuals(r, j, id);
    row.insert(row.end(), res.identities.begin(), res.identities.end());
    const Mat6 fixed = m * jext - m;
    for (int p = 0; p < 6; ++p)
      for (int q = 0; q < 6; ++q) row.push_back(fixed(p, q));
    const Mat4 rho = ricci(r);
    for (int p = 0; p < 4; ++p)
      for (int q = p; q < 4; ++q) row.push_back(rho(p, q));
    if (distinct_index) {
      row.push_back(r(1, 2, 3, 4));
      row.push_back(r(1, 3, 2, 4));
      row.push_back(r(1, 4, 2, 3));
    }
    return row;
  };

  const std::size_t rows = constraints(basis[0]).size();
  Eigen::MatrixXd c(rows, basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const std::vector<double> col = constraints(basis[k]);
    for (std::size_t i = 0; i < rows; ++i) c(i, k) = col[i];
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
  RicciFlatNullspace out;
  out.constraint_rows = static_cast<int>(rows);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() ? out.singular_values(0) : 0.0;
  int rank = 0;
  for (Eigen::Index k = 0; k < out.singular_values.size(); ++k)
    if (out.singular_values(k) > tol * std::max(smax, 1.0)) ++rank;
  out.dimension = static_cast<int>(basis.size()) - rank;
  const Eigen::MatrixXd& v = svd.matrixV();
  for (int k = rank; k < static_cast<int>(basis.size()); ++k) {
    Mat6 m = Mat6::Zero();
    for (std::size_t b = 0; b < basis.size(); ++b) m += v(b, k) * basis[b];
    out.basis.emplace_back(Mat6(0.5 * (m + m.transpose())));
  }
  return out;
}

// --------------------------------------------------------------------- reports

enum class Verdict { flat, conformally_flat_branch, special_frame_branch, violation, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::flat: return "flat";
    case Verdict::conformally_flat_branch: return "conformally-flat-branch";
    case Verdict::special_frame_branch: return "special-frame-branch";
    case Verdict::violation: return "violation";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

inline Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::flat, Verdict::conformally_flat_branch, Verdict::special_frame_branch, Verdict::violation,
                    Verdict::inconclusive})
    if (to_string(v) == s) return v;
  throw InvalidArgument("unknown verdict '" + s + "'");
}

struct ObstructionReport {
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::pair<std::string, double>> residuals;  // in insertion order
  double tolerance = 1e-9;
  std::optional<Mat4> frame;
  std::optional<std::array<double, 3>> coefficients;
  std::vector<CSystemCase> cases;
  std::vector<std::string> notes;

  void add(std::string name, double value) { residuals.emplace_back(std::move(name), value); }

  std::optional<double> residual(const std::string& name) const {
    for (const auto& [k, v] : residuals)
      if (k == name) return v;
    return std::nullopt;
  }
};

/// Self-dual branch of the obstruction: with W- = 0, a Kaehler frame with no
/// distinct-index curvature forces either r = 0 (then W+ = 0) or a1j^2 = 1/3.
inline ObstructionReport selfdual_classify(const CurvatureOperator& r, const ComplexStructure& j, const FrameRotation& q,
                                           double tol = 1e-9) {
  const Decomposition d = decompose(r);
  const double wminus = d.weyl_minus.frobenius_norm();
  const double wplus = d.weyl_plus.frobenius_norm();
  const KaehlerResiduals res = kaehler_residuals(r, j, q);
  const double distinct = distinct_index_residual(r, q);
  if (wminus > tol) throw PreconditionError("selfdual_classify: W- does not vanish");
  if (!is_kaehler(res, tol)) throw PreconditionError("selfdual_classify: operator is not Kaehler for J");
  if (distinct > tol) throw PreconditionError("selfdual_classify: distinct-index components do not vanish in the frame");

  ObstructionReport out;
  out.tolerance = tol;
  out.frame = q.matrix();
  out.coefficients = std::array<double, 3>{res.coeffs.a12, res.coeffs.a13, res.coeffs.a14};
  out.add("scalar_curvature", d.r);
  out.add("weyl_plus_norm", wplus);
  out.add("weyl_minus_norm", wminus);
  out.add("kaehler_residual", res.max_residual());
  out.add("distinct_index_residual", distinct);

  if (r.frobenius_norm() <= tol) {
    out.verdict = Verdict::flat;
    return out;
  }
  if (std::abs(d.r) <= tol) {
    out.verdict = wplus <= tol ? Verdict::conformally_flat_branch : Verdict::violation;
    return out;
  }
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(res.coeffs[k] * res.coeffs[k] - 1.0 / 3.0));
  out.add("coefficient_deviation", worst);
  out.cases = c_system_solve();
  out.verdict = worst <= tol ? Verdict::special_frame_branch : Verdict::violation;
  return out;
}

struct SuiteOptions {
  double tolerance = 1e-9;
  int restarts = 32;
  std::uint64_t seed = 0;
};

/// Frame search, then the sign check and the self-dual or Ricci-flat branch.
inline ObstructionReport run_obstruction_suite(const CurvatureOperator& r, const ComplexStructure& j,
                                               const SuiteOptions& opt = {}) {
  const double tol = opt.tolerance;
  ObstructionReport out;
  out.tolerance = tol;
  out.add("operator_norm", r.frobenius_norm());
  if (r.frobenius_norm() <= tol) {
    out.verdict = Verdict::flat;
    return out;
  }
  const KaehlerResiduals kres = kaehler_residuals(r, j, FrameRotation::identity());
  out.add("kaehler_operator_residual", kres.max_operator());
  if (kres.max_operator() > tol) {
    out.notes.push_back("operator is not Kaehler for the given complex structure");
    out.verdict = Verdict::inconclusive;
    return out;
  }

  const FrameSearchResult search = frame_search(r, opt.restarts, opt.seed);
  out.add("distinct_index_residual", search.residual);
  out.add("restart", search.restart);
  out.frame = search.frame.matrix();
  const KahlerCoeffs a = coeffs_in_frame(j, search.frame);
  out.coefficients = std::array<double, 3>{a.a12, a.a13, a.a14};
  if (!search.found) {
    out.notes.push_back("no frame with vanishing distinct-index components was found");
    out.verdict = Verdict::inconclusive;
    return out;
  }

  const ScalarSignReport sign = scalar_sign_check(r, j, search.frame, tol);
  out.add("pair_sum_12_34", sign.pair_sums[0]);
  out.add("pair_sum_13_24", sign.pair_sums[1]);
  out.add("pair_sum_14_23", sign.pair_sums[2]);
  out.add("pair_sum_sign", sign.sign);
  if (!sign.consistent) {
    out.notes.push_back("pair sums disagree with the scalar curvature relations");
    out.verdict = Verdict::violation;
    return out;
  }

  const Decomposition d = decompose(r);
  const double wminus = d.weyl_minus.frobenius_norm();
  if (wminus <= tol) {
    ObstructionReport sd = selfdual_classify(r, j, search.frame, tol);
    for (auto& entry : sd.residuals)
      if (!out.residual(entry.first)) out.residuals.push_back(entry);
    out.cases = std::move(sd.cases);
    out.verdict = sd.verdict;
    return out;
  }
  const double ricci_norm = ricci(r).norm();
  out.add("ricci_norm", ricci_norm);
  if (ricci_norm <= tol) {
    const RicciFlatNullspace ns = ricciflat_nullspace(a);
    out.add("nullspace_dimension", ns.dimension);
    if (ns.dimension == 0) {
      out.notes.push_back("Ricci-flat Kaehler operator with a distinct-index-free frame where none should exist");
      out.verdict = Verdict::violation;
    } else {
      out.notes.push_back("constraint space is nontrivial for these coefficients");
      out.verdict = Verdict::inconclusive;
    }
    return out;
  }
  out.notes.push_back("operator is neither self-dual nor Ricci-flat");
  out.verdict = Verdict::inconclusive;
  return out;
}

}  // namespace curvlab
