#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace pma {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

// Search point of the tuner: [gamma, c1, c2, kp, ki, kd, l1, l2].
inline constexpr int kGainDim = 8;
template <typename Scalar>
using GainVector = Eigen::Matrix<Scalar, kGainDim, 1>;

inline constexpr double kGravity = 9.81;

/// Symmetric 2x2 matrix stored by its three independent entries.
template <typename Scalar>
struct SymMatrix2 {
  Scalar xx{0};
  Scalar xy{0};
  Scalar yy{0};

  static SymMatrix2 identity() { return {Scalar(1), Scalar(0), Scalar(1)}; }
  static SymMatrix2 scaled_identity(Scalar s) { return {s, Scalar(0), s}; }

  Matrix2<Scalar> dense() const {
    Matrix2<Scalar> m;
    m << xx, xy, xy, yy;
    return m;
  }

  Scalar trace() const { return xx + yy; }
  Scalar determinant() const { return xx * yy - xy * xy; }
};

/// Closed-form eigenvalues of a symmetric 2x2 matrix, ascending.
template <typename Scalar>
Vector2<Scalar> eigenvalues(const SymMatrix2<Scalar>& m) {
  using std::hypot;
  const Scalar mid = (m.xx + m.yy) / Scalar(2);
  const Scalar rad = hypot((m.xx - m.yy) / Scalar(2), m.xy);
  return Vector2<Scalar>(mid - rad, mid + rad);
}

template <typename Scalar>
bool is_positive_definite(const SymMatrix2<Scalar>& m) {
  return m.xx > Scalar(0) && m.determinant() > Scalar(0);
}

}  // namespace pma
