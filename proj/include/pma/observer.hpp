#pragma once

#include <cmath>

#include "pma/errors.hpp"
#include "pma/integrator.hpp"
#include "pma/plant.hpp"
#include "pma/types.hpp"

namespace pma {

/// Gains of the second-order disturbance observer.
template <typename Scalar>
struct ObserverGains {
  Scalar l1{0};
  Scalar l2{0};

  /// Throws unless both eigenvalues of the error matrix have negative real part.
  static ObserverGains make(Scalar l1, Scalar l2) {
    ObserverGains g{l1, l2};
    if (!g.is_hurwitz())
      throw DomainError("observer gains must satisfy l1 > 0 and l2 > 0 (Hurwitz error matrix)");
    return g;
  }

  // trace = -l1, det = l2
  bool is_hurwitz() const { return l1 > Scalar(0) && l2 > Scalar(0); }

  /// Gains placing both error-matrix eigenvalues at -pole.
  static ObserverGains double_pole(Scalar pole) { return make(Scalar(2) * pole, pole * pole); }
};

template <typename Scalar>
struct ObserverState {
  Scalar p1{0};
  Scalar p2{0};
  Scalar tau_hat{0};
  Scalar taudot_hat{0};

  /// Auxiliary states chosen so that both estimates start at zero.
  static ObserverState at_rest(const ObserverGains<Scalar>& g, Scalar xdot0) {
    return {-g.l1 * xdot0, -g.l2 * xdot0, Scalar(0), Scalar(0)};
  }
};

/// Estimation-error dynamics matrix [[-l1, 1], [-l2, 0]].
template <typename Scalar>
Matrix2<Scalar> error_matrix(Scalar l1, Scalar l2) {
  Matrix2<Scalar> a;
  a << -l1, Scalar(1), -l2, Scalar(0);
  return a;
}

template <typename Scalar>
Matrix2<Scalar> error_matrix(const ObserverGains<Scalar>& g) {
  return error_matrix(g.l1, g.l2);
}

template <typename Scalar>
bool is_hurwitz(const Matrix2<Scalar>& a) {
  return a.trace() < Scalar(0) && a.determinant() > Scalar(0);
}

/// Solves A^T P + P A + Q = 0 for symmetric P.
///
/// The three independent scalar equations in (p11, p12, p22) are
///   2a p11 + 2c p12            = -q11
///    b p11 + (a+d) p12 + c p22 = -q12
///            2b p12 + 2d p22   = -q22
/// with A = [[a, b], [c, d]], solved by Cramer's rule. The system determinant
/// is 4 tr(A) det(A), non-zero for Hurwitz A.
template <typename Scalar>
SymMatrix2<Scalar> solve_lyapunov(const Matrix2<Scalar>& A, const SymMatrix2<Scalar>& Q) {
  if (!is_hurwitz(A)) throw Error(ErrorKind::kNoSolution, "solve_lyapunov: A is not Hurwitz");
  if (!is_positive_definite(Q)) throw DomainError("solve_lyapunov: Q is not positive definite");

  const Scalar a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
  const auto det3 = [](Scalar m00, Scalar m01, Scalar m02, Scalar m10, Scalar m11, Scalar m12,
                       Scalar m20, Scalar m21, Scalar m22) {
    return m00 * (m11 * m22 - m12 * m21) - m01 * (m10 * m22 - m12 * m20) +
           m02 * (m10 * m21 - m11 * m20);
  };
  const Scalar r0 = -Q.xx, r1 = -Q.xy, r2 = -Q.yy;
  const Scalar two = Scalar(2);
  const Scalar det = det3(two * a, two * c, 0, b, a + d, c, 0, two * b, two * d);
  const Scalar p11 = det3(r0, two * c, 0, r1, a + d, c, r2, two * b, two * d) / det;
  const Scalar p12 = det3(two * a, r0, 0, b, r1, c, 0, r2, two * d) / det;
  const Scalar p22 = det3(two * a, two * c, r0, b, a + d, r1, 0, two * b, r2) / det;
  return {p11, p12, p22};
}

/// Ultimate bound lambda1 = 2 |P B1|_1 eps / lambda_min(Q), B1 = [0, 1]^T.
template <typename Scalar>
Scalar estimation_error_bound(const SymMatrix2<Scalar>& P, const SymMatrix2<Scalar>& Q,
                              Scalar eps) {
  const Scalar pb_norm = std::abs(P.xy) + std::abs(P.yy);
  return Scalar(2) * pb_norm * eps / eigenvalues(Q)(0);
}

/// lambda1 for the given gains with Q defaulting to the identity.
template <typename Scalar>
Scalar observer_bound(const ObserverGains<Scalar>& g, Scalar eps,
                      const SymMatrix2<Scalar>& Q = SymMatrix2<Scalar>::identity()) {
  return estimation_error_bound(solve_lyapunov(error_matrix(g), Q), Q, eps);
}

template <typename Scalar>
struct Measurement {
  Scalar x{0};
  Scalar xdot{0};
};

/// Advances the observer over one sample interval in which pressure `u` was
/// applied, from measurement `held` to measurement `next`.
///
/// The observer is p1' = -l1 (f + b u + tau_hat) + taudot_hat,
/// p2' = -l2 (f + b u + tau_hat), tau_hat = p1 + l1 xdot, taudot_hat = p2 + l2 xdot.
/// Between samples the state is only known at the end points, so f + b u is
/// evaluated along the nominal model's trajectory under the disturbance
/// hypothesis tau(s) = nu + sigma (s - dt), with (nu, sigma) fitted to the
/// measured end position and velocity. In estimate coordinates
/// z = (tau_hat, taudot_hat) this is z' = A1 z + [l1, l2]^T tau(s), integrated
/// with RK4. When the fit is ill-conditioned sigma falls back to taudot_hat.
template <typename Scalar>
ObserverState<Scalar> observer_step(const ObserverGains<Scalar>& gains,
                                    const ObserverState<Scalar>& obs,
                                    const Measurement<Scalar>& held, Scalar u,
                                    const PmaParams<Scalar>& nominal, Direction direction,
                                    Scalar dt, const Measurement<Scalar>& next) {
  if (!(dt > Scalar(0))) throw DomainError("observer_step: dt must be > 0");

  using D = DisturbanceProfile<Scalar>;
  const PlantState<Scalar> start{held.x, held.xdot, Scalar(0), u, direction};
  const auto base = step(nominal, start, u, D::zero(), dt);
  const auto offset = step(nominal, start, u, D::constant(Scalar(1)), dt);
  const auto ramp = step(nominal, start, u, D::ramp(-dt, Scalar(1)), dt);

  // Responses are affine in (nu, sigma): next - base = a nu + c sigma.
  const Vector2<Scalar> a(offset.x - base.x, offset.xdot - base.xdot);
  const Vector2<Scalar> c(ramp.x - base.x, ramp.xdot - base.xdot);
  const Vector2<Scalar> r(next.x - base.x, next.xdot - base.xdot);
  const Scalar det = a(0) * c(1) - a(1) * c(0);
  Scalar nu, sigma;
  if (std::abs(det) > Scalar(1e-9) * std::abs(a(1)) * std::abs(c(0)) + Scalar(1e-300)) {
    nu = (r(0) * c(1) - r(1) * c(0)) / det;
    sigma = (a(0) * r(1) - a(1) * r(0)) / det;
  } else {
    sigma = obs.taudot_hat;
    nu = (r(1) - c(1) * sigma) / a(1);
  }

  const Matrix2<Scalar> A = error_matrix(gains);
  const Vector2<Scalar> L(gains.l1, gains.l2);
  const auto deriv = [&](Scalar s, const Vector2<Scalar>& z) -> Vector2<Scalar> {
    return A * z + L * (nu + sigma * (s - dt));
  };
  const Vector2<Scalar> z = rk4_step(deriv, Scalar(0), Vector2<Scalar>(obs.tau_hat, obs.taudot_hat), dt);

  ObserverState<Scalar> out{z(0) - gains.l1 * next.xdot, z(1) - gains.l2 * next.xdot, z(0), z(1)};
  if (!(std::isfinite(out.p1) && std::isfinite(out.p2) && std::isfinite(out.tau_hat) &&
        std::isfinite(out.taudot_hat)))
    throw DivergedError(ErrorKind::kObserverDiverged, 0.0, "observer diverged");
  return out;
}

}  // namespace pma
