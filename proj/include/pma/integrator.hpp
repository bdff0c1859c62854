#pragma once

// Fixed-step explicit integrators over Eigen vectors.

namespace pma {

/// One classical 4-stage Runge-Kutta step of y' = f(t, y).
template <typename Vec, typename Scalar, typename Deriv>
Vec rk4_step(const Deriv& f, Scalar t, const Vec& y, Scalar dt) {
  const Scalar half = dt / Scalar(2);
  const Vec k1 = f(t, y);
  const Vec k2 = f(t + half, Vec(y + half * k1));
  const Vec k3 = f(t + half, Vec(y + half * k2));
  const Vec k4 = f(t + dt, Vec(y + dt * k3));
  return y + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

template <typename Vec, typename Scalar, typename Deriv>
Vec euler_step(const Deriv& f, Scalar t, const Vec& y, Scalar dt) {
  return y + dt * f(t, y);
}

}  // namespace pma
