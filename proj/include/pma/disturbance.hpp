#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pma {

enum class DisturbanceKind { kZero, kConstant, kSinusoid, kSumOfSinusoids };

template <typename Scalar>
struct Sinusoid {
  Scalar amplitude{0};  // m/s^2
  Scalar omega{0};      // rad/s
  Scalar phase{0};      // rad
};

/// Lumped acceleration disturbance tau(t) acting on the plant.
template <typename Scalar>
struct DisturbanceProfile {
  DisturbanceKind kind = DisturbanceKind::kZero;
  Scalar offset{0};
  std::vector<Sinusoid<Scalar>> terms;
  Scalar slope{0};  // affine drift offset + slope * t; unbounded unless zero

  static DisturbanceProfile zero() { return {}; }

  static DisturbanceProfile constant(Scalar value) {
    return {DisturbanceKind::kConstant, value, {}};
  }

  static DisturbanceProfile sinusoid(Scalar amplitude, Scalar omega, Scalar phase = Scalar(0)) {
    return {DisturbanceKind::kSinusoid, Scalar(0), {{amplitude, omega, phase}}};
  }

  static DisturbanceProfile sum_of_sinusoids(std::vector<Sinusoid<Scalar>> terms) {
    return {DisturbanceKind::kSumOfSinusoids, Scalar(0), std::move(terms)};
  }

  /// offset + slope * t, used for per-sample disturbance hypotheses.
  static DisturbanceProfile ramp(Scalar offset, Scalar slope) {
    DisturbanceProfile d{DisturbanceKind::kConstant, offset, {}};
    d.slope = slope;
    return d;
  }

  Scalar eval(Scalar t) const {
    Scalar v = offset + slope * t;
    for (const auto& s : terms) v += s.amplitude * std::sin(s.omega * t + s.phase);
    return v;
  }

  Scalar derivative(Scalar t) const {
    Scalar v = slope;
    for (const auto& s : terms) v += s.amplitude * s.omega * std::cos(s.omega * t + s.phase);
    return v;
  }

  Scalar second_derivative(Scalar t) const {
    Scalar v{0};
    for (const auto& s : terms)
      v -= s.amplitude * s.omega * s.omega * std::sin(s.omega * t + s.phase);
    return v;
  }

  /// Analytic eps with |d^i tau / dt^i| <= eps for i = 0, 1, 2.
  Scalar bound() const {
    if (slope != Scalar(0)) return std::numeric_limits<Scalar>::infinity();
    Scalar b0 = std::abs(offset), b1{0}, b2{0};
    for (const auto& s : terms) {
      const Scalar a = std::abs(s.amplitude), w = std::abs(s.omega);
      b0 += a;
      b1 += a * w;
      b2 += a * w * w;
    }
    return std::max({b0, b1, b2});
  }
};

}  // namespace pma
