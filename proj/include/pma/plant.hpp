#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "pma/disturbance.hpp"
#include "pma/errors.hpp"
#include "pma/integrator.hpp"
#include "pma/types.hpp"

namespace pma {

enum class Direction { kInflating, kDeflating };

inline const char* to_string(Direction d) {
  return d == Direction::kInflating ? "inflating" : "deflating";
}

/// Three-element model parameters. Coefficients are affine in pressure:
/// b = b0 + b1*P (inflation / deflation sets), k = k0 + k1*P (two branches
/// split at p_break), f = f0 + f1*P.
template <typename Scalar>
struct PmaParams {
  Scalar f0{-202.32};
  Scalar f1{0.00721};
  Scalar k01{18063.0};
  Scalar k02{0.01051};
  Scalar k11{-0.2132};
  Scalar k12{90638.0};
  Scalar b0i{6435.31};
  Scalar b1i{0.10023};
  Scalar b0d{2522.01};
  Scalar b1d{0.00321};
  Scalar mass{1.0};
  Scalar p_break{325420.0};
  Scalar p_min{0.0};
  Scalar p_max{6.0e5};

  /// Identified values of the reference actuator, printed values verbatim.
  static PmaParams identified() { return {}; }

  void validate() const {
    const Scalar all[] = {f0, f1, k01, k02, k11, k12, b0i, b1i, b0d, b1d,
                          mass, p_break, p_min, p_max};
    for (Scalar v : all)
      if (!std::isfinite(v)) throw DomainError("PmaParams: non-finite field");
    if (!(mass > Scalar(0))) throw DomainError("PmaParams: mass must be > 0");
    if (!(p_min >= Scalar(0) && p_max > p_min))
      throw DomainError("PmaParams: need 0 <= p_min < p_max");
    if (!(p_break > p_min && p_break < p_max))
      throw DomainError("PmaParams: p_break must lie strictly inside (p_min, p_max)");
  }

  /// Copy with every force/spring/damping coefficient multiplied by `factor`.
  PmaParams scaled_coefficients(Scalar factor) const {
    PmaParams p = *this;
    for (Scalar* c : {&p.f0, &p.f1, &p.k01, &p.k02, &p.k11, &p.k12, &p.b0i,
                      &p.b1i, &p.b0d, &p.b1d})
      *c *= factor;
    return p;
  }

  Scalar clamp_pressure(Scalar p) const { return std::clamp(p, p_min, p_max); }

  bool operator==(const PmaParams&) const = default;
};

template <typename Scalar>
struct Coefficients {
  Scalar b{0};  // damping, N s/m
  Scalar k{0};  // spring, N/m
  Scalar f{0};  // contractile force, N
};

template <typename Scalar>
Coefficients<Scalar> coefficients(const PmaParams<Scalar>& params, Scalar pressure,
                                  Direction direction) {
  if (!(pressure >= params.p_min && pressure <= params.p_max))
    throw DomainError("pressure " + std::to_string(double(pressure)) +
                      " Pa outside actuator limits");
  const bool inflating = direction == Direction::kInflating;
  const Scalar b0 = inflating ? params.b0i : params.b0d;
  const Scalar b1 = inflating ? params.b1i : params.b1d;
  const bool low = pressure <= params.p_break;
  const Scalar k0 = low ? params.k01 : params.k11;
  const Scalar k1 = low ? params.k02 : params.k12;
  return {b0 + b1 * pressure, k0 + k1 * pressure, params.f0 + params.f1 * pressure};
}

/// Drift and input gain of the control-affine form xddot = drift + gain * P + tau.
template <typename Scalar>
struct AffineModel {
  Scalar drift{0};
  Scalar gain{0};
};

/// `branch_pressure` selects the spring branch; the caller decides which
/// pressure (usually the last applied command) stands in for the unknown one.
template <typename Scalar>
AffineModel<Scalar> affine_model(const PmaParams<Scalar>& params, Scalar x, Scalar xdot,
                                 Direction direction, Scalar branch_pressure) {
  const bool inflating = direction == Direction::kInflating;
  const Scalar b0 = inflating ? params.b0i : params.b0d;
  const Scalar b1 = inflating ? params.b1i : params.b1d;
  const bool low = branch_pressure <= params.p_break;
  const Scalar k0 = low ? params.k01 : params.k11;
  const Scalar k1 = low ? params.k02 : params.k12;
  const Scalar m = params.mass;
  return {(params.f0 - m * Scalar(kGravity) - b0 * xdot - k0 * x) / m,
          (params.f1 - b1 * xdot - k1 * x) / m};
}

template <typename Scalar>
struct PlantState {
  Scalar x{0};      // contraction, m
  Scalar xdot{0};   // m/s
  Scalar t{0};      // s
  Scalar p_prev{0};  // last applied pressure, Pa
  Direction direction = Direction::kInflating;

  bool operator==(const PlantState&) const = default;
};

template <typename Scalar>
Scalar acceleration(const PmaParams<Scalar>& params, const PlantState<Scalar>& state,
                    Scalar pressure, Direction direction, Scalar disturbance) {
  const auto c = coefficients(params, pressure, direction);
  const Scalar m = params.mass;
  return (c.f - m * Scalar(kGravity) - c.b * state.xdot - c.k * state.x) / m + disturbance;
}

inline constexpr double kDirectionDeadband = 1.0;  // Pa

/// Inflating iff the new pressure rises above the previous one by more than
/// the deadband; inside the deadband the previous direction persists.
template <typename Scalar>
Direction detect_direction(Direction previous, Scalar p_prev, Scalar p_new) {
  const Scalar delta = p_new - p_prev;
  if (delta > Scalar(kDirectionDeadband)) return Direction::kInflating;
  if (delta < -Scalar(kDirectionDeadband)) return Direction::kDeflating;
  return previous;
}

// RK4 is stable on the negative real axis up to |lambda dt| ~ 2.78; stay well inside.
inline constexpr double kMaxStageRate = 2.0;

/// Internal RK4 sub-steps needed to keep |lambda| * h inside the stability region.
template <typename Scalar>
int required_substeps(const PmaParams<Scalar>& params, const Coefficients<Scalar>& c,
                      Scalar dt) {
  const Scalar m = params.mass;
  const Scalar rho = std::abs(c.b) / m + std::sqrt(std::abs(c.k) / m);
  const Scalar n = std::ceil(rho * dt / Scalar(kMaxStageRate));
  return std::max(1, static_cast<int>(n));
}

/// Advances the plant by dt with the clamped pressure held constant.
/// `substeps` = 0 picks the count from the local stiffness.
template <typename Scalar>
PlantState<Scalar> step(const PmaParams<Scalar>& params, const PlantState<Scalar>& state,
                        Scalar pressure_command, const DisturbanceProfile<Scalar>& disturbance,
                        Scalar dt, int substeps = 0) {
  if (!(dt > Scalar(0))) throw DomainError("step: dt must be > 0");
  if (!std::isfinite(pressure_command)) throw DomainError("step: non-finite pressure command");

  const Scalar pressure = params.clamp_pressure(pressure_command);
  const Direction dir = detect_direction(state.direction, state.p_prev, pressure);
  const auto c = coefficients(params, pressure, dir);
  const Scalar m = params.mass;
  const Scalar drive = c.f - m * Scalar(kGravity);

  const auto deriv = [&](Scalar t, const Vector2<Scalar>& y) {
    return Vector2<Scalar>(y(1), (drive - c.b * y(1) - c.k * y(0)) / m + disturbance.eval(t));
  };

  const int n = substeps > 0 ? substeps : required_substeps(params, c, dt);
  const Scalar h = dt / Scalar(n);
  Vector2<Scalar> y(state.x, state.xdot);
  for (int i = 0; i < n; ++i) y = rk4_step(deriv, state.t + Scalar(i) * h, y, h);

  if (!y.allFinite())
    throw DivergedError(ErrorKind::kIntegrationDiverged, double(state.t), "plant integration diverged");
  return {y(0), y(1), state.t + dt, pressure, dir};
}

/// Pressure that balances the plant at rest at position x on the low branch.
template <typename Scalar>
Scalar holding_pressure(const PmaParams<Scalar>& params, Scalar x) {
  return (params.mass * Scalar(kGravity) - params.f0 + params.k01 * x) /
         (params.f1 - params.k02 * x);
}

}  // namespace pma
