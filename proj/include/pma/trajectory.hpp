#pragma once

#include <cmath>
#include <numbers>

#include "pma/control.hpp"
#include "pma/errors.hpp"

namespace pma {

enum class TrajectoryKind { kFixedSine, kLinearChirp };

/// Desired contraction xd = A sin(phase(t)) + B.
template <typename Scalar>
struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::kFixedSine;
  Scalar amplitude{0.015};
  Scalar offset{0.015};
  Scalar frequency{0.25};  // Hz, fixed sine
  Scalar f_start{0.1};     // Hz, chirp
  Scalar f_end{0.5};
  Scalar span{20.0};  // s, chirp sweep duration

  static Trajectory fixed_sine(Scalar amplitude, Scalar frequency, Scalar offset) {
    Trajectory t;
    t.kind = TrajectoryKind::kFixedSine;
    t.amplitude = amplitude;
    t.frequency = frequency;
    t.offset = offset;
    return t;
  }

  static Trajectory linear_chirp(Scalar amplitude, Scalar f_start, Scalar f_end, Scalar span,
                                 Scalar offset) {
    Trajectory t;
    t.kind = TrajectoryKind::kLinearChirp;
    t.amplitude = amplitude;
    t.f_start = f_start;
    t.f_end = f_end;
    t.span = span;
    t.offset = offset;
    return t;
  }

  void validate() const {
    if (!(amplitude >= Scalar(0))) throw DomainError("trajectory: amplitude must be >= 0");
    if (!(offset - amplitude >= Scalar(0)))
      throw DomainError("trajectory: offset - amplitude must be >= 0");
    if (kind == TrajectoryKind::kLinearChirp && !(span > Scalar(0)))
      throw DomainError("trajectory: chirp span must be > 0");
  }
};

template <typename Scalar>
Reference<Scalar> reference_at(const Trajectory<Scalar>& traj, Scalar t) {
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Scalar phase, rate, accel;
  if (traj.kind == TrajectoryKind::kFixedSine) {
    rate = two_pi * traj.frequency;
    phase = rate * t;
    accel = Scalar(0);
  } else {
    const Scalar sweep = (traj.f_end - traj.f_start) / traj.span;  // Hz/s
    phase = two_pi * (traj.f_start * t + sweep * t * t / Scalar(2));
    rate = two_pi * (traj.f_start + sweep * t);
    accel = two_pi * sweep;
  }
  const Scalar s = std::sin(phase), c = std::cos(phase);
  const Scalar a = traj.amplitude;
  return {a * s + traj.offset, a * c * rate, a * (c * accel - s * rate * rate)};
}

}  // namespace pma
