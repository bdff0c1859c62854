#pragma once

#include <cmath>
#include <string>

#include "pma/errors.hpp"
#include "pma/integrator.hpp"
#include "pma/observer.hpp"
#include "pma/plant.hpp"
#include "pma/types.hpp"

namespace pma {

/// Gains of the proxy-based sliding mode controller, observer gains included.
template <typename Scalar>
struct PsmcGains {
  Scalar gamma{0};  // switching gain of the proxy
  Scalar c1{0};
  Scalar c2{0};
  Scalar kp{0};
  Scalar ki{0};
  Scalar kd{0};
  Scalar l1{0};
  Scalar l2{0};
  Scalar m_p{1};  // proxy mass

  bool all_positive() const {
    return gamma > 0 && c1 > 0 && c2 > 0 && kp > 0 && ki > 0 && kd > 0 && l1 > 0 && l2 > 0 &&
           m_p > 0;
  }

  void validate() const {
    if (!all_positive()) throw DomainError("PsmcGains: every gain must be strictly positive");
  }

  ObserverGains<Scalar> observer() const { return {l1, l2}; }

  GainVector<Scalar> to_vector() const {
    GainVector<Scalar> v;
    v << gamma, c1, c2, kp, ki, kd, l1, l2;
    return v;
  }

  static PsmcGains from_vector(const GainVector<Scalar>& v, Scalar m_p) {
    return {v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), m_p};
  }

  bool operator==(const PsmcGains&) const = default;
};

/// Boundary-layer SMC gains for the SMC and DO-SMC baselines.
template <typename Scalar>
struct SmcGains {
  Scalar c1{0};
  Scalar c2{0};
  Scalar k_sw{0};
  Scalar phi{1};  // boundary-layer width
};

template <typename Scalar>
struct Reference {
  Scalar xd{0};
  Scalar xd_dot{0};
  Scalar xd_ddot{0};
};

/// Proxy position/velocity plus the three error integrals
/// ep = int(xp - x), int_exd = int(xd - x), int_exp = int(xd - xp).
template <typename Scalar>
struct ProxyState {
  Scalar xp{0};
  Scalar xp_dot{0};
  Scalar ep{0};
  Scalar int_exd{0};
  Scalar int_exp{0};

  static ProxyState at_reference(const Reference<Scalar>& ref) {
    return {ref.xd, ref.xd_dot, Scalar(0), Scalar(0), Scalar(0)};
  }
};

template <typename Scalar>
struct ControlOutput {
  Scalar u{0};      // applied (clamped) pressure command
  Scalar u_raw{0};  // before clamping
  Scalar sq{0};
  Scalar sp{0};
  bool saturated = false;
};

/// The controller's view of its nominal model at the current sample.
template <typename Scalar>
struct NominalContext {
  const PmaParams<Scalar>& params;
  Direction direction = Direction::kInflating;
  Scalar branch_pressure{0};  // last applied command, picks the spring branch
};

template <typename Scalar>
Scalar sgn(Scalar v) {
  return Scalar((v > Scalar(0)) - (v < Scalar(0)));
}

/// |Sp| at or below this (m/s) counts as zero for the proxy switching force.
/// Round-off in Sp at an exact fixed point is many orders smaller.
inline constexpr double kSwitchingZeroBand = 1e-12;

template <typename Scalar>
Scalar sat(Scalar z) {
  return std::abs(z) <= Scalar(1) ? z : sgn(z);
}

template <typename Scalar>
Scalar manifold_q(const Reference<Scalar>& ref, Scalar x, Scalar xdot, Scalar int_exd, Scalar c1,
                  Scalar c2) {
  return (ref.xd_dot - xdot) + c1 * (ref.xd - x) + c2 * int_exd;
}

template <typename Scalar>
Scalar manifold_p(const Reference<Scalar>& ref, const ProxyState<Scalar>& proxy, Scalar c1,
                  Scalar c2) {
  return (ref.xd_dot - proxy.xp_dot) + c1 * (ref.xd - proxy.xp) + c2 * proxy.int_exp;
}

namespace detail {

template <typename Scalar>
AffineModel<Scalar> checked_model(const NominalContext<Scalar>& nominal,
                                  const Measurement<Scalar>& meas) {
  const auto model =
      affine_model(nominal.params, meas.x, meas.xdot, nominal.direction, nominal.branch_pressure);
  const Scalar floor = Scalar(1e-6) * std::abs(nominal.params.f1 / nominal.params.mass);
  if (!(std::abs(model.gain) >= floor))
    throw SingularGainError(double(meas.x), double(meas.xdot), double(model.gain));
  return model;
}

template <typename Scalar>
ControlOutput<Scalar> finish(const PmaParams<Scalar>& params, Scalar u_raw, Scalar sq, Scalar sp) {
  const Scalar u = params.clamp_pressure(u_raw);
  return {u, u_raw, sq, sp, u_raw < params.p_min || u_raw > params.p_max};
}

}  // namespace detail

/// Proxy-based sliding mode control with disturbance-observer compensation:
/// u = [xd'' + c1 (xd' - x') + c2 (xd - x) - f + Kp (xp - x) + Ki ep
///      + Kd (xp' - x') - tau_hat - taudot_hat] / b.
template <typename Scalar>
ControlOutput<Scalar> ido_psmc(const PsmcGains<Scalar>& g, const NominalContext<Scalar>& nominal,
                               const Reference<Scalar>& ref, const Measurement<Scalar>& meas,
                               const ProxyState<Scalar>& proxy, const ObserverState<Scalar>& obs) {
  const auto model = detail::checked_model(nominal, meas);
  const Scalar coupling = g.kp * (proxy.xp - meas.x) + g.ki * proxy.ep +
                          g.kd * (proxy.xp_dot - meas.xdot);
  const Scalar bracket = ref.xd_ddot + g.c1 * (ref.xd_dot - meas.xdot) +
                         g.c2 * (ref.xd - meas.x) - model.drift + coupling - obs.tau_hat -
                         obs.taudot_hat;
  return detail::finish(nominal.params, bracket / model.gain,
                        manifold_q(ref, meas.x, meas.xdot, proxy.int_exd, g.c1, g.c2),
                        manifold_p(ref, proxy, g.c1, g.c2));
}

/// Plain PSMC: the IDO-PSMC law with the observer estimates held at zero.
template <typename Scalar>
ControlOutput<Scalar> psmc(const PsmcGains<Scalar>& g, const NominalContext<Scalar>& nominal,
                           const Reference<Scalar>& ref, const Measurement<Scalar>& meas,
                           const ProxyState<Scalar>& proxy) {
  return ido_psmc(g, nominal, ref, meas, proxy, ObserverState<Scalar>{});
}

/// Boundary-layer SMC. `int_exd` is the running integral of xd - x.
template <typename Scalar>
ControlOutput<Scalar> smc(const SmcGains<Scalar>& g, const NominalContext<Scalar>& nominal,
                          const Reference<Scalar>& ref, const Measurement<Scalar>& meas,
                          Scalar int_exd) {
  if (!(g.phi > Scalar(0))) throw DomainError("smc: boundary layer width must be > 0");
  const auto model = detail::checked_model(nominal, meas);
  const Scalar sq = manifold_q(ref, meas.x, meas.xdot, int_exd, g.c1, g.c2);
  const Scalar bracket = ref.xd_ddot + g.c1 * (ref.xd_dot - meas.xdot) +
                         g.c2 * (ref.xd - meas.x) - model.drift + g.k_sw * sat(sq / g.phi);
  return detail::finish(nominal.params, bracket / model.gain, sq, Scalar(0));
}

/// SMC with the same -tau_hat - taudot_hat compensation the IDO-PSMC law uses.
template <typename Scalar>
ControlOutput<Scalar> do_smc(const SmcGains<Scalar>& g, const NominalContext<Scalar>& nominal,
                             const Reference<Scalar>& ref, const Measurement<Scalar>& meas,
                             Scalar int_exd, const ObserverState<Scalar>& obs) {
  const auto base = smc(g, nominal, ref, meas, int_exd);
  const auto model = detail::checked_model(nominal, meas);
  const Scalar u_raw = base.u_raw - (obs.tau_hat + obs.taudot_hat) / model.gain;
  return detail::finish(nominal.params, u_raw, base.sq, Scalar(0));
}

/// Reference extrapolated from a single sample with constant acceleration.
template <typename Scalar>
Reference<Scalar> extrapolate(const Reference<Scalar>& ref, Scalar s) {
  return {ref.xd + ref.xd_dot * s + ref.xd_ddot * s * s / Scalar(2), ref.xd_dot + ref.xd_ddot * s,
          ref.xd_ddot};
}

/// Advances the proxy one sample. The proxy obeys
///   m_p xp'' = Gamma sgn(Sp) - Kp (xp - x) - Ki ep - Kd (xp' - x')
///              + m_p [xd'' + c1 (xd' - xp') + c2 (xd - xp)]
/// with the plant measurement held over the sample. The sample is split into
/// `substeps` RK4 steps; the switching force Gamma sgn(Sp) is held over each
/// sub-step (sgn(0) = 0, with |Sp| <= kSwitchingZeroBand taken as 0). `ref_at(s)` gives the reference at offset s in [0, dt].
template <typename Scalar, typename RefFn>
ProxyState<Scalar> proxy_step(const PsmcGains<Scalar>& g, const RefFn& ref_at,
                              const Measurement<Scalar>& meas, const ProxyState<Scalar>& proxy,
                              Scalar dt, int substeps = 1) {
  if (!(g.m_p > Scalar(0))) throw DomainError("proxy_step: proxy mass must be > 0");
  if (!(dt > Scalar(0))) throw DomainError("proxy_step: dt must be > 0");
  if (substeps < 1) throw DomainError("proxy_step: substeps must be >= 1");

  using Vec5 = Eigen::Matrix<Scalar, 5, 1>;
  Scalar switching{0};
  const auto deriv = [&](Scalar s, const Vec5& y) -> Vec5 {
    const Reference<Scalar> r = ref_at(s);
    const Scalar xp = y(0), xp_dot = y(1), ep = y(2);
    const Scalar coupling =
        g.kp * (xp - meas.x) + g.ki * ep + g.kd * (xp_dot - meas.xdot);
    Vec5 d;
    d << xp_dot,
        (switching - coupling) / g.m_p + r.xd_ddot + g.c1 * (r.xd_dot - xp_dot) +
            g.c2 * (r.xd - xp),
        xp - meas.x, r.xd - meas.x, r.xd - xp;
    return d;
  };
  Vec5 y;
  y << proxy.xp, proxy.xp_dot, proxy.ep, proxy.int_exd, proxy.int_exp;
  const Scalar h = dt / Scalar(substeps);
  for (int i = 0; i < substeps; ++i) {
    const Scalar s = Scalar(i) * h;
    const ProxyState<Scalar> now{y(0), y(1), y(2), y(3), y(4)};
    const Scalar sp = manifold_p(ref_at(s), now, g.c1, g.c2);
    switching = std::abs(sp) <= Scalar(kSwitchingZeroBand) ? Scalar(0) : g.gamma * sgn(sp);
    y = rk4_step(deriv, s, y, h);
  }
  if (!y.allFinite())
    throw DivergedError(ErrorKind::kProxyDiverged, 0.0, "proxy diverged");
  return {y(0), y(1), y(2), y(3), y(4)};
}

/// Proxy step from a single reference sample (constant-acceleration extrapolation).
template <typename Scalar>
ProxyState<Scalar> proxy_step(const PsmcGains<Scalar>& g, const Reference<Scalar>& ref,
                              const Measurement<Scalar>& meas, const ProxyState<Scalar>& proxy,
                              Scalar dt, int substeps = 1) {
  return proxy_step(g, [&](Scalar s) { return extrapolate(ref, s); }, meas, proxy, dt, substeps);
}

/// Integral of xd - x over one sample for controllers without a proxy.
template <typename Scalar>
Scalar advance_tracking_integral(Scalar int_exd, const Reference<Scalar>& ref, Scalar x,
                                 Scalar dt) {
  return int_exd + dt * (ref.xd - x) + ref.xd_dot * dt * dt / Scalar(2) +
         ref.xd_ddot * dt * dt * dt / Scalar(6);
}

}  // namespace pma
