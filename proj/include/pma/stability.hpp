#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "pma/control.hpp"
#include "pma/errors.hpp"
#include "pma/types.hpp"

namespace pma {

inline const std::string kViolationProxyMass = "proxy mass";
inline const std::string kViolationKc = "Kc positive definiteness";
inline const std::string kViolationSwitchingGain = "switching gain";
inline const std::string kViolationVarpi = "ϖ positivity";
inline const std::string kViolationGainSign = "gain positivity";

/// Outcome of the sufficient-condition check for bounded proxy/plant error.
template <typename Scalar>
struct StabilityReport {
  bool feasible = false;
  Scalar varpi{0};
  SymMatrix2<Scalar> kc;
  Vector2<Scalar> kc_eigs = Vector2<Scalar>::Zero();
  Scalar km_min{0};
  Scalar eps{0};
  Scalar lambda1{0};
  // NaN when km_min <= 0
  Scalar lambda2 = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar gamma_required = std::numeric_limits<Scalar>::quiet_NaN();
  std::vector<std::string> violations;

  bool has_violation(const std::string& name) const {
    return std::find(violations.begin(), violations.end(), name) != violations.end();
  }
};

// Kp c1 - Ki - Kd c2
template <typename Scalar>
Scalar varpi(const PsmcGains<Scalar>& g) {
  return g.kp * g.c1 - g.ki - g.kd * g.c2;
}

template <typename Scalar>
Matrix3<Scalar> km_matrix(const PsmcGains<Scalar>& g) {
  return Eigen::Matrix<Scalar, 3, 1>(g.ki * g.c2, varpi(g), g.kd).asDiagonal().toDenseMatrix();
}

template <typename Scalar>
SymMatrix2<Scalar> kc_matrix(const PsmcGains<Scalar>& g) {
  return {g.kp * g.c2 + g.ki * g.c1, g.ki + g.kd * g.c2, g.kp + g.kd * g.c1};
}

template <typename Scalar>
Scalar km_min(const PsmcGains<Scalar>& g) {
  return std::min({g.ki * g.c2, varpi(g), g.kd});
}

/// Ultimate bound on the 1-norm of (ep, ep', ep'').
template <typename Scalar>
Scalar lambda2(const PsmcGains<Scalar>& g, Scalar eps, Scalar lambda1) {
  const Scalar kmin = km_min(g);
  if (!(kmin > Scalar(0)))
    throw Error(ErrorKind::kInfeasibleGains, "lambda2: lambda_min(Km) <= 0");
  return (eps + lambda1) * (g.c1 + g.c2 + Scalar(1)) / kmin;
}

/// Limit of |Sq| as the proxy mass grows: lambda2 (c1 + c2 + 1).
template <typename Scalar>
Scalar sq_asymptotic_bound(const PsmcGains<Scalar>& g, Scalar eps, Scalar lambda1) {
  return lambda2(g, eps, lambda1) * (g.c1 + g.c2 + Scalar(1));
}

template <typename Scalar>
StabilityReport<Scalar> check_theorem1(const PsmcGains<Scalar>& g, Scalar eps, Scalar lambda1) {
  StabilityReport<Scalar> r;
  r.eps = eps;
  r.lambda1 = lambda1;
  r.varpi = varpi(g);
  r.kc = kc_matrix(g);
  r.kc_eigs = eigenvalues(r.kc);
  r.km_min = km_min(g);

  if (!(g.m_p > Scalar(0))) r.violations.push_back(kViolationProxyMass);
  if (!(r.kc_eigs(0) > Scalar(0))) r.violations.push_back(kViolationKc);
  if (r.km_min > Scalar(0)) {
    r.lambda2 = (eps + lambda1) * (g.c1 + g.c2 + Scalar(1)) / r.km_min;
    r.gamma_required = r.lambda2 * (g.kp + g.ki + g.kd);
    if (!(g.gamma >= r.gamma_required)) r.violations.push_back(kViolationSwitchingGain);
  }
  if (!(r.varpi > Scalar(0))) r.violations.push_back(kViolationVarpi);
  const bool others_positive =
      g.gamma > 0 && g.c1 > 0 && g.c2 > 0 && g.kp > 0 && g.ki > 0 && g.kd > 0 && g.l1 > 0 &&
      g.l2 > 0;
  if (!others_positive) r.violations.push_back(kViolationGainSign);
  r.feasible = r.violations.empty();
  return r;
}

/// Gate used by the harness and tuner: lambda1 comes from the candidate's
/// observer gains (Q = I); non-Hurwitz observers fail on gain sign.
template <typename Scalar>
StabilityReport<Scalar> check_gains(const PsmcGains<Scalar>& g, Scalar eps) {
  const auto obs = g.observer();
  const Scalar lambda1 = obs.is_hurwitz() ? observer_bound(obs, eps) : Scalar(0);
  return check_theorem1(g, eps, lambda1);
}

}  // namespace pma
