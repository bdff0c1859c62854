#include <doctest.h>

#include <cmath>
#include <random>

#include "pma/scenario.hpp"
#include "pma/stability.hpp"

using namespace pma;
using doctest::Approx;

namespace {

const PsmcGains<double> kPublished{14218.8, 177.4, 174.4, 2473.5, 1916.0, 194.2, 40.0, 400.0, 15.0};

// Gains with K_m = diag(1, 1, 1): Ki = Kd = c2 = 1, Kp c1 = 3.
PsmcGains<double> unit_km(double c1 = 3.0) {
  PsmcGains<double> g = kPublished;
  g.ki = g.kd = g.c2 = 1.0;
  g.c1 = c1;
  g.kp = 3.0 / c1;
  return g;
}

// Roots of det(Kc - s I) = s^2 - tr s + det, in long double with the
// cancellation-free quadratic form.
std::pair<long double, long double> charpoly_roots(const SymMatrix2<double>& m) {
  const long double tr = (long double)m.xx + m.yy;
  const long double det = (long double)m.xx * m.yy - (long double)m.xy * m.xy;
  const long double disc = std::sqrt(std::max(0.0L, tr * tr - 4 * det));
  const long double q = -0.5L * (-tr - (tr >= 0 ? disc : -disc));
  long double a = q, b = q != 0 ? det / q : 0;
  if (a > b) std::swap(a, b);
  return {a, b};
}

StabilityReport<double> published_report(double eps = 0.4) {
  return check_gains(kPublished, eps);
}

}  // namespace

TEST_CASE("varpi and K_m for the published gains") {
  CHECK(varpi(kPublished) == Approx(403014.42).epsilon(1e-12));
  const auto km = km_matrix(kPublished);
  CHECK(km(0, 0) == Approx(1916.0 * 174.4));
  CHECK(km(1, 1) == Approx(403014.42));
  CHECK(km(2, 2) == 194.2);
  CHECK(km(0, 1) == 0.0);
  CHECK(km_min(kPublished) == 194.2);
}

TEST_CASE("K_m boundary and unit cases") {
  PsmcGains<double> g = kPublished;
  g.ki = 2.0, g.kd = 3.0, g.c2 = 4.0, g.c1 = 7.0, g.kp = 2.0;  // Kp c1 = 14 = Ki + Kd c2
  CHECK(varpi(g) == 0.0);
  CHECK(km_min(g) == 0.0);
  CHECK(km_matrix(unit_km()) == Matrix3<double>::Identity());
}

TEST_CASE("K_c for the published gains") {
  const auto kc = kc_matrix(kPublished);
  CHECK(kc.xx == Approx(771276.8).epsilon(1e-12));
  CHECK(kc.xy == Approx(35784.48).epsilon(1e-12));
  CHECK(kc.yy == Approx(36924.58).epsilon(1e-12));
  const auto ev = eigenvalues(kc);
  CHECK(ev(0) > 0.0);
  CHECK(ev(1) > 0.0);
}

TEST_CASE("K_c with unit gains is singular") {
  PsmcGains<double> g = kPublished;
  g.kp = g.ki = g.kd = g.c1 = g.c2 = 1.0;
  const auto kc = kc_matrix(g);
  CHECK(kc.xx == 2.0);
  CHECK(kc.xy == 2.0);
  CHECK(kc.yy == 2.0);
  CHECK(eigenvalues(kc)(0) == Approx(0.0));
  CHECK(check_theorem1(g, 0.0, 0.0).has_violation(kViolationKc));
}

TEST_CASE("K_c eigenvalues match the characteristic polynomial") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lg(-2.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    PsmcGains<double> g = kPublished;
    g.c1 = std::pow(10.0, lg(rng));
    g.c2 = std::pow(10.0, lg(rng));
    g.kp = std::pow(10.0, lg(rng));
    g.ki = std::pow(10.0, lg(rng));
    g.kd = std::pow(10.0, lg(rng));
    const auto kc = kc_matrix(g);
    const auto ev = eigenvalues(kc);
    const auto [lo, hi] = charpoly_roots(kc);
    const double scale = std::abs(double(hi));
    CHECK(std::abs(ev(0) - double(lo)) <= 1e-12 * scale);
    CHECK(std::abs(ev(1) - double(hi)) <= 1e-12 * scale);
  }
}

TEST_CASE("lambda2 examples") {
  CHECK(lambda2(kPublished, 0.0, 0.0) == 0.0);
  CHECK(lambda2(unit_km(1.5), 1.0, 3.0) == Approx(4.0 * 3.5));
  const auto g = unit_km(2.0);  // c1 = 2, c2 = 1
  CHECK(lambda2(g, 1.0, 3.0) == Approx(16.0));
  PsmcGains<double> bad = kPublished;
  bad.kp = 0.1;
  try {
    lambda2(bad, 1.0, 0.0);
    FAIL("expected infeasible-gains error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInfeasibleGains);
  }
}

TEST_CASE("asymptotic Sq bound") {
  CHECK(sq_asymptotic_bound(kPublished, 0.0, 0.0) == 0.0);
  CHECK(sq_asymptotic_bound(unit_km(2.0), 1.0, 3.0) == Approx(64.0));
  double prev = -1.0;
  for (double eps = 0.0; eps <= 10.0; eps += 0.25) {
    const double b = sq_asymptotic_bound(kPublished, eps, 0.45);
    CHECK(b >= prev);
    prev = b;
  }
}

TEST_CASE("published gains pass the gate at a small disturbance bound") {
  const auto r = published_report();
  CHECK(r.feasible);
  CHECK(r.violations.empty());
  CHECK(r.lambda1 == Approx(0.450025).epsilon(1e-9));
  CHECK(r.gamma_required <= kPublished.gamma);
  CHECK(r.gamma_required == Approx(r.lambda2 * (2473.5 + 1916.0 + 194.2)));
  CHECK(r.varpi == Approx(403014.42).epsilon(1e-12));
}

TEST_CASE("each violated condition is reported by name") {
  PsmcGains<double> g = kPublished;
  g.m_p = 0.0;
  auto r = check_gains(g, 0.4);
  CHECK_FALSE(r.feasible);
  CHECK(r.violations == std::vector<std::string>{kViolationProxyMass});

  g = kPublished;
  g.kp = 0.1;
  r = check_gains(g, 0.4);
  CHECK(r.violations == std::vector<std::string>{kViolationVarpi});

  r = check_gains(kPublished, 100.0);
  CHECK(r.violations == std::vector<std::string>{kViolationSwitchingGain});

  g = kPublished;
  g.l2 = -1.0;
  r = check_gains(g, 0.4);
  CHECK(r.has_violation(kViolationGainSign));
}

TEST_CASE("feasible exactly when no violation is listed") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> f(0.01, 3.0);
  for (int i = 0; i < 500; ++i) {
    PsmcGains<double> g = kPublished;
    g.gamma *= f(rng), g.c1 *= f(rng), g.c2 *= f(rng), g.kp *= f(rng);
    g.ki *= f(rng), g.kd *= f(rng), g.l1 *= f(rng), g.l2 *= f(rng);
    const auto r = check_gains(g, 2.0 * f(rng));
    CHECK(r.feasible == r.violations.empty());
    CHECK(r.varpi == Approx(varpi(g)));
  }
}

TEST_CASE("feasible gains keep the proxy coupling error inside lambda2") {
  Scenario s;  // matched identified plant, published gains
  s.controller = ControllerKind::kIdoPsmc;
  s.duration = s.window_end = 20.0;
  s.disturbance = DisturbanceProfile<double>::sinusoid(0.1, 2.0);
  s.eps = s.disturbance.bound();
  const auto r = run_scenario(s);
  REQUIRE(r.stability.has_value());
  REQUIRE(r.stability->feasible);
  double worst = 0;
  for (std::size_t k = 0; k < r.trace.rows.size(); ++k)
    if (r.trace.rows[k].t >= 0.75 * s.duration) worst = std::max(worst, r.coupling_error[k]);
  MESSAGE("max |e_p|_1 over the last quarter = " << worst << ", lambda2 = " << r.stability->lambda2);
  CHECK(worst <= r.stability->lambda2);
}
