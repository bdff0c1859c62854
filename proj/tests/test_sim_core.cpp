#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "pma/plant.hpp"

using namespace pma;
using doctest::Approx;

namespace {

// Forward Euler on the three-element model, written out from the model
// equation rather than through the library's coefficient helpers.
Vector2<double> euler_oracle(double x0, double v0, double pressure, double amp, double omega,
                             double duration, double h) {
  const double m = 1.0, g = 9.81;
  const double b = 6435.31 + 0.10023 * pressure;  // inflating
  const double k = 18063.0 + 0.01051 * pressure;  // below the breakpoint
  const double f = -202.32 + 0.00721 * pressure;
  double x = x0, v = v0;
  const long n = std::lround(duration / h);
  for (long i = 0; i < n; ++i) {
    const double t = double(i) * h;
    const double a = (f - m * g - b * v - k * x) / m + amp * std::sin(omega * t);
    x += h * v;
    v += h * a;
  }
  return {x, v};
}

}  // namespace

TEST_CASE("coefficients at zero pressure are the identified offsets") {
  const auto p = PmaParams<double>::identified();
  const auto c = coefficients(p, 0.0, Direction::kInflating);
  CHECK(c.b == Approx(6435.31));
  CHECK(c.k == Approx(18063.0));
  CHECK(c.f == Approx(-202.32));
}

TEST_CASE("coefficients at 1e5 Pa inflating") {
  const auto c = coefficients(PmaParams<double>::identified(), 1e5, Direction::kInflating);
  CHECK(c.b == Approx(16458.31).epsilon(1e-12));
  CHECK(c.k == Approx(19114.0).epsilon(1e-12));
  CHECK(c.f == Approx(518.68).epsilon(1e-12));
}

TEST_CASE("zero pressure gains reduce the coefficients to their offsets") {
  auto p = PmaParams<double>::identified();
  p.b1i = p.k02 = p.f1 = 0.0;
  for (double P : {0.0, 1234.5, p.p_break}) {
    const auto c = coefficients(p, P, Direction::kInflating);
    CHECK(c.b == p.b0i);
    CHECK(c.k == p.k01);
    CHECK(c.f == p.f0);
  }
}

TEST_CASE("deflation selects the deflation damping pair") {
  const auto p = PmaParams<double>::identified();
  const auto c = coefficients(p, 2e5, Direction::kDeflating);
  CHECK(c.b == Approx(p.b0d + p.b1d * 2e5));
}

TEST_CASE("pressure outside the limits is a domain error") {
  const auto p = PmaParams<double>::identified();
  CHECK_THROWS_AS(coefficients(p, -1.0, Direction::kInflating), DomainError);
  CHECK_THROWS_AS(coefficients(p, p.p_max + 1.0, Direction::kInflating), DomainError);
}

TEST_CASE("spring branch switches exactly above the breakpoint") {
  const auto p = PmaParams<double>::identified();
  const double low = p.k01 + p.k02 * p.p_break;
  const double high = p.k11 + p.k12 * (p.p_break + 1.0);
  CHECK(coefficients(p, p.p_break, Direction::kInflating).k == low);
  CHECK(coefficients(p, p.p_break + 1.0, Direction::kInflating).k == high);
}

TEST_CASE("parameter invariants") {
  auto p = PmaParams<double>::identified();
  CHECK_NOTHROW(p.validate());
  p.mass = 0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = PmaParams<double>::identified();
  p.p_break = p.p_max;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = PmaParams<double>::identified();
  p.p_min = -1;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("acceleration at the origin") {
  const auto p = PmaParams<double>::identified();
  const PlantState<double> s;
  CHECK(acceleration(p, s, 0.0, Direction::kInflating, 0.0) == Approx(-212.13).epsilon(1e-12));
  CHECK(acceleration(p, s, 0.0, Direction::kInflating, 5.0) == Approx(-207.13).epsilon(1e-12));
}

TEST_CASE("acceleration vanishes under force balance") {
  auto p = PmaParams<double>::identified();
  p.f0 = p.mass * kGravity;
  p.f1 = 0;
  CHECK(acceleration(p, PlantState<double>{}, 1e5, Direction::kInflating, 0.0) == 0.0);
}

TEST_CASE("holding pressure keeps the plant at rest") {
  const auto p = PmaParams<double>::identified();
  const double P = holding_pressure(p, 0.0);
  CHECK(P == Approx(212.13 / 0.00721));
  PlantState<double> s;
  s.p_prev = P;
  for (int i = 0; i < 1000; ++i) s = step(p, s, P, DisturbanceProfile<double>::zero(), 1e-3);
  CHECK(std::abs(s.x) < 1e-12);
  CHECK(std::abs(s.xdot) < 1e-12);
  CHECK(s.t == Approx(1.0));
}

TEST_CASE("step agrees with a fine-step Euler oracle") {
  const auto p = PmaParams<double>::identified();
  const auto tau = DisturbanceProfile<double>::sinusoid(0.1, 2.0);
  const double P = 4e4;
  PlantState<double> s{0.005, 0.0, 0.0, 0.0, Direction::kInflating};
  for (int i = 0; i < 1000; ++i) s = step(p, s, P, tau, 1e-3);
  const auto oracle = euler_oracle(0.005, 0.0, P, 0.1, 2.0, 1.0, 1e-6);
  CHECK(std::abs(s.x - oracle(0)) < 1e-6);
}

TEST_CASE("RK4 terminal error shrinks at least 8x per halving of dt") {
  // Slow linear plant; exact solution from the matrix exponential.
  PmaParams<double> p = PmaParams<double>::identified().scaled_coefficients(0.01);
  p.mass = 100;
  const double P = 1e5;
  const auto c = coefficients(p, P, Direction::kInflating);
  Eigen::Matrix2d A;
  A << 0, 1, -c.k / p.mass, -c.b / p.mass;
  const Eigen::Vector2d forcing(0, (c.f - p.mass * kGravity) / p.mass);
  const Eigen::Vector2d y0(0.01, 0.0);
  const double T = 2.0;
  const Eigen::Vector2d shift = A.fullPivLu().solve(forcing);
  const Eigen::Matrix2d AT = A * T;
  const Eigen::Vector2d exact = AT.exp() * (y0 + shift) - shift;

  auto terminal_error = [&](double dt) {
    PlantState<double> s{y0(0), y0(1), 0.0, P, Direction::kInflating};
    const int n = int(std::lround(T / dt));
    for (int i = 0; i < n; ++i) s = step(p, s, P, DisturbanceProfile<double>::zero(), dt, 1);
    return std::abs(s.x - exact(0));
  };
  const double e1 = terminal_error(0.2), e2 = terminal_error(0.1), e3 = terminal_error(0.05);
  CHECK(e1 / e2 >= 8.0);
  CHECK(e2 / e3 >= 8.0);
}

TEST_CASE("commands above p_max behave exactly like p_max") {
  const auto p = PmaParams<double>::identified();
  PlantState<double> a, b;
  for (int i = 0; i < 50; ++i) {
    a = step(p, a, 1e7, DisturbanceProfile<double>::zero(), 1e-3);
    b = step(p, b, p.p_max, DisturbanceProfile<double>::zero(), 1e-3);
  }
  CHECK(a == b);
  CHECK(a.p_prev == p.p_max);
}

TEST_CASE("applied pressure always lies within the limits") {
  const auto p = PmaParams<double>::identified();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> cmd(-1e6, 2e6);
  PlantState<double> s;
  for (int i = 0; i < 500; ++i) {
    s = step(p, s, cmd(rng), DisturbanceProfile<double>::zero(), 1e-3);
    CHECK(s.p_prev >= p.p_min);
    CHECK(s.p_prev <= p.p_max);
  }
}

TEST_CASE("identical inputs give bit-identical trajectories") {
  const auto p = PmaParams<double>::identified();
  const auto tau = DisturbanceProfile<double>::sinusoid(0.3, 5.0, 0.2);
  PlantState<double> a, b;
  for (int i = 0; i < 300; ++i) {
    const double P = 2e5 + 1e5 * std::sin(0.01 * i);
    a = step(p, a, P, tau, 1e-3);
    b = step(p, b, P, tau, 1e-3);
  }
  CHECK(a == b);
}

TEST_CASE("direction detector uses a 1 Pa deadband") {
  CHECK(detect_direction(Direction::kDeflating, 100.0, 102.0) == Direction::kInflating);
  CHECK(detect_direction(Direction::kInflating, 100.0, 98.0) == Direction::kDeflating);
  CHECK(detect_direction(Direction::kDeflating, 100.0, 100.5) == Direction::kDeflating);
  CHECK(detect_direction(Direction::kInflating, 100.0, 99.5) == Direction::kInflating);
}

TEST_CASE("step rejects bad arguments and reports divergence") {
  const auto p = PmaParams<double>::identified();
  CHECK_THROWS_AS(step(p, PlantState<double>{}, 1e5, DisturbanceProfile<double>::zero(), 0.0),
                  DomainError);
  CHECK_THROWS_AS(step(p, PlantState<double>{}, std::nan(""), DisturbanceProfile<double>::zero(), 1e-3),
                  DomainError);
  PlantState<double> huge{1e308, 1e308, 0.0, 0.0, Direction::kInflating};
  CHECK_THROWS_AS(step(p, huge, 1e5, DisturbanceProfile<double>::zero(), 1e-3), DivergedError);
}

TEST_CASE("disturbance derivatives and bound") {
  const auto d = DisturbanceProfile<double>::sinusoid(0.1, 2.0);
  CHECK(d.bound() == Approx(0.4));
  CHECK(d.eval(0.3) == Approx(0.1 * std::sin(0.6)));
  CHECK(d.derivative(0.3) == Approx(0.2 * std::cos(0.6)));
  CHECK(d.second_derivative(0.3) == Approx(-0.4 * std::sin(0.6)));
  CHECK(DisturbanceProfile<double>::constant(-2.0).bound() == 2.0);
  CHECK(DisturbanceProfile<double>::zero().bound() == 0.0);
  const auto sum = DisturbanceProfile<double>::sum_of_sinusoids({{1.0, 0.5, 0.0}, {0.1, 3.0, 1.0}});
  CHECK(sum.bound() == Approx(1.15));  // max(1.1, 0.8, 0.25 + 0.9)
  // derivative matches a central difference
  const double h = 1e-5;
  CHECK(sum.derivative(1.3) == Approx((sum.eval(1.3 + h) - sum.eval(1.3 - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("substep count follows the local stiffness") {
  const auto p = PmaParams<double>::identified();
  const auto c = coefficients(p, 0.0, Direction::kInflating);
  const int n = required_substeps(p, c, 1e-3);
  const double rho = c.b / p.mass + std::sqrt(c.k / p.mass);
  CHECK(n == int(std::ceil(rho * 1e-3 / 2.0)));
  CHECK(rho * 1e-3 / n <= 2.0);
}
