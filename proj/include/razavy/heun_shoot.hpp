#pragma once

// Shooting directly on the transformed equation in z = cosh^2(x) >= 1.
//
// Under psi = exp(+xi z / 2) y a bound state has y ~ exp(-xi z), the recessive
// solution, while every other solution behaves like z^{-(mu+nu)/alpha}. The
// coefficient of that algebraic branch changes sign as eps crosses a level.

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "razavy/errors.hpp"
#include "razavy/grid.hpp"
#include "razavy/heun.hpp"
#include "razavy/potential.hpp"

namespace razavy {

inline constexpr double kHeunSeedOffset = 0.01;
inline constexpr int kHeunSeedTerms = 24;

// exp(-xi (z_max - 1)) ~ exp(-40) keeps the recessive branch negligible.
inline double default_heun_z_max(double xi) { return 1.0 + 40.0 / xi; }

inline double heun_shoot_z(const PotentialParams& p, double eps, double z_max, Parity parity) {
  validate(p);
  if (!(z_max > 1.5)) throw ParameterError("z_max must exceed 1.5");
  // psi = exp(xi z / 2) y must stay representable at z_max
  if (0.5 * p.xi * z_max > std::log(std::numeric_limits<double>::max())) {
    throw RangeError("z_max = " + std::to_string(z_max) + " overflows the exp(xi z / 2) envelope");
  }
  const HeunParams h = map_problem_to_heun(p.m, p.xi, eps, Envelope::growing);
  const auto exponent = parity == Parity::even ? FrobeniusExponent::zero : FrobeniusExponent::one_half;
  const auto seed = frobenius_seed_at_one(h, exponent, kHeunSeedTerms);
  const double z0 = 1.0 + kHeunSeedOffset;
  const auto local = evaluate_frobenius(seed, exponent, kHeunSeedOffset);

  using State = std::array<double, 2>;
  State y{local.value, local.derivative};
  auto rhs = [&h](const State& s, State& ds, double z) {
    const double p1 = h.alpha + (1.0 + h.beta) / z + (1.0 + h.gamma) / (z - 1.0);
    const double q = h.mu / z + h.nu / (z - 1.0);
    ds[0] = s[1];
    ds[1] = -p1 * s[1] - q * s[0];
  };
  double scale = std::abs(y[0]);
  auto observe = [&scale](const State& s, double) { scale = std::max(scale, std::abs(s[0])); };
  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_controlled(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, rhs, y, z0, z_max, 1e-3, observe);
  if (!std::isfinite(y[0]) || !(scale > 0.0)) {
    throw NumericError("heun_shoot_z integration failed at eps = " + std::to_string(eps));
  }
  const double algebraic = std::pow(z_max, (h.mu + h.nu) / h.alpha);
  return y[0] * algebraic / scale;
}

}  // namespace razavy
