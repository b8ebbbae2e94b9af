#pragma once

// Scaled Razavy potential
//
//   V(x) = (xi^2/8) cosh(4x) - (m+1) xi cosh(2x) - xi^2/8
//
// in units hbar = mass = 1 with unit length scale, so that the Schroedinger
// equation reads -psi'' + V psi = eps psi with eps = 2E. A general length
// scale b is recovered by x -> b x, eps -> eps / b^2.

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "razavy/errors.hpp"
#include "razavy/format.hpp"
#include "razavy/sampled_function.hpp"

namespace razavy {

struct PotentialParams {
  int m = 0;
  double xi = 3.0;
};

inline constexpr int kMaxAbsM = 1000;

// Largest accepted |4x|. cosh(4x) would silently reach inf further out, so
// evaluation beyond the guard throws.
inline constexpr double kMaxCoshArgument = 175.0;

inline void validate(const PotentialParams& p) {
  if (!(p.xi > 0.0) || !std::isfinite(p.xi)) {
    throw ParameterError("xi must be a finite positive number, got " + std::to_string(p.xi));
  }
  if (std::abs(p.m) > kMaxAbsM) {
    throw ParameterError("|m| must not exceed " + std::to_string(kMaxAbsM) + ", got " +
                         std::to_string(p.m));
  }
}

inline double scaled_potential(double x, const PotentialParams& p) {
  if (!std::isfinite(x)) {
    throw ParameterError("potential evaluated at non-finite abscissa");
  }
  // evaluate on |x| so that V(x) == V(-x) bit for bit
  const double ax = std::abs(x);
  if (4.0 * ax > kMaxCoshArgument) {
    throw RangeError("potential overflow guard: |x| = " + std::to_string(ax) +
                     " exceeds " + std::to_string(kMaxCoshArgument / 4.0));
  }
  const double q = p.xi * p.xi / 8.0;
  return q * std::cosh(4.0 * ax) - (p.m + 1) * p.xi * std::cosh(2.0 * ax) - q;
}

// Even Taylor coefficients about the origin: V(x) = c0 + c2 x^2 + c4 x^4 + c6 x^6 + O(x^8).
struct TaylorCoefficients {
  double c0, c2, c4, c6;
};

inline TaylorCoefficients taylor_coefficients(const PotentialParams& p) {
  const double a = (p.m + 1) * p.xi;
  const double x2 = p.xi * p.xi;
  return {-a, x2 - 2.0 * a, (2.0 / 3.0) * (2.0 * x2 - a), (4.0 / 45.0) * (8.0 * x2 - a)};
}

enum class WellKind { single, flat, double_well };

inline const char* to_string(WellKind k) {
  switch (k) {
    case WellKind::single: return "single";
    case WellKind::flat: return "flat";
    case WellKind::double_well: return "double";
  }
  return "?";
}

struct WellShape {
  WellKind kind = WellKind::single;
  std::vector<double> minima;
  double depth = 0.0;
  // Qualitative annotation for single wells whose bottom is dominated by the
  // quartic term (|c2| < 0.5 |c4|). Only used to label figure data.
  bool flat_bottom = false;
};

inline constexpr double kFlatCurvatureTol = 1e-12;

inline WellShape classify_well(const PotentialParams& p) {
  validate(p);
  const auto t = taylor_coefficients(p);
  const double ratio = 2.0 * (p.m + 1) / p.xi;
  WellShape w;
  if (std::abs(t.c2) <= kFlatCurvatureTol || 2.0 * (p.m + 1) == p.xi) {
    w.kind = WellKind::flat;
    w.minima = {0.0};
    w.depth = t.c0;
    w.flat_bottom = true;
  } else if (ratio > 1.0) {
    const double x0 = 0.5 * std::acosh(ratio);
    w.kind = WellKind::double_well;
    w.minima = {-x0, x0};
    w.depth = -double(p.m + 1) * double(p.m + 1) - p.xi * p.xi / 4.0;
  } else {
    w.kind = WellKind::single;
    w.minima = {0.0};
    w.depth = t.c0;
    w.flat_bottom = std::abs(t.c2) < 0.5 * std::abs(t.c4);
  }
  return w;
}

inline double minimum_value(const PotentialParams& p) { return classify_well(p).depth; }

inline SampledFunction sample_potential(const PotentialParams& p, double half_width, int points) {
  validate(p);
  if (!(half_width > 0.0)) throw ParameterError("half-width must be positive");
  if (points < 2) throw ParameterError("need at least 2 sample points");
  SampledFunction f;
  f.kind = "potential";
  f.x.resize(points);
  f.value.resize(points);
  const int last = points - 1;
  for (int i = 0; i < points; ++i) {
    // integer numerator keeps the grid exactly antisymmetric
    const double x = half_width * double(2 * i - last) / double(last);
    f.x[i] = x;
    f.value[i] = scaled_potential(x, p);
  }
  const auto w = classify_well(p);
  f.metadata = {{"m", std::to_string(p.m)},
                {"xi", fmt9(p.xi)},
                {"well", to_string(w.kind)}};
  return f;
}

}  // namespace razavy
