#pragma once

// Symmetric tridiagonal eigenvalues by Sturm counting and bisection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "razavy/errors.hpp"

namespace razavy {

template <class Real = double>
struct SymTridiagonal {
  std::vector<Real> diag;
  std::vector<Real> off;  // off[i] couples rows i and i+1

  std::size_t size() const { return diag.size(); }
};

// Smallest pivot magnitude tolerated in the shifted LDL^T factorisation,
// scaled to the off-diagonal entries as in LAPACK's dstebz.
template <class Real>
Real pivot_floor(const SymTridiagonal<Real>& t) {
  Real emax = 1;
  for (Real e : t.off) emax = std::max(emax, e * e);
  return std::numeric_limits<Real>::min() * emax / std::numeric_limits<Real>::epsilon();
}

/// Number of eigenvalues strictly below `shift`: the count of negative pivots
/// of T - shift I = L D L^T.
template <class Real>
std::size_t sturm_count(const SymTridiagonal<Real>& t, Real shift, Real pivmin) {
  std::size_t count = 0;
  Real q = 1;
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    const Real e2 = i == 0 ? Real(0) : t.off[i - 1] * t.off[i - 1];
    q = t.diag[i] - shift - (i == 0 ? Real(0) : e2 / q);
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

template <class Real>
std::size_t sturm_count(const SymTridiagonal<Real>& t, Real shift) {
  return sturm_count(t, shift, pivot_floor(t));
}

template <class Real>
Real gershgorin_lower(const SymTridiagonal<Real>& t) {
  Real lo = std::numeric_limits<Real>::max();
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    Real r = 0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < t.diag.size()) r += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
  }
  return lo;
}

inline constexpr double kMaxBracketSpan = 1e6;

/// The k smallest eigenvalues, each bisected to a bracket no wider than tol.
/// The lower end starts at `floor` (any value below the spectrum) and the
/// upper end expands geometrically; failing to enclose k eigenvalues within
/// kMaxBracketSpan of the floor is an error.
template <class Real>
std::vector<Real> eigenvalues_bisection(const SymTridiagonal<Real>& t, int k, Real tol,
                                        Real floor) {
  if (k < 1) throw ParameterError("number of eigenvalues must be >= 1");
  if (!(tol > 0)) throw ParameterError("bisection tolerance must be positive");
  if (std::size_t(k) > t.size()) {
    throw ParameterError("requested " + std::to_string(k) + " eigenvalues of a " +
                         std::to_string(t.size()) + "x" + std::to_string(t.size()) + " matrix");
  }
  const Real pivmin = pivot_floor(t);
  Real lo = floor;
  while (sturm_count(t, lo, pivmin) > 0) {
    lo -= std::max(Real(1), std::abs(lo));
    if (lo < floor - Real(kMaxBracketSpan)) throw NumericError("lower bracket expansion failed");
  }
  Real hi = lo + 1;
  Real step = 1;
  while (sturm_count(t, hi, pivmin) < std::size_t(k)) {
    step *= 2;
    hi = lo + step;
    if (step > Real(kMaxBracketSpan)) {
      throw NumericError("could not bracket " + std::to_string(k) + " eigenvalues within " +
                         std::to_string(kMaxBracketSpan) + " of " + std::to_string(double(lo)));
    }
  }

  std::vector<Real> out;
  out.reserve(k);
  Real left = lo;
  for (int j = 0; j < k; ++j) {
    // invariant: count(a) <= j < count(b)
    Real a = left, b = hi;
    while (b - a > tol) {
      const Real mid = a + (b - a) / 2;
      if (mid <= a || mid >= b) break;
      if (sturm_count(t, mid, pivmin) > std::size_t(j)) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out.push_back(a + (b - a) / 2);
    left = a;
  }
  return out;
}

template <class Real>
std::vector<Real> eigenvalues_bisection(const SymTridiagonal<Real>& t, int k, Real tol) {
  return eigenvalues_bisection(t, k, tol, gershgorin_lower(t));
}

}  // namespace razavy
