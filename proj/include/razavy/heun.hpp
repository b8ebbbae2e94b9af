#pragma once

// Confluent Heun machinery for the Razavy problem.
//
// With psi(x) = exp(+xi cosh^2(x) / 2) y(x) and z = cosh^2(x) the
// Schroedinger equation becomes the confluent Heun equation
//
//   y'' + (alpha + (1+beta)/z + (1+gamma)/(z-1)) y' + (mu/z + nu/(z-1)) y = 0
//
// with alpha = xi, beta = gamma = -1/2, mu = (xi(m+2) - eps)/4 and
// nu = (xi(m+2) + eps)/4. The decaying envelope exp(-xi cosh^2(x) / 2) gives
// the same form with alpha = -xi and m+2 replaced by m.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "razavy/errors.hpp"

namespace razavy {

struct HeunParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double mu = 0.0;
  double nu = 0.0;
};

enum class Envelope { growing, decaying };

// delta and eta of the H_c(alpha, beta, gamma, delta, eta; z) parametrisation
// from the (alpha, beta, gamma, mu, nu) form of the equation.
inline double heun_delta(double alpha, double beta, double gamma, double mu, double nu) {
  return mu + nu - 0.5 * alpha * (beta + gamma + 2.0);
}

inline double heun_eta(double alpha, double beta, double gamma, double mu) {
  return 0.5 * alpha * (beta + 1.0) - mu - 0.5 * (beta + gamma + beta * gamma);
}

inline HeunParams make_heun_params(double alpha, double beta, double gamma, double mu, double nu) {
  HeunParams h;
  h.alpha = alpha;
  h.beta = beta;
  h.gamma = gamma;
  h.mu = mu;
  h.nu = nu;
  h.delta = heun_delta(alpha, beta, gamma, mu, nu);
  h.eta = heun_eta(alpha, beta, gamma, mu);
  return h;
}

inline HeunParams map_problem_to_heun(int m, double xi, double eps,
                                      Envelope envelope = Envelope::growing) {
  if (!(xi > 0.0)) throw ParameterError("xi must be positive");
  if (envelope == Envelope::growing) {
    const double s = xi * (m + 2);
    return make_heun_params(xi, -0.5, -0.5, (s - eps) / 4.0, (s + eps) / 4.0);
  }
  const double s = xi * m;
  return make_heun_params(-xi, -0.5, -0.5, (s - eps) / 4.0, (s + eps) / 4.0);
}

struct RecurrenceCoeffs {
  double a, b, c;
};

// A_n v_n = B_n v_{n-1} + C_n v_{n-2}
inline RecurrenceCoeffs recurrence_coeffs(const HeunParams& h, int n) {
  if (n < 1) throw ParameterError("recurrence index must be >= 1");
  const double nn = n;
  const double a = 1.0 + h.beta / nn;
  if (a == 0.0) {
    throw ParameterError("degenerate recurrence: A_" + std::to_string(n) +
                         " = 0 (beta is a negative integer)");
  }
  const double bg = h.beta + h.gamma;
  const double b = 1.0 + (bg - h.alpha - 1.0) / nn +
                   (h.eta - 0.5 * (bg - h.alpha) - 0.5 * h.alpha * h.beta +
                    0.5 * h.beta * h.gamma) /
                       (nn * nn);
  // alpha * (delta/alpha + ...) written without the division so alpha = 0 is fine
  const double c = (h.delta + h.alpha * (0.5 * bg + nn - 1.0)) / (nn * nn);
  return {a, b, c};
}

// v_0 .. v_{count-1} of the series normalised to v_0 = 1.
inline std::vector<double> heun_coefficients(const HeunParams& h, int count) {
  std::vector<double> v;
  if (count <= 0) return v;
  v.reserve(count);
  double prev2 = 0.0;  // v_{-1}
  double prev1 = 1.0;  // v_0
  v.push_back(1.0);
  for (int n = 1; n < count; ++n) {
    const auto r = recurrence_coeffs(h, n);
    const double vn = (r.b * prev1 + r.c * prev2) / r.a;
    v.push_back(vn);
    prev2 = prev1;
    prev1 = vn;
  }
  return v;
}

struct SeriesResult {
  double value = 0.0;
  int terms_used = 0;
  bool converged = false;
  // |last retained term| / max(1, |value|)
  double tail_bound = 0.0;
};

inline constexpr double kUnitDiskMargin = 0.95;

inline SeriesResult heun_series(const HeunParams& h, double z, double tol = 1e-15,
                                int max_terms = 20000) {
  if (!(std::abs(z) <= kUnitDiskMargin)) {
    throw DomainError("series evaluation needs |z| <= " + std::to_string(kUnitDiskMargin) +
                      " inside the unit disk, got z = " + std::to_string(z));
  }
  if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
  if (max_terms < 2) throw ParameterError("max_terms must be at least 2");

  SeriesResult res;
  double sum = 1.0;
  double prev2 = 0.0, prev1 = 1.0;
  double zn = 1.0;
  int small_run = 0;
  double last = 1.0;
  int n = 1;
  for (; n < max_terms; ++n) {
    const auto r = recurrence_coeffs(h, n);
    const double vn = (r.b * prev1 + r.c * prev2) / r.a;
    prev2 = prev1;
    prev1 = vn;
    zn *= z;
    const double term = vn * zn;
    sum += term;
    last = std::abs(term);
    if (!std::isfinite(sum)) {
      throw NumericError("heun series overflowed after " + std::to_string(n) + " terms");
    }
    small_run = last <= tol * std::max(1.0, std::abs(sum)) ? small_run + 1 : 0;
    if (small_run >= 2) {
      res.converged = true;
      ++n;
      break;
    }
  }
  res.value = sum;
  res.terms_used = n;
  res.tail_bound = last / std::max(1.0, std::abs(sum));
  return res;
}

// Integer m solving mu + nu + N alpha = 0 for the growing-envelope map,
// i.e. xi(m+2)/2 + N xi = 0. Independent of xi.
inline int termination_mass_condition(int n, double xi) {
  if (n < 1) throw ParameterError("termination order N must be >= 1");
  if (!(xi > 0.0)) throw ParameterError("xi must be positive");
  return -2 * (n + 1);
}

inline double termination_p(int k, const HeunParams& h) {
  return double(k - 1) * (k + h.beta + h.gamma);
}

// Entries of the (N+1)x(N+1) tridiagonal termination matrix; rows k = 0..N.
struct TerminationBands {
  std::vector<double> diag;   // mu - p_{k+1} + k alpha
  std::vector<double> upper;  // (k+1)(k+1+beta), entry (k, k+1)
  std::vector<double> lower;  // (N-k) alpha, entry (k+1, k)
};

inline TerminationBands termination_bands(int n, double mu, const HeunParams& h) {
  if (n < 0) throw ParameterError("termination order N must be >= 0");
  TerminationBands t;
  t.diag.resize(n + 1);
  t.upper.resize(n);
  t.lower.resize(n);
  for (int k = 0; k <= n; ++k) t.diag[k] = mu - termination_p(k + 1, h) + k * h.alpha;
  for (int k = 0; k < n; ++k) {
    t.upper[k] = (k + 1) * (k + 1 + h.beta);
    t.lower[k] = (n - k) * h.alpha;
  }
  return t;
}

// Delta_{N+1}(mu) by the leading-principal-minor recurrence. The running pair
// is rescaled by powers of two so large N does not overflow mid-way.
inline double delta_determinant(int n, double mu, const HeunParams& h) {
  const auto t = termination_bands(n, mu, h);
  double d_prev = 1.0;
  double d_cur = t.diag[0];
  int exponent = 0;
  for (int k = 1; k <= n; ++k) {
    const double next = t.diag[k] * d_cur - t.upper[k - 1] * t.lower[k - 1] * d_prev;
    d_prev = d_cur;
    d_cur = next;
    const double big = std::max(std::abs(d_cur), std::abs(d_prev));
    if (big > 0x1p+256 || (big < 0x1p-256 && big > 0.0)) {
      int e = 0;
      std::frexp(big, &e);
      d_cur = std::ldexp(d_cur, -e);
      d_prev = std::ldexp(d_prev, -e);
      exponent += e;
    }
  }
  return std::ldexp(d_cur, exponent);
}

enum class FrobeniusExponent { zero, one_half };

inline double exponent_value(FrobeniusExponent s) {
  return s == FrobeniusExponent::zero ? 0.0 : 0.5;
}

// Local solution y = (z-1)^s sum_k c_k (z-1)^k at the regular singular point
// z = 1, c_0 = 1. With t = z - 1 the equation multiplied by z(z-1) gives
//
//   c_n (n+s)(n+s+gamma) = -[(n+s-1)(n+s+alpha+beta+gamma) + nu] c_{n-1}
//                          - [alpha (n+s-2) + mu + nu] c_{n-2}.
inline std::vector<double> frobenius_seed_at_one(const HeunParams& h, FrobeniusExponent exponent,
                                                 int n_terms) {
  if (n_terms < 1) throw ParameterError("need at least one Frobenius term");
  if (std::abs(h.gamma + 0.5) > 1e-14) {
    throw ParameterError("Frobenius seed requires gamma = -1/2 (exponents 0 and 1/2)");
  }
  const double s = exponent_value(exponent);
  const double abg = h.alpha + h.beta + h.gamma;
  std::vector<double> c(n_terms, 0.0);
  c[0] = 1.0;
  for (int n = 1; n < n_terms; ++n) {
    const double ns = n + s;
    const double lead = ns * (ns + h.gamma);
    if (lead == 0.0) throw ParameterError("resonant Frobenius exponents");
    double rhs = -((ns - 1.0) * (ns + abg) + h.nu) * c[n - 1];
    if (n >= 2) rhs -= (h.alpha * (ns - 2.0) + h.mu + h.nu) * c[n - 2];
    c[n] = rhs / lead;
  }
  return c;
}

struct LocalValue {
  double value;
  double derivative;
};

// y and dy/dz of the Frobenius series at z = 1 + t, t > 0.
inline LocalValue evaluate_frobenius(const std::vector<double>& c, FrobeniusExponent exponent,
                                     double t) {
  if (!(t > 0.0)) throw DomainError("Frobenius series evaluated at z <= 1");
  const double s = exponent_value(exponent);
  double p = 0.0, dp = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) {
    dp = dp * t + p;
    p = p * t + c[k];
  }
  const double ts = std::pow(t, s);
  return {ts * p, ts * dp + (s == 0.0 ? 0.0 : s * ts / t * p)};
}

}  // namespace razavy
