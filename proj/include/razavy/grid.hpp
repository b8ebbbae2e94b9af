#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "razavy/errors.hpp"
#include "razavy/potential.hpp"
#include "razavy/tridiagonal.hpp"

namespace razavy {

enum class Parity { even, odd };

inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

// even/odd are half-domain grids on [0, L]; full covers [-L, L].
enum class Sector { even, odd, full };

inline Sector sector_of(Parity p) { return p == Parity::even ? Sector::even : Sector::odd; }

struct GridSpec {
  double half_width = 0.0;
  int points = 0;
  Sector sector = Sector::full;

  double step() const {
    return sector == Sector::full ? 2.0 * half_width / (points - 1) : half_width / (points - 1);
  }
  // Same domain, step halved.
  GridSpec refined() const { return {half_width, 2 * points - 1, sector}; }
};

inline constexpr int kDefaultHalfPoints = 2001;
inline constexpr int kDefaultFullPoints = 4001;
inline constexpr int kMinGridPoints = 64;

inline void validate(const GridSpec& g) {
  if (!(g.half_width > 0.0) || !std::isfinite(g.half_width)) {
    throw ParameterError("grid half-width must be positive");
  }
  if (g.points < 3) throw ParameterError("grid needs at least 3 points");
  if (4.0 * g.half_width > kMaxCoshArgument) {
    throw RangeError("grid half-width " + std::to_string(g.half_width) +
                     " exceeds the potential overflow guard");
  }
}

// Rigorous upper bound for the k-th eigenvalue: Dirichlet walls at +-a only
// raise levels, and inside the box V <= max(V(0), V(a)) because V is even with
// at most one interior maximum at the origin. Minimised over a coarse scan.
inline double upper_level_estimate(const PotentialParams& p, int k) {
  const double a_max = kMaxCoshArgument / 4.0;
  const double v0 = scaled_potential(0.0, p);
  double best = std::numeric_limits<double>::infinity();
  for (double a = 0.05; a <= a_max; a += 0.01) {
    const double box = k * std::numbers::pi / (2.0 * a);
    const double va = scaled_potential(a, p);
    best = std::min(best, box * box + std::max(v0, va));
    if (va > best) break;  // V only grows from here
  }
  return best;
}

inline constexpr double kDefaultMargin = 50.0;
// Required WKB attenuation exp(-40) of the highest level between its outer
// turning point and the Dirichlet wall.
inline constexpr double kDefaultDecayExponent = 40.0;

inline GridSpec default_grid(const PotentialParams& p, int k, Sector sector = Sector::full) {
  validate(p);
  if (k < 1) throw ParameterError("number of requested levels must be >= 1");
  const double e_up = upper_level_estimate(p, k);
  const double l_max = kMaxCoshArgument / 4.0;
  const double dx = 1e-3;

  // walk outward from the outermost turning point of e_up
  double x = 0.0;
  while (x < l_max && !(scaled_potential(x, p) > e_up && scaled_potential(x + dx, p) >
                                                               scaled_potential(x, p))) {
    x += dx;
  }
  double decay = 0.0;
  while (x + dx <= l_max) {
    const double v = scaled_potential(x, p);
    if (decay >= kDefaultDecayExponent && v >= e_up + kDefaultMargin) break;
    decay += dx * std::sqrt(std::max(0.0, v - e_up));
    x += dx;
  }
  if (decay < kDefaultDecayExponent || scaled_potential(x, p) < e_up + kDefaultMargin) {
    throw ConfigError("cannot fit " + std::to_string(k) +
                      " levels inside the overflow guard |4L| <= " +
                      std::to_string(kMaxCoshArgument));
  }
  // round up to a tidy value
  const double half_width = std::min(l_max, std::ceil(x * 100.0) / 100.0);
  return {half_width, sector == Sector::full ? kDefaultFullPoints : kDefaultHalfPoints, sector};
}

inline std::vector<double> abscissas(const GridSpec& g) {
  std::vector<double> x(g.points);
  const int last = g.points - 1;
  for (int i = 0; i < g.points; ++i) {
    x[i] = g.sector == Sector::full ? g.half_width * double(2 * i - last) / last
                                    : g.half_width * double(i) / last;
  }
  return x;
}

struct DiscreteHamiltonian {
  std::vector<double> x;  // abscissas of the unknowns
  SymTridiagonal<double> op;
};

/// Second-order central differences for -d^2/dx^2 + V with Dirichlet walls
/// at +-L. On half grids the even sector reflects the stencil at the origin
/// (psi_{-1} = psi_1, a doubled coupling in row 0) and the odd sector pins
/// psi(0) = 0. The doubled coupling makes the matrix non-symmetric; rescaling
/// psi_0 by sqrt(2) restores symmetry with the same spectrum.
template <class Potential>
DiscreteHamiltonian build_hamiltonian(const GridSpec& g, Potential&& potential) {
  validate(g);
  const auto x = abscissas(g);
  const double h = g.step();
  const double kin = 1.0 / (h * h);
  std::size_t first = 1;
  if (g.sector == Sector::even) first = 0;
  const std::size_t last = x.size() - 1;  // Dirichlet wall, excluded
  DiscreteHamiltonian H;
  H.x.assign(x.begin() + first, x.begin() + last);
  const std::size_t n = H.x.size();
  if (n == 0) throw ParameterError("grid has no interior points");
  H.op.diag.resize(n);
  H.op.off.assign(n - 1, -kin);
  for (std::size_t i = 0; i < n; ++i) H.op.diag[i] = 2.0 * kin + potential(H.x[i]);
  if (g.sector == Sector::even && n > 1) H.op.off[0] = -std::numbers::sqrt2 * kin;
  return H;
}

inline DiscreteHamiltonian build_hamiltonian(const PotentialParams& p, const GridSpec& g) {
  validate(p);
  return build_hamiltonian(g, [&p](double x) { return scaled_potential(x, p); });
}

}  // namespace razavy
