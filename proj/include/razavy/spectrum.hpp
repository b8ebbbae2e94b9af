#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "razavy/errors.hpp"
#include "razavy/format.hpp"
#include "razavy/grid.hpp"
#include "razavy/heun_shoot.hpp"
#include "razavy/numerov.hpp"
#include "razavy/potential.hpp"
#include "razavy/tridiagonal.hpp"

namespace razavy {

enum class Backend { fd, numerov, heun_z };

inline const char* to_string(Backend b) {
  switch (b) {
    case Backend::fd: return "fd";
    case Backend::numerov: return "numerov";
    case Backend::heun_z: return "heun-z";
  }
  return "?";
}

inline std::optional<Backend> parse_backend(const std::string& s) {
  if (s == "fd") return Backend::fd;
  if (s == "numerov") return Backend::numerov;
  if (s == "heun-z" || s == "heun_z") return Backend::heun_z;
  return std::nullopt;
}

struct EnergyLevel {
  int index = 0;  // 1-based, global order
  double eps = 0.0;
  Parity parity = Parity::even;
  int nodes = 0;
  Backend backend = Backend::fd;
  double est_error = 0.0;
};

struct Splitting {
  int pair = 0;  // k for the pair (2k-1, 2k)
  double value = 0.0;
};

struct Spectrum {
  PotentialParams params;
  GridSpec grid;  // half grid used for the coarse pass
  std::vector<EnergyLevel> levels;
  std::vector<Splitting> splittings;
  std::vector<std::string> diagnostics;
};

inline constexpr int kMaxLevels = 12;

struct SpectrumOptions {
  Backend backend = Backend::fd;
  std::optional<double> half_width;  // default: default_grid
  int points = kDefaultHalfPoints;   // half-grid points of the coarse pass
  double tol = 1e-10;                // bisection width / root tolerance
  bool count_nodes = true;
  // Solve one parity sector only; levels are then numbered within the sector.
  std::optional<Parity> sector_only;
};

// Raw sector levels on one half grid, no extrapolation.
inline std::vector<double> fd_sector_levels(const PotentialParams& p, const GridSpec& g, int k,
                                            double tol) {
  const auto H = build_hamiltonian(p, g);
  return eigenvalues_bisection(H.op, k, tol, minimum_value(p) - 1.0);
}

namespace detail {

struct SectorLevels {
  std::vector<double> eps;
  std::vector<double> err;
};

inline SectorLevels fd_extrapolated(const PotentialParams& p, GridSpec g, int k, double tol) {
  const auto coarse = fd_sector_levels(p, g, k, tol);
  const auto fine = fd_sector_levels(p, g.refined(), k, tol);
  SectorLevels s;
  for (int i = 0; i < k; ++i) {
    s.eps.push_back((4.0 * fine[i] - coarse[i]) / 3.0);
    s.err.push_back(std::abs(fine[i] - coarse[i]) / 3.0);
  }
  return s;
}

inline SectorLevels numerov_extrapolated(const PotentialParams& p, const GridSpec& g, Parity parity,
                                         int k) {
  const auto coarse = NumerovSolver(p, g).eigenvalues(parity, k);
  const auto fine = NumerovSolver(p, g.refined()).eigenvalues(parity, k);
  SectorLevels s;
  for (int i = 0; i < k; ++i) {
    s.eps.push_back((16.0 * fine[i] - coarse[i]) / 15.0);
    s.err.push_back(std::abs(fine[i] - coarse[i]) / 15.0);
  }
  return s;
}

// Roots of heun_shoot_z next to reference levels of the same sector.
inline SectorLevels heun_levels(const PotentialParams& p, Parity parity, const SectorLevels& ref) {
  const double z_max = default_heun_z_max(p.xi);
  SectorLevels s;
  auto f = [&](double e) { return heun_shoot_z(p, e, z_max, parity); };
  for (std::size_t i = 0; i < ref.eps.size(); ++i) {
    const double e0 = ref.eps[i];
    double d = 1e-6 * std::max(1.0, std::abs(e0));
    double a = e0 - d, b = e0 + d;
    double fa = f(a), fb = f(b);
    while ((fa < 0.0) == (fb < 0.0)) {
      d *= 2.0;
      if (d > 0.1 * std::max(1.0, std::abs(e0))) {
        throw NumericError("heun-z backend found no level near eps = " + fmt9(e0));
      }
      a = e0 - d;
      b = e0 + d;
      fa = f(a);
      fb = f(b);
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(40), iters);
    const double root = 0.5 * (r.first + r.second);
    s.eps.push_back(root);
    s.err.push_back(std::max(std::abs(root - e0), ref.err[i]));
  }
  return s;
}

}  // namespace detail

/// Lowest k levels, merged from independent even and odd half-domain solves.
/// Each sector is solved on N and 2N-1 points and Richardson-extrapolated;
/// the size of the extrapolation correction is reported as est_error.
inline Spectrum spectrum(const PotentialParams& p, int k, const SpectrumOptions& opts = {}) {
  validate(p);
  if (k < 1 || k > kMaxLevels) {
    throw ParameterError("levels must be in [1, " + std::to_string(kMaxLevels) + "], got " +
                         std::to_string(k));
  }
  if (opts.points < kMinGridPoints) {
    throw ParameterError("grid needs at least " + std::to_string(kMinGridPoints) + " points");
  }
  GridSpec g = default_grid(p, k, Sector::even);
  if (opts.half_width) g.half_width = *opts.half_width;
  g.points = opts.points;
  validate(g);

  Spectrum out;
  out.params = p;
  out.grid = g;

  std::map<Parity, detail::SectorLevels> sectors;
  for (Parity par : {Parity::even, Parity::odd}) {
    if (opts.sector_only && *opts.sector_only != par) continue;
    GridSpec gs = g;
    gs.sector = sector_of(par);
    switch (opts.backend) {
      case Backend::fd:
        sectors[par] = detail::fd_extrapolated(p, gs, k, opts.tol);
        break;
      case Backend::numerov:
        sectors[par] = detail::numerov_extrapolated(p, gs, par, k);
        break;
      case Backend::heun_z:
        sectors[par] = detail::heun_levels(p, par, detail::fd_extrapolated(p, gs, k, opts.tol));
        break;
    }
  }

  std::vector<EnergyLevel> merged;
  for (auto& [par, s] : sectors) {
    for (std::size_t i = 0; i < s.eps.size(); ++i) {
      EnergyLevel l;
      l.eps = s.eps[i];
      l.parity = par;
      l.backend = opts.backend;
      l.est_error = s.err[i];
      merged.push_back(l);
    }
  }
  std::sort(merged.begin(), merged.end(), [](const EnergyLevel& a, const EnergyLevel& b) {
    if (a.eps != b.eps) return a.eps < b.eps;
    return a.parity == Parity::even && b.parity == Parity::odd;
  });
  merged.resize(k);
  for (int i = 0; i < k; ++i) merged[i].index = i + 1;

  // even potential: the merged order must alternate even, odd, even, ...
  for (int i = 0; i < k && !opts.sector_only; ++i) {
    const Parity expected = i % 2 == 0 ? Parity::even : Parity::odd;
    if (merged[i].parity != expected) {
      out.diagnostics.push_back("sector interleaving violated at level " + std::to_string(i + 1) +
                                " (eps = " + fmt9(merged[i].eps) + ")");
    }
  }
  if (opts.count_nodes) {
    for (auto& l : merged) {
      l.nodes = eigenfunction(p, l.eps, g, l.parity).nodes;
      const int expected = opts.sector_only
                               ? 2 * (l.index - 1) + (l.parity == Parity::odd ? 1 : 0)
                               : l.index - 1;
      if (l.nodes != expected) {
        out.diagnostics.push_back("level " + std::to_string(l.index) + " has " +
                                  std::to_string(l.nodes) + " nodes");
      }
    }
  }
  out.levels = std::move(merged);

  if (!opts.sector_only && classify_well(p).kind == WellKind::double_well) {
    for (int j = 0; j + 1 < k; j += 2) {
      const auto& lo = out.levels[j];
      const auto& hi = out.levels[j + 1];
      if (lo.parity == Parity::even && hi.parity == Parity::odd) {
        out.splittings.push_back({j / 2 + 1, hi.eps - lo.eps});
      }
    }
  }
  return out;
}

// Sign pattern of eps_i(m+1) - eps_i(m) over a table of levels keyed by m.
struct MonotonicityCell {
  int level = 0;
  int m_from = 0;
  int m_to = 0;
  double eps_from = 0.0;
  double eps_to = 0.0;
};

struct MonotonicityReport {
  double xi = 0.0;
  std::vector<bool> decreasing;                  // per level, index 0 is eps_1
  std::vector<MonotonicityCell> counterexamples;  // eps_i(m_to) >= eps_i(m_from)
};

inline MonotonicityReport monotonicity_report(double xi,
                                              const std::map<int, std::vector<double>>& rows,
                                              int k) {
  MonotonicityReport r;
  r.xi = xi;
  r.decreasing.assign(k, true);
  for (auto it = rows.begin(); it != rows.end(); ++it) {
    const auto next = std::next(it);
    if (next == rows.end()) break;
    for (int i = 0; i < k; ++i) {
      if (i >= int(it->second.size()) || i >= int(next->second.size())) continue;
      if (!(next->second[i] < it->second[i])) {
        r.decreasing[i] = false;
        r.counterexamples.push_back({i + 1, it->first, next->first, it->second[i], next->second[i]});
      }
    }
  }
  return r;
}

inline MonotonicityReport monotonicity_report(double xi, int m_lo, int m_hi, int k,
                                              const SpectrumOptions& opts = {}) {
  if (m_hi < m_lo) throw ParameterError("empty m range");
  std::map<int, std::vector<double>> rows;
  SpectrumOptions o = opts;
  o.count_nodes = false;
  for (int m = m_lo; m <= m_hi; ++m) {
    const auto s = spectrum({m, xi}, k, o);
    for (const auto& l : s.levels) rows[m].push_back(l.eps);
  }
  return monotonicity_report(xi, rows, k);
}

}  // namespace razavy
