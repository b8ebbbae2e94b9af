#pragma once

// Numerov shooting on the half domain [0, L] for a definite parity sector.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "razavy/errors.hpp"
#include "razavy/grid.hpp"
#include "razavy/potential.hpp"
#include "razavy/sampled_function.hpp"

namespace razavy {

struct Eigenfunction {
  SampledFunction samples;  // full domain [-L, L], 2N-1 points
  double eps = 0.0;
  Parity parity = Parity::even;
  int nodes = 0;
};

class NumerovSolver {
 public:
  // The grid is read as a half grid: N points on [0, L].
  NumerovSolver(const PotentialParams& p, const GridSpec& g) : params_(p), grid_(g) {
    validate(p);
    validate(g);
    grid_.sector = Sector::even;
    h_ = g.half_width / (g.points - 1);
    x_ = abscissas(grid_);
    v_.resize(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) v_[i] = scaled_potential(x_[i], p);
    vmin_ = *std::min_element(v_.begin(), v_.end());
    // the three-point weights 1 + h^2 (eps - V) / 12 must stay positive down to the bracket floor
    const double vmax = *std::max_element(v_.begin(), v_.end());
    if (h_ * h_ * (vmax - vmin_ + 1.0) / 12.0 >= 1.0) {
      throw ConfigError("grid too coarse for numerov: h = " + std::to_string(h_) +
                        " against a potential range of " + std::to_string(vmax - vmin_));
    }
  }

  std::size_t size() const { return x_.size(); }
  double step() const { return h_; }
  double potential_floor() const { return vmin_; }

  // Outermost grid index with eps >= V, clamped away from both ends; the
  // middle of the grid when eps is below the whole potential.
  std::size_t matching_index(double eps) const {
    const std::size_t n = x_.size();
    std::size_t idx = n / 2;
    for (std::size_t i = n; i-- > 0;) {
      if (eps >= v_[i]) {
        idx = i;
        break;
      }
    }
    return std::clamp<std::size_t>(idx, 2, n - 3);
  }

  /// Scaled Wronskian of the outward and inward solutions at the matching
  /// point; zero exactly at eigenvalues of the discrete Dirichlet problem.
  double mismatch(double eps, Parity parity) const {
    return mismatch(eps, parity, matching_index(eps));
  }

  double mismatch(double eps, Parity parity, std::size_t match) const {
    std::vector<double> out, in;
    integrate_outward(eps, parity, match + 1, out);
    integrate_inward(eps, match, in);
    const double o0 = out[match], o1 = out[match + 1];
    const double i0 = in[match], i1 = in[match + 1];
    const double norm = std::hypot(o0, o1) * std::hypot(i0, i1);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw NumericError("numerov integration overflowed at eps = " + std::to_string(eps));
    }
    return (o0 * i1 - o1 * i0) / norm;
  }

  /// Sign changes of the outward solution over (0, L]: the number of
  /// sector eigenvalues of the Dirichlet problem below eps.
  int count_below(double eps, Parity parity) const {
    std::vector<double> out;
    integrate_outward(eps, parity, x_.size() - 1, out);
    int changes = 0;
    double prev = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i) {
      if (out[i] == 0.0) continue;
      if (prev != 0.0 && (out[i] < 0.0) != (prev < 0.0)) ++changes;
      prev = out[i];
    }
    return changes;
  }

  /// k lowest eigenvalues of one parity sector: node-count bisection brackets
  /// each level, the Wronskian root refines it.
  std::vector<double> eigenvalues(Parity parity, int k) const {
    if (k < 1) throw ParameterError("number of eigenvalues must be >= 1");
    const double floor = vmin_ - 1.0;
    double hi = floor + 1.0;
    double span = 1.0;
    while (count_below(hi, parity) < k) {
      span *= 2.0;
      hi = floor + span;
      if (span > kMaxBracketSpan) throw NumericError("numerov: could not bracket levels");
    }
    std::vector<double> out;
    out.reserve(k);
    double left = floor;
    for (int j = 0; j < k; ++j) {
      double a = left, b = hi;
      while (b - a > 1e-6 * std::max(1.0, std::abs(a))) {
        const double mid = 0.5 * (a + b);
        if (count_below(mid, parity) > j) b = mid; else a = mid;
      }
      out.push_back(refine(a, b, parity));
      left = a;
    }
    return out;
  }

  /// Root of the mismatch closest to eps within a relative window, if any.
  std::optional<double> root_near(double eps, Parity parity, double window) const {
    const std::size_t match = matching_index(eps);
    const double f0 = mismatch(eps, parity, match);
    if (f0 == 0.0) return eps;
    for (double d = 1e-9 * std::max(1.0, std::abs(eps)); d <= window; d *= 4.0) {
      const double fl = mismatch(eps - d, parity, match);
      const double fr = mismatch(eps + d, parity, match);
      // prefer the nearer side; both may change sign in a tight doublet
      if ((fl < 0.0) != (f0 < 0.0) || (fr < 0.0) != (f0 < 0.0)) {
        std::optional<double> best;
        if ((fl < 0.0) != (f0 < 0.0)) best = solve(eps - d, eps, fl, f0, parity, match);
        if ((fr < 0.0) != (f0 < 0.0)) {
          const double r = solve(eps, eps + d, f0, fr, parity, match);
          if (!best || std::abs(r - eps) < std::abs(*best - eps)) best = r;
        }
        return best;
      }
    }
    return std::nullopt;
  }

  Eigenfunction eigenfunction(double eps, Parity parity) const {
    const std::size_t n = x_.size();
    const std::size_t match = matching_index(eps);
    std::vector<double> out, in;
    integrate_outward(eps, parity, match + 1, out);
    integrate_inward(eps, match, in);
    const double scale = (out[match] * in[match] + out[match + 1] * in[match + 1]) /
                         (in[match] * in[match] + in[match + 1] * in[match + 1]);
    std::vector<double> half(n);
    for (std::size_t i = 0; i <= match; ++i) half[i] = out[i];
    for (std::size_t i = match + 1; i < n; ++i) half[i] = scale * in[i];

    Eigenfunction ef;
    ef.eps = eps;
    ef.parity = parity;
    auto& s = ef.samples;
    s.kind = "wavefunction";
    s.x.resize(2 * n - 1);
    s.value.resize(2 * n - 1);
    const double sign = parity == Parity::even ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      s.x[n - 1 + i] = x_[i];
      s.x[n - 1 - i] = -x_[i];
      s.value[n - 1 + i] = half[i];
      s.value[n - 1 - i] = sign * half[i];
    }
    if (parity == Parity::odd) s.value[n - 1] = 0.0;

    double norm = 0.0;
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
      norm += 0.5 * h_ * (s.value[i] * s.value[i] + s.value[i + 1] * s.value[i + 1]);
    }
    const double inv = 1.0 / std::sqrt(norm);
    for (double& v : s.value) v *= inv;

    double peak = 0.0;
    for (double v : s.value) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 1; i + 1 < s.value.size(); ++i) {
      const double a = std::abs(s.value[i]);
      if (a >= 1e-3 * peak && a >= std::abs(s.value[i - 1]) && a >= std::abs(s.value[i + 1])) {
        if (s.value[i] < 0.0) {
          for (double& v : s.value) v = -v;
        }
        break;
      }
    }
    ef.nodes = count_nodes(s.value, 1e-12 * peak);
    s.metadata = {{"m", std::to_string(params_.m)},
                  {"xi", fmt9(params_.xi)},
                  {"eps", fmt9(eps)},
                  {"parity", to_string(parity)},
                  {"nodes", std::to_string(ef.nodes)}};
    return ef;
  }

  // Sign changes between successive samples above the noise floor.
  static int count_nodes(const std::vector<double>& v, double floor) {
    int nodes = 0;
    int prev_sign = 0;
    for (double x : v) {
      if (std::abs(x) <= floor) continue;
      const int s = x < 0.0 ? -1 : 1;
      if (prev_sign != 0 && s != prev_sign) ++nodes;
      prev_sign = s;
    }
    return nodes;
  }

 private:
  static constexpr double kRescale = 1e150;

  double weight(double eps, std::size_t i) const { return 1.0 + h_ * h_ * (eps - v_[i]) / 12.0; }

  // psi_0 .. psi_last
  void integrate_outward(double eps, Parity parity, std::size_t last, std::vector<double>& psi) const {
    psi.assign(last + 1, 0.0);
    if (parity == Parity::even) {
      psi[0] = 1.0;
      psi[1] = (12.0 - 10.0 * weight(eps, 0)) * psi[0] / (2.0 * weight(eps, 1));
    } else {
      psi[0] = 0.0;
      psi[1] = h_;
    }
    double w_prev = weight(eps, 0), w_cur = weight(eps, 1);
    for (std::size_t i = 1; i < last; ++i) {
      const double w_next = weight(eps, i + 1);
      psi[i + 1] = ((12.0 - 10.0 * w_cur) * psi[i] - w_prev * psi[i - 1]) / w_next;
      w_prev = w_cur;
      w_cur = w_next;
      if (std::abs(psi[i + 1]) > kRescale) {
        for (std::size_t j = 0; j <= i + 1; ++j) psi[j] /= kRescale;
      }
    }
    if (!std::isfinite(psi[last])) throw NumericError("numerov outward integration overflowed");
  }

  // psi_first .. psi_{N-1}, Dirichlet at L; entries below `first` unused.
  void integrate_inward(double eps, std::size_t first, std::vector<double>& psi) const {
    const std::size_t n = x_.size();
    psi.assign(n, 0.0);
    psi[n - 1] = 0.0;
    psi[n - 2] = 1.0;
    double w_next = weight(eps, n - 1), w_cur = weight(eps, n - 2);
    for (std::size_t i = n - 2; i > first; --i) {
      const double w_prev = weight(eps, i - 1);
      psi[i - 1] = ((12.0 - 10.0 * w_cur) * psi[i] - w_next * psi[i + 1]) / w_prev;
      w_next = w_cur;
      w_cur = w_prev;
      if (std::abs(psi[i - 1]) > kRescale) {
        for (std::size_t j = i - 1; j < n; ++j) psi[j] /= kRescale;
      }
    }
    if (!std::isfinite(psi[first])) throw NumericError("numerov inward integration overflowed");
  }

  double solve(double a, double b, double fa, double fb, Parity parity, std::size_t match) const {
    std::uintmax_t iters = 200;
    auto f = [&](double e) { return mismatch(e, parity, match); };
    const auto r = boost::math::tools::toms748_solve(
        f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
  }

  // Bracket [a, b] holds exactly one sector level (node count changes once).
  double refine(double a, double b, Parity parity) const {
    const std::size_t match = matching_index(0.5 * (a + b));
    double fa = mismatch(a, parity, match), fb = mismatch(b, parity, match);
    if ((fa < 0.0) != (fb < 0.0)) return solve(a, b, fa, fb, parity, match);
    // matching point moved inside the bracket; fall back to pure node bisection
    while (b - a > 1e-13 * std::max(1.0, std::abs(a))) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (count_below(mid, parity) > count_below(a, parity)) b = mid; else a = mid;
    }
    return 0.5 * (a + b);
  }

  PotentialParams params_;
  GridSpec grid_;
  double h_ = 0.0;
  double vmin_ = 0.0;
  std::vector<double> x_;
  std::vector<double> v_;
};

inline double numerov_shoot(const PotentialParams& p, double eps, const GridSpec& g, Parity parity) {
  return NumerovSolver(p, g).mismatch(eps, parity);
}

inline std::vector<double> numerov_eigenvalues(const PotentialParams& p, const GridSpec& g,
                                               Parity parity, int k) {
  return NumerovSolver(p, g).eigenvalues(parity, k);
}

inline Eigenfunction eigenfunction(const PotentialParams& p, double eps, const GridSpec& g,
                                   Parity parity) {
  NumerovSolver s(p, g);
  const double window = 1e-4 * std::max(1.0, std::abs(eps));
  const auto root = s.root_near(eps, parity, window);
  if (!root) {
    throw ConsistencyError("eps = " + fmt9(eps) + " is not a " + to_string(parity) +
                           " eigenvalue on this grid");
  }
  return s.eigenfunction(*root, parity);
}

/// Parity is taken from whichever sector has a level closest to eps.
inline Eigenfunction eigenfunction(const PotentialParams& p, double eps, const GridSpec& g) {
  NumerovSolver s(p, g);
  const double window = 1e-4 * std::max(1.0, std::abs(eps));
  const auto even = s.root_near(eps, Parity::even, window);
  const auto odd = s.root_near(eps, Parity::odd, window);
  if (!even && !odd) {
    throw ConsistencyError("eps = " + fmt9(eps) + " is not an eigenvalue on this grid");
  }
  if (even && (!odd || std::abs(*even - eps) <= std::abs(*odd - eps))) {
    return s.eigenfunction(*even, Parity::even);
  }
  return s.eigenfunction(*odd, Parity::odd);
}

}  // namespace razavy
