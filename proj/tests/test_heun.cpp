#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "razavy/heun.hpp"

using namespace razavy;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// confluent Heun equation as y'' + P y' + Q y = 0
double p_coeff(const HeunParams& h, double z) {
  return h.alpha + (1.0 + h.beta) / z + (1.0 + h.gamma) / (z - 1.0);
}
double q_coeff(const HeunParams& h, double z) { return h.mu / z + h.nu / (z - 1.0); }

// first two series coefficients from matching powers z^0, z^1 by hand
std::array<double, 2> leading_coeffs(const HeunParams& h) {
  const double v1 = -h.mu / (1.0 + h.beta);
  const double v2 =
      (v1 * (2.0 + h.beta + h.gamma - h.alpha - h.mu) + h.mu + h.nu) / (2.0 * (2.0 + h.beta));
  return {v1, v2};
}

double ode_oracle(const HeunParams& h, double z_end) {
  using State = std::array<double, 2>;
  const auto [v1, v2] = leading_coeffs(h);
  const double z0 = std::copysign(1e-5, z_end);
  State y{1.0 + v1 * z0 + v2 * z0 * z0, v1 + 2.0 * v2 * z0};
  auto rhs = [&](const State& s, State& ds, double z) {
    ds[0] = s[1];
    ds[1] = -p_coeff(h, z) * s[1] - q_coeff(h, z) * s[0];
  };
  namespace odeint = boost::numeric::odeint;
  odeint::integrate_adaptive(
      odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>()), rhs, y, z0, z_end,
      std::copysign(1e-6, z_end));
  return y[0];
}

struct Derivs {
  double y, dy, d2y;
};

Derivs series_derivs(const std::vector<double>& v, double z) {
  Derivs d{0, 0, 0};
  for (std::size_t n = v.size(); n-- > 0;) {
    d.d2y = d.d2y * z + 2.0 * d.dy;
    d.dy = d.dy * z + d.y;
    d.y = d.y * z + v[n];
  }
  return d;
}

}  // namespace

TEST_CASE("problem-to-Heun map parameters") {
  const auto h = map_problem_to_heun(1, 3.0, -4.0);
  CHECK(h.alpha == 3.0);
  CHECK(h.beta == -0.5);
  CHECK(h.gamma == -0.5);
  CHECK_THAT(h.mu, WithinAbs(3.25, 1e-15));
  CHECK_THAT(h.nu, WithinAbs(1.25, 1e-15));
  CHECK_THAT(h.delta, WithinAbs(3.0, 1e-15));
  CHECK_THAT(h.eta, WithinAbs(-2.125, 1e-15));

  const auto d = map_problem_to_heun(0, 3.0, 0.0, Envelope::decaying);
  CHECK(d.alpha == -3.0);
  CHECK(d.mu == 0.0);
  CHECK(d.nu == 0.0);
  CHECK_THROWS_AS(map_problem_to_heun(0, 0.0, 0.0), ParameterError);
}

TEST_CASE("map identities over random parameters") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> md(-50, 50);
  std::uniform_real_distribution<double> xid(0.01, 20.0), ed(-500.0, 500.0);
  for (int i = 0; i < 10000; ++i) {
    const int m = md(rng);
    const double xi = xid(rng), eps = ed(rng);
    const auto h = map_problem_to_heun(m, xi, eps);
    const double scale = 1.0 + std::abs(eps) + std::abs(m * xi);
    REQUIRE_THAT(h.mu + h.nu, WithinAbs(xi * (m + 2) / 2.0, 1e-13 * scale));
    REQUIRE_THAT(h.nu - h.mu, WithinAbs(eps / 2.0, 1e-13 * scale));
    REQUIRE_THAT(h.delta, WithinAbs((m + 1) * xi / 2.0, 1e-13 * scale));
    REQUIRE_THAT(h.eta, WithinAbs((-2.0 * (m + 1) * xi + 2.0 * eps + 3.0) / 8.0, 1e-13 * scale));
  }
}

TEST_CASE("recurrence coefficients") {
  const auto h = map_problem_to_heun(0, 3.0, 0.0);
  const auto r1 = recurrence_coeffs(h, 1);
  CHECK_THAT(r1.a, WithinAbs(0.5, 1e-15));
  // same coefficient with alpha factored out
  const double c1 = h.alpha * (h.delta / h.alpha + 0.5 * (h.beta + h.gamma) + 0.0);
  CHECK_THAT(r1.c, WithinAbs(c1, 1e-14));

  const auto big = recurrence_coeffs(h, 1000000);
  CHECK_THAT(big.a, WithinAbs(1.0, 1e-6));
  CHECK_THAT(big.b, WithinAbs(1.0, 1e-5));
  CHECK_THAT(big.c, WithinAbs(0.0, 1e-5));

  CHECK_THROWS_AS(recurrence_coeffs(h, 0), ParameterError);
  HeunParams bad = h;
  bad.beta = -1.0;
  CHECK_THROWS_AS(recurrence_coeffs(bad, 1), ParameterError);
}

TEST_CASE("series leading coefficients match hand expansion") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> md(-6, 12);
  std::uniform_real_distribution<double> xid(0.5, 5.0), ed(-100.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    const auto h = map_problem_to_heun(md(rng), xid(rng), ed(rng));
    const auto v = heun_coefficients(h, 3);
    const auto [v1, v2] = leading_coeffs(h);
    CHECK_THAT(v[1], WithinAbs(v1, 1e-12 * (1.0 + std::abs(v1))));
    CHECK_THAT(v[2], WithinAbs(v2, 1e-12 * (1.0 + std::abs(v2))));
  }
}

TEST_CASE("series at the origin is exactly one") {
  const auto r = heun_series(map_problem_to_heun(3, 2.0, 7.5), 0.0);
  CHECK(r.value == 1.0);
  CHECK(r.converged);
}

TEST_CASE("series at z = 0.5 against ODE integration") {
  const auto h = map_problem_to_heun(0, 3.0, 0.0);
  const auto r = heun_series(h, 0.5);
  REQUIRE(r.converged);
  CHECK(r.tail_bound <= 1e-15);
  CHECK_THAT(r.value, WithinAbs(ode_oracle(h, 0.5), 1e-8));
  CHECK_THAT(r.value, WithinAbs(std::exp(-1.5), 1e-13));  // exp(-xi z) solves this case

  const auto h2 = map_problem_to_heun(2, 1.7, -3.3);
  CHECK_THAT(heun_series(h2, 0.6).value, WithinRel(ode_oracle(h2, 0.6), 1e-8));
  CHECK_THAT(heun_series(h2, -0.6).value, WithinRel(ode_oracle(h2, -0.6), 1e-8));
}

TEST_CASE("decaying map at the m=0 ground state gives the constant") {
  const auto h = map_problem_to_heun(0, 3.0, 0.0, Envelope::decaying);
  CHECK(heun_series(h, 0.7).value == 1.0);
}

TEST_CASE("series domain and budget") {
  const auto h = map_problem_to_heun(0, 3.0, 0.0);
  CHECK_THROWS_AS(heun_series(h, 0.99), DomainError);
  CHECK_THROWS_AS(heun_series(h, -0.96), DomainError);
  const auto r = heun_series(map_problem_to_heun(1, 3.0, 10.0), 0.9, 1e-15, 5);
  CHECK_FALSE(r.converged);
  CHECK(r.terms_used == 5);
}

TEST_CASE("truncated series satisfies the Heun equation") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> md(-6, 12);
  std::uniform_real_distribution<double> xid(0.5, 5.0), ed(-60.0, 110.0), zd(-0.8, 0.8);
  for (int i = 0; i < 100; ++i) {
    const auto h = map_problem_to_heun(md(rng), xid(rng), ed(rng));
    const double z = zd(rng);
    const auto r = heun_series(h, z);
    REQUIRE(r.converged);
    const auto d = series_derivs(heun_coefficients(h, 4000), z);
    CHECK_THAT(d.y, WithinAbs(r.value, 1e-12 * (1.0 + std::abs(r.value))));
    const double residual = d.d2y + p_coeff(h, z) * d.dy + q_coeff(h, z) * d.y;
    CHECK(std::abs(residual) < 1e-8 * (1.0 + std::abs(r.value)));
  }
}

TEST_CASE("termination mass condition") {
  CHECK(termination_mass_condition(1, 3.0) == -4);
  CHECK(termination_mass_condition(2, 3.0) == -6);
  for (int n = 1; n <= 20; ++n) {
    CHECK(termination_mass_condition(n, 0.5) == termination_mass_condition(n, 7.0));
    CHECK(termination_mass_condition(n, 3.0) <= -4);
    CHECK(termination_mass_condition(n, 3.0) % 2 == 0);
    // mu + nu + N alpha = 0 at the returned m
    const auto h = map_problem_to_heun(termination_mass_condition(n, 3.0), 3.0, 1.234);
    CHECK_THAT(h.mu + h.nu + n * h.alpha, WithinAbs(0.0, 1e-12));
  }
  CHECK_THROWS_AS(termination_mass_condition(0, 3.0), ParameterError);
}

namespace {

// dense determinant by partial-pivot Gaussian elimination
double dense_det(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

// the termination matrix written out entry by entry
std::vector<std::vector<double>> termination_matrix(int n, double mu, const HeunParams& h) {
  std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 0.0));
  for (int k = 0; k <= n; ++k) {
    const int j = k + 1;
    a[k][k] = mu - (j - 1) * (j + h.beta + h.gamma) + k * h.alpha;
    if (k < n) {
      a[k][k + 1] = (k + 1) * (k + 1 + h.beta);
      a[k + 1][k] = (n - k) * h.alpha;
    }
  }
  return a;
}

}  // namespace

TEST_CASE("termination determinant against dense oracle") {
  const auto h = map_problem_to_heun(-4, 3.0, 0.0);
  CHECK(delta_determinant(0, 2.5, h) == 2.5);
  // 2x2 by hand: (mu)(mu - (2 + beta + gamma) + alpha) - (1 + beta) alpha
  const double mu = 1.75;
  CHECK_THAT(delta_determinant(1, mu, h),
             WithinRel(mu * (mu - (2.0 + h.beta + h.gamma) + h.alpha) - (1.0 + h.beta) * h.alpha, 1e-14));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mud(-20.0, 20.0), xid(0.5, 5.0);
  for (int n = 1; n <= 6; ++n) {
    for (int i = 0; i < 100; ++i) {
      const auto hh = map_problem_to_heun(termination_mass_condition(n, 3.0), xid(rng), 0.0);
      const double m = mud(rng);
      const double dense = dense_det(termination_matrix(n, m, hh));
      CHECK_THAT(delta_determinant(n, m, hh), WithinRel(dense, 1e-10));
    }
  }
}

TEST_CASE("termination determinant stays finite at large order") {
  const auto h = map_problem_to_heun(0, 3.0, 0.0);
  const double d = delta_determinant(60, 5.0, h);
  CHECK(std::isfinite(d));
  CHECK_THAT(d, WithinRel(dense_det(termination_matrix(60, 5.0, h)), 1e-8));
}

namespace {

// Frobenius coefficients from the z-1 = t expansion of the transformed equation
//   4(1+t) t y'' + [4(1+t)(xi t + 1) - 2] y' + ((m+2) xi (1 + 2t) + eps) y = 0
// solved as a lower-triangular system, y = t^s sum c_k t^k.
std::vector<double> frobenius_oracle(int m, double xi, double eps, double s, int n) {
  std::vector<double> c(n, 0.0);
  c[0] = 1.0;
  const double a0 = (m + 2) * xi + eps, a1 = 2.0 * (m + 2) * xi;
  for (int k = 1; k < n; ++k) {
    const double r = k + s;
    // t^{r-1} coefficient: 4 r(r-1) c_k + 2 r c_k + from c_{k-1}: 4 (r-1)(r-2) + 4 (r-1)(1+xi) + a0
    const double lead = 4.0 * r * (r - 1.0) + 2.0 * r;
    double rhs = -(4.0 * (r - 1.0) * (r - 2.0) + 4.0 * (r - 1.0) * (1.0 + xi) + a0) * c[k - 1];
    if (k >= 2) rhs -= (4.0 * xi * (r - 2.0) + a1) * c[k - 2];
    c[k] = rhs / lead;
  }
  return c;
}

}  // namespace

TEST_CASE("Frobenius seed at z = 1") {
  const auto h = map_problem_to_heun(0, 3.0, 0.0);
  const auto c = frobenius_seed_at_one(h, FrobeniusExponent::zero, 12);
  CHECK(c[0] == 1.0);
  CHECK_THAT(c[1], WithinAbs(-3.0, 1e-14));
  double fact = 1.0;
  for (int k = 1; k < 12; ++k) {
    fact *= k;
    CHECK_THAT(c[k], WithinRel(std::pow(-3.0, k) / fact, 1e-12));
  }

  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> md(-6, 12);
  std::uniform_real_distribution<double> xid(0.5, 5.0), ed(-50.0, 100.0);
  for (int i = 0; i < 50; ++i) {
    const int m = md(rng);
    const double xi = xid(rng), eps = ed(rng);
    const auto hh = map_problem_to_heun(m, xi, eps);
    for (auto [ex, s] : {std::pair{FrobeniusExponent::zero, 0.0}, std::pair{FrobeniusExponent::one_half, 0.5}}) {
      const auto got = frobenius_seed_at_one(hh, ex, 10);
      const auto want = frobenius_oracle(m, xi, eps, s, 10);
      for (int k = 0; k < 10; ++k) CHECK_THAT(got[k], WithinAbs(want[k], 1e-10 * (1.0 + std::abs(want[k]))));
    }
  }
  CHECK_THROWS_AS(frobenius_seed_at_one(map_problem_to_heun(0, 3.0, 0.0), FrobeniusExponent::zero, 0),
                  ParameterError);
}

TEST_CASE("Frobenius series solves the transformed equation near z = 1") {
  const int m = 2;
  const double xi = 3.0, eps = 4.0;
  const auto h = map_problem_to_heun(m, xi, eps);
  for (auto ex : {FrobeniusExponent::zero, FrobeniusExponent::one_half}) {
    const auto c = frobenius_seed_at_one(h, ex, 24);
    for (double z = 1.001; z <= 1.05; z += 0.007) {
      const double t = z - 1.0, s = ex == FrobeniusExponent::zero ? 0.0 : 0.5;
      const auto y = evaluate_frobenius(c, ex, t);
      double d2 = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) {
        const double r = k + s;
        d2 += c[k] * r * (r - 1.0) * std::pow(t, r - 2.0);
      }
      const double res = d2 + (xi + 0.5 * (1.0 / z + 1.0 / (z - 1.0))) * y.derivative +
                         ((m + 2) * xi * (2.0 * z - 1.0) + eps) / (4.0 * z * (z - 1.0)) * y.value;
      const double scale = std::abs(d2) + std::abs(y.derivative) / t + std::abs(y.value) / t;
      CHECK(std::abs(res) < 1e-10 * scale);
    }
  }
  CHECK_THROWS_AS(evaluate_frobenius({1.0}, FrobeniusExponent::zero, 0.0), DomainError);
}

TEST_CASE("Frobenius exponents pull back to parity in x") {
  const auto h = map_problem_to_heun(1, 3.0, 2.0);
  const auto ce = frobenius_seed_at_one(h, FrobeniusExponent::zero, 20);
  const auto co = frobenius_seed_at_one(h, FrobeniusExponent::one_half, 20);
  // z - 1 = sinh^2 x; the odd branch carries sign(x) through (z-1)^{1/2} = sinh x
  auto even_at = [&](double x) {
    const double t = std::sinh(x) * std::sinh(x);
    double s = 0.0;
    for (std::size_t k = ce.size(); k-- > 0;) s = s * t + ce[k];
    return s;
  };
  auto odd_at = [&](double x) {
    const double t = std::sinh(x) * std::sinh(x);
    double s = 0.0;
    for (std::size_t k = co.size(); k-- > 0;) s = s * t + co[k];
    return std::sinh(x) * s;
  };
  for (double x : {0.05, 0.1, 0.2}) {
    CHECK(even_at(x) == even_at(-x));
    CHECK(odd_at(x) == -odd_at(-x));
    const double t = std::sinh(x) * std::sinh(x);
    CHECK_THAT(evaluate_frobenius(co, FrobeniusExponent::one_half, t).value, WithinRel(odd_at(x), 1e-13));
    CHECK_THAT(evaluate_frobenius(ce, FrobeniusExponent::zero, t).value, WithinRel(even_at(x), 1e-13));
  }
  // odd branch has nonzero slope at x = 0, even branch has zero slope
  const double h0 = 1e-4;
  CHECK_THAT((odd_at(h0) - odd_at(-h0)) / (2 * h0), WithinAbs(1.0, 1e-6));
  CHECK_THAT((even_at(h0) - even_at(-h0)) / (2 * h0), WithinAbs(0.0, 1e-12));
}
