#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slicegeo/grid.hpp"
#include "slicegeo/random_fields.hpp"

using namespace slicegeo;

namespace {

constexpr double kPi = std::numbers::pi;

double max_error(const ScalarField& got, const std::function<double(double)>& want) {
  double err = 0.0;
  for (int i = 0; i < got.size(); ++i)
    err = std::max(err, std::abs(got[i] - want(got.grid().point(i))));
  return err;
}

}  // namespace

TEST_CASE("grid construction rules") {
  CHECK_THROWS_AS(Grid(7), std::invalid_argument);
  const Grid g(8);
  CHECK(g.spacing() == doctest::Approx(2.0 * kPi / 8));
  CHECK(g.wrap(-1) == 7);
  CHECK(g.wrap(8) == 0);
}

TEST_CASE("scalar field invariants") {
  const Grid g(16);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(15, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(16, std::nan(""))), std::invalid_argument);
  const Grid other(32);
  const ScalarField a(g, 1.0), b(other, 1.0);
  CHECK_THROWS_AS(a + b, std::invalid_argument);
}

TEST_CASE("metric positivity enforced at construction") {
  const Grid g(16);
  CHECK_THROWS_AS(MetricField::constant(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(MetricField::constant(g, -1.0), std::invalid_argument);
  CHECK_NOTHROW(MetricField::constant(g, 1e-6));
}

TEST_CASE("gradient of a constant vanishes exactly") {
  const Grid g(64);
  const MetricField a(ScalarField::sampled(g, [](double x) { return 2.0 + std::sin(x); }));
  const ScalarField u(g, 3.25);
  CHECK(gradient(u, a).max_abs() == 0.0);
}

TEST_CASE("gradient of sin on the flat circle") {
  const Grid g(128);
  const ScalarField u = ScalarField::sampled(g, [](double x) { return std::sin(x); });
  const double err = max_error(gradient(u, MetricField::constant(g, 1.0)),
                               [](double x) { return std::cos(x); });
  CHECK(err < 3e-7);  // (2 pi/128)^4 / 30 is about 1.9e-7
}

TEST_CASE("gradient with a scaled metric: u'/a, refinement order >= 4") {
  auto error_at = [](int n) {
    const Grid g(n);
    const ScalarField u = ScalarField::sampled(g, [](double x) { return std::sin(x); });
    return max_error(gradient(u, MetricField::constant(g, 4.0)),
                     [](double x) { return std::cos(x) / 4.0; });
  };
  const double e64 = error_at(64);
  const double e128 = error_at(128);
  CHECK(e64 < 1e-5);
  const double order = std::log2(e64 / e128);
  CHECK(order > 3.5);
}

TEST_CASE("laplacian oracles") {
  const Grid g(128);
  const MetricField flat = MetricField::constant(g, 1.0);

  CHECK(laplacian(ScalarField(g, 7.0), flat).max_abs() == 0.0);

  const ScalarField u = ScalarField::sampled(g, [](double x) { return std::cos(x); });
  CHECK(max_error(laplacian(u, flat), [](double x) { return -std::cos(x); }) < 1e-6);

  const double c2 = std::cosh(0.7) * std::cosh(0.7);
  CHECK(max_error(laplacian(u, MetricField::constant(g, c2)),
                  [&](double x) { return -std::cos(x) / c2; }) < 1e-6);
}

TEST_CASE("laplacian is the divergence of the gradient by construction") {
  const Grid g(64);
  Rng rng(11);
  const MetricField a(ScalarField::sampled(g, [](double x) { return 1.5 + 0.5 * std::cos(x); }));
  const ScalarField u = random_band_limited(g, rng, 4, 1.0);
  const ScalarField lhs = laplacian(u, a);
  const ScalarField rhs = divergence(gradient(u, a), a);
  CHECK((lhs - rhs).max_abs() == 0.0);
}

TEST_CASE("hessian contraction oracles") {
  const Grid g(128);
  const MetricField flat = MetricField::constant(g, 1.0);
  CHECK(hessian_gg(ScalarField(g, 2.0), flat).max_abs() == 0.0);

  const MetricField curved(ScalarField::sampled(g, [](double x) { return 2.0 + std::sin(x); }));
  CHECK(hessian_gg(ScalarField(g, -0.4), curved).max_abs() == 0.0);

  // Flat metric: Hess(f)(grad f, grad f) = f'' (f')^2 = -sin * cos^2.
  const ScalarField f = ScalarField::sampled(g, [](double x) { return std::sin(x); });
  CHECK(max_error(hessian_gg(f, flat),
                  [](double x) { return -std::sin(x) * std::cos(x) * std::cos(x); }) < 1e-5);
}

TEST_CASE("quadrature oracles") {
  const Grid g(64);
  const MetricField flat = MetricField::constant(g, 1.0);
  const ScalarField one(g, 1.0);
  const ScalarField u = ScalarField::sampled(g, [](double x) { return std::cos(x); });
  const ScalarField v = ScalarField::sampled(g, [](double x) { return std::sin(x); });

  CHECK(l2_inner(one, one, one, flat) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(std::abs(l2_inner(u, v, one, flat)) < 1e-13);
  // Trapezoid quadrature is exact on low harmonics.
  CHECK(l2_inner(u, u, one, flat) == doctest::Approx(kPi).epsilon(1e-14));

  const Grid g8(8);
  const ScalarField u8 = ScalarField::sampled(g8, [](double x) { return std::cos(x); });
  const ScalarField v8 = ScalarField::sampled(g8, [](double x) { return std::sin(x); });
  CHECK(std::abs(l2_inner(u8, v8, ScalarField(g8, 1.0), MetricField::constant(g8, 1.0))) < 1e-13);
}

TEST_CASE("Green's identity is exact for the compatible operators") {
  for (int n : {64, 128}) {
    const Grid g(n);
    Rng rng(n);
    const MetricField a(ScalarField::sampled(g, [](double x) { return 2.0 + 0.7 * std::sin(x); }));
    const ScalarField u = random_band_limited(g, rng, 5, 1.0);
    const ScalarField w = random_band_limited(g, rng, 5, 1.0);
    const double lhs = l2_inner(gradient(u, a), gradient(w, a), a.coeff(), a);
    const double rhs = -l2_inner(laplacian(u, a), w, a);
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("operators are linear in the field argument") {
  const Grid g(64);
  Rng rng(3);
  const MetricField a(ScalarField::sampled(g, [](double x) { return 1.0 + 0.3 * std::cos(2 * x); }));
  const ScalarField u = random_band_limited(g, rng, 3, 1.0);
  const ScalarField v = random_band_limited(g, rng, 3, 1.0);
  const ScalarField combo = u * 2.5 + v * (-1.25);
  CHECK((gradient(combo, a) - (gradient(u, a) * 2.5 - gradient(v, a) * 1.25)).max_abs() < 1e-13);
  CHECK((laplacian(combo, a) - (laplacian(u, a) * 2.5 - laplacian(v, a) * 1.25)).max_abs() < 1e-12);
}

TEST_CASE("deterministic evaluation") {
  const Grid g(64);
  Rng rng(99);
  const MetricField a(ScalarField::sampled(g, [](double x) { return 1.0 + 0.4 * std::sin(3 * x); }));
  const ScalarField u = random_band_limited(g, rng, 4, 1.0);
  const ScalarField g1 = laplacian(u, a);
  const ScalarField g2 = laplacian(u, a);
  for (int i = 0; i < g.n; ++i) CHECK(g1[i] == g2[i]);
  CHECK(l2_inner(u, u, a) == l2_inner(u, u, a));
}
