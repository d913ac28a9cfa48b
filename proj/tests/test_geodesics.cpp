#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slicegeo/chart.hpp"
#include "slicegeo/geodesics.hpp"
#include "slicegeo/random_fields.hpp"

using namespace slicegeo;

namespace {

constexpr double kPi = std::numbers::pi;

double simpson(const std::function<double(double)>& fn, double a, double b, int n = 20001) {
  const double h = (b - a) / (n - 1);
  double acc = fn(a) + fn(b);
  for (int i = 1; i < n - 1; ++i) acc += fn(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double energy_drift(const IvpResult& traj) {
  // Reduced de Sitter invariant cosh(t) t'^2 along x-independent trajectories.
  REQUIRE(traj.status == IvpStatus::ok);
  const double ref = std::cosh(traj.states.front().f[0]) * traj.states.front().fdot[0] *
                     traj.states.front().fdot[0];
  double worst = 0.0;
  for (const GeodesicState& st : traj.states) {
    const double value = std::cosh(st.f[0]) * st.fdot[0] * st.fdot[0];
    worst = std::max(worst, std::abs(value - ref));
  }
  return worst / std::abs(ref);
}

}  // namespace

TEST_CASE("static geodesics are chart linear to rounding") {
  const Grid g(64);
  const SpacetimeModel stat = SpacetimeModel::make_static();
  const double tau = 0.7;
  const IvpResult traj = geodesic_ivp(stat, ScalarField(g, 0.0), ScalarField(g, tau), 1.0, 1e-3);
  REQUIRE(traj.status == IvpStatus::ok);
  REQUIRE(traj.states.size() == 1001);
  double max_path_err = 0.0, max_speed_err = 0.0;
  const double speed_ref = 2.0 * kPi * tau * tau;
  for (const GeodesicState& st : traj.states) {
    for (int i = 0; i < g.n; ++i)
      max_path_err = std::max(max_path_err, std::abs(st.f[i] - tau * st.s));
    max_speed_err = std::max(max_speed_err, std::abs(st.speed_sq - speed_ref));
  }
  CHECK(max_path_err <= 1e-10);
  CHECK(max_speed_err / speed_ref <= 1e-10);
}

TEST_CASE("zero initial velocity rests") {
  const Grid g(32);
  const SpacetimeModel ds = SpacetimeModel::make_de_sitter();
  const IvpResult traj = geodesic_ivp(ds, ScalarField(g, 0.3), ScalarField(g, 0.0), 1.0, 0.01);
  REQUIRE(traj.status == IvpStatus::ok);
  for (const GeodesicState& st : traj.states) {
    CHECK((st.f - ScalarField(g, 0.3)).max_abs() == 0.0);
    CHECK(st.fdot.max_abs() == 0.0);
  }
}

TEST_CASE("de Sitter flow stays x-independent and conserves the reduced energy") {
  const Grid g(64);
  const SpacetimeModel ds = SpacetimeModel::make_de_sitter();
  const IvpResult traj = geodesic_ivp(ds, ScalarField(g, 0.0), ScalarField(g, 1.0), 1.0, 1e-3);
  REQUIRE(traj.status == IvpStatus::ok);
  for (const GeodesicState& st : traj.states)
    CHECK(st.f.max() - st.f.min() <= 1e-14);
  CHECK(energy_drift(traj) <= 1e-8);
}

TEST_CASE("energy drift shrinks about 16x when the step halves") {
  const Grid g(32);
  const SpacetimeModel ds = SpacetimeModel::make_de_sitter();
  auto drift_at = [&](double ds_step) {
    return energy_drift(geodesic_ivp(ds, ScalarField(g, 0.0), ScalarField(g, 1.0), 1.0, ds_step));
  };
  const double d1 = drift_at(0.04);
  const double d2 = drift_at(0.02);
  CHECK(d1 / d2 == doctest::Approx(16.0).epsilon(0.5));
}

TEST_CASE("flow aborts cleanly with a partial trajectory at the chart boundary") {
  const Grid g(64);
  const SpacetimeModel stat = SpacetimeModel::make_static();
  // Velocity profile steep enough that f eventually leaves the chart.
  const ScalarField u0 = ScalarField::sampled(g, [](double x) { return 2.0 * std::sin(x); });
  const IvpResult traj = geodesic_ivp(stat, ScalarField(g, 0.0), u0, 5.0, 1e-2);
  CHECK(traj.status == IvpStatus::spacelike_violation);
  CHECK(traj.states.size() >= 2);
  CHECK(!traj.message.empty());
}

TEST_CASE("domain exit reports a partial trajectory too") {
  const Grid g(32);
  const SpacetimeModel window = SpacetimeModel::make_custom(
      "window", [](double, double) { return 1.0; }, [](double, double) { return 1.0; },
      TDomain{-0.5, 0.5}, [](double, double) { return 0.0; }, [](double, double) { return 0.0; });
  const IvpResult traj = geodesic_ivp(window, ScalarField(g, 0.0), ScalarField(g, 1.0), 1.0, 1e-2);
  CHECK(traj.status == IvpStatus::domain_violation);
  CHECK(!traj.states.empty());
}

TEST_CASE("energy of the zero path vanishes and static linear paths are critical") {
  const Grid g(64);
  const SpacetimeModel stat = SpacetimeModel::make_static();
  PathDiscretization rest;
  for (int k = 0; k <= 8; ++k) rest.knots.push_back(ScalarField(g, 0.1));
  CHECK(path_energy(stat, rest) == 0.0);

  // Chart-linear paths are critical; the residual is knot-rounding only.
  const PathDiscretization line = linear_path(ScalarField(g, 0.0), ScalarField(g, 0.9), 8);
  const EnergyGradient eg = energy_and_grad(stat, line);
  for (const ScalarField& gk : eg.grad) CHECK(gk.max_abs() <= 1e-12);
}

TEST_CASE("energy gradient matches directional finite differences at second order") {
  const Grid g(64);
  const SpacetimeModel ds = SpacetimeModel::make_de_sitter();
  Rng rng(3);
  PathDiscretization path = linear_path(ScalarField(g, 0.0), ScalarField(g, 0.5), 8);
  for (size_t k = 1; k + 1 < path.knots.size(); ++k)
    path.knots[k] += random_band_limited(g, rng, 2, 0.03);

  PathDiscretization dir = path;
  for (size_t k = 0; k < dir.knots.size(); ++k)
    dir.knots[k] = (k == 0 || k + 1 == dir.knots.size()) ? ScalarField(g, 0.0)
                                                         : random_band_limited(g, rng, 2, 1.0);

  const EnergyGradient eg = energy_and_grad(ds, path);
  double pairing = 0.0;
  const double ds_step = 1.0 / path.segments(), hx = g.spacing();
  for (size_t k = 1; k + 1 < path.knots.size(); ++k)
    for (int i = 0; i < g.n; ++i) pairing += eg.grad[k][i] * dir.knots[k][i] * ds_step * hx;

  auto fd = [&](double eps) {
    PathDiscretization plus = path, minus = path;
    for (size_t k = 1; k + 1 < path.knots.size(); ++k) {
      plus.knots[k] += dir.knots[k] * eps;
      minus.knots[k] -= dir.knots[k] * eps;
    }
    return (path_energy(ds, plus) - path_energy(ds, minus)) / (2.0 * eps);
  };
  const double r1 = std::abs(fd(1e-4) - pairing);
  const double r2 = std::abs(fd(5e-5) - pairing);
  CHECK(r1 <= 1e-6 * std::max(1.0, std::abs(pairing)));
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("static boundary-value problem is solved by the linear seed") {
  const Grid g(64);
  const SpacetimeModel stat = SpacetimeModel::make_static();
  const double tau = 0.6;
  const BvpResult out = geodesic_bvp(stat, ScalarField(g, 0.0), ScalarField(g, tau), 16);
  CHECK(out.converged);
  CHECK(out.iterations == 0);
  CHECK(out.length == doctest::Approx(tau * std::sqrt(2.0 * kPi)).epsilon(1e-12));
  CHECK(out.length ==
        doctest::Approx(distance_lower_bound(ScalarField(g, 0.0), ScalarField(g, tau),
                                             MetricField::constant(g, 1.0)))
            .epsilon(1e-12));
  CHECK(out.length * out.length <= 2.0 * out.energy + 1e-10);
}

TEST_CASE("coinciding endpoints give the zero path immediately") {
  const Grid g(32);
  const SpacetimeModel ds = SpacetimeModel::make_de_sitter();
  const BvpResult out = geodesic_bvp(ds, ScalarField(g, 0.2), ScalarField(g, 0.2), 8);
  CHECK(out.converged);
  CHECK(out.iterations == 0);
  CHECK(out.length == 0.0);
  CHECK(out.energy == 0.0);
}

TEST_CASE("perturbed static seed returns to the chart-linear geodesic") {
  const Grid g(64);
  const SpacetimeModel stat = SpacetimeModel::make_static();
  Rng rng(9);
  PathDiscretization seed = linear_path(ScalarField(g, 0.0), ScalarField(g, 0.6), 8);
  for (size_t k = 1; k + 1 < seed.knots.size(); ++k)
    seed.knots[k] += random_band_limited(g, rng, 2, 0.05);
  const BvpResult out =
      geodesic_bvp(stat, ScalarField(g, 0.0), ScalarField(g, 0.6), 8, 1e-9, 20000, &seed);
  CHECK(out.converged);
  const PathDiscretization line = linear_path(ScalarField(g, 0.0), ScalarField(g, 0.6), 8);
  CHECK(path_l2_distance(out.path, line) <= 1e-6);
}

TEST_CASE("de Sitter boundary-value solution matches the reduced-metric length") {
  const Grid g(64);
  const SpacetimeModel ds = SpacetimeModel::make_de_sitter();
  const BvpResult out = geodesic_bvp(ds, ScalarField(g, 0.0), ScalarField(g, 0.5), 16);
  CHECK(out.converged);
  for (const ScalarField& knot : out.path.knots) CHECK(knot.max() - knot.min() <= 1e-6);
  // Constant-slice paths reduce to the 1D metric 2 pi cosh(t) dt^2, whose
  // length between 0 and 0.5 is path independent.
  const double oracle =
      simpson([](double t) { return std::sqrt(2.0 * kPi * std::cosh(t)); }, 0.0, 0.5);
  CHECK(out.length == doctest::Approx(oracle).epsilon(1e-4));
  CHECK(out.length * out.length <= 2.0 * out.energy + 1e-10);
}

TEST_CASE("invalid seeds are rejected as such") {
  const Grid g(64);
  const SpacetimeModel stat = SpacetimeModel::make_static();
  PathDiscretization seed = linear_path(ScalarField(g, 0.0), ScalarField(g, 0.5), 8);
  seed.knots[4] = ScalarField::sampled(g, [](double x) { return 1.4 * std::sin(x); });
  try {
    geodesic_bvp(stat, ScalarField(g, 0.0), ScalarField(g, 0.5), 8, 1e-8, 100, &seed);
    FAIL("expected SeedNotSpacelike");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::seed_not_spacelike);
  }
}

TEST_CASE("shooting from the discrete solution reproduces the endpoint at rate >= 2") {
  const Grid g(32);
  const SpacetimeModel ds = SpacetimeModel::make_de_sitter();
  auto shoot_error = [&](int K) {
    const BvpResult out = geodesic_bvp(ds, ScalarField(g, 0.0), ScalarField(g, 0.5), K, 1e-10,
                                       30000);
    REQUIRE(out.converged);
    const ScalarField v0 = (out.path.knots[1] - out.path.knots[0]) * static_cast<double>(K);
    const IvpResult traj = geodesic_ivp(ds, out.path.knots.front(), v0, 1.0, 1e-3);
    REQUIRE(traj.status == IvpStatus::ok);
    return (traj.states.back().f - ScalarField(g, 0.5)).max_abs();
  };
  const double e8 = shoot_error(8);
  const double e16 = shoot_error(16);
  CHECK(e8 / e16 >= 2.5);
  CHECK(e16 <= 1e-3);
}

TEST_CASE("Euler-Lagrange residual of converged paths decays with K") {
  const Grid g(32);
  const SpacetimeModel ds = SpacetimeModel::make_de_sitter();
  auto residual_at = [&](int K) {
    const BvpResult out =
        geodesic_bvp(ds, ScalarField(g, 0.0), ScalarField(g, 0.5), K, 1e-10, 30000);
    REQUIRE(out.converged);
    double worst = 0.0;
    for (int j = 1; j < K; ++j) {
      const ScalarField& prev = out.path.knots[static_cast<size_t>(j) - 1];
      const ScalarField& here = out.path.knots[static_cast<size_t>(j)];
      const ScalarField& next = out.path.knots[static_cast<size_t>(j) + 1];
      const ScalarField accel = (next - here * 2.0 + prev) * static_cast<double>(K) * K;
      const ScalarField vel = (next - prev) * (0.5 * K);
      const ScalarField residual = accel + connection_gamma(ds, here, vel, vel);
      worst = std::max(worst, residual.max_abs());
    }
    return worst;
  };
  const double r8 = residual_at(8);
  const double r16 = residual_at(16);
  CHECK(r16 <= r8 / 1.8);
}

TEST_CASE("convexity probe oracles") {
  const Grid g(64);
  const SpacetimeModel stat = SpacetimeModel::make_static();
  Rng rng(15);
  PathDiscretization a = linear_path(ScalarField(g, 0.0), ScalarField(g, 0.5), 16);
  PathDiscretization b = a;
  for (size_t k = 1; k + 1 < a.knots.size(); ++k) {
    a.knots[k] += random_band_limited(g, rng, 2, 0.05);
    b.knots[k] += random_band_limited(g, rng, 2, 0.05);
  }

  const ConvexityReport same = convexity_probe(stat, a, a, 9);
  CHECK(std::abs(same.min_second_difference) <= 1e-15);

  const ConvexityReport stat_report = convexity_probe(stat, a, b, 9);
  CHECK(stat_report.min_second_difference >= -1e-8);

  const SpacetimeModel ds = SpacetimeModel::make_de_sitter();
  const Grid g128(128);
  Rng rng2(16);
  PathDiscretization a2 = linear_path(ScalarField(g128, 0.0), ScalarField(g128, 0.5), 16);
  PathDiscretization b2 = a2;
  for (size_t k = 1; k + 1 < a2.knots.size(); ++k) {
    a2.knots[k] += random_band_limited(g128, rng2, 2, 0.05);
    b2.knots[k] += random_band_limited(g128, rng2, 2, 0.05);
  }
  const ConvexityReport ds_report = convexity_probe(ds, a2, b2, 9);
  CHECK(ds_report.min_second_difference >= -1e-6);

  PathDiscretization mismatched = b;
  mismatched.knots.back() = ScalarField(g, 0.7);
  CHECK_THROWS_AS(convexity_probe(stat, a, mismatched, 5), std::invalid_argument);
}
