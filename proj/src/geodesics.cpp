#include "slicegeo/geodesics.hpp"

#include <cmath>
#include <numbers>

#include "slicegeo/chart.hpp"

namespace slicegeo {

IvpResult geodesic_ivp(const SpacetimeModel& model, const ScalarField& f0, const ScalarField& u0,
                       double s_end, double ds, double margin_floor) {
  require_same_grid(f0.grid(), u0.grid(), "geodesic_ivp");
  if (!(ds > 0.0) || !(s_end > 0.0)) throw std::invalid_argument("geodesic_ivp: bad step or span");

  IvpResult result;
  auto rhs = [&](const ScalarField& f, const ScalarField& v) {
    const SliceData s = sample_model(model, f, margin_floor);
    return -connection_gamma(s, v, v);
  };
  auto record = [&](const ScalarField& f, const ScalarField& v, double s) {
    const SliceData sd = sample_model(model, f, margin_floor);
    result.states.push_back(GeodesicState{f, v, s, metric_G(sd, v, v)});
  };

  ScalarField f = f0, v = u0;
  const int n_steps = static_cast<int>(std::llround(s_end / ds));
  try {
    record(f, v, 0.0);
    for (int n = 0; n < n_steps; ++n) {
      const ScalarField a1 = rhs(f, v);
      const ScalarField f2 = f + v * (0.5 * ds), v2 = v + a1 * (0.5 * ds);
      const ScalarField a2 = rhs(f2, v2);
      const ScalarField f3 = f + v2 * (0.5 * ds), v3 = v + a2 * (0.5 * ds);
      const ScalarField a3 = rhs(f3, v3);
      const ScalarField f4 = f + v3 * ds, v4 = v + a3 * ds;
      const ScalarField a4 = rhs(f4, v4);
      f += (v + (v2 + v3) * 2.0 + v4) * (ds / 6.0);
      v += (a1 + (a2 + a3) * 2.0 + a4) * (ds / 6.0);
      record(f, v, (n + 1) * ds);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::spacelike_violation) {
      result.status = IvpStatus::spacelike_violation;
    } else if (e.kind() == ErrorKind::domain_violation) {
      result.status = IvpStatus::domain_violation;
    } else {
      throw;
    }
    result.message = e.what();
  }
  return result;
}

namespace {

struct PathGeometry {
  std::vector<SliceData> midpoints;   // per segment
  std::vector<ScalarField> velocities;  // K * (c_{k+1} - c_k)
};

PathGeometry path_geometry(const SpacetimeModel& model, const PathDiscretization& path,
                           double margin_floor) {
  const int K = path.segments();
  if (K < 1) throw std::invalid_argument("path energy: need at least one segment");
  PathGeometry geo;
  geo.midpoints.reserve(static_cast<size_t>(K));
  geo.velocities.reserve(static_cast<size_t>(K));
  for (const ScalarField& knot : path.knots) sample_model(model, knot, margin_floor);
  for (int k = 0; k < K; ++k) {
    const ScalarField mid =
        (path.knots[static_cast<size_t>(k)] + path.knots[static_cast<size_t>(k) + 1]) * 0.5;
    geo.midpoints.push_back(sample_model(model, mid, margin_floor));
    geo.velocities.push_back(
        (path.knots[static_cast<size_t>(k) + 1] - path.knots[static_cast<size_t>(k)]) *
        static_cast<double>(K));
  }
  return geo;
}

}  // namespace

double path_energy(const SpacetimeModel& model, const PathDiscretization& path,
                   double margin_floor) {
  const PathGeometry geo = path_geometry(model, path, margin_floor);
  const int K = path.segments();
  double energy = 0.0;
  for (int k = 0; k < K; ++k)
    energy += 0.5 * metric_G(geo.midpoints[static_cast<size_t>(k)], geo.velocities[static_cast<size_t>(k)],
                             geo.velocities[static_cast<size_t>(k)]) / K;
  return energy;
}

EnergyGradient energy_and_grad(const SpacetimeModel& model, const PathDiscretization& path,
                               double margin_floor) {
  const PathGeometry geo = path_geometry(model, path, margin_floor);
  const int K = path.segments();
  const Grid grid = path.knots.front().grid();
  const double hx = grid.spacing();
  const double ds = 1.0 / K;

  EnergyGradient out;
  out.grad.assign(path.knots.size(), ScalarField(grid, 0.0));

  // Per-segment contributions. For segment k with midpoint m and velocity D:
  //   d/dc [G_m(D,D)]          -> quadrature weights against the knot values
  //   DG_m(D,D)(dm)            -> base-point term, dm = dc/2
  // Assembled as raw partial derivatives, then converted to L2 densities.
  std::vector<std::vector<double>> partial(path.knots.size(),
                                           std::vector<double>(static_cast<size_t>(grid.n), 0.0));
  for (int k = 0; k < K; ++k) {
    const SliceData& s = geo.midpoints[static_cast<size_t>(k)];
    const ScalarField& D = geo.velocities[static_cast<size_t>(k)];
    const AuxiliaryFields aux = auxiliary_fields(s);

    // Velocity terms: E depends on D = K (c_{k+1} - c_k) through
    // (1/2K) G_m(D, D); the derivative against knot j is +-(1/K) * K * G-weight.
    for (int i = 0; i < grid.n; ++i) {
      const double g_weight = s.beta[i] * s.F[i] * std::sqrt(s.g[i]) * hx * D[i];
      partial[static_cast<size_t>(k) + 1][static_cast<size_t>(i)] += g_weight;
      partial[static_cast<size_t>(k)][static_cast<size_t>(i)] -= g_weight;
    }

    // Base-point terms: (1/2K) DG_m(D,D)(dc/2) = (1/4K) DG_m(D,D)(dc).
    // DG(u,v)(w) = sum_i A_i u_i v_i w_i + sum_i B_i (dx w)_i, so the partial
    // against w_j is A_j - (dx B)_j by exact summation by parts.
    ScalarField B(grid);
    for (int i = 0; i < grid.n; ++i) {
      const double F = s.F[i];
      const double F2 = F * F;
      const double sqrt_a = std::sqrt(s.g[i]);
      const double bracket = s.dbeta_dt[i] / s.beta[i] + aux.eta[i] + s.beta[i] * F2 * aux.xi[i];
      const double A = s.beta[i] * F * bracket * D[i] * D[i] * sqrt_a * hx;
      B[i] = s.beta[i] * s.beta[i] * F2 * F * (s.df[i] / s.g[i]) * D[i] * D[i] * sqrt_a * hx;
      partial[static_cast<size_t>(k)][static_cast<size_t>(i)] += 0.25 / K * A;
      partial[static_cast<size_t>(k) + 1][static_cast<size_t>(i)] += 0.25 / K * A;
    }
    const ScalarField dxB = dx(B);
    for (int i = 0; i < grid.n; ++i) {
      partial[static_cast<size_t>(k)][static_cast<size_t>(i)] -= 0.25 / K * dxB[i];
      partial[static_cast<size_t>(k) + 1][static_cast<size_t>(i)] -= 0.25 / K * dxB[i];
    }
  }

  double energy = 0.0;
  for (int k = 0; k < K; ++k)
    energy += 0.5 * metric_G(geo.midpoints[static_cast<size_t>(k)], geo.velocities[static_cast<size_t>(k)],
                             geo.velocities[static_cast<size_t>(k)]) / K;
  out.energy = energy;

  for (size_t j = 1; j + 1 < path.knots.size(); ++j)
    for (int i = 0; i < grid.n; ++i)
      out.grad[j][i] = partial[j][static_cast<size_t>(i)] / (ds * hx);
  return out;
}

namespace {

double grad_norm_l2(const std::vector<ScalarField>& grad, double ds, double hx) {
  double acc = 0.0;
  for (const ScalarField& gf : grad)
    for (int i = 0; i < gf.size(); ++i) acc += gf[i] * gf[i] * ds * hx;
  return std::sqrt(acc);
}

}  // namespace

BvpResult geodesic_bvp(const SpacetimeModel& model, const ScalarField& f0, const ScalarField& f1,
                       int segments, double tol, int max_iter, const PathDiscretization* seed,
                       double margin_floor) {
  require_same_grid(f0.grid(), f1.grid(), "geodesic_bvp");
  PathDiscretization path = seed ? *seed : linear_path(f0, f1, segments);
  if (seed && seed->segments() != segments)
    throw std::invalid_argument("geodesic_bvp: seed has the wrong number of segments");
  try {
    path_energy(model, path, margin_floor);
  } catch (const Error& e) {
    throw_error(ErrorKind::seed_not_spacelike, std::string("seed path invalid: ") + e.what());
  }

  const Grid grid = f0.grid();
  const double hx = grid.spacing();
  const double ds = 1.0 / segments;
  const double rounding_slack = 64.0 * std::numeric_limits<double>::epsilon();

  BvpResult result;
  auto energy_of = [&](const PathDiscretization& p) {
    try {
      return path_energy(model, p, margin_floor);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();  // margin violated: reject
    }
  };
  auto stepped = [&](const EnergyGradient& eg, double t) {
    PathDiscretization candidate = path;
    for (size_t j = 1; j + 1 < candidate.knots.size(); ++j)
      candidate.knots[j] -= eg.grad[j] * t;
    return candidate;
  };

  double step = 1.0;
  EnergyGradient eg = energy_and_grad(model, path, margin_floor);
  double gnorm = grad_norm_l2(eg.grad, ds, hx);
  int iter = 0;
  while (gnorm > tol && iter < max_iter) {
    const double directional = gnorm * gnorm;  // <grad, grad> in the step metric
    const double slack = rounding_slack * (1.0 + std::abs(eg.energy));

    // Probe the warm-started step and fit a quadratic along the ray to pick
    // the trial step; plain Armijo halving takes over from there.
    double probe = step;
    double e_probe = energy_of(stepped(eg, probe));
    while (!std::isfinite(e_probe) && probe >= 1e-16) {
      probe *= 0.5;
      e_probe = energy_of(stepped(eg, probe));
    }
    double trial;
    if (std::abs(e_probe - eg.energy) <= 10.0 * slack) {
      // Below energy resolution: hold the warm step, descent is driven by
      // the directly evaluated gradient from here on.
      trial = probe;
    } else {
      const double quad = 2.0 * (e_probe - eg.energy + probe * directional) / (probe * probe);
      trial = quad > 0.0 ? directional / quad : 2.0 * probe;
      trial = std::clamp(trial, 0.1 * probe, 10.0 * probe);
    }

    bool accepted = false;
    while (trial >= 1e-16) {
      PathDiscretization candidate = stepped(eg, trial);
      const double e_new = energy_of(candidate);
      if (e_new <= eg.energy - 1e-4 * trial * directional + slack) {
        path = std::move(candidate);
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) break;
    step = trial;
    eg = energy_and_grad(model, path, margin_floor);
    gnorm = grad_norm_l2(eg.grad, ds, hx);
    ++iter;
  }

  result.path = path;
  result.energy = eg.energy;
  result.length = path_length(model, path, margin_floor);
  result.grad_norm_final = gnorm;
  result.iterations = iter;
  result.converged = gnorm <= tol;
  return result;
}

ConvexityReport convexity_probe(const SpacetimeModel& model, const PathDiscretization& path_a,
                                const PathDiscretization& path_b, int samples,
                                double margin_floor) {
  if (path_a.segments() != path_b.segments())
    throw std::invalid_argument("convexity_probe: paths must share their discretization");
  if (samples < 3) throw std::invalid_argument("convexity_probe: need at least 3 samples");
  const double end_gap =
      std::max((path_a.knots.front() - path_b.knots.front()).max_abs(),
               (path_a.knots.back() - path_b.knots.back()).max_abs());
  if (end_gap > 1e-12)
    throw std::invalid_argument("convexity_probe: paths must share endpoints");

  ConvexityReport report;
  for (int i = 0; i < samples; ++i) {
    const double lam = static_cast<double>(i) / (samples - 1);
    PathDiscretization mix;
    mix.knots.reserve(path_a.knots.size());
    for (size_t k = 0; k < path_a.knots.size(); ++k)
      mix.knots.push_back(path_a.knots[k] * (1.0 - lam) + path_b.knots[k] * lam);
    report.lambdas.push_back(lam);
    report.energies.push_back(path_energy(model, mix, margin_floor));
  }
  double min_dd = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i + 1 < report.energies.size(); ++i)
    min_dd = std::min(min_dd,
                      report.energies[i - 1] - 2.0 * report.energies[i] + report.energies[i + 1]);
  report.min_second_difference = min_dd;
  return report;
}

double path_l2_distance(const PathDiscretization& a, const PathDiscretization& b) {
  if (a.segments() != b.segments())
    throw std::invalid_argument("path_l2_distance: paths must share their discretization");
  const double ds = 1.0 / a.segments();
  const double hx = a.knots.front().grid().spacing();
  double acc = 0.0;
  for (size_t k = 0; k < a.knots.size(); ++k) {
    const ScalarField diff = a.knots[k] - b.knots[k];
    for (int i = 0; i < diff.size(); ++i) acc += diff[i] * diff[i] * ds * hx;
  }
  return std::sqrt(acc);
}

}  // namespace slicegeo
