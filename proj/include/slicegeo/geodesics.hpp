#pragma once

#include <string>
#include <vector>

#include "slicegeo/grid.hpp"
#include "slicegeo/spacetime.hpp"
#include "slicegeo/splitting.hpp"

namespace slicegeo {

struct GeodesicState {
  ScalarField f;
  ScalarField fdot;
  double s = 0.0;
  double speed_sq = 0.0;  // chart speed G_f(f', f')
};

enum class IvpStatus { ok, spacelike_violation, domain_violation };

struct IvpResult {
  std::vector<GeodesicState> states;
  IvpStatus status = IvpStatus::ok;
  std::string message;
};

/// Classical RK4 on f'' = -Gamma_f(f', f'). Aborts cleanly with the partial
/// trajectory when the graph leaves the chart or the time domain.
IvpResult geodesic_ivp(const SpacetimeModel& model, const ScalarField& f0, const ScalarField& u0,
                       double s_end, double ds, double margin_floor = kDefaultMarginFloor);

struct EnergyGradient {
  double energy = 0.0;
  /// Per-knot variational gradient densities with respect to the flat
  /// L2(ds x dx) inner product; endpoint entries are zero.
  std::vector<ScalarField> grad;
};

double path_energy(const SpacetimeModel& model, const PathDiscretization& path,
                   double margin_floor = kDefaultMarginFloor);

/// Discrete energy E = (1/2K) sum_k G_{m_k}(K dc_k, K dc_k) and its exact
/// gradient with respect to the interior knot values.
EnergyGradient energy_and_grad(const SpacetimeModel& model, const PathDiscretization& path,
                               double margin_floor = kDefaultMarginFloor);

struct BvpResult {
  PathDiscretization path;
  double energy = 0.0;
  double length = 0.0;
  double grad_norm_final = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Two-point problem by energy descent (Armijo backtracking, c = 1e-4,
/// shrink 0.5). Line-search steps that violate the spacelike margin are
/// rejected. A non-converged result is still returned with the flag down.
BvpResult geodesic_bvp(const SpacetimeModel& model, const ScalarField& f0, const ScalarField& f1,
                       int segments, double tol = 1e-8, int max_iter = 5000,
                       const PathDiscretization* seed = nullptr,
                       double margin_floor = kDefaultMarginFloor);

struct ConvexityReport {
  std::vector<double> lambdas;
  std::vector<double> energies;
  double min_second_difference = 0.0;
};

/// Energy profile along convex combinations of two paths with shared
/// endpoints; negative second differences flag non-convexity at grid scale.
ConvexityReport convexity_probe(const SpacetimeModel& model, const PathDiscretization& path_a,
                                const PathDiscretization& path_b, int samples,
                                double margin_floor = kDefaultMarginFloor);

/// Diagnostic distance sqrt(sum_k ds * |a_k - b_k|^2_{L2(dx)}).
double path_l2_distance(const PathDiscretization& a, const PathDiscretization& b);

}  // namespace slicegeo
