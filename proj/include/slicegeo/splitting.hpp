#pragma once

#include <vector>

#include "slicegeo/grid.hpp"
#include "slicegeo/spacetime.hpp"

namespace slicegeo {

/// Piecewise path of graph functions at parameters s_k = k/K.
struct PathDiscretization {
  std::vector<ScalarField> knots;  // size K+1

  int segments() const { return static_cast<int>(knots.size()) - 1; }
};

PathDiscretization linear_path(const ScalarField& f0, const ScalarField& f1, int segments);

/// Midpoint-rule path length: sum over segments of |K (c_{k+1} - c_k)|_G at
/// the midpoint slice, divided by K. Second-order accurate in K.
double path_length(const SpacetimeModel& model, const PathDiscretization& path,
                   double margin_floor = kDefaultMarginFloor);

/// L2(dvol_h) norm of f0 - f1. Bounds the chart distance from below whenever
/// the lapse bound for h holds (caller contract, surfaced in CLI output).
double distance_lower_bound(const ScalarField& f0, const ScalarField& f1, const MetricField& h);

struct LapseBoundReport {
  double min_value = 0.0;
  double argmin_x = 0.0;
  double argmin_t = 0.0;
  bool pass = false;
  int n_x = 0;
  int n_t = 0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

inline constexpr double kLapseBoundSlack = 1e-8;

/// Minimum over an (x,t) sample lattice of beta * sqrt(a_t / a_h); passes
/// when the minimum stays above 1 - 1e-8.
LapseBoundReport verify_lapse_bound(const SpacetimeModel& model, const MetricField& h, double t_lo,
                                    double t_hi, int n_t = 201);

struct ReparametrizeOptions {
  double pad = 1e-6;          // safety pad added to the envelope spline
  double lattice_step = 1e-2; // m(t) sample spacing (10x the default ODE step)
  double ode_step = 1e-3;     // RK4 step for f' = F(f)
  int envelope_stride = 10;   // fine samples per envelope knot
};

/// Monotone time reparametrization certificate.
struct ReparametrizedSplitting {
  std::vector<double> s_samples;       // new time parameter
  std::vector<double> f_samples;       // f(s), original time
  std::vector<double> fprime_samples;  // f'(s) = F(f(s)) >= 1
  SpacetimeModel new_model;
  LapseBoundReport certificate;  // post-verified bound of the new splitting
  double pad_used = 0.0;
};

/// Builds the bounded-lapse reparametrization for the window [t_lo, t_hi]:
/// samples m(t) = min_x (beta sqrt(a_t/a_h))^{1/2}, constructs a smooth
/// F >= max(1, 1/m) as a padded spline upper envelope, solves f' = F(f) with
/// f(0) = 0, and returns the transformed splitting. The output is re-checked
/// against the lapse bound (hard assertion).
ReparametrizedSplitting reparametrize_bounded_lapse(const SpacetimeModel& model,
                                                    const MetricField& h, double t_lo, double t_hi,
                                                    const ReparametrizeOptions& opts = {});

}  // namespace slicegeo
