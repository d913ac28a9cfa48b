#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "slicegeo/errors.hpp"
#include "slicegeo/grid.hpp"

namespace slicegeo {

inline constexpr double kDefaultMarginFloor = 1e-8;

/// Open time interval; infinite endpoints are allowed.
struct TDomain {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double t) const { return t > lo && t < hi; }
  bool is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  double width_or(double fallback) const { return is_finite() ? hi - lo : fallback; }
};

/// Orthogonal splitting data of a spatially compact spacetime on Sigma x I:
/// lapse beta(x,t) > 0 and the slice metric coefficient a(x,t) > 0, together
/// with their t-derivatives. Immutable after construction; evaluation is pure.
///
/// When a custom model lacks analytic t-derivatives, central differences with
/// step dt are substituted and the model is flagged (derivatives_fd()).
class SpacetimeModel {
 public:
  enum class Kind { static_product, de_sitter, flrw_toy, tabulated, custom };

  using Fn = std::function<double(double x, double t)>;

  static SpacetimeModel make_static();
  static SpacetimeModel make_de_sitter();
  /// Scale factor s(t) and lapse b(t) given as coefficient tables over t_knots;
  /// cubic-spline interpolated. The metric coefficient is s(t)^2.
  static SpacetimeModel make_flrw_toy(const std::vector<double>& t_knots,
                                      const std::vector<double>& scale,
                                      const std::vector<double>& lapse);
  /// beta and metric sampled row-major (t rows, x columns) on the lattice
  /// x_j = 2*pi*j/x_n, t_i uniform in [t_min, t_max]; bicubic-spline evaluated.
  static SpacetimeModel make_tabulated(int x_n, double t_min, double t_max, int t_n,
                                       const std::vector<double>& beta,
                                       const std::vector<double>& metric);
  static SpacetimeModel make_custom(const std::string& name, Fn lapse, Fn metric, TDomain domain,
                                    Fn dlapse_dt = nullptr, Fn dmetric_dt = nullptr,
                                    bool allow_fd_fallback = true);

  double lapse(double x, double t) const { return lapse_(x, t); }
  double metric(double x, double t) const { return metric_(x, t); }
  double dlapse_dt(double x, double t) const;
  double dmetric_dt(double x, double t) const;

  Kind kind() const { return kind_; }
  const std::string& kind_name() const { return kind_name_; }
  const TDomain& t_domain() const { return domain_; }
  bool derivatives_fd() const { return derivatives_fd_; }
  bool supports_rebase() const { return supports_rebase_; }

  /// Time-translated model: slice t0 of this model becomes the zero section.
  SpacetimeModel rebased(double t0) const;

  /// Copy with t-derivatives replaced by central differences of step dt.
  SpacetimeModel with_fd_derivatives(double dt) const;

  /// Copy with time translation disabled (tabulated data keeps this off).
  SpacetimeModel without_rebase() const;

 private:
  SpacetimeModel() = default;

  Kind kind_ = Kind::custom;
  std::string kind_name_;
  TDomain domain_;
  Fn lapse_, metric_, dlapse_dt_, dmetric_dt_;
  bool derivatives_fd_ = false;
  bool allow_fd_fallback_ = true;
  bool supports_rebase_ = true;
  double fd_step_ = 1e-4;
};

/// All per-point quantities the chart formulas need at a fixed graph f.
struct SliceData {
  ScalarField f;         // the graph function itself
  ScalarField beta;      // beta(x, f(x))
  ScalarField dbeta_dt;  // (d beta / dt)(x, f(x))
  ScalarField h_coeff;   // (d a / dt)(x, f(x))
  ScalarField df;        // coordinate derivative f'
  ScalarField grad;      // coefficient of grad_f f = f'/a
  ScalarField E;         // 1 - beta |df|^2_g, in (0, 1]
  ScalarField F;         // E^{-1/2} >= 1
  MetricField g;         // a(x, f(x)) dx^2
  double margin = 0.0;   // min_x E
  bool derivatives_fd = false;
};

/// Pointwise spacelike margin min_x E_f. Positive iff the graph is inside the
/// chart domain at grid resolution. Never throws for a negative margin.
double spacelike_margin(const SpacetimeModel& model, const ScalarField& f);

/// Evaluates all slice data at f. Throws DomainViolation if f leaves the time
/// domain and SpacelikeViolation if the margin is at or below margin_floor.
SliceData sample_model(const SpacetimeModel& model, const ScalarField& f,
                       double margin_floor = kDefaultMarginFloor);

/// Riemannian metric induced on the graph of f: a_ind = a_f - beta_f f'^2.
MetricField induced_metric(const SpacetimeModel& model, const ScalarField& f);

}  // namespace slicegeo
