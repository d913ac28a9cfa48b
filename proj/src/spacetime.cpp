#include "slicegeo/spacetime.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "slicegeo/spline.hpp"

namespace slicegeo {

SpacetimeModel SpacetimeModel::make_static() {
  SpacetimeModel m;
  m.kind_ = Kind::static_product;
  m.kind_name_ = "static";
  m.lapse_ = [](double, double) { return 1.0; };
  m.metric_ = [](double, double) { return 1.0; };
  m.dlapse_dt_ = [](double, double) { return 0.0; };
  m.dmetric_dt_ = [](double, double) { return 0.0; };
  return m;
}

SpacetimeModel SpacetimeModel::make_de_sitter() {
  SpacetimeModel m;
  m.kind_ = Kind::de_sitter;
  m.kind_name_ = "de_sitter";
  m.lapse_ = [](double, double) { return 1.0; };
  m.metric_ = [](double, double t) {
    const double c = std::cosh(t);
    return c * c;
  };
  m.dlapse_dt_ = [](double, double) { return 0.0; };
  m.dmetric_dt_ = [](double, double t) { return 2.0 * std::sinh(t) * std::cosh(t); };
  return m;
}

SpacetimeModel SpacetimeModel::make_flrw_toy(const std::vector<double>& t_knots,
                                             const std::vector<double>& scale,
                                             const std::vector<double>& lapse) {
  if (t_knots.size() != scale.size() || t_knots.size() != lapse.size())
    throw_error(ErrorKind::config_error, "flrw_toy tables must have matching lengths");
  auto s_spline = std::make_shared<CubicSpline>(t_knots, scale);
  auto b_spline = std::make_shared<CubicSpline>(t_knots, lapse);
  for (double t = t_knots.front(); t <= t_knots.back();
       t += (t_knots.back() - t_knots.front()) / 256.0) {
    if (!(s_spline->eval(t) > 0.0) || !(b_spline->eval(t) > 0.0))
      throw_error(ErrorKind::config_error, "flrw_toy scale and lapse must stay positive");
  }
  SpacetimeModel m;
  m.kind_ = Kind::flrw_toy;
  m.kind_name_ = "flrw_toy";
  m.domain_ = {t_knots.front(), t_knots.back()};
  m.lapse_ = [b_spline](double, double t) { return b_spline->eval(t); };
  m.dlapse_dt_ = [b_spline](double, double t) { return b_spline->deriv(t); };
  m.metric_ = [s_spline](double, double t) {
    const double s = s_spline->eval(t);
    return s * s;
  };
  m.dmetric_dt_ = [s_spline](double, double t) {
    return 2.0 * s_spline->eval(t) * s_spline->deriv(t);
  };
  return m;
}

namespace {

/// Tensor-product interpolation of a sampled (x,t) table: a natural cubic
/// spline in t per lattice column, then a periodic cubic spline across the
/// columns at the requested t. The x-lattice is the periodic grid 2*pi*j/x_n.
class LatticeInterp {
 public:
  LatticeInterp(int x_n, double t_min, double t_max, int t_n, const std::vector<double>& table)
      : x_n_(x_n) {
    if (x_n < 4 || t_n < 3) throw_error(ErrorKind::config_error, "tabulated lattice too small");
    if (static_cast<int>(table.size()) != x_n * t_n)
      throw_error(ErrorKind::config_error, "tabulated table size does not match lattice");
    std::vector<double> t_knots(static_cast<size_t>(t_n));
    for (int i = 0; i < t_n; ++i)
      t_knots[static_cast<size_t>(i)] = t_min + (t_max - t_min) * i / (t_n - 1);
    columns_.reserve(static_cast<size_t>(x_n));
    for (int j = 0; j < x_n; ++j) {
      std::vector<double> col(static_cast<size_t>(t_n));
      for (int i = 0; i < t_n; ++i) col[static_cast<size_t>(i)] = table[static_cast<size_t>(i * x_n + j)];
      columns_.emplace_back(t_knots, col);
    }
    x_knots_.resize(static_cast<size_t>(x_n) + 1);
    for (int j = 0; j <= x_n; ++j) x_knots_[static_cast<size_t>(j)] = 2.0 * std::numbers::pi * j / x_n;
  }

  double eval(double x, double t) const { return row_at(t, /*deriv=*/false).eval(wrap(x)); }
  double deriv_t(double x, double t) const { return row_at(t, /*deriv=*/true).eval(wrap(x)); }

 private:
  double wrap(double x) const {
    const double period = 2.0 * std::numbers::pi;
    x = std::fmod(x, period);
    return x < 0.0 ? x + period : x;
  }

  CubicSpline row_at(double t, bool deriv) const {
    std::vector<double> row(static_cast<size_t>(x_n_) + 1);
    for (int j = 0; j < x_n_; ++j)
      row[static_cast<size_t>(j)] = deriv ? columns_[static_cast<size_t>(j)].deriv(t)
                                          : columns_[static_cast<size_t>(j)].eval(t);
    row[static_cast<size_t>(x_n_)] = row[0];
    return CubicSpline(x_knots_, row, CubicSpline::Boundary::periodic);
  }

  int x_n_;
  std::vector<CubicSpline> columns_;
  std::vector<double> x_knots_;
};

}  // namespace

SpacetimeModel SpacetimeModel::make_tabulated(int x_n, double t_min, double t_max, int t_n,
                                              const std::vector<double>& beta,
                                              const std::vector<double>& metric) {
  for (double v : beta)
    if (!(v > 0.0)) throw_error(ErrorKind::config_error, "tabulated lapse must be positive");
  for (double v : metric)
    if (!(v > 0.0)) throw_error(ErrorKind::config_error, "tabulated metric must be positive");
  auto beta_interp = std::make_shared<LatticeInterp>(x_n, t_min, t_max, t_n, beta);
  auto metric_interp = std::make_shared<LatticeInterp>(x_n, t_min, t_max, t_n, metric);
  SpacetimeModel m;
  m.kind_ = Kind::tabulated;
  m.kind_name_ = "tabulated";
  m.domain_ = {t_min, t_max};
  m.supports_rebase_ = false;
  m.lapse_ = [beta_interp](double x, double t) { return beta_interp->eval(x, t); };
  m.dlapse_dt_ = [beta_interp](double x, double t) { return beta_interp->deriv_t(x, t); };
  m.metric_ = [metric_interp](double x, double t) { return metric_interp->eval(x, t); };
  m.dmetric_dt_ = [metric_interp](double x, double t) { return metric_interp->deriv_t(x, t); };
  return m;
}

SpacetimeModel SpacetimeModel::make_custom(const std::string& name, Fn lapse, Fn metric,
                                           TDomain domain, Fn dlapse_dt, Fn dmetric_dt,
                                           bool allow_fd_fallback) {
  SpacetimeModel m;
  m.kind_ = Kind::custom;
  m.kind_name_ = name;
  m.domain_ = domain;
  m.lapse_ = std::move(lapse);
  m.metric_ = std::move(metric);
  m.dlapse_dt_ = std::move(dlapse_dt);
  m.dmetric_dt_ = std::move(dmetric_dt);
  m.allow_fd_fallback_ = allow_fd_fallback;
  m.derivatives_fd_ = !(m.dlapse_dt_ && m.dmetric_dt_);
  m.fd_step_ = 1e-4 * domain.width_or(1.0);
  return m;
}

double SpacetimeModel::dlapse_dt(double x, double t) const {
  if (dlapse_dt_) return dlapse_dt_(x, t);
  if (!allow_fd_fallback_)
    throw_error(ErrorKind::missing_derivative, "model has no analytic d(lapse)/dt");
  return (lapse_(x, t + fd_step_) - lapse_(x, t - fd_step_)) / (2.0 * fd_step_);
}

double SpacetimeModel::dmetric_dt(double x, double t) const {
  if (dmetric_dt_) return dmetric_dt_(x, t);
  if (!allow_fd_fallback_)
    throw_error(ErrorKind::missing_derivative, "model has no analytic d(metric)/dt");
  return (metric_(x, t + fd_step_) - metric_(x, t - fd_step_)) / (2.0 * fd_step_);
}

SpacetimeModel SpacetimeModel::rebased(double t0) const {
  if (!supports_rebase_)
    throw_error(ErrorKind::rebase_unavailable,
                "model kind '" + kind_name_ + "' does not support time translation");
  SpacetimeModel m = *this;
  m.domain_ = {domain_.lo - t0, domain_.hi - t0};
  auto shift = [t0](Fn fn) -> Fn {
    if (!fn) return nullptr;
    return [fn = std::move(fn), t0](double x, double t) { return fn(x, t + t0); };
  };
  m.lapse_ = shift(lapse_);
  m.metric_ = shift(metric_);
  m.dlapse_dt_ = shift(dlapse_dt_);
  m.dmetric_dt_ = shift(dmetric_dt_);
  return m;
}

SpacetimeModel SpacetimeModel::without_rebase() const {
  SpacetimeModel m = *this;
  m.supports_rebase_ = false;
  return m;
}

SpacetimeModel SpacetimeModel::with_fd_derivatives(double dt) const {
  SpacetimeModel m = *this;
  m.dlapse_dt_ = nullptr;
  m.dmetric_dt_ = nullptr;
  m.allow_fd_fallback_ = true;
  m.derivatives_fd_ = true;
  m.fd_step_ = dt;
  return m;
}

namespace {

void check_time_domain(const SpacetimeModel& model, const ScalarField& f) {
  const TDomain& dom = model.t_domain();
  for (int i = 0; i < f.size(); ++i) {
    if (!dom.contains(f[i])) {
      std::ostringstream msg;
      msg << "graph value " << f[i] << " at x=" << f.grid().point(i) << " leaves the time domain";
      throw_error(ErrorKind::domain_violation, msg.str());
    }
  }
}

}  // namespace

double spacelike_margin(const SpacetimeModel& model, const ScalarField& f) {
  check_time_domain(model, f);
  const ScalarField df = dx(f);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < f.size(); ++i) {
    const double x = f.grid().point(i);
    const double beta = model.lapse(x, f[i]);
    const double a = model.metric(x, f[i]);
    margin = std::min(margin, 1.0 - beta * df[i] * df[i] / a);
  }
  return margin;
}

SliceData sample_model(const SpacetimeModel& model, const ScalarField& f, double margin_floor) {
  check_time_domain(model, f);
  const Grid grid = f.grid();
  ScalarField beta(grid), dbeta(grid), a(grid), h(grid);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.point(i);
    beta[i] = model.lapse(x, f[i]);
    dbeta[i] = model.dlapse_dt(x, f[i]);
    a[i] = model.metric(x, f[i]);
    h[i] = model.dmetric_dt(x, f[i]);
    if (!(beta[i] > 0.0) || !(a[i] > 0.0))
      throw_error(ErrorKind::domain_violation, "model lapse/metric not positive on the slice");
  }
  const ScalarField df = dx(f);
  ScalarField grad(grid), E(grid), F(grid);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.n; ++i) {
    grad[i] = df[i] / a[i];
    E[i] = 1.0 - beta[i] * df[i] * df[i] / a[i];
    margin = std::min(margin, E[i]);
  }
  if (margin <= margin_floor) {
    std::ostringstream msg;
    msg << "spacelike margin " << margin << " at or below floor " << margin_floor;
    throw_error(ErrorKind::spacelike_violation, msg.str());
  }
  for (int i = 0; i < grid.n; ++i) F[i] = 1.0 / std::sqrt(E[i]);
  return SliceData{f,      beta,          dbeta, h, df, grad, E, F, MetricField(a), margin,
                   model.derivatives_fd()};
}

MetricField induced_metric(const SpacetimeModel& model, const ScalarField& f) {
  check_time_domain(model, f);
  const Grid grid = f.grid();
  const ScalarField df = dx(f);
  ScalarField a_ind(grid);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.point(i);
    a_ind[i] = model.metric(x, f[i]) - model.lapse(x, f[i]) * df[i] * df[i];
    if (!(a_ind[i] > MetricField::kPositivityTol))
      throw_error(ErrorKind::spacelike_violation, "induced metric not positive; graph leaves the chart");
  }
  return MetricField(std::move(a_ind));
}

}  // namespace slicegeo
