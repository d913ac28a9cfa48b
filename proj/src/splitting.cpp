#include "slicegeo/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "slicegeo/chart.hpp"
#include "slicegeo/spline.hpp"

namespace slicegeo {

PathDiscretization linear_path(const ScalarField& f0, const ScalarField& f1, int segments) {
  require_same_grid(f0.grid(), f1.grid(), "linear_path");
  if (segments < 1) throw std::invalid_argument("linear_path: need at least one segment");
  PathDiscretization path;
  path.knots.reserve(static_cast<size_t>(segments) + 1);
  for (int k = 0; k <= segments; ++k) {
    const double s = static_cast<double>(k) / segments;
    path.knots.push_back(f0 * (1.0 - s) + f1 * s);
  }
  return path;
}

double path_length(const SpacetimeModel& model, const PathDiscretization& path,
                   double margin_floor) {
  const int K = path.segments();
  if (K < 1) throw std::invalid_argument("path_length: need at least one segment");
  for (const ScalarField& knot : path.knots) sample_model(model, knot, margin_floor);
  double length = 0.0;
  for (int k = 0; k < K; ++k) {
    const ScalarField mid = (path.knots[static_cast<size_t>(k)] + path.knots[static_cast<size_t>(k) + 1]) * 0.5;
    const ScalarField delta =
        (path.knots[static_cast<size_t>(k) + 1] - path.knots[static_cast<size_t>(k)]) * static_cast<double>(K);
    const SliceData s = sample_model(model, mid, margin_floor);
    length += std::sqrt(std::max(0.0, metric_G(s, delta, delta))) / K;
  }
  return length;
}

double distance_lower_bound(const ScalarField& f0, const ScalarField& f1, const MetricField& h) {
  require_same_grid(f0.grid(), f1.grid(), "distance_lower_bound");
  require_same_grid(f0.grid(), h.grid(), "distance_lower_bound");
  return l2_norm(f0 - f1, h);
}

LapseBoundReport verify_lapse_bound(const SpacetimeModel& model, const MetricField& h, double t_lo,
                                    double t_hi, int n_t) {
  if (!(t_hi > t_lo) || n_t < 2)
    throw std::invalid_argument("verify_lapse_bound: bad sampling window");
  const Grid grid = h.grid();
  LapseBoundReport report;
  report.min_value = std::numeric_limits<double>::infinity();
  report.n_x = grid.n;
  report.n_t = n_t;
  report.t_lo = t_lo;
  report.t_hi = t_hi;
  for (int j = 0; j < n_t; ++j) {
    const double t = t_lo + (t_hi - t_lo) * j / (n_t - 1);
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.point(i);
      const double value = model.lapse(x, t) * std::sqrt(model.metric(x, t) / h[i]);
      if (value < report.min_value) {
        report.min_value = value;
        report.argmin_x = x;
        report.argmin_t = t;
      }
    }
  }
  report.pass = report.min_value >= 1.0 - kLapseBoundSlack;
  return report;
}

namespace {

/// C1 monotone map from RK4 samples: cubic Hermite per interval, using the
/// stored slopes f' = F(f). Linear continuation outside the sampled range.
class HermiteMap {
 public:
  HermiteMap(std::vector<double> s, std::vector<double> f, std::vector<double> fp)
      : s_(std::move(s)), f_(std::move(f)), fp_(std::move(fp)) {}

  double eval(double s) const {
    if (s <= s_.front()) return f_.front() + fp_.front() * (s - s_.front());
    if (s >= s_.back()) return f_.back() + fp_.back() * (s - s_.back());
    const size_t i = interval(s);
    const double hh = s_[i + 1] - s_[i];
    const double t = (s - s_[i]) / hh;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f_[i] + (t3 - 2 * t2 + t) * hh * fp_[i] +
           (-2 * t3 + 3 * t2) * f_[i + 1] + (t3 - t2) * hh * fp_[i + 1];
  }

  double deriv(double s) const {
    if (s <= s_.front()) return fp_.front();
    if (s >= s_.back()) return fp_.back();
    const size_t i = interval(s);
    const double hh = s_[i + 1] - s_[i];
    const double t = (s - s_[i]) / hh;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * f_[i] / hh + (3 * t2 - 4 * t + 1) * fp_[i] +
            (-6 * t2 + 6 * t) * f_[i + 1] / hh + (3 * t2 - 2 * t) * fp_[i + 1]);
  }

 private:
  size_t interval(double s) const {
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    return static_cast<size_t>(std::clamp<long>(it - s_.begin() - 1, 0,
                                                static_cast<long>(s_.size()) - 2));
  }

  std::vector<double> s_, f_, fp_;
};

}  // namespace

ReparametrizedSplitting reparametrize_bounded_lapse(const SpacetimeModel& model,
                                                    const MetricField& h, double t_lo,
                                                    double t_hi, const ReparametrizeOptions& opts) {
  if (!(t_lo <= 0.0 && 0.0 <= t_hi) || !(t_hi > t_lo))
    throw_error(ErrorKind::window_exhausted, "window must contain t = 0");
  if (!(model.t_domain().contains(t_lo) && model.t_domain().contains(t_hi)))
    throw_error(ErrorKind::window_exhausted, "window exceeds the model time domain");

  const Grid grid = h.grid();
  const int n_fine = std::max(8, static_cast<int>(std::ceil((t_hi - t_lo) / opts.lattice_step))) + 1;
  std::vector<double> t_fine(static_cast<size_t>(n_fine)), q_fine(static_cast<size_t>(n_fine));
  for (int j = 0; j < n_fine; ++j) {
    const double t = t_lo + (t_hi - t_lo) * j / (n_fine - 1);
    double min_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.point(i);
      min_val = std::min(min_val, model.lapse(x, t) * std::sqrt(model.metric(x, t) / h[i]));
    }
    if (!(min_val > 0.0))
      throw_error(ErrorKind::non_positive_m, "lapse-determinant ratio not positive on the lattice");
    const double m = std::sqrt(min_val);
    t_fine[static_cast<size_t>(j)] = t;
    q_fine[static_cast<size_t>(j)] = std::max(1.0, 1.0 / m);
  }

  // Envelope knots carry the max of q over their cell, so the spline sits on
  // top of the sampled profile before padding.
  const int stride = std::max(1, opts.envelope_stride);
  std::vector<double> knots_t, knots_q;
  for (int j = 0; j < n_fine; j += stride) {
    const int hi_idx = std::min(n_fine - 1, j + stride - 1);
    double cell_max = 0.0;
    const int lo_idx = std::max(0, j - stride + 1);
    for (int i = lo_idx; i <= hi_idx; ++i) cell_max = std::max(cell_max, q_fine[static_cast<size_t>(i)]);
    knots_t.push_back(t_fine[static_cast<size_t>(j)]);
    knots_q.push_back(cell_max);
  }
  if (knots_t.back() < t_fine.back()) {
    knots_t.push_back(t_fine.back());
    knots_q.push_back(q_fine.back());
  }
  while (knots_t.size() < 3) {  // degenerate tiny windows
    knots_t.push_back(knots_t.back() + opts.lattice_step);
    knots_q.push_back(knots_q.back());
  }
  const CubicSpline envelope(knots_t, knots_q, CubicSpline::Boundary::clamped, 0.0, 0.0);

  // A posteriori check on a 10x finer probe lattice, evaluating the model
  // directly; the pad is lifted until the padded spline clears max(1, 1/m)
  // everywhere on the probes.
  auto q_of = [&](double t) {
    double min_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.point(i);
      min_val = std::min(min_val, model.lapse(x, t) * std::sqrt(model.metric(x, t) / h[i]));
    }
    if (!(min_val > 0.0))
      throw_error(ErrorKind::non_positive_m, "lapse-determinant ratio not positive on the lattice");
    return std::max(1.0, 1.0 / std::sqrt(min_val));
  };
  double pad = opts.pad;
  const int n_probe = 10 * (n_fine - 1) + 1;
  for (int j = 0; j < n_probe; ++j) {
    const double t = t_lo + (t_hi - t_lo) * j / (n_probe - 1);
    const double dip = q_of(t) - envelope.eval(t);
    if (dip + opts.pad > pad) pad = dip + opts.pad;
  }
  auto F_of = [&](double t) { return envelope.eval(t) + pad; };

  // RK4 on f' = F(f), f(0) = 0, forward until f reaches t_hi and backward
  // until t_lo. F >= 1 makes the map a diffeomorphism onto the window.
  std::vector<double> s_fwd{0.0}, f_fwd{0.0};
  const double ds = opts.ode_step;
  auto rk4_step = [&](double f, double sign) {
    const double k1 = F_of(f);
    const double k2 = F_of(f + sign * 0.5 * ds * k1);
    const double k3 = F_of(f + sign * 0.5 * ds * k2);
    const double k4 = F_of(f + sign * ds * k3);
    return f + sign * ds / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  };
  {
    double s = 0.0, f = 0.0;
    while (f < t_hi) {
      f = rk4_step(f, +1.0);
      s += ds;
      s_fwd.push_back(s);
      f_fwd.push_back(f);
      if (s > 10.0 * (t_hi - t_lo) + 10.0)
        throw_error(ErrorKind::window_exhausted, "forward integration failed to reach the window edge");
    }
  }
  std::vector<double> s_bwd, f_bwd;
  if (t_lo < 0.0) {
    double s = 0.0, f = 0.0;
    while (f > t_lo) {
      f = rk4_step(f, -1.0);
      s -= ds;
      s_bwd.push_back(s);
      f_bwd.push_back(f);
      if (-s > 10.0 * (t_hi - t_lo) + 10.0)
        throw_error(ErrorKind::window_exhausted, "backward integration failed to reach the window edge");
    }
  }

  std::vector<double> s_samples, f_samples, fprime_samples;
  for (size_t i = s_bwd.size(); i-- > 0;) {
    s_samples.push_back(s_bwd[i]);
    f_samples.push_back(f_bwd[i]);
  }
  s_samples.insert(s_samples.end(), s_fwd.begin(), s_fwd.end());
  f_samples.insert(f_samples.end(), f_fwd.begin(), f_fwd.end());
  fprime_samples.reserve(f_samples.size());
  for (double fv : f_samples) fprime_samples.push_back(F_of(fv));

  auto map = std::make_shared<HermiteMap>(s_samples, f_samples, fprime_samples);
  auto base = std::make_shared<SpacetimeModel>(model);
  auto envl = std::make_shared<CubicSpline>(envelope);
  const double pad_cap = pad;
  auto F_eval = [envl, pad_cap](double t) { return envl->eval(t) + pad_cap; };

  SpacetimeModel::Fn lapse = [base, map, F_eval](double x, double s) {
    const double t = map->eval(s);
    const double fp = F_eval(t);
    return base->lapse(x, t) * fp * fp;
  };
  SpacetimeModel::Fn dlapse = [base, map, F_eval, envl](double x, double s) {
    const double t = map->eval(s);
    const double fp = F_eval(t);
    const double fpp = envl->deriv(t) * fp;  // chain rule through f' = F(f)
    return base->dlapse_dt(x, t) * fp * fp * fp + 2.0 * base->lapse(x, t) * fp * fpp;
  };
  SpacetimeModel::Fn metric = [base, map](double x, double s) {
    return base->metric(x, map->eval(s));
  };
  SpacetimeModel::Fn dmetric = [base, map, F_eval](double x, double s) {
    const double t = map->eval(s);
    return base->dmetric_dt(x, t) * F_eval(t);
  };
  // The last step on each side overshoots the window; keep those samples for
  // Hermite accuracy but trim the usable domain to values inside the window.
  TDomain domain{s_samples.front(), s_samples.back()};
  for (size_t i = 0; i < s_samples.size(); ++i) {
    if (f_samples[i] >= t_lo) {
      domain.lo = s_samples[i];
      break;
    }
  }
  for (size_t i = s_samples.size(); i-- > 0;) {
    if (f_samples[i] <= t_hi) {
      domain.hi = s_samples[i];
      break;
    }
  }
  if (!(domain.hi > domain.lo))
    throw_error(ErrorKind::window_exhausted, "window too small for the integration step");
  SpacetimeModel new_model =
      SpacetimeModel::make_custom("reparametrized", lapse, metric, domain, dlapse, dmetric);

  const double guard = 1e-9 * (domain.hi - domain.lo);
  const LapseBoundReport certificate =
      verify_lapse_bound(new_model, h, domain.lo + guard, domain.hi - guard, 201);
  if (!certificate.pass) {
    std::ostringstream msg;
    msg << "reparametrized splitting failed its own lapse bound (min " << certificate.min_value
        << ")";
    throw std::logic_error(msg.str());
  }
  return ReparametrizedSplitting{std::move(s_samples), std::move(f_samples),
                                 std::move(fprime_samples), std::move(new_model), certificate,
                                 pad};
}

}  // namespace slicegeo
