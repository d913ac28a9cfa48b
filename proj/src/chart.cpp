#include "slicegeo/chart.hpp"

#include <cmath>
#include <sstream>

namespace slicegeo {

AuxiliaryFields auxiliary_fields(const SliceData& s) {
  const Grid grid = s.f.grid();
  ScalarField eta(grid), zeta(grid), eps(grid), xi(grid), delta(grid);
  const ScalarField dbeta_f = dx(s.beta);
  for (int i = 0; i < grid.n; ++i) {
    const double a = s.g[i];
    eta[i] = 0.5 * s.h_coeff[i] / a;
    zeta[i] = s.df[i] * s.df[i] / a;
    eps[i] = dbeta_f[i] * s.df[i] / a;
    xi[i] = 0.5 * (s.dbeta_dt[i] / s.beta[i]) * zeta[i] - 0.5 * s.h_coeff[i] * s.grad[i] * s.grad[i];
  }
  ScalarField lap = laplacian(s.f, s.g);
  ScalarField hess = hessian_gg(s.f, s.g);
  for (int i = 0; i < grid.n; ++i) delta[i] = s.beta[i] * hess[i] + 0.5 * zeta[i] * eps[i];
  return AuxiliaryFields{eta, zeta, eps, xi, delta, lap, hess};
}

ConnectionForm connection_form(const SliceData& s) {
  const AuxiliaryFields aux = auxiliary_fields(s);
  const Grid grid = s.f.grid();
  ScalarField phi(grid), psi(grid);
  for (int i = 0; i < grid.n; ++i) {
    const double F2 = s.F[i] * s.F[i];
    const double F4 = F2 * F2;
    phi[i] = s.dbeta_dt[i] / s.beta[i] + aux.eta[i] +
             (s.beta[i] * aux.xi[i] + s.beta[i] * aux.lap_f[i] + 2.0 * aux.eps[i]) * F2 +
             3.0 * s.beta[i] * aux.delta[i] * F4;
    psi[i] = s.beta[i] * F2 * s.grad[i];
  }
  return ConnectionForm{phi, psi};
}

double metric_G(const SliceData& s, const ScalarField& u, const ScalarField& v) {
  require_same_grid(s.f.grid(), u.grid(), "metric_G");
  require_same_grid(s.f.grid(), v.grid(), "metric_G");
  const double h = u.grid().spacing();
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i)
    acc += s.beta[i] * s.F[i] * u[i] * v[i] * std::sqrt(s.g[i]) * h;
  return acc;
}

double metric_G(const SpacetimeModel& model, const ScalarField& f, const ScalarField& u,
                const ScalarField& v, double margin_floor) {
  return metric_G(sample_model(model, f, margin_floor), u, v);
}

ScalarField connection_gamma(const SliceData& s, const ScalarField& u, const ScalarField& v) {
  require_same_grid(s.f.grid(), u.grid(), "connection_gamma");
  require_same_grid(s.f.grid(), v.grid(), "connection_gamma");
  const ConnectionForm form = connection_form(s);
  const ScalarField du = dx(u);
  const ScalarField dv = dx(v);
  ScalarField out(u.grid());
  for (int i = 0; i < u.size(); ++i) {
    // g(psi, grad(uv)) with grad(uv) expanded by the Leibniz rule.
    const double product_grad = (u[i] * dv[i] + v[i] * du[i]) / s.g[i];
    out[i] = 0.5 * form.phi[i] * u[i] * v[i] + s.g[i] * form.psi[i] * product_grad;
  }
  return out;
}

ScalarField connection_gamma(const SpacetimeModel& model, const ScalarField& f,
                             const ScalarField& u, const ScalarField& v, double margin_floor) {
  return connection_gamma(sample_model(model, f, margin_floor), u, v);
}

double metric_derivative_DG(const SliceData& s, const ScalarField& u, const ScalarField& v,
                            const ScalarField& w) {
  require_same_grid(s.f.grid(), u.grid(), "metric_derivative_DG");
  require_same_grid(s.f.grid(), v.grid(), "metric_derivative_DG");
  require_same_grid(s.f.grid(), w.grid(), "metric_derivative_DG");
  const AuxiliaryFields aux = auxiliary_fields(s);
  const ScalarField dw = dx(w);
  const double h = u.grid().spacing();
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const double F = s.F[i];
    const double F2 = F * F;
    const double sqrt_a = std::sqrt(s.g[i]);
    const double bracket = s.dbeta_dt[i] / s.beta[i] + aux.eta[i] + s.beta[i] * F2 * aux.xi[i];
    acc += s.beta[i] * F * bracket * u[i] * v[i] * w[i] * sqrt_a * h;
    acc += s.beta[i] * s.beta[i] * F2 * F * (s.df[i] * dw[i] / s.g[i]) * u[i] * v[i] * sqrt_a * h;
  }
  return acc;
}

double metric_derivative_DG(const SpacetimeModel& model, const ScalarField& f,
                            const ScalarField& u, const ScalarField& v, const ScalarField& w,
                            double margin_floor) {
  return metric_derivative_DG(sample_model(model, f, margin_floor), u, v, w);
}

double koszul_residual(const SpacetimeModel& model, const ScalarField& f, const ScalarField& u,
                       const ScalarField& v, const ScalarField& w, double step,
                       double margin_floor) {
  const SliceData s = sample_model(model, f, margin_floor);
  if (step > 0.0 && s.margin < 10.0 * step) {
    std::ostringstream msg;
    msg << "margin " << s.margin << " too small for finite-difference step " << step;
    throw_error(ErrorKind::spacelike_violation, msg.str());
  }

  const double lhs = 2.0 * metric_G(s, connection_gamma(s, u, v), w);

  auto dG = [&](const ScalarField& p, const ScalarField& q, const ScalarField& dir) {
    if (step == 0.0) return metric_derivative_DG(s, p, q, dir);
    const ScalarField fp = f + dir * step;
    const ScalarField fm = f - dir * step;
    return (metric_G(model, fp, p, q, margin_floor) - metric_G(model, fm, p, q, margin_floor)) /
           (2.0 * step);
  };

  const double t1 = dG(v, w, u);
  const double t2 = dG(u, w, v);
  const double t3 = dG(u, v, w);
  const double rhs = t1 + t2 - t3;

  const double abs_residual = std::abs(lhs - rhs);
  // Scale floor from the input norms keeps the ratio meaningful when the
  // geometry makes every term vanish (static data, time-symmetric slices).
  const double input_scale = metric_G(s, u, u) + metric_G(s, v, v) + metric_G(s, w, w);
  const double scale = std::max({std::abs(lhs), std::abs(t1), std::abs(t2), std::abs(t3),
                                 1e-6 * input_scale});
  return scale > 0.0 ? abs_residual / scale : abs_residual;
}

ScalarField curvature_r31(const MetricField& S_metric, const ScalarField& u, const ScalarField& v,
                          const ScalarField& w) {
  require_same_grid(S_metric.grid(), u.grid(), "curvature_r31");
  require_same_grid(S_metric.grid(), v.grid(), "curvature_r31");
  require_same_grid(S_metric.grid(), w.grid(), "curvature_r31");
  const ScalarField gu = gradient(u, S_metric);
  const ScalarField gv = gradient(v, S_metric);
  const ScalarField gw = gradient(w, S_metric);
  const ScalarField lu = laplacian(u, S_metric);
  const ScalarField lv = laplacian(v, S_metric);
  ScalarField out(u.grid());
  for (int i = 0; i < u.size(); ++i) {
    const double q = v[i] * gu[i] - u[i] * gv[i];
    out[i] = S_metric[i] * q * gw[i] + 0.5 * (v[i] * lu[i] - u[i] * lv[i]) * w[i];
  }
  return out;
}

double slice_inner(const MetricField& S_metric, const ScalarField& u, const ScalarField& v) {
  return l2_inner(u, v, S_metric);
}

namespace {

struct OrthonormalPair {
  ScalarField e1, e2;
};

OrthonormalPair gram_schmidt(const MetricField& h, const ScalarField& u, const ScalarField& v) {
  const double uu = slice_inner(h, u, u);
  const double vv = slice_inner(h, v, v);
  const double uv = slice_inner(h, u, v);
  const double gram = uu * vv - uv * uv;
  if (!(gram > 1e-12 * uu * vv))
    throw_error(ErrorKind::degenerate_plane, "u and v do not span a 2-plane in L2");
  ScalarField e1 = u * (1.0 / std::sqrt(uu));
  ScalarField e2 = v - e1 * slice_inner(h, v, e1);
  e2 *= 1.0 / std::sqrt(slice_inner(h, e2, e2));
  return {e1, e2};
}

}  // namespace

double sectional_curvature(const SpacetimeModel& model, const ScalarField& f, const ScalarField& u,
                           const ScalarField& v, double margin_floor) {
  sample_model(model, f, margin_floor);  // enforces the chart-domain guard
  const MetricField h = induced_metric(model, f);
  const auto [e1, e2] = gram_schmidt(h, u, v);
  const ScalarField g1 = gradient(e1, h);
  const ScalarField g2 = gradient(e2, h);
  ScalarField q(u.grid());
  for (int i = 0; i < q.size(); ++i) q[i] = e1[i] * g2[i] - e2[i] * g1[i];
  // -(1/2) * integral of |q|^2 = a q^2 against dvol_h
  return -0.5 * l2_inner(q, q, h.coeff(), h);
}

double riemann_4(const SpacetimeModel& model, const ScalarField& f, const ScalarField& u,
                 const ScalarField& v, const ScalarField& w, const ScalarField& z,
                 double margin_floor) {
  sample_model(model, f, margin_floor);
  const MetricField h = induced_metric(model, f);
  return slice_inner(h, curvature_r31(h, u, v, w), z);
}

ScalarField curvature_fd_oracle(const SpacetimeModel& model, const ScalarField& base_f,
                                const ScalarField& u, const ScalarField& v, const ScalarField& w,
                                double step) {
  if (!(step > 0.0)) throw std::invalid_argument("curvature_fd_oracle: step must be positive");
  if (base_f.max() - base_f.min() > 1e-12)
    throw_error(ErrorKind::rebase_unavailable, "base slice must be constant for recentering");
  const SpacetimeModel local = model.rebased(base_f[0]);
  const Grid grid = base_f.grid();
  const ScalarField zero(grid, 0.0);

  auto gamma_at = [&](const ScalarField& f, const ScalarField& p, const ScalarField& q) {
    return connection_gamma(local, f, p, q);
  };

  // Central-difference exterior derivative of Gamma in the directions u, v.
  ScalarField d_gamma = (gamma_at(u * step, v, w) - gamma_at(u * (-step), v, w)) * (0.5 / step) -
                        (gamma_at(v * step, u, w) - gamma_at(v * (-step), u, w)) * (0.5 / step);

  // Wedge term from Gamma_0 (evaluated, not assumed to vanish).
  const ScalarField wedge =
      gamma_at(zero, u, gamma_at(zero, v, w)) - gamma_at(zero, v, gamma_at(zero, u, w));
  const ScalarField r_fd = d_gamma + wedge;

  // Closed form: intrinsic tensor of the zero-section slice metric, mapped
  // through the graph-derivative weight sqrt(beta_0).
  ScalarField beta0(grid), a0(grid);
  for (int i = 0; i < grid.n; ++i) {
    beta0[i] = local.lapse(grid.point(i), 0.0);
    a0[i] = local.metric(grid.point(i), 0.0);
  }
  ScalarField root_beta(grid);
  for (int i = 0; i < grid.n; ++i) root_beta[i] = std::sqrt(beta0[i]);
  const MetricField g0{a0};
  const ScalarField r_intrinsic = curvature_r31(g0, root_beta * u, root_beta * v, root_beta * w);
  ScalarField r_closed(grid);
  for (int i = 0; i < grid.n; ++i) r_closed[i] = r_intrinsic[i] / root_beta[i];

  return r_fd - r_closed;
}

}  // namespace slicegeo
