#pragma once

#include "slicegeo/grid.hpp"
#include "slicegeo/spacetime.hpp"

namespace slicegeo {

/// Scalar ingredients of the connection form at a fixed slice. All of them
/// vanish identically when grad f = 0, except eta and lap_f.
struct AuxiliaryFields {
  ScalarField eta;      // (1/2) tr(g^-1 h)
  ScalarField zeta;     // |grad f|^2
  ScalarField eps;      // g(grad beta_f, grad f)
  ScalarField xi;       // (1/2)(dbeta/beta) zeta - (1/2) h(grad f, grad f)
  ScalarField delta;    // beta Hess(f)(grad f, grad f) + (1/2) zeta eps
  ScalarField lap_f;    // Laplacian of f
  ScalarField hess_gg;  // Hess(f)(grad f, grad f)
};

/// Connection form data: Gamma_f(u,v) = (1/2) phi u v + g(psi, grad(uv)).
struct ConnectionForm {
  ScalarField phi;
  ScalarField psi;  // d/dx coefficient of the vector field, beta F^2 grad f
};

AuxiliaryFields auxiliary_fields(const SliceData& s);
ConnectionForm connection_form(const SliceData& s);

/// Chart metric G_f(u,v) = integral of beta_f F_f u v against dvol_{g_f}.
double metric_G(const SliceData& s, const ScalarField& u, const ScalarField& v);
double metric_G(const SpacetimeModel& model, const ScalarField& f, const ScalarField& u,
                const ScalarField& v, double margin_floor = kDefaultMarginFloor);

/// Connection form evaluated on a pair of tangent fields; symmetric and
/// bilinear. The gradient of the product uv is expanded through the discrete
/// Leibniz rule u grad v + v grad u, so finite-difference derivatives of the
/// connection in f converge to the closed-form curvature on the same grid.
ScalarField connection_gamma(const SliceData& s, const ScalarField& u, const ScalarField& v);
ScalarField connection_gamma(const SpacetimeModel& model, const ScalarField& f,
                             const ScalarField& u, const ScalarField& v,
                             double margin_floor = kDefaultMarginFloor);

/// Directional derivative of f -> G_f(u,v) along w. This is the exact
/// derivative of the discrete metric, not a separate discretization.
double metric_derivative_DG(const SliceData& s, const ScalarField& u, const ScalarField& v,
                            const ScalarField& w);
double metric_derivative_DG(const SpacetimeModel& model, const ScalarField& f,
                            const ScalarField& u, const ScalarField& v, const ScalarField& w,
                            double margin_floor = kDefaultMarginFloor);

/// Relative residual of 2 G(Gamma(u,v), w) against the Koszul combination
/// D_u G(v,w) + D_v G(u,w) - D_w G(u,v). With step == 0 the derivatives are
/// the closed-form ones; with step > 0 they are central differences of G.
/// Requires margin >= 10 * step.
double koszul_residual(const SpacetimeModel& model, const ScalarField& f, const ScalarField& u,
                       const ScalarField& v, const ScalarField& w, double step = 0.0,
                       double margin_floor = kDefaultMarginFloor);

/// (3,1) curvature tensor of a slice with metric S_metric:
///   R(u,v)w = g(v grad u - u grad v, grad w) + (1/2)(v lap u - u lap v) w.
/// Antisymmetric in (u,v).
ScalarField curvature_r31(const MetricField& S_metric, const ScalarField& u, const ScalarField& v,
                          const ScalarField& w);

/// L2 product of slice functions against the volume of the slice metric;
/// this is the restriction of the chart metric to the slice.
double slice_inner(const MetricField& S_metric, const ScalarField& u, const ScalarField& v);

/// Sectional curvature of span{u,v} at the graph of f. The pair is
/// Gram-Schmidt orthonormalized (u first) in the L2 product of the induced
/// metric; the result is basis independent and always <= 0.
double sectional_curvature(const SpacetimeModel& model, const ScalarField& f, const ScalarField& u,
                           const ScalarField& v, double margin_floor = kDefaultMarginFloor);

/// (4,0) curvature: the slice L2 pairing of R(u,v)w with z. Satisfies
/// riemann_4(u,v,v,u) = Gram(u,v) * sectional_curvature(u,v).
double riemann_4(const SpacetimeModel& model, const ScalarField& f, const ScalarField& u,
                 const ScalarField& v, const ScalarField& w, const ScalarField& z,
                 double margin_floor = kDefaultMarginFloor);

/// Curvature oracle at a constant slice: rebases the model so base_f is the
/// zero section, forms D Gamma by central differences of f -> Gamma_f in the
/// directions u and v, adds Gamma ^ Gamma evaluated from Gamma_0, and returns
/// the discrepancy field against the closed-form tensor mapped through the
/// graph-derivative weight sqrt(beta_0).
ScalarField curvature_fd_oracle(const SpacetimeModel& model, const ScalarField& base_f,
                                const ScalarField& u, const ScalarField& v, const ScalarField& w,
                                double step);

}  // namespace slicegeo
