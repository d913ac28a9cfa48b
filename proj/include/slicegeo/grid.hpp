#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace slicegeo {

/// Uniform periodic grid on the circle, x_i = 2*pi*i/N. Only dim = 1 is
/// implemented; the tag is kept so a 2D torus backend can slot in later.
struct Grid {
  int dim = 1;
  int n = 0;

  explicit Grid(int n_points) : n(n_points) {
    if (n_points < 8) throw std::invalid_argument("Grid: N must be at least 8");
  }

  double spacing() const { return 2.0 * std::numbers::pi / n; }
  double point(int i) const { return spacing() * i; }
  int wrap(int i) const {
    i %= n;
    return i < 0 ? i + n : i;
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Real function sampled on a Grid. Values must be finite.
class ScalarField {
 public:
  ScalarField(Grid grid, double fill = 0.0) : grid_(grid), v_(static_cast<size_t>(grid.n), fill) {
    check_finite();
  }
  ScalarField(Grid grid, std::vector<double> values) : grid_(grid), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != grid_.n)
      throw std::invalid_argument("ScalarField: value count does not match grid");
    check_finite();
  }

  static ScalarField sampled(Grid grid, const std::function<double(double)>& fn) {
    std::vector<double> v(static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) v[static_cast<size_t>(i)] = fn(grid.point(i));
    return ScalarField(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  int size() const { return grid_.n; }
  double operator[](int i) const { return v_[static_cast<size_t>(i)]; }
  double& operator[](int i) { return v_[static_cast<size_t>(i)]; }
  double at_wrapped(int i) const { return v_[static_cast<size_t>(grid_.wrap(i))]; }
  const std::vector<double>& values() const { return v_; }

  double min() const;
  double max() const;
  double max_abs() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);

 private:
  void check_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) throw std::invalid_argument("ScalarField: non-finite value");
  }

  Grid grid_;
  std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, double s);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(const ScalarField& a, const ScalarField& b);  // pointwise
ScalarField operator-(ScalarField a);

void require_same_grid(const Grid& a, const Grid& b, const char* where);

/// Riemannian metric a(x) dx^2 on the grid. The coefficient must be positive
/// everywhere (tolerance 1e-12); every downstream formula divides by it.
class MetricField {
 public:
  explicit MetricField(ScalarField coeff) : coeff_(std::move(coeff)) {
    for (int i = 0; i < coeff_.size(); ++i)
      if (!(coeff_[i] > kPositivityTol))
        throw std::invalid_argument("MetricField: coefficient must be positive");
  }
  static MetricField constant(Grid grid, double a) { return MetricField(ScalarField(grid, a)); }

  const Grid& grid() const { return coeff_.grid(); }
  const ScalarField& coeff() const { return coeff_; }
  double operator[](int i) const { return coeff_[i]; }

  static constexpr double kPositivityTol = 1e-12;

 private:
  ScalarField coeff_;
};

/// Plain 4th-order central x-derivative (periodic). The stencil matrix is
/// antisymmetric, which makes discrete summation by parts exact.
ScalarField dx(const ScalarField& u);

/// Coefficient of the gradient vector field grad(u) = (u'/a) d/dx.
ScalarField gradient(const ScalarField& u, const MetricField& g);

/// Divergence of the vector field with coefficient X: (1/sqrt(a)) d/dx(sqrt(a) X).
ScalarField divergence(const ScalarField& x_coeff, const MetricField& g);

/// Laplace-Beltrami operator, composed as divergence(gradient(u)).
ScalarField laplacian(const ScalarField& u, const MetricField& g);

/// Pointwise Hess(f)(grad f, grad f) via the 1D Christoffel symbol of a(x).
ScalarField hessian_gg(const ScalarField& f, const MetricField& g);

/// Trapezoid quadrature of weight * u * v against dvol_g = sqrt(a) dx.
/// Summation is left-to-right; results are bit-reproducible.
double l2_inner(const ScalarField& u, const ScalarField& v, const ScalarField& weight,
                const MetricField& g);
double l2_inner(const ScalarField& u, const ScalarField& v, const MetricField& g);
double l2_norm(const ScalarField& u, const MetricField& g);

}  // namespace slicegeo
