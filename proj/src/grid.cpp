#include "slicegeo/grid.hpp"

#include <algorithm>

namespace slicegeo {

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": fields on different grids");
}

double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }
double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "ScalarField::operator+=");
  for (int i = 0; i < size(); ++i) v_[static_cast<size_t>(i)] += o[i];
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "ScalarField::operator-=");
  for (int i = 0; i < size(); ++i) v_[static_cast<size_t>(i)] -= o[i];
  return *this;
}
ScalarField& ScalarField::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "ScalarField::operator*");
  ScalarField out = a;
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

ScalarField dx(const ScalarField& u) {
  const Grid& g = u.grid();
  const double inv_12h = 1.0 / (12.0 * g.spacing());
  ScalarField out(g);
  for (int i = 0; i < g.n; ++i) {
    // Grouped as differences of pairs so constants are annihilated exactly.
    const double d1 = u.at_wrapped(i + 1) - u.at_wrapped(i - 1);
    const double d2 = u.at_wrapped(i + 2) - u.at_wrapped(i - 2);
    out[i] = (8.0 * d1 - d2) * inv_12h;
  }
  return out;
}

ScalarField gradient(const ScalarField& u, const MetricField& g) {
  require_same_grid(u.grid(), g.grid(), "gradient");
  ScalarField out = dx(u);
  for (int i = 0; i < out.size(); ++i) out[i] /= g[i];
  return out;
}

ScalarField divergence(const ScalarField& x_coeff, const MetricField& g) {
  require_same_grid(x_coeff.grid(), g.grid(), "divergence");
  ScalarField scaled = x_coeff;
  for (int i = 0; i < scaled.size(); ++i) scaled[i] *= std::sqrt(g[i]);
  ScalarField out = dx(scaled);
  for (int i = 0; i < out.size(); ++i) out[i] /= std::sqrt(g[i]);
  return out;
}

ScalarField laplacian(const ScalarField& u, const MetricField& g) {
  return divergence(gradient(u, g), g);
}

ScalarField hessian_gg(const ScalarField& f, const MetricField& g) {
  require_same_grid(f.grid(), g.grid(), "hessian_gg");
  // Hess(f)(grad f, grad f) = g(nabla_X X, X) for X = grad f = (f'/a) d/dx,
  // with Christoffel symbol a'/(2a):  a * b^2 * (b' + Gamma * b), b = f'/a.
  const ScalarField b = gradient(f, g);
  const ScalarField db = dx(b);
  const ScalarField da = dx(g.coeff());
  ScalarField out(f.grid());
  for (int i = 0; i < out.size(); ++i) {
    const double gamma = da[i] / (2.0 * g[i]);
    out[i] = g[i] * b[i] * b[i] * (db[i] + gamma * b[i]);
  }
  return out;
}

double l2_inner(const ScalarField& u, const ScalarField& v, const ScalarField& weight,
                const MetricField& g) {
  require_same_grid(u.grid(), v.grid(), "l2_inner");
  require_same_grid(u.grid(), weight.grid(), "l2_inner");
  require_same_grid(u.grid(), g.grid(), "l2_inner");
  const double h = u.grid().spacing();
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) acc += weight[i] * u[i] * v[i] * std::sqrt(g[i]) * h;
  return acc;
}

double l2_inner(const ScalarField& u, const ScalarField& v, const MetricField& g) {
  require_same_grid(u.grid(), v.grid(), "l2_inner");
  require_same_grid(u.grid(), g.grid(), "l2_inner");
  const double h = u.grid().spacing();
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) acc += u[i] * v[i] * std::sqrt(g[i]) * h;
  return acc;
}

double l2_norm(const ScalarField& u, const MetricField& g) {
  return std::sqrt(std::max(0.0, l2_inner(u, u, g)));
}

}  // namespace slicegeo
