#include "slicegeo/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slicegeo {

namespace {

// Thomas algorithm; diagonals (a = sub, b = main, c = super), overwrites nothing.
std::vector<double> solve_tridiagonal(std::vector<double> a, std::vector<double> b,
                                      std::vector<double> c, std::vector<double> d) {
  const size_t n = b.size();
  for (size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

// Cyclic tridiagonal with corner entries (alpha = bottom-left, beta = top-right),
// solved by Sherman-Morrison.
std::vector<double> solve_cyclic(std::vector<double> a, std::vector<double> b,
                                 std::vector<double> c, std::vector<double> d, double alpha,
                                 double beta) {
  const size_t n = b.size();
  const double gamma = -b[0];
  std::vector<double> bb = b;
  bb[0] -= gamma;
  bb[n - 1] -= alpha * beta / gamma;
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  const std::vector<double> x = solve_tridiagonal(a, bb, c, d);
  const std::vector<double> z = solve_tridiagonal(a, bb, c, u);
  const double factor = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = x[i] - factor * z[i];
  return out;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y, Boundary boundary,
                         double slope_left, double slope_right)
    : x_(std::move(x)), y_(std::move(y)), boundary_(boundary) {
  const size_t n = x_.size();
  if (n < 3 || y_.size() != n) throw std::invalid_argument("CubicSpline: need >= 3 knots");
  for (size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("CubicSpline: knots must increase");

  const size_t m = n - 1;  // number of intervals
  std::vector<double> h(m);
  for (size_t i = 0; i < m; ++i) h[i] = x_[i + 1] - x_[i];

  if (boundary_ == Boundary::periodic) {
    if (std::abs(y_[0] - y_[n - 1]) > 1e-12 * (1.0 + std::abs(y_[0])))
      throw std::invalid_argument("CubicSpline: periodic data must wrap");
    // Unknowns M_0..M_{m-1}; M_m = M_0.
    std::vector<double> a(m), b(m), c(m), d(m);
    auto dy = [&](size_t i) {  // slope of interval i (indices mod m)
      return (y_[(i + 1) % n == 0 ? n - 1 : i + 1] - y_[i]) / h[i];
    };
    for (size_t i = 0; i < m; ++i) {
      const size_t prev = (i + m - 1) % m;
      a[i] = h[prev] / 6.0;
      b[i] = (h[prev] + h[i]) / 3.0;
      c[i] = h[i] / 6.0;
      d[i] = dy(i) - dy(prev);
    }
    const double alpha = c[m - 1];  // wraps to column 0
    const double beta = a[0];       // wraps to column m-1
    a[0] = 0.0;
    c[m - 1] = 0.0;
    std::vector<double> msol = solve_cyclic(a, b, c, d, alpha, beta);
    m_ = msol;
    m_.push_back(msol[0]);
    return;
  }

  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
  for (size_t i = 1; i < n - 1; ++i) {
    a[i] = h[i - 1] / 6.0;
    b[i] = (h[i - 1] + h[i]) / 3.0;
    c[i] = h[i] / 6.0;
    d[i] = (y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1];
  }
  if (boundary_ == Boundary::natural) {
    b[0] = 1.0;
    b[n - 1] = 1.0;
  } else {  // clamped
    b[0] = h[0] / 3.0;
    c[0] = h[0] / 6.0;
    d[0] = (y_[1] - y_[0]) / h[0] - slope_left;
    a[n - 1] = h[m - 1] / 6.0;
    b[n - 1] = h[m - 1] / 3.0;
    d[n - 1] = slope_right - (y_[n - 1] - y_[n - 2]) / h[m - 1];
  }
  m_ = solve_tridiagonal(a, b, c, d);
}

int CubicSpline::interval(double t) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  int i = static_cast<int>(it - x_.begin()) - 1;
  i = std::clamp(i, 0, static_cast<int>(x_.size()) - 2);
  return i;
}

double CubicSpline::eval(double t) const {
  if (t < x_.front()) return y_.front() + deriv(x_.front()) * (t - x_.front());
  if (t > x_.back()) return y_.back() + deriv(x_.back()) * (t - x_.back());
  const int i = interval(t);
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - t) / h;
  const double B = (t - x_[i]) / h;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double t) const {
  const double lo = x_.front(), hi = x_.back();
  const double tc = std::clamp(t, lo, hi);
  const int i = interval(tc);
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - tc) / h;
  const double B = (tc - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         h / 6.0 * (-(3.0 * A * A - 1.0) * m_[i] + (3.0 * B * B - 1.0) * m_[i + 1]);
}

}  // namespace slicegeo
