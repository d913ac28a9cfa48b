#pragma once

#include <vector>

namespace slicegeo {

/// Cubic spline interpolation on strictly increasing knots.
///
/// Boundary handling:
///   natural  - zero second derivative at both ends
///   clamped  - prescribed first derivatives at both ends
///   periodic - y[last] must equal y[0]; C2 across the seam
///
/// Evaluation outside the knot range extrapolates linearly from the end
/// value and slope, keeping the function C1.
class CubicSpline {
 public:
  enum class Boundary { natural, clamped, periodic };

  CubicSpline(std::vector<double> x, std::vector<double> y, Boundary boundary = Boundary::natural,
              double slope_left = 0.0, double slope_right = 0.0);

  double eval(double t) const;
  double deriv(double t) const;

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  int interval(double t) const;

  std::vector<double> x_, y_, m_;  // m_ = second derivatives at knots
  Boundary boundary_;
};

}  // namespace slicegeo
