#include "bifrac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bifrac {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 12-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGaussN = 12;
constexpr double kGaussX[kGaussN] = {
    -0.9815606342467192, -0.9041172563704749, -0.7699026741943047,
    -0.5873179542866175, -0.3678314989981802, -0.1252334085114689,
    0.1252334085114689,  0.3678314989981802,  0.5873179542866175,
    0.7699026741943047,  0.9041172563704749,  0.9815606342467192};
constexpr double kGaussW[kGaussN] = {
    0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
    0.2031674267230659, 0.2334925365383548, 0.2491470458134028,
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

// Exact antiderivative-based integral of |y|^e over [a, b), 1-D.
double line_integral(double a, double b, double e) {
  if (b <= a) return 0.0;
  if (b <= 0) return line_integral(-b, -a, e);
  if (a < 0) return line_integral(0, -a, e) + line_integral(0, b, e);
  if (a == 0 && e <= -1) return std::numeric_limits<double>::infinity();
  if (e == -1) return std::log(b) - std::log(a);
  return (std::pow(b, e + 1) - std::pow(a, e + 1)) / (e + 1);
}

double gauss_box(double ax, double bx, double ay, double by, double e) {
  const double cx = 0.5 * (ax + bx), rx = 0.5 * (bx - ax);
  const double cy = 0.5 * (ay + by), ry = 0.5 * (by - ay);
  double sum = 0;
  for (int i = 0; i < kGaussN; ++i) {
    const double x = cx + rx * kGaussX[i];
    double row = 0;
    for (int j = 0; j < kGaussN; ++j) {
      const double y = cy + ry * kGaussX[j];
      row += kGaussW[j] * std::pow(x * x + y * y, 0.5 * e);
    }
    sum += kGaussW[i] * row;
  }
  return sum * rx * ry;
}

// Box in the closed first quadrant, 0 <= ax <= bx, 0 <= ay <= by.
double quadrant_box(double ax, double bx, double ay, double by, double e, double abs_tol,
                    int depth) {
  if (bx <= ax || by <= ay) return 0.0;
  if (ax == 0 && ay == 0) {
    if (e <= -2) return std::numeric_limits<double>::infinity();
    const double r_in = std::min(bx, by);
    const double r_out = std::hypot(bx, by);
    const double lo = 0.5 * kPi * std::pow(r_in, e + 2) / (e + 2);
    const double hi = 0.5 * kPi * std::pow(r_out, e + 2) / (e + 2);
    const double bound_lo = std::min(lo, hi), bound_hi = std::max(lo, hi);
    if (bound_hi - bound_lo <= abs_tol || depth > 200)
      return 0.5 * (bound_lo + bound_hi);
    const double mx = 0.5 * bx, my = 0.5 * by;
    return quadrant_box(0, mx, 0, my, e, abs_tol, depth + 1) +
           quadrant_box(mx, bx, 0, my, e, abs_tol, depth + 1) +
           quadrant_box(0, mx, my, by, e, abs_tol, depth + 1) +
           quadrant_box(mx, bx, my, by, e, abs_tol, depth + 1);
  }
  const double dist = std::hypot(ax, ay);
  const double diam = std::hypot(bx - ax, by - ay);
  if (dist >= diam || depth > 200) return gauss_box(ax, bx, ay, by, e);
  const double mx = 0.5 * (ax + bx), my = 0.5 * (ay + by);
  return quadrant_box(ax, mx, ay, my, e, 0.25 * abs_tol, depth + 1) +
         quadrant_box(mx, bx, ay, my, e, 0.25 * abs_tol, depth + 1) +
         quadrant_box(ax, mx, my, by, e, 0.25 * abs_tol, depth + 1) +
         quadrant_box(mx, bx, my, by, e, 0.25 * abs_tol, depth + 1);
}

// Split the box along the axes so every piece lies in a closed quadrant,
// reflect into the first quadrant, and integrate each piece.
double plane_integral(const Point& lo, const Point& hi, double e, double abs_tol) {
  double total = 0;
  const double xs[3] = {lo[0], std::clamp(0.0, lo[0], hi[0]), hi[0]};
  const double ys[3] = {lo[1], std::clamp(0.0, lo[1], hi[1]), hi[1]};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double ax = xs[i], bx = xs[i + 1], ay = ys[j], by = ys[j + 1];
      if (bx <= ax || by <= ay) continue;
      if (bx <= 0) {
        const double t = ax;
        ax = -bx;
        bx = -t;
      }
      if (by <= 0) {
        const double t = ay;
        ay = -by;
        by = -t;
      }
      total += quadrant_box(ax, bx, ay, by, e, abs_tol, 0);
    }
  }
  return total;
}

}  // namespace

double abs_power_box_integral(const Point& lo, const Point& hi, int dim, double e,
                              double rel_tol) {
  if (dim == 1) return line_integral(lo[0], hi[0], e);
  if (dim != 2) throw std::invalid_argument("abs_power_box_integral: dim must be 1 or 2");
  // First pass with a loose tolerance pins the scale for the absolute budget.
  const double rough = plane_integral(lo, hi, e, std::numeric_limits<double>::max());
  if (!std::isfinite(rough)) return rough;
  return plane_integral(lo, hi, e, rel_tol * std::max(rough, 1e-300));
}

}  // namespace bifrac
