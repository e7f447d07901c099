#pragma once

#include "bifrac/cube.hpp"

namespace bifrac {

/// Integral of |y|^e over the half-open box [lo, hi) in dimension `dim`.
/// Closed form for dim = 1; for dim = 2 adaptive 4-way subdivision near the
/// origin with quarter-disc bounds on the innermost subcell, Gauss panels away
/// from it.  Returns +infinity when the integral diverges (e <= -dim and the
/// closure of the box meets the origin).
double abs_power_box_integral(const Point& lo, const Point& hi, int dim, double e,
                              double rel_tol = 1e-8);

}  // namespace bifrac
