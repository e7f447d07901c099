#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "bifrac/grid_function.hpp"

namespace bifrac {

/// Closed parametric family of Young functions:
///   power(p)            t^p
///   log_bump(r, s)      t^r log(e+t)^s,  r >= 1
///   l_log_l(k)          t log(e+t)^k
///   exp_l               e^t - 1
///   exp_l_pow(xi)       e^{t^{1/xi}} - 1
///   reverse_log_bump(p, c)   t^p / log(e+t)^c
/// plus the numeric associate (Legendre conjugate) of any superlinear member.
class YoungFunction {
 public:
  enum class Family { power, log_bump, l_log_l, exp_l, exp_l_pow, reverse_log_bump, conjugate };

  static YoungFunction power(double p);
  static YoungFunction log_bump(double r, double s);
  static YoungFunction l_log_l(double k);
  static YoungFunction exp_l();
  static YoungFunction exp_l_pow(double xi);
  static YoungFunction reverse_log_bump(double p, double c);

  double value(double t) const;
  double derivative(double t) const;
  double inverse(double y) const;  // bisection, 1e-12 relative

  /// Numeric associate: conj(s) = sup_{t>=0} (s t - value(t)).
  YoungFunction conjugate() const;

  Family family() const { return family_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  const YoungFunction* conjugate_base() const;  // null unless this is a conjugate
  bool is_power(double* p = nullptr) const;
  /// value(t)/t -> infinity; required for conjugation.
  bool superlinear() const;
  /// Whether this exact representative is convex on all of [0,inf).  The
  /// exp(L^{1/xi}) representative with xi > 1 is convex only from t ~ 1 on.
  bool convex_representative() const;
  std::string spec_string() const;

 private:
  YoungFunction(Family f, double a, double b) : family_(f), a_(a), b_(b) {}
  Family family_;
  double a_ = 0, b_ = 0;
  std::shared_ptr<const YoungFunction> base_;  // conjugate only
};

/// Luxemburg functional inf{lambda > 0 : avg_Q Phi(|f|/lambda) <= 1},
/// bisection on the slice at 1e-10 relative tolerance.  Returns 0 when the
/// function vanishes on the cube.
double orlicz_norm(const CubeSlice& slice, const YoungFunction& phi);
double orlicz_norm(const GridFunction& f, const Cube& q, const YoungFunction& phi);

/// The equivalent functional inf_l { l + (l/|Q|) \int_Q Phi(|f|/l) }.
double orlicz_norm_prime(const CubeSlice& slice, const YoungFunction& phi);
double orlicz_norm_prime(const GridFunction& f, const Cube& q, const YoungFunction& phi);

enum class BpVerdict { in_bp, not_in_bp };

struct BpCheck {
  BpVerdict verdict;                   // final answer (symbolic rule when available)
  std::optional<BpVerdict> symbolic;
  std::optional<BpVerdict> numeric;    // nullopt when the quadrature is inconclusive
  double integral = 0;                 // accumulated \int_1^T Phi(t) t^{-p-1} dt
  double last_increment = 0;
  double tail_slope = 0;               // fitted decay exponent of per-decade increments
};

struct BpIndeterminate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integrability test for \int^infty Phi(t)/t^{p+1} dt (the class B_p).
/// Symbolic rule on the closed family; numeric certificate by per-decade
/// quadrature up to 1e12 with a tail-decay fit.  Throws BpIndeterminate when
/// neither route decides.
BpCheck bp_check(const YoungFunction& phi, double p);

/// (avg_Q |fg|, 2 ||f||_{psi,Q} ||g||_{conj psi,Q}); callers assert lhs <= rhs.
std::pair<double, double> holder_pair_check(const GridFunction& f, const GridFunction& g,
                                            const Cube& q, const YoungFunction& psi);

/// Axiom probe used by tests: Phi(0)=0, strict monotonicity and midpoint
/// convexity on a log-spaced sample, superlinearity, inverse round-trip.
bool check_young_axioms(const YoungFunction& phi, double* worst_roundtrip = nullptr);

}  // namespace bifrac
