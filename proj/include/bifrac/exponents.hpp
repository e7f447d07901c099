#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace bifrac {

/// The exponent tuple (n, alpha, p1, p2, p, q, r, s) with the commutator
/// arity data (N, m).  p is always derived from p1, p2.
struct ExponentConfig {
  int n = 1;
  double alpha = 0.5;
  double p1 = 4.0, p2 = 4.0;
  double q = 2.0;
  std::optional<double> r, s;
  int commutator_arity = 0;  // N
  int first_slot_count = 0;  // m = #{i : beta_i = 1}
  bool sobolev = false;      // 1/q = 1/p - alpha/n

  double p() const { return 1.0 / (1.0 / p1 + 1.0 / p2); }
  double q_prime() const { return q / (q - 1.0); }
  static double conjugate_exponent(double e) { return e / (e - 1.0); }

  void validate() const {
    if (n < 1 || n > 2) throw std::invalid_argument("exponent config requires n in {1,2}");
    if (!(alpha >= 0) || !(alpha < n)) throw std::invalid_argument("exponent config requires 0 <= alpha < n");
    if (!(p1 > 1) || !(p2 > 1)) throw std::invalid_argument("exponent config requires p1, p2 > 1");
    if (!(q > 0)) throw std::invalid_argument("exponent config requires q > 0");
    if (r.has_value() != s.has_value())
      throw std::invalid_argument("Holder pair (r, s) must be given together");
    if (r && std::abs(1.0 / *r + 1.0 / *s - 1.0) > 1e-12)
      throw std::invalid_argument("Holder pair requires 1/r + 1/s = 1");
    if (sobolev && std::abs(1.0 / q - (1.0 / p() - alpha / n)) > 1e-12)
      throw std::invalid_argument("Sobolev scaling requires 1/q = 1/p - alpha/n");
    if (commutator_arity < 0 || first_slot_count < 0 || first_slot_count > commutator_arity)
      throw std::invalid_argument("commutator slots require 0 <= m <= N");
  }
};

}  // namespace bifrac
