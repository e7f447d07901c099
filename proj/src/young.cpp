#include "bifrac/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bifrac {

namespace {
constexpr double kE = 2.718281828459045235;
}

YoungFunction YoungFunction::power(double p) {
  if (!(p >= 1)) throw std::invalid_argument("power Young function requires p >= 1");
  return YoungFunction(Family::power, p, 0);
}

YoungFunction YoungFunction::log_bump(double r, double s) {
  if (!(r >= 1)) throw std::invalid_argument("log-bump Young function requires r >= 1");
  return YoungFunction(Family::log_bump, r, s);
}

YoungFunction YoungFunction::l_log_l(double k) {
  if (!(k >= 0)) throw std::invalid_argument("LlogL Young function requires k >= 0");
  return YoungFunction(Family::l_log_l, k, 0);
}

YoungFunction YoungFunction::exp_l() { return YoungFunction(Family::exp_l, 0, 0); }

YoungFunction YoungFunction::exp_l_pow(double xi) {
  if (!(xi > 0)) throw std::invalid_argument("exp(L^{1/xi}) requires xi > 0");
  return YoungFunction(Family::exp_l_pow, xi, 0);
}

YoungFunction YoungFunction::reverse_log_bump(double p, double c) {
  if (!(p > 1) || !(c >= 0))
    throw std::invalid_argument("reverse log-bump requires p > 1, c >= 0");
  return YoungFunction(Family::reverse_log_bump, p, c);
}

double YoungFunction::value(double t) const {
  if (t <= 0) return 0.0;
  switch (family_) {
    case Family::power:
      return std::pow(t, a_);
    case Family::log_bump:
      return std::pow(t, a_) * std::pow(std::log(kE + t), b_);
    case Family::l_log_l:
      return t * std::pow(std::log(kE + t), a_);
    case Family::exp_l:
      return std::expm1(t);
    case Family::exp_l_pow:
      return std::expm1(std::pow(t, 1.0 / a_));
    case Family::reverse_log_bump:
      return std::pow(t, a_) / std::pow(std::log(kE + t), b_);
    case Family::conjugate: {
      // conj(s) = s t* - base(t*) at base'(t*) = s; zero below base'(0+).
      const YoungFunction& base = *base_;
      const double s = t;
      double hi = 1.0;
      if (base.derivative(0.0) >= s) return 0.0;
      while (base.derivative(hi) < s) {
        hi *= 2;
        if (hi > 1e290) break;
      }
      double lo = 0.0;
      for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (base.derivative(mid) < s ? lo : hi) = mid;
      }
      const double tstar = 0.5 * (lo + hi);
      return std::max(0.0, s * tstar - base.value(tstar));
    }
  }
  return 0.0;
}

double YoungFunction::derivative(double t) const {
  switch (family_) {
    case Family::power:
      return t <= 0 ? (a_ > 1 ? 0.0 : 1.0) : a_ * std::pow(t, a_ - 1);
    case Family::log_bump: {
      if (t <= 0) return a_ > 1 ? 0.0 : std::pow(std::log(kE), b_);
      const double L = std::log(kE + t);
      return std::pow(t, a_ - 1) * std::pow(L, b_ - 1) * (a_ * L + b_ * t / (kE + t));
    }
    case Family::l_log_l: {
      if (t <= 0) return 1.0;
      const double L = std::log(kE + t);
      return std::pow(L, a_ - 1) * (L + a_ * t / (kE + t));
    }
    case Family::exp_l:
      return std::exp(t);
    case Family::exp_l_pow: {
      if (t <= 0) return a_ >= 1 ? (a_ == 1 ? 1.0 : 0.0) : 0.0;
      const double u = std::pow(t, 1.0 / a_);
      return std::exp(u) * u / (a_ * t);
    }
    case Family::reverse_log_bump: {
      if (t <= 0) return 0.0;
      const double L = std::log(kE + t);
      return std::pow(t, a_ - 1) * std::pow(L, -b_ - 1) * (a_ * L - b_ * t / (kE + t));
    }
    case Family::conjugate: {
      // Fenchel: (conj)'(s) = argmax t*(s) = (base')^{-1}(s); not needed in
      // the solvers, provided for completeness.
      const double s = t;
      if (base_->derivative(0.0) >= s) return 0.0;
      double hi = 1.0;
      while (base_->derivative(hi) < s && hi < 1e290) hi *= 2;
      double lo = 0.0;
      for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (base_->derivative(mid) < s ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

double YoungFunction::inverse(double y) const {
  if (y <= 0) return 0.0;
  double hi = 1.0;
  while (value(hi) < y) {
    hi *= 2;
    if (hi > 1e300) throw std::runtime_error("young inverse: no finite bracket");
  }
  double lo = 0.0;
  for (int it = 0; it < 300 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool YoungFunction::is_power(double* p) const {
  if (family_ != Family::power) return false;
  if (p) *p = a_;
  return true;
}

bool YoungFunction::superlinear() const {
  switch (family_) {
    case Family::power:
      return a_ > 1;
    case Family::log_bump:
      return a_ > 1 || (a_ == 1 && b_ > 0);
    case Family::l_log_l:
      return a_ > 0;
    case Family::exp_l:
    case Family::exp_l_pow:
      return true;
    case Family::reverse_log_bump:
      return true;  // p > 1 enforced at construction
    case Family::conjugate:
      return true;
  }
  return false;
}

bool YoungFunction::convex_representative() const {
  if (family_ == Family::exp_l_pow) return a_ <= 1;
  if (family_ == Family::log_bump) return b_ >= 0;
  return true;
}

YoungFunction YoungFunction::conjugate() const {
  if (family_ == Family::conjugate)
    throw std::invalid_argument("conjugate of a conjugate is not supported");
  if (!superlinear())
    throw std::invalid_argument("associate requires a superlinear Young function: " + spec_string());
  if (family_ == Family::exp_l_pow && a_ > 1)
    throw std::invalid_argument("associate of exp(L^{1/xi}) with xi > 1 is unsupported (non-convex near 0)");
  YoungFunction out(Family::conjugate, 0, 0);
  out.base_ = std::make_shared<YoungFunction>(*this);
  return out;
}

const YoungFunction* YoungFunction::conjugate_base() const { return base_.get(); }

std::string YoungFunction::spec_string() const {
  char buf[96];
  switch (family_) {
    case Family::power:
      std::snprintf(buf, sizeof buf, "power(%g)", a_);
      return buf;
    case Family::log_bump:
      std::snprintf(buf, sizeof buf, "logbump(r=%g,s=%g)", a_, b_);
      return buf;
    case Family::l_log_l:
      std::snprintf(buf, sizeof buf, "llogl(k=%g)", a_);
      return buf;
    case Family::exp_l:
      return "expl";
    case Family::exp_l_pow:
      std::snprintf(buf, sizeof buf, "explpow(xi=%g)", a_);
      return buf;
    case Family::reverse_log_bump:
      std::snprintf(buf, sizeof buf, "revlogbump(p=%g,c=%g)", a_, b_);
      return buf;
    case Family::conjugate:
      return "conj[" + base_->spec_string() + "]";
  }
  return "?";
}

double orlicz_norm(const CubeSlice& slice, const YoungFunction& phi) {
  if (slice.volume <= 0) throw std::invalid_argument("orlicz norm over a zero-volume cube");
  if (slice.max_abs == 0) return 0.0;
  double p;
  if (phi.is_power(&p)) {
    // closed form: (avg |f|^p)^{1/p}, exact for the Luxemburg functional
    return std::pow(slice.mean([p](double v) { return std::pow(std::abs(v), p); }), 1.0 / p);
  }
  const auto excess = [&](double lambda) {
    return slice.mean([&](double v) { return phi.value(std::abs(v) / lambda); }) > 1.0;
  };
  double hi = slice.max_abs / phi.inverse(1.0) * (1 + 1e-12) + 1e-300;
  while (excess(hi)) hi *= 2;  // guard against rounding at the analytic bound
  double lo = hi;
  while (!excess(lo)) {
    lo /= 16;
    if (lo < 1e-300) return 0.0;  // vanishing functional: norm at the noise floor
  }
  hi = std::min(hi, lo * 16);
  for (int it = 0; it < 300 && (hi - lo) > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) ? lo : hi) = mid;
  }
  return hi;
}

double orlicz_norm(const GridFunction& f, const Cube& q, const YoungFunction& phi) {
  return orlicz_norm(cube_slice(f, q), phi);
}

double orlicz_norm_prime(const CubeSlice& slice, const YoungFunction& phi) {
  if (slice.volume <= 0) throw std::invalid_argument("orlicz norm over a zero-volume cube");
  if (slice.max_abs == 0) return 0.0;
  const auto objective = [&](double lambda) {
    return lambda + lambda * slice.mean([&](double v) { return phi.value(std::abs(v) / lambda); });
  };
  const double scale = slice.max_abs / phi.inverse(1.0) + 1e-300;
  double a = std::log(scale) - 34.0;  // generous log-bracket around the minimizer
  double b = std::log(scale) + 3.0;
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(std::exp(x1)), f2 = objective(std::exp(x2));
  for (int it = 0; it < 220; ++it) {
    if (std::isinf(f1) && std::isinf(f2)) {
      // both probes under-shoot lambda so hard the mean overflows; the
      // minimizer is to the right
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(std::exp(x2));
      continue;
    }
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = objective(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(std::exp(x2));
    }
  }
  return std::min(f1, f2);
}

double orlicz_norm_prime(const GridFunction& f, const Cube& q, const YoungFunction& phi) {
  return orlicz_norm_prime(cube_slice(f, q), phi);
}

namespace {

// Asymptotic growth (rho, sigma): Phi(t) ~ t^rho log(t)^sigma up to constants.
// rho = +inf encoded as infinity (exponential growth); rho = 1 with sigma > 0
// conjugates to exponential growth.
struct Growth {
  double rho = 0, sigma = 0;
};

std::optional<Growth> symbolic_growth(const YoungFunction& y) {
  using F = YoungFunction::Family;
  switch (y.family()) {
    case F::power:
      return Growth{y.param_a(), 0};
    case F::log_bump:
      return Growth{y.param_a(), y.param_b()};
    case F::l_log_l:
      return Growth{1, y.param_a()};
    case F::exp_l:
    case F::exp_l_pow:
      return Growth{std::numeric_limits<double>::infinity(), 0};
    case F::reverse_log_bump:
      return Growth{y.param_a(), -y.param_b()};
    case F::conjugate:
      return std::nullopt;  // resolved by the caller through the base
  }
  return std::nullopt;
}

std::optional<BpVerdict> symbolic_bp(const YoungFunction& y, double p) {
  const std::optional<Growth> g = symbolic_growth(y);
  if (!g) return std::nullopt;
  if (std::isinf(g->rho)) return BpVerdict::not_in_bp;
  if (g->rho < p) return BpVerdict::in_bp;
  if (g->rho > p) return BpVerdict::not_in_bp;
  return g->sigma < -1 ? BpVerdict::in_bp : BpVerdict::not_in_bp;
}

// Conjugate growth of t^rho log^sigma: t^{rho'} log^{-sigma (rho'-1)}.
std::optional<Growth> conjugate_growth(const Growth& g) {
  if (std::isinf(g.rho)) return Growth{1, 1};  // exp-type conjugates grow ~ s log s
  if (g.rho > 1) {
    const double rho_c = g.rho / (g.rho - 1);
    return Growth{rho_c, -g.sigma * (rho_c - 1)};
  }
  if (g.rho == 1 && g.sigma > 0) return Growth{std::numeric_limits<double>::infinity(), 0};
  return std::nullopt;
}

}  // namespace

BpCheck bp_check(const YoungFunction& phi, double p) {
  if (!(p > 1)) throw std::invalid_argument("bp_check requires p > 1");

  std::optional<BpVerdict> symbolic;
  if (phi.family() == YoungFunction::Family::conjugate) {
    if (auto base_growth = symbolic_growth(*phi.conjugate_base())) {
      if (auto g = conjugate_growth(*base_growth)) {
        if (std::isinf(g->rho))
          symbolic = BpVerdict::not_in_bp;
        else if (g->rho < p)
          symbolic = BpVerdict::in_bp;
        else if (g->rho > p)
          symbolic = BpVerdict::not_in_bp;
        else
          symbolic = g->sigma < -1 ? BpVerdict::in_bp : BpVerdict::not_in_bp;
      }
    }
  } else {
    symbolic = symbolic_bp(phi, p);
  }

  // Numeric certificate: per-decade quadrature of Phi(t) t^{-p-1} on
  // [10^k, 10^{k+1}], k = 0..12, then a decay fit of the increments.
  constexpr int kDecades = 13;
  constexpr int kNodes = 32;
  static const auto nodes = [] {
    // Gauss-Legendre on [0,1] by Newton iteration on Legendre polynomials.
    std::array<std::pair<double, double>, kNodes> nw{};
    for (int i = 0; i < kNodes; ++i) {
      double x = std::cos(3.14159265358979323846 * (i + 0.75) / (kNodes + 0.5));
      for (int it = 0; it < 100; ++it) {
        double pm1 = 1, pcur = x;
        for (int k = 2; k <= kNodes; ++k) {
          const double pnext = ((2 * k - 1) * x * pcur - (k - 1) * pm1) / k;
          pm1 = pcur;
          pcur = pnext;
        }
        const double dp = kNodes * (x * pcur - pm1) / (x * x - 1);
        const double dx = pcur / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double pm1 = 1, pcur = x;
      for (int k = 2; k <= kNodes; ++k) {
        const double pnext = ((2 * k - 1) * x * pcur - (k - 1) * pm1) / k;
        pm1 = pcur;
        pcur = pnext;
      }
      const double dp = kNodes * (x * pcur - pm1) / (x * x - 1);
      nw[static_cast<size_t>(i)] = {0.5 * (x + 1), 1.0 / ((1 - x * x) * dp * dp)};
    }
    return nw;
  }();

  BpCheck out{BpVerdict::not_in_bp, symbolic, std::nullopt, 0, 0, 0};
  double increments[kDecades];
  const double ln10 = std::log(10.0);
  for (int k = 0; k < kDecades; ++k) {
    // substitute t = e^u on [k ln10, (k+1) ln10]
    const double u0 = k * ln10, u1 = (k + 1) * ln10;
    double acc = 0;
    for (const auto& [xi, wi] : nodes) {
      const double u = u0 + xi * (u1 - u0);
      const double t = std::exp(u);
      acc += wi * phi.value(t) * std::exp(-p * u);
    }
    increments[k] = acc * (u1 - u0);
    out.integral += increments[k];
  }
  out.last_increment = increments[kDecades - 1];

  if (std::isfinite(out.integral)) {
    if (out.last_increment < 1e-9 * std::max(out.integral, 1.0)) {
      out.numeric = BpVerdict::in_bp;
    } else {
      // fit increments ~ C k^{-slope} over the tail decades
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int cnt = 0;
      for (int k = 6; k < kDecades; ++k) {
        if (increments[k] <= 0) continue;
        const double x = std::log(static_cast<double>(k + 1));
        const double y = std::log(increments[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
      }
      if (cnt >= 3) {
        const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        out.tail_slope = -slope;
        if (out.tail_slope > 1.1) out.numeric = BpVerdict::in_bp;
        if (out.tail_slope < 0.9) out.numeric = BpVerdict::not_in_bp;
      }
    }
  } else {
    out.numeric = BpVerdict::not_in_bp;
  }

  if (symbolic) {
    out.verdict = *symbolic;
  } else if (out.numeric) {
    out.verdict = *out.numeric;
  } else {
    throw BpIndeterminate("bp_check inconclusive for " + phi.spec_string());
  }
  return out;
}

std::pair<double, double> holder_pair_check(const GridFunction& f, const GridFunction& g,
                                            const Cube& q, const YoungFunction& psi) {
  const GridFunction fg = GridFunction::zip(f, g, [](double a, double b) { return std::abs(a * b); });
  const double lhs = fg.average(q);
  const double rhs = 2.0 * orlicz_norm(f, q, psi) * orlicz_norm(g, q, psi.conjugate());
  return {lhs, rhs};
}

bool check_young_axioms(const YoungFunction& phi, double* worst_roundtrip) {
  if (phi.value(0) != 0) return false;
  // largest probing scale where the representative still evaluates finitely
  double t_top = 1e6;
  while (t_top > 10 && !std::isfinite(phi.value(t_top))) t_top /= 10;
  double prev = 0, worst = 0;
  for (double t = 1e-6; t <= 1.5 * t_top; t *= 10) {
    const double v = phi.value(t);
    if (!(v > prev)) return false;
    prev = v;
    const double rt = phi.value(phi.inverse(v));
    worst = std::max(worst, std::abs(rt - v) / std::max(v, 1e-300));
  }
  // Midpoint convexity sampled from t = 1 up.  The exponential-power
  // representatives are convex from t ~ 1 on, the regime the solvers probe.
  for (double t = 1.0; t <= t_top / 10; t *= 10) {
    const double a = t, b = 10 * t, m = 0.5 * (a + b);
    if (phi.value(m) > 0.5 * (phi.value(a) + phi.value(b)) * (1 + 1e-12)) return false;
  }
  if (phi.superlinear()) {
    // Phi(t)/t must keep growing across decades.
    double ratio_prev = phi.value(1.0);
    for (double t = 1e2; t <= 1.5 * t_top; t *= 100) {
      const double ratio = phi.value(t) / t;
      if (!(ratio > ratio_prev)) return false;
      ratio_prev = ratio;
    }
  }
  if (worst_roundtrip) *worst_roundtrip = worst;
  return worst < 1e-10;
}

}  // namespace bifrac
