#include "bifrac/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace bifrac {

Weight Weight::from_grid(GridFunction g) {
  if (!(g.min_value() > 0))
    throw std::invalid_argument("weights must be strictly positive on the domain box");
  return Weight(std::move(g));
}

Weight Weight::abs_power(const Mesh& mesh, double exponent) {
  Weight w(GridFunction::abs_power(mesh, exponent));
  w.exponent_ = exponent;
  return w;
}

GridFunction Weight::powered(double e) const {
  if (e == 1.0) return grid_;
  if (exponent_) return GridFunction::abs_power(grid_.mesh(), *exponent_ * e);
  return grid_.powered(e);
}

namespace {

struct Factor {
  enum class Kind { power_average, orlicz, cube_sup, cube_inf };
  Kind kind;
  GridFunction base;
  double outer;
  std::optional<YoungFunction> young;  // orlicz only
};

double eval_factor(const Factor& f, const CubeSlice& slice) {
  switch (f.kind) {
    case Factor::Kind::power_average: {
      const double avg = slice.mean([](double v) { return v; });
      return std::pow(avg, f.outer);
    }
    case Factor::Kind::orlicz:
      return std::pow(orlicz_norm(slice, *f.young), f.outer);
    case Factor::Kind::cube_sup: {
      double m = 0;
      for (double v : slice.value) m = std::max(m, v);
      return std::pow(m, f.outer);
    }
    case Factor::Kind::cube_inf: {
      double m = std::numeric_limits<double>::infinity();
      for (double v : slice.value) m = std::min(m, v);
      return std::pow(m, f.outer);
    }
  }
  return 0;
}

// Fast path for cell-aligned cubes: prefix averages and direct extrema.
double eval_factor(const Factor& f, const GridFunction& base_ref, const ScanCube& sc) {
  const long long cells = sc.span * (base_ref.mesh().dim == 2 ? sc.span : 1);
  switch (f.kind) {
    case Factor::Kind::power_average: {
      const double sum =
          base_ref.mesh().dim == 1
              ? base_ref.block_sum(sc.start[0], sc.start[0] + sc.span)
              : base_ref.block_sum(sc.start[0], sc.start[0] + sc.span, sc.start[1],
                                   sc.start[1] + sc.span);
      return std::pow(sum / static_cast<double>(cells), f.outer);
    }
    default:
      return 0;  // unreached; non-average factors fall back to slices
  }
}

struct FactorSet {
  double volume_exponent = 0;
  std::vector<Factor> factors;
  bool averages_only = true;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

FactorSet build_factors(const BumpSpec& spec, const WeightTriple& weights) {
  const ExponentConfig& cfg = spec.cfg;
  cfg.validate();
  const double n = cfg.n, alpha = cfg.alpha, p1 = cfg.p1, p2 = cfg.p2, q = cfg.q;
  const double p = cfg.p();
  const int N = cfg.commutator_arity, m = cfg.first_slot_count;
  const double delta = spec.delta;
  FactorSet out;
  out.volume_exponent = alpha / n + 1.0 / q - 1.0 / p;
  if (spec.zero_volume_exponent) out.volume_exponent = 0;

  const auto push_power = [&](GridFunction g, double outer) {
    out.factors.push_back({Factor::Kind::power_average, std::move(g), outer, std::nullopt});
  };
  const auto push_orlicz = [&](GridFunction g, YoungFunction y, double outer) {
    out.factors.push_back({Factor::Kind::orlicz, std::move(g), outer, std::move(y)});
    out.averages_only = false;
  };
  const auto push_sup = [&](GridFunction g, double outer) {
    out.factors.push_back({Factor::Kind::cube_sup, std::move(g), outer, std::nullopt});
    out.averages_only = false;
  };
  const auto push_inf = [&](GridFunction g, double outer) {
    out.factors.push_back({Factor::Kind::cube_inf, std::move(g), outer, std::nullopt});
    out.averages_only = false;
  };

  switch (spec.kind) {
    case BumpKind::thmD: {
      require(q <= 1 && p <= q, "bump kind thmD requires 1/2 < p <= q <= 1");
      if (q == 1)
        push_sup(weights.u.grid(), 1.0);
      else
        push_power(weights.u.powered(1.0 / (1.0 - q)), (1.0 - q) / q);
      const double p1c = ExponentConfig::conjugate_exponent(p1);
      const double p2c = ExponentConfig::conjugate_exponent(p2);
      push_orlicz(weights.v1.powered(-1.0 / p1), YoungFunction::log_bump(p1c, p1c - 1 + delta), 1.0);
      push_orlicz(weights.v2.powered(-1.0 / p2), YoungFunction::log_bump(p2c, p2c - 1 + delta), 1.0);
      break;
    }
    case BumpKind::thmA: {
      require(q <= 1 && p <= q, "bump kind thmA requires 1/2 < p <= q <= 1");
      if (q == 1)
        push_sup(weights.u.grid(), 1.0);
      else
        push_orlicz(weights.u.powered(1.0 / (1.0 - q)),
                    YoungFunction::l_log_l(q * N / (1.0 - q)), (1.0 - q) / q);
      const double p1c = ExponentConfig::conjugate_exponent(p1);
      const double p2c = ExponentConfig::conjugate_exponent(p2);
      push_orlicz(weights.v1.powered(-1.0 / p1),
                  YoungFunction::log_bump(p1c, (m + 1) * p1c - 1 + delta), 1.0);
      push_orlicz(weights.v2.powered(-1.0 / p2),
                  YoungFunction::log_bump(p2c, (N - m + 1) * p2c - 1 + delta), 1.0);
      break;
    }
    case BumpKind::thmE: {
      require(cfg.r.has_value(), "bump kind thmE requires a Holder pair (r, s)");
      const double r = *cfg.r, s = *cfg.s;
      require(p1 > r && p2 > s, "bump kind thmE requires p1 > r and p2 > s");
      require(spec.psi && spec.phi1 && spec.phi2,
              "bump kind thmE requires Young functions psi, phi1, phi2");
      push_orlicz(weights.u.powered(1.0 / q), *spec.psi, 1.0);
      push_orlicz(weights.v1.powered(-r / p1), *spec.phi1, 1.0 / r);
      push_orlicz(weights.v2.powered(-s / p2), *spec.phi2, 1.0 / s);
      break;
    }
    case BumpKind::thmB: {
      require(cfg.r.has_value(), "bump kind thmB requires a Holder pair (r, s)");
      const double r = *cfg.r, s = *cfg.s;
      require(p1 > r && p2 > s, "bump kind thmB requires p1 > r and p2 > s");
      require(q > 1 || p <= q, "bump kind thmB requires 1 < p <= q");
      const double a1 = ExponentConfig::conjugate_exponent(p1 / r);
      const double a2 = ExponentConfig::conjugate_exponent(p2 / s);
      push_orlicz(weights.u.powered(1.0 / q),
                  YoungFunction::log_bump(q, (N + 1) * q - 1 + delta), 1.0);
      push_orlicz(weights.v1.powered(-r / p1),
                  YoungFunction::log_bump(a1, (m * r + 1) * a1 - 1 + delta), 1.0 / r);
      push_orlicz(weights.v2.powered(-s / p2),
                  YoungFunction::log_bump(a2, ((N - m) * s + 1) * a2 - 1 + delta), 1.0 / s);
      break;
    }
    case BumpKind::eq21:
    case BumpKind::steinweiss:
    case BumpKind::onevec: {
      require(cfg.r.has_value(), "power-bump kinds require a Holder pair (r, s)");
      const double r = *cfg.r, s = *cfg.s;
      require(p1 >= r && p2 >= s, "power-bump kinds require p1 >= r and p2 >= s");
      push_power(weights.u.powered(1.0), 1.0 / q);
      if (p1 > r)
        push_power(weights.v1.powered(-r / (p1 - r)), (p1 - r) / (r * p1));
      else
        push_inf(weights.v1.grid(), -1.0 / p1);
      if (p2 > s)
        push_power(weights.v2.powered(-s / (p2 - s)), (p2 - s) / (s * p2));
      else
        push_inf(weights.v2.grid(), -1.0 / p2);
      if (spec.kind == BumpKind::onevec) out.volume_exponent = 0;
      break;
    }
    case BumpKind::bmtw: {
      require(cfg.r.has_value(), "bump kind bmtw requires a Holder pair (r, s)");
      const double r = *cfg.r, s = *cfg.s;
      require(p1 > r && p2 > s, "bump kind bmtw requires p1 > r and p2 > s");
      require(spec.psi && spec.phi1 && spec.phi2,
              "bump kind bmtw requires Young functions psi, phi1, phi2");
      push_orlicz(weights.u.powered(1.0 / p), *spec.psi, 1.0);
      push_orlicz(weights.v1.powered(-r / p1), *spec.phi1, 1.0 / r);
      push_orlicz(weights.v2.powered(-s / p2), *spec.phi2, 1.0 / s);
      out.volume_exponent = 0;
      break;
    }
  }
  return out;
}

int free_cube_scale(const Cube& q) {
  return static_cast<int>(std::lround(-std::log2(q.side())));
}

}  // namespace

BumpKind bump_kind_from_name(const std::string& name) {
  if (name == "thmD") return BumpKind::thmD;
  if (name == "thmE" || name == "eq22") return BumpKind::thmE;
  if (name == "thmA") return BumpKind::thmA;
  if (name == "thmB") return BumpKind::thmB;
  if (name == "eq21") return BumpKind::eq21;
  if (name == "onevec" || name == "eq91") return BumpKind::onevec;
  if (name == "bmtw" || name == "BMtw") return BumpKind::bmtw;
  if (name == "steinweiss" || name == "eq105") return BumpKind::steinweiss;
  throw std::invalid_argument("unknown bump kind: " + name);
}

std::string bump_kind_name(BumpKind kind) {
  switch (kind) {
    case BumpKind::thmD: return "thmD";
    case BumpKind::thmE: return "thmE";
    case BumpKind::thmA: return "thmA";
    case BumpKind::thmB: return "thmB";
    case BumpKind::eq21: return "eq21";
    case BumpKind::onevec: return "onevec";
    case BumpKind::bmtw: return "bmtw";
    case BumpKind::steinweiss: return "steinweiss";
  }
  return "?";
}

ScanMax bump_constant(const BumpSpec& spec, const WeightTriple& weights, const CubeScan& scan) {
  const FactorSet fs = build_factors(spec, weights);
  ScanMax out;
  const auto consider = [&](const Cube& q, double value, int scale) {
    if (!std::isfinite(value)) value = std::numeric_limits<double>::infinity();
    auto [it, inserted] = out.per_scale.try_emplace(scale, value);
    if (!inserted) it->second = std::max(it->second, value);
    if (value > out.value) {
      out.value = value;
      out.argmax = q;
    }
  };

  for (const ScanCube& sc : scan.aligned()) {
    const Cube q = scan.to_cube(sc);
    double val = std::pow(q.volume(), fs.volume_exponent);
    if (fs.averages_only) {
      for (const Factor& f : fs.factors) val *= eval_factor(f, f.base, sc);
    } else {
      for (const Factor& f : fs.factors) {
        if (f.kind == Factor::Kind::power_average)
          val *= eval_factor(f, f.base, sc);
        else
          val *= eval_factor(f, cube_slice(f.base, q));
      }
    }
    consider(q, val, sc.side_level);
  }
  for (const Cube& q : scan.free_cubes()) {
    double val = std::pow(q.volume(), fs.volume_exponent);
    for (const Factor& f : fs.factors) val *= eval_factor(f, cube_slice(f.base, q));
    consider(q, val, free_cube_scale(q));
  }
  return out;
}

ScanMax ap_constant(const GridFunction& w, double p, const CubeScan& scan) {
  if (!(w.min_value() > 0)) throw std::invalid_argument("ap_constant requires a positive weight");
  if (!(p >= 1)) throw std::invalid_argument("ap_constant requires p >= 1");
  const Mesh& mesh = scan.mesh();
  ScanMax out;
  if (p == 1.0) {
    // A_1: max over cells of (scan-restricted M w) / w
    MaxField field(mesh);
    for (const ScanCube& sc : scan.aligned()) {
      const long long cells = sc.span * (mesh.dim == 2 ? sc.span : 1);
      const double avg = (mesh.dim == 1 ? w.block_sum(sc.start[0], sc.start[0] + sc.span)
                                        : w.block_sum(sc.start[0], sc.start[0] + sc.span,
                                                      sc.start[1], sc.start[1] + sc.span)) /
                         static_cast<double>(cells);
      field.paint(sc, avg);
    }
    for (const Cube& q : scan.free_cubes()) field.paint(q, w.average(q));
    GridFunction mw = field.take();
    for (long long i = 0; i < mesh.cell_count(); ++i)
      out.value = std::max(out.value, mw.value(i) / w.value(i));
    return out;
  }
  const GridFunction dual = w.powered(1.0 - p / (p - 1.0));
  const auto consider = [&](const Cube& q, double value, int scale) {
    auto [it, inserted] = out.per_scale.try_emplace(scale, value);
    if (!inserted) it->second = std::max(it->second, value);
    if (value > out.value) {
      out.value = value;
      out.argmax = q;
    }
  };
  for (const ScanCube& sc : scan.aligned()) {
    const long long cells = sc.span * (mesh.dim == 2 ? sc.span : 1);
    const auto avg = [&](const GridFunction& g) {
      return (mesh.dim == 1 ? g.block_sum(sc.start[0], sc.start[0] + sc.span)
                            : g.block_sum(sc.start[0], sc.start[0] + sc.span, sc.start[1],
                                          sc.start[1] + sc.span)) /
             static_cast<double>(cells);
    };
    consider(scan.to_cube(sc), avg(w) * std::pow(avg(dual), p - 1.0), sc.side_level);
  }
  for (const Cube& q : scan.free_cubes())
    consider(q, w.average(q) * std::pow(dual.average(q), p - 1.0), free_cube_scale(q));
  return out;
}

ReverseHolderResult ainfty_reverse_holder(const GridFunction& w, const CubeScan& scan) {
  if (!(w.min_value() > 0))
    throw std::invalid_argument("reverse Holder requires a positive weight");
  const Mesh& mesh = scan.mesh();
  for (double m : {2.0, 1.5, 1.25, 1.1, 1.05}) {
    const GridFunction wm = w.powered(m);
    double worst = 0;
    for (const ScanCube& sc : scan.aligned()) {
      const long long cells = sc.span * (mesh.dim == 2 ? sc.span : 1);
      const auto avg = [&](const GridFunction& g) {
        return (mesh.dim == 1 ? g.block_sum(sc.start[0], sc.start[0] + sc.span)
                              : g.block_sum(sc.start[0], sc.start[0] + sc.span, sc.start[1],
                                            sc.start[1] + sc.span)) /
               static_cast<double>(cells);
      };
      worst = std::max(worst, std::pow(avg(wm), 1.0 / m) / avg(w));
    }
    for (const Cube& q : scan.free_cubes()) {
      const CubeSlice sw = cube_slice(w, q);
      if (sw.weight.empty()) continue;
      // averages over Q ∩ domain: reverse Holder compares mass ratios
      long double num = 0, den = 0, cover = 0;
      const CubeSlice swm = cube_slice(wm, q);
      for (size_t i = 0; i < sw.weight.size(); ++i) {
        den += sw.weight[i] * sw.value[i];
        num += swm.weight[i] * swm.value[i];
        cover += sw.weight[i];
      }
      if (cover <= 0) continue;
      const double a_m = std::pow(static_cast<double>(num / cover), 1.0 / m);
      const double a_1 = static_cast<double>(den / cover);
      worst = std::max(worst, a_m / a_1);
    }
    if (worst <= 10.0) return {m, worst};
  }
  throw NoReverseHolder("no reverse Holder exponent in {1.05..2} with constant <= 10");
}

std::map<double, double> ainfty_eta_kappa_table(const GridFunction& w, const CubeScan& scan,
                                                std::span<const double> etas) {
  if (!(w.min_value() > 0))
    throw std::invalid_argument("eta-kappa table requires a positive weight");
  const Mesh& mesh = scan.mesh();
  const long long s = mesh.cells_per_axis();
  std::map<double, double> table;
  for (double eta : etas) {
    if (!(eta > 0) || !(eta < 1)) throw std::invalid_argument("eta must lie in (0, 1)");
    table[eta] = 0;
  }
  std::vector<double> cells;
  for (const ScanCube& sc : scan.aligned()) {
    cells.clear();
    if (mesh.dim == 1) {
      for (long long i = sc.start[0]; i < sc.start[0] + sc.span; ++i) cells.push_back(w.value(i));
    } else {
      for (long long j = sc.start[1]; j < sc.start[1] + sc.span; ++j)
        for (long long i = sc.start[0]; i < sc.start[0] + sc.span; ++i)
          cells.push_back(w.value(i + s * j));
    }
    std::sort(cells.begin(), cells.end(), std::greater<>());
    long double total = 0;
    for (double v : cells) total += v;
    if (total <= 0) continue;
    for (auto& [eta, kappa] : table) {
      const size_t take = std::max<size_t>(1, static_cast<size_t>(eta * cells.size()));
      if (take >= cells.size()) continue;  // S must be a proper subset
      long double heavy = 0;
      for (size_t i = 0; i < take; ++i) heavy += cells[i];
      kappa = std::max(kappa, static_cast<double>(heavy / total));
    }
  }
  return table;
}

ScanMax apq_constant(const GridFunction& w1, const GridFunction& w2, const ExponentConfig& cfg,
                     const CubeScan& scan) {
  cfg.validate();
  const double q = cfg.q;
  const double c1 = ExponentConfig::conjugate_exponent(cfg.p1);
  const double c2 = ExponentConfig::conjugate_exponent(cfg.p2);
  const GridFunction prod_q =
      GridFunction::zip(w1, w2, [q](double a, double b) { return std::pow(a * b, q); });
  const GridFunction d1 = w1.powered(-c1);
  const GridFunction d2 = w2.powered(-c2);
  const Mesh& mesh = scan.mesh();
  ScanMax out;
  const auto consider = [&](const Cube& qc, double value, int scale) {
    auto [it, inserted] = out.per_scale.try_emplace(scale, value);
    if (!inserted) it->second = std::max(it->second, value);
    if (value > out.value) {
      out.value = value;
      out.argmax = qc;
    }
  };
  for (const ScanCube& sc : scan.aligned()) {
    const long long cells = sc.span * (mesh.dim == 2 ? sc.span : 1);
    const auto avg = [&](const GridFunction& g) {
      return (mesh.dim == 1 ? g.block_sum(sc.start[0], sc.start[0] + sc.span)
                            : g.block_sum(sc.start[0], sc.start[0] + sc.span, sc.start[1],
                                          sc.start[1] + sc.span)) /
             static_cast<double>(cells);
    };
    const double val = std::pow(avg(prod_q), 1.0 / q) * std::pow(avg(d1), 1.0 / c1) *
                       std::pow(avg(d2), 1.0 / c2);
    consider(scan.to_cube(sc), val, sc.side_level);
  }
  for (const Cube& qc : scan.free_cubes()) {
    const double val = std::pow(prod_q.average(qc), 1.0 / q) *
                       std::pow(d1.average(qc), 1.0 / c1) * std::pow(d2.average(qc), 1.0 / c2);
    consider(qc, val, free_cube_scale(qc));
  }
  return out;
}

ScanMax bmo_norm(const GridFunction& b, const CubeScan& scan) {
  const Mesh& mesh = scan.mesh();
  ScanMax out;
  const auto consider = [&](const Cube& q, double value, int scale) {
    auto [it, inserted] = out.per_scale.try_emplace(scale, value);
    if (!inserted) it->second = std::max(it->second, value);
    if (value > out.value) {
      out.value = value;
      out.argmax = q;
    }
  };
  const long long s = mesh.cells_per_axis();
  for (const ScanCube& sc : scan.aligned()) {
    const long long cells = sc.span * (mesh.dim == 2 ? sc.span : 1);
    const double mean = (mesh.dim == 1
                             ? b.block_sum(sc.start[0], sc.start[0] + sc.span)
                             : b.block_sum(sc.start[0], sc.start[0] + sc.span, sc.start[1],
                                           sc.start[1] + sc.span)) /
                        static_cast<double>(cells);
    long double osc = 0;
    if (mesh.dim == 1) {
      for (long long i = sc.start[0]; i < sc.start[0] + sc.span; ++i)
        osc += std::abs(b.value(i) - mean);
    } else {
      for (long long j = sc.start[1]; j < sc.start[1] + sc.span; ++j)
        for (long long i = sc.start[0]; i < sc.start[0] + sc.span; ++i)
          osc += std::abs(b.value(i + s * j) - mean);
    }
    consider(scan.to_cube(sc), static_cast<double>(osc) / static_cast<double>(cells),
             sc.side_level);
  }
  for (const Cube& q : scan.free_cubes()) {
    const double mean = b.average(q);
    const CubeSlice slice = cube_slice(b, q);
    const double osc = slice.mean([mean](double v) { return std::abs(v - mean); });
    consider(q, osc, free_cube_scale(q));
  }
  return out;
}

ScanMax john_nirenberg_ratio(const GridFunction& b, const CubeScan& scan) {
  const double bmo = bmo_norm(b, scan).value;
  ScanMax out;
  if (bmo <= 0) return out;  // constant b by convention
  const auto expl = YoungFunction::exp_l();
  const auto consider = [&](const Cube& q, double value, int scale) {
    auto [it, inserted] = out.per_scale.try_emplace(scale, value);
    if (!inserted) it->second = std::max(it->second, value);
    if (value > out.value) {
      out.value = value;
      out.argmax = q;
    }
  };
  const auto handle = [&](const Cube& q, int scale) {
    const double mean = b.average(q);
    CubeSlice slice = cube_slice(b, q);
    for (auto& v : slice.value) v = std::abs(v - mean);
    slice.max_abs = 0;
    for (double v : slice.value) slice.max_abs = std::max(slice.max_abs, v);
    consider(q, orlicz_norm(slice, expl) / bmo, scale);
  };
  for (const ScanCube& sc : scan.aligned()) handle(scan.to_cube(sc), sc.side_level);
  for (const Cube& q : scan.free_cubes()) handle(q, free_cube_scale(q));
  return out;
}

}  // namespace bifrac
