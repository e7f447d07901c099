#include "bifrac/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "bifrac/quadrature.hpp"

namespace bifrac {

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

double weighted_q_integral(const GridFunction& f, double q, const GridFunction* w) {
  long double acc = 0;
  const auto fv = f.values();
  for (size_t i = 0; i < fv.size(); ++i) {
    const double a = std::abs(fv[i]);
    if (a == 0) continue;
    acc += std::pow(a, q) * static_cast<long double>(w ? w->value(static_cast<long long>(i)) : 1.0);
  }
  return static_cast<double>(acc) * std::pow(f.mesh().cell_side(), f.mesh().dim);
}

}  // namespace

RatioResult strong_ratio(const BilinearOp& op, const ExponentConfig& cfg,
                         const WeightTriple& weights, const PairFamily& family) {
  cfg.validate();
  if (family.empty()) throw std::invalid_argument("strong_ratio requires a nonempty family");
  RatioResult out;
  for (const auto& pair : family) {
    const double den = pair.f.lp_norm(cfg.p1, &weights.v1.grid()) *
                       pair.g.lp_norm(cfg.p2, &weights.v2.grid());
    if (!(den > 0)) {
      ++out.skipped;
      continue;
    }
    const GridFunction image = op(pair.f, pair.g);
    const double num = image.lp_norm(cfg.q, &weights.u.grid());
    const double ratio = num / den;
    ++out.evaluated;
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.argmax_label = pair.label;
    }
  }
  if (out.evaluated == 0)
    throw std::runtime_error("strong_ratio: every pair in the family had a zero denominator");
  return out;
}

RatioResult weak_ratio(const ExponentConfig& cfg, const WeightTriple& weights,
                       const PairFamily& family, const CubeScan& scan) {
  cfg.validate();
  if (!cfg.r) throw std::invalid_argument("weak_ratio requires the Holder pair (r, s)");
  if (family.empty()) throw std::invalid_argument("weak_ratio requires a nonempty family");
  RatioResult out;
  const Mesh& mesh = scan.mesh();
  const double cell_measure = std::pow(mesh.cell_side(), mesh.dim);
  for (const auto& pair : family) {
    const double den = pair.f.lp_norm(cfg.p1, &weights.v1.grid()) *
                       pair.g.lp_norm(cfg.p2, &weights.v2.grid());
    if (!(den > 0)) {
      ++out.skipped;
      continue;
    }
    GridFunction field = m_orlicz_alpha(pair.f, pair.g, YoungFunction::power(*cfg.r),
                                        YoungFunction::power(*cfg.s), cfg.alpha, scan);
    // sup over the field's value set of  v * u({M >= v})^{1/q}
    std::vector<std::pair<double, double>> cells;  // (field value, u mass)
    cells.reserve(static_cast<size_t>(mesh.cell_count()));
    for (long long i = 0; i < mesh.cell_count(); ++i) {
      if (field.value(i) > 0)
        cells.emplace_back(field.value(i), weights.u.grid().value(i) * cell_measure);
    }
    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    long double mass = 0;
    double sup = 0;
    for (size_t i = 0; i < cells.size(); ++i) {
      mass += cells[i].second;
      // advance to the last cell sharing this value so mass == u({M >= v})
      if (i + 1 < cells.size() && cells[i + 1].first == cells[i].first) continue;
      sup = std::max(sup, cells[i].first *
                              std::pow(static_cast<double>(mass), 1.0 / cfg.q));
    }
    const double ratio = sup / den;
    ++out.evaluated;
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.argmax_label = pair.label;
    }
  }
  if (out.evaluated == 0)
    throw std::runtime_error("weak_ratio: every pair in the family had a zero denominator");
  return out;
}

RatioResult control_ratio(const BilinearOp& numerator, const BilinearOp& denominator,
                          double q_exp, const GridFunction& w, const PairFamily& family) {
  if (!(q_exp > 0)) throw std::invalid_argument("control_ratio requires q > 0");
  if (family.empty()) throw std::invalid_argument("control_ratio requires a nonempty family");
  RatioResult out;
  for (const auto& pair : family) {
    const GridFunction den_field = denominator(pair.f, pair.g);
    const double den = weighted_q_integral(den_field, q_exp, &w);
    if (!(den > 0)) {
      ++out.skipped;
      continue;
    }
    const GridFunction num_field = numerator(pair.f, pair.g);
    const double ratio = weighted_q_integral(num_field, q_exp, &w) / den;
    ++out.evaluated;
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.argmax_label = pair.label;
    }
  }
  if (out.evaluated == 0)
    throw std::runtime_error("control_ratio: every pair had a vanishing denominator");
  return out;
}

const char* trend_name(Trend t) {
  switch (t) {
    case Trend::stable: return "stable";
    case Trend::divergent: return "divergent";
    case Trend::inconclusive: return "inconclusive";
  }
  return "?";
}

Trend classify_trend(std::span<const double> values) {
  if (values.size() < 2) return Trend::inconclusive;
  bool growing = true;
  for (size_t i = 1; i < values.size(); ++i)
    if (!(values[i] >= 1.5 * values[i - 1])) growing = false;
  if (growing) return Trend::divergent;
  double lo = values[0], hi = values[0];
  for (double v : values) lo = std::min(lo, v), hi = std::max(hi, v);
  if (lo > 0 && hi / lo - 1.0 <= 0.10) return Trend::stable;
  return Trend::inconclusive;
}

std::vector<Mesh> truncation_ladder(int dim, int steps, int box_level_first,
                                    int res_level_first) {
  std::vector<Mesh> out;
  for (int k = 0; k < steps; ++k) out.push_back({dim, box_level_first + k, res_level_first + k});
  return out;
}

std::vector<Mesh> refinement_ladder(int dim, int box_level, int res_level_first, int steps) {
  std::vector<Mesh> out;
  for (int k = 0; k < steps; ++k) out.push_back({dim, box_level, res_level_first + k});
  return out;
}

std::string TheoremReport::to_json(uint64_t family_hash) const {
  nlohmann::ordered_json j;
  j["theorem"] = theorem;
  j["config"] = {{"n", cfg.n},   {"alpha", cfg.alpha}, {"p1", cfg.p1}, {"p2", cfg.p2},
                 {"p", cfg.p()}, {"q", cfg.q}};
  if (cfg.r) {
    j["config"]["r"] = *cfg.r;
    j["config"]["s"] = *cfg.s;
  }
  if (cfg.commutator_arity > 0) {
    j["config"]["N"] = cfg.commutator_arity;
    j["config"]["m"] = cfg.first_slot_count;
  }
  if (family_hash) j["family_hash"] = family_hash;
  for (const auto& [k, v] : constants) j["constants"][k] = v;
  for (const auto& [k, v] : flags) j["flags"][k] = v;
  j["scales"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    j["scales"].push_back({{"scale", row.scale},
                           {"constant", row.constant},
                           {"ratio", row.ratio},
                           {"drift", row.drift}});
  }
  if (!notes.empty()) j["notes"] = notes;
  j["rule"] = rule;
  j["pass"] = pass;
  return j.dump(2) + "\n";
}

void TheoremReport::write_csv(std::ostream& os, bool header) const {
  if (header) os << "theorem,n,alpha,p1,p2,q,r,s,scale,constant,ratio,drift\n";
  os.precision(12);
  for (const auto& row : rows) {
    os << theorem << "," << cfg.n << "," << cfg.alpha << "," << cfg.p1 << "," << cfg.p2 << ","
       << cfg.q << ",";
    if (cfg.r)
      os << *cfg.r << "," << *cfg.s;
    else
      os << ",";
    os << "," << row.scale << "," << row.constant << "," << row.ratio << "," << row.drift
       << "\n";
  }
}

TheoremReport steinweiss_check(const SteinWeissExponents& e, const std::vector<Mesh>& ladder,
                               bool estimate_trilinear) {
  TheoremReport rep;
  rep.theorem = "steinweiss";
  const double n = e.n;
  const double p = 1.0 / (1.0 / e.p1 + 1.0 / e.p2);
  rep.cfg.n = e.n;
  rep.cfg.p1 = e.p1;
  rep.cfg.p2 = e.p2;
  rep.cfg.q = e.q;
  rep.cfg.r = e.p1 / p;
  rep.cfg.s = e.p2 / p;

  const bool c101 = e.beta < n / e.q && e.gamma1 < (p - 1) * n / e.p1 &&
                    e.gamma2 < (p - 1) * n / e.p2;
  const double balance = e.alpha + e.beta + e.gamma1 + e.gamma2 - (n + n / e.q - n / p);
  const bool c102 = std::abs(balance) <= 1e-9;
  const bool c103 = e.beta + e.gamma1 + e.gamma2 >= 0;
  rep.flags["cond_exponent_windows"] = c101 ? "ok" : "violated";
  rep.flags["cond_scaling_balance"] = c102 ? "ok" : "violated";
  rep.flags["cond_nonnegative_tail"] = c103 ? "ok" : "violated";
  rep.constants["scaling_balance_excess"] = balance;

  const double alpha_bi = n - e.alpha;  // kernel |y|^{-alpha} = |y|^{alpha_bi - n}
  if (!(alpha_bi > 0) || !(alpha_bi < n)) {
    rep.flags["kernel_order"] = "outside (0,n): condition constant not evaluated";
    rep.rule = "exponent gate only";
    rep.pass = c101 && c102 && c103;
    return rep;
  }
  rep.cfg.alpha = alpha_bi;

  std::vector<double> constants;
  for (const Mesh& mesh : ladder) {
    WeightTriple wt{Weight::abs_power(mesh, -e.beta * e.q),
                    Weight::abs_power(mesh, e.p1 * e.gamma1),
                    Weight::abs_power(mesh, e.p2 * e.gamma2)};
    BumpSpec spec;
    spec.kind = BumpKind::steinweiss;
    spec.cfg = rep.cfg;
    auto scan = CubeScan::mesh_aligned(mesh, 1);
    const double c = bump_constant(spec, wt, scan).value;
    constants.push_back(c);
    ScaleRow row;
    row.scale = "W=" + std::to_string(static_cast<int>(mesh.half_width()));
    row.constant = c;
    row.drift = constants.size() > 1 ? c / constants[constants.size() - 2] - 1.0 : 0.0;
    rep.rows.push_back(row);
  }
  const Trend trend = classify_trend(constants);
  rep.flags["condition_trend"] = trend_name(trend);
  rep.constants["condition_constant"] = constants.back();

  if (estimate_trilinear && !ladder.empty()) {
    // direct quadrature of the weighted trilinear form on indicator data
    const Mesh mesh = ladder.front();
    const long long s = mesh.cells_per_axis();
    GridFunction f = GridFunction::indicator(mesh, Cube::interval(-1.0, 1.0));
    GridFunction h = f;
    const GridFunction wy = GridFunction::abs_power(mesh, -e.alpha);
    const GridFunction w1 = GridFunction::abs_power(mesh, -e.gamma1);
    const GridFunction w2 = GridFunction::abs_power(mesh, -e.gamma2);
    const GridFunction wx = GridFunction::abs_power(mesh, -e.beta);
    const double hn = mesh.cell_side();
    long double acc = 0;
    const long long half = s / 2;
    for (long long i = 0; i < s; ++i) {
      if (h.value(i) == 0 || wx.value(i) == 0) continue;
      long double inner = 0;
      for (long long j = 0; j < s; ++j) {
        const long long fi = i - j + half, gi = i + j + 1 - half;
        if (fi < 0 || fi >= s || gi < 0 || gi >= s) continue;
        const double ff = f.value(fi) * w1.value(fi);
        if (ff == 0) continue;
        inner += static_cast<long double>(ff) * f.value(gi) * w2.value(gi) * wy.value(j) * hn;
      }
      acc += inner * h.value(i) * wx.value(i) * hn;
    }
    const double qc = e.q / (e.q - 1);
    const double denom = f.lp_norm(e.p1) * f.lp_norm(e.p2) * h.lp_norm(qc);
    rep.constants["trilinear_ratio"] = static_cast<double>(acc) / denom;
  }

  rep.rule = "exponent windows + scaling balance; condition constant stable under W-doubling";
  rep.pass = c101 && c102 && c103 && trend == Trend::stable;
  if (!c102 && trend == Trend::divergent)
    rep.notes.push_back("scaling violation confirmed by geometric growth of the constant");
  return rep;
}

TheoremReport section10_example(double alpha, double beta, double p1, double p2,
                                const std::vector<Mesh>& ladder) {
  TheoremReport rep;
  rep.theorem = "section10-example";
  const double p = 1.0 / (1.0 / p1 + 1.0 / p2);
  rep.cfg.n = ladder.empty() ? 1 : ladder.front().dim;
  rep.cfg.alpha = 0;
  rep.cfg.p1 = p1;
  rep.cfg.p2 = p2;
  rep.cfg.q = p;
  rep.cfg.r = p1 / p;
  rep.cfg.s = p2 / p;
  const double n = rep.cfg.n;

  std::vector<double> ks, aps, aps2;
  for (const Mesh& mesh : ladder) {
    const double u_exp = alpha * p / p1 + beta * p / p2;
    WeightTriple wt{Weight::abs_power(mesh, u_exp), Weight::abs_power(mesh, alpha),
                    Weight::abs_power(mesh, beta)};
    BumpSpec spec;
    spec.kind = BumpKind::onevec;
    spec.cfg = rep.cfg;
    auto scan = CubeScan::mesh_aligned(mesh, 1);
    ks.push_back(bump_constant(spec, wt, scan).value);
    aps.push_back(ap_constant(Weight::abs_power(mesh, alpha).grid(), p, scan).value);
    aps2.push_back(ap_constant(Weight::abs_power(mesh, beta).grid(), p, scan).value);
    ScaleRow row;
    row.scale = "W=" + std::to_string(static_cast<int>(mesh.half_width()));
    row.constant = ks.back();
    row.ratio = aps.back();
    row.drift = ks.size() > 1 ? ks.back() / ks[ks.size() - 2] - 1.0 : 0.0;
    rep.rows.push_back(row);
  }
  const Trend k_trend = classify_trend(ks);
  const Trend ap_trend = classify_trend(aps);
  rep.flags["joint_constant_trend"] = trend_name(k_trend);
  rep.flags["ap_w1_trend"] = trend_name(ap_trend);
  rep.flags["ap_w2_trend"] = trend_name(classify_trend(aps2));
  rep.constants["joint_constant"] = ks.back();
  rep.constants["ap_w1"] = aps.back();
  rep.constants["ap_w2"] = aps2.back();
  rep.flags["weights"] = "w1=|x|^" + std::to_string(alpha) + " w2=|x|^" + std::to_string(beta);

  const bool k_finite_pred =
      alpha < n * (p - 1) && beta < n * (p - 1) && alpha * p / p1 + beta * p / p2 > -n;
  const bool ap_finite_pred = alpha > -n && alpha < n * (p - 1);
  rep.flags["joint_window"] = k_finite_pred ? "inside" : "outside";
  rep.flags["ap_window"] = ap_finite_pred ? "inside" : "outside";
  rep.rule = "joint-window trend matches the predicate; A_p trend matches its own window";
  const bool k_ok = k_finite_pred ? (k_trend == Trend::stable) : (k_trend != Trend::stable);
  const bool ap_ok = ap_finite_pred ? (ap_trend == Trend::stable) : (ap_trend == Trend::divergent);
  rep.pass = k_ok && ap_ok;
  if (k_finite_pred && !ap_finite_pred && rep.pass)
    rep.notes.push_back("joint condition holds while the separate A_p fails: wider range");
  return rep;
}

NecessityOutcome thm_g_necessity(const ExponentConfig& cfg, const WeightTriple& weights,
                                 const CubeScan& scan, const std::vector<Cube>& cubes,
                                 double slack) {
  cfg.validate();
  if (!cfg.r) throw std::invalid_argument("necessity check requires the Holder pair (r, s)");
  const double r = *cfg.r, s = *cfg.s;
  if (!(cfg.p1 >= r) || !(cfg.p2 >= s))
    throw std::invalid_argument("necessity check requires p1 >= r and p2 >= s");
  const double p = cfg.p();

  // the extremal functions are powered cellwise so the norm algebra is exact
  const GridFunction v1 = weights.v1.grid();
  const GridFunction v2 = weights.v2.grid();
  const GridFunction w1 = v1.map([&](double v) { return std::pow(v, -r / (cfg.p1 - r)); });
  const GridFunction w2 = v2.map([&](double v) { return std::pow(v, -s / (cfg.p2 - s)); });

  NecessityOutcome out;
  PairFamily family;
  for (const Cube& q : cubes) {
    GridFunction chi = GridFunction::indicator(q.dim() == 1 ? v1.mesh() : v1.mesh(), q);
    GridFunction fq = GridFunction::zip(v1, chi, [&](double v, double c) {
      return c > 0 ? std::pow(v, -1.0 / (cfg.p1 - r)) * c : 0.0;
    });
    GridFunction gq = GridFunction::zip(v2, chi, [&](double v, double c) {
      return c > 0 ? std::pow(v, -1.0 / (cfg.p2 - s)) * c : 0.0;
    });
    family.push_back({std::move(fq), std::move(gq), "necessity"});
  }
  const RatioResult weak = weak_ratio(cfg, weights, family, scan);
  out.weak_estimate = weak.max_ratio;

  for (const Cube& q : cubes) {
    const double vol_exp = cfg.alpha / cfg.n + 1.0 / cfg.q - 1.0 / p;
    const double cond = std::pow(q.volume(), vol_exp) *
                        std::pow(weights.u.grid().average(q), 1.0 / cfg.q) *
                        std::pow(w1.average(q), (cfg.p1 - r) / (r * cfg.p1)) *
                        std::pow(w2.average(q), (cfg.p2 - s) / (s * cfg.p2));
    out.worst_condition = std::max(out.worst_condition, cond);
    const double margin = cond / (2.0 * weak.max_ratio * (1.0 + slack));
    out.worst_margin = std::max(out.worst_margin, margin);
    ++out.cubes;
  }
  out.pass = out.worst_margin <= 1.0;
  return out;
}

}  // namespace bifrac
