#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bifrac/exponents.hpp"
#include "bifrac/operators.hpp"
#include "bifrac/weights.hpp"

namespace bifrac {

struct TestPair {
  GridFunction f, g;
  std::string label;
};
using PairFamily = std::vector<TestPair>;

using BilinearOp = std::function<GridFunction(const GridFunction&, const GridFunction&)>;

struct RatioResult {
  double max_ratio = 0;
  int evaluated = 0;
  int skipped = 0;
  std::string argmax_label;
};

/// max over pairs of ||op(f,g)||_{L^q(u)} / (||f||_{L^p1(v1)} ||g||_{L^p2(v2)}).
/// Zero-denominator pairs are skipped; an all-skipped family is an error.
RatioResult strong_ratio(const BilinearOp& op, const ExponentConfig& cfg,
                         const WeightTriple& weights, const PairFamily& family);

/// Weak-type ratio: sup_v v u({M^{r,s}_alpha(f,g) >= v})^{1/q} over the
/// distinct field values, normalized by the input norms; max over pairs.
RatioResult weak_ratio(const ExponentConfig& cfg, const WeightTriple& weights,
                       const PairFamily& family, const CubeScan& scan);

/// max over pairs of  \int |num|^q w  /  \int |den|^q w.
RatioResult control_ratio(const BilinearOp& numerator, const BilinearOp& denominator,
                          double q_exp, const GridFunction& w, const PairFamily& family);

enum class Trend { stable, divergent, inconclusive };
const char* trend_name(Trend t);

/// Divergent: every consecutive ratio >= 1.5 (geometric growth per scale
/// doubling); stable: total drift <= 10%; otherwise inconclusive.
Trend classify_trend(std::span<const double> values);

/// Per-step record of a truncation/refinement ladder.
struct ScaleRow {
  std::string scale;
  double constant = 0;
  double ratio = 0;
  double drift = 0;
};

struct TheoremReport {
  std::string theorem;
  ExponentConfig cfg;
  std::map<std::string, double> constants;
  std::map<std::string, std::string> flags;
  std::vector<ScaleRow> rows;
  std::vector<std::string> notes;
  bool pass = false;
  std::string rule;

  std::string to_json(uint64_t family_hash = 0) const;
  void write_csv(std::ostream& os, bool header = true) const;
};

/// W-doubling ladder: each step doubles the half-width and halves the cell.
std::vector<Mesh> truncation_ladder(int dim, int steps, int box_level_first = 1,
                                    int res_level_first = 7);

/// Refinement ladder: fixed domain, res_level increasing.
std::vector<Mesh> refinement_ladder(int dim, int box_level, int res_level_first, int steps);

struct SteinWeissExponents {
  int n = 1;
  double alpha = 0.5;
  double beta = 0.1;
  double gamma1 = 0.1;
  double gamma2 = 0.1;
  double p1 = 4, p2 = 4, q = 2;
};

/// Exponent gate and condition constant for the weighted power-kernel
/// trilinear inequality; divergence is reported by the ladder trend.
TheoremReport steinweiss_check(const SteinWeissExponents& e, const std::vector<Mesh>& ladder,
                               bool estimate_trilinear = true);

/// The closing power-weight example: joint constant K at q = p against the
/// separate Muckenhoupt constants of the factors.
TheoremReport section10_example(double alpha, double beta, double p1, double p2,
                                const std::vector<Mesh>& ladder);

struct NecessityOutcome {
  double weak_estimate = 0;
  double worst_condition = 0;  // max per-cube condition value
  double worst_margin = 0;     // max cond_Q / (2 weak (1 + slack))
  int cubes = 0;
  bool pass = false;
};

/// Per-cube necessity: plugging the extremal pair of each cube into the weak
/// bound must reproduce the power-bump condition value up to the factor 2 and
/// mesh slack.
NecessityOutcome thm_g_necessity(const ExponentConfig& cfg, const WeightTriple& weights,
                                 const CubeScan& scan, const std::vector<Cube>& cubes,
                                 double slack = 0.05);

uint64_t fnv1a64(std::string_view bytes);

}  // namespace bifrac
