#pragma once

#include <map>
#include <optional>
#include <string>

#include "bifrac/exponents.hpp"
#include "bifrac/scan.hpp"
#include "bifrac/young.hpp"

namespace bifrac {

/// A positive weight on the mesh, optionally tagged as the power |x|^a so
/// that powers of it get closed-form cell averages instead of cellwise pow
/// of the clipped representative.
class Weight {
 public:
  static Weight from_grid(GridFunction g);
  static Weight abs_power(const Mesh& mesh, double exponent);

  const GridFunction& grid() const { return grid_; }
  const Mesh& mesh() const { return grid_.mesh(); }
  std::optional<double> exponent() const { return exponent_; }
  /// The grid representative of w^e.
  GridFunction powered(double e) const;

 private:
  explicit Weight(GridFunction g) : grid_(std::move(g)) {}
  GridFunction grid_;
  std::optional<double> exponent_;
};

struct WeightTriple {
  Weight u, v1, v2;
};

/// Result of a sup-over-cubes functional on a scan.
struct ScanMax {
  double value = 0;
  std::map<int, double> per_scale;  // side level -> max over that scale
  std::optional<Cube> argmax;
};

struct NoReverseHolder : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Muckenhoupt constant: p > 1 gives sup_Q (avg w)(avg w^{1-p'})^{p-1};
/// p = 1 gives max over cells of (scan-restricted M w)/w.
ScanMax ap_constant(const GridFunction& w, double p, const CubeScan& scan);

struct ReverseHolderResult {
  double m = 1;
  double constant = 1;
};

/// Largest m in {2, 1.5, 1.25, 1.1, 1.05} with
/// max_Q (avg w^m)^{1/m} / avg w <= 10; throws NoReverseHolder otherwise.
ReverseHolderResult ainfty_reverse_holder(const GridFunction& w, const CubeScan& scan);

/// Measured (eta, kappa) smallness table: for each eta, the worst observed
/// w(S)/w(Q) over scan cubes with S the heaviest eta-fraction of the cells
/// of Q.  Reported, never asserted; no canonical kappa exists.
std::map<double, double> ainfty_eta_kappa_table(const GridFunction& w, const CubeScan& scan,
                                                std::span<const double> etas);

enum class BumpKind { thmD, thmE, thmA, thmB, eq21, onevec, bmtw, steinweiss };

BumpKind bump_kind_from_name(const std::string& name);
std::string bump_kind_name(BumpKind kind);

struct BumpSpec {
  BumpKind kind = BumpKind::eq21;
  ExponentConfig cfg;
  double delta = 0.5;
  // explicit Orlicz bumps for the kinds that take them (thmE / bmtw)
  std::optional<YoungFunction> psi, phi1, phi2;
  bool zero_volume_exponent = false;  // onevec / bmtw force |Q|^0
};

/// The kind's displayed sup-over-cubes quantity, evaluated as a max over the
/// scan.  Degenerate conventions: q = 1 uses sup_Q u; p_i = r uses
/// (inf_Q v_i)^{-1}.
ScanMax bump_constant(const BumpSpec& spec, const WeightTriple& weights, const CubeScan& scan);

/// Bilinear Muckenhoupt constant of (w1, w2) at (p1, p2, q).
ScanMax apq_constant(const GridFunction& w1, const GridFunction& w2, const ExponentConfig& cfg,
                     const CubeScan& scan);

ScanMax bmo_norm(const GridFunction& b, const CubeScan& scan);

/// max_Q ||b - b_Q||_{exp L, Q} / ||b||_BMO; 0 for (numerically) constant b.
ScanMax john_nirenberg_ratio(const GridFunction& b, const CubeScan& scan);

}  // namespace bifrac
