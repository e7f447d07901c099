#pragma once

#include <vector>

#include "bifrac/cube.hpp"
#include "bifrac/grid_function.hpp"
#include "bifrac/scan.hpp"
#include "bifrac/young.hpp"

namespace bifrac {

/// Exact per-cell integrals of the kernel |y|^{alpha-n} over the y-mesh.
std::vector<double> kernel_cell_weights(const Mesh& mesh, double alpha);

/// Bilinear fractional integral: out(x) = sum_cells f(x-y_c) g(x+y_c) K(cell),
/// evaluated at cell centers; f, g are looked up piecewise-constantly at the
/// displaced lattice positions.
GridFunction bi_alpha(const GridFunction& f, const GridFunction& g, double alpha);

/// Pointwise evaluation at an arbitrary x (same quadrature).
double bi_alpha_at(const GridFunction& f, const GridFunction& g, double alpha, const Point& x);

/// Bilinear maximal function: per cell the max over the dyadic radius set
/// r in {h, 2h, ..., 2W} of (2r)^{-n} \int_{[-r,r)^n} |f(x-y) g(x+y)| dy.
GridFunction bm_field(const GridFunction& f, const GridFunction& g);

/// M^{Phi,Psi}_alpha over the scan family: sup over scan cubes containing x of
/// |Q|^{alpha/n} ||f||_{Phi,Q} ||g||_{Psi,Q}, evaluated at cell centers.
GridFunction m_orlicz_alpha(const GridFunction& f, const GridFunction& g,
                            const YoungFunction& phi, const YoungFunction& psi, double alpha,
                            const CubeScan& scan);

/// Dyadic-restricted variant over one shifted grid; cube sides range from the
/// cell scale up to 2^{coarse_extra} times the domain width.
GridFunction m_orlicz_alpha_dyadic(const GridFunction& f, const GridFunction& g,
                                   const YoungFunction& phi, const YoungFunction& psi,
                                   double alpha, const DyadicGrid& grid, int coarse_extra = 3);

/// Single-function Orlicz maximal operator over the scan.
GridFunction m_orlicz(const GridFunction& f, const YoungFunction& phi, const CubeScan& scan);

/// Iterated product commutator data: symbols b_i with slots beta_i in {1,2}.
/// The evaluation order is as given (inner to outer); canonical() sorts the
/// slots to (1,...,1,2,...,2).
struct CommutatorSpec {
  std::vector<GridFunction> symbols;
  std::vector<int> slots;

  int arity() const { return static_cast<int>(symbols.size()); }
  int first_slot_count() const;  // m
  CommutatorSpec canonical() const;
  void validate(const Mesh& mesh) const;
};

/// Recursive route: 2^N bilinear evaluations unrolling the definition.
GridFunction commutator_direct(const CommutatorSpec& spec, const GridFunction& f,
                               const GridFunction& g, double alpha);

/// Kernel route: one quadrature pass with the product weight
/// prod (b_i(x) - b_i(x -+ y)).
GridFunction commutator_kernel(const CommutatorSpec& spec, const GridFunction& f,
                               const GridFunction& g, double alpha);

}  // namespace bifrac
