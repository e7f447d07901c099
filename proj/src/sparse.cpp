#include "bifrac/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace bifrac {

double CzFunctional::operator()(const Cube& q) const {
  const double nf = orlicz_norm(cube_slice(*f, q), phi);
  if (nf == 0) return 0;
  const double ng = orlicz_norm(cube_slice(*g, q), psi);
  if (ng == 0) return 0;
  double val = nf * ng;
  if (include_volume) val *= std::pow(q.volume(), alpha / f->mesh().dim);
  return val;
}

namespace {

struct ForestNode {
  Cube cube;
  double functional;
  std::vector<size_t> children;  // indices into the forest
};

// Cell range [lo, hi) of centers inside the cube, per axis.
void center_cells(const Mesh& mesh, const Cube& q, std::array<long long, kMaxDim>& lo,
                  std::array<long long, kMaxDim>& hi) {
  for (int a = 0; a < mesh.dim; ++a) {
    const auto [b, e] = center_range(mesh, q.corner(a), q.upper(a));
    lo[a] = b;
    hi[a] = e;
  }
  if (mesh.dim == 1) {
    lo[1] = 0;
    hi[1] = 1;
  }
}

}  // namespace

const std::vector<SparseFamily::Selected>& SparseFamily::level(int k) const {
  static const std::vector<Selected> empty;
  const auto it = levels_.find(k);
  return it == levels_.end() ? empty : it->second;
}

const std::vector<int> SparseFamily::level_indices() const {
  std::vector<int> out;
  for (const auto& [k, v] : levels_)
    if (!v.empty()) out.push_back(k);
  return out;
}

const std::vector<uint8_t>& SparseFamily::omega_mask(int k) const {
  static const std::vector<uint8_t> empty;
  const auto it = omega_.find(k);
  return it == omega_.end() ? empty : it->second;
}

long long SparseFamily::cube_count() const {
  long long n = 0;
  for (const auto& [k, v] : levels_) n += static_cast<long long>(v.size());
  return n;
}

double SparseFamily::min_carve_ratio() const {
  double worst = 1.0;
  for (const auto& [k, v] : levels_)
    for (const auto& sel : v) worst = std::min(worst, sel.carve_ratio());
  return worst;
}

bool SparseFamily::carved_sets_disjoint() const {
  std::vector<uint8_t> covered(static_cast<size_t>(mesh_.cell_count()), 0);
  const long long s = mesh_.cells_per_axis();
  for (const auto& [k, v] : levels_) {
    const auto omega_next = omega_.find(k + 1);
    for (const auto& sel : v) {
      for (long long j = sel.cell_lo[1]; j < sel.cell_hi[1]; ++j) {
        for (long long i = sel.cell_lo[0]; i < sel.cell_hi[0]; ++i) {
          const size_t idx = static_cast<size_t>(i + (mesh_.dim == 2 ? s * j : 0));
          const bool in_next =
              omega_next != omega_.end() && omega_next->second[idx] != 0;
          if (in_next) continue;  // carved away
          if (covered[idx]) return false;
          covered[idx] = 1;
        }
      }
    }
  }
  return true;
}

void SparseFamily::write_json(std::ostream& os) const {
  os << "{\n  \"threshold_base\": " << a_ << ",\n  \"grid\": \"" << grid_.name()
     << "\",\n  \"k_min\": " << k_min_ << ",\n  \"k_max\": " << k_max_ << ",\n  \"levels\": [\n";
  bool first_level = true;
  for (const auto& [k, v] : levels_) {
    if (v.empty()) continue;
    if (!first_level) os << ",\n";
    first_level = false;
    os << "    {\"k\": " << k << ", \"cubes\": [";
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) os << ", ";
      const auto& addr = v[i].cube.address();
      os << "{\"level\": " << addr.level << ", \"index\": " << addr.index[0];
      if (mesh_.dim == 2) os << ", \"index_y\": " << addr.index[1];
      os << ", \"functional\": " << v[i].functional
         << ", \"carve_ratio\": " << v[i].carve_ratio() << "}";
    }
    os << "]}";
  }
  os << "\n  ]\n}\n";
}

SparseFamily cz_select(const GridFunction& f, const GridFunction& g, const YoungFunction& phi,
                       const YoungFunction& psi, double a, const DyadicGrid& grid, double alpha,
                       bool include_volume) {
  if (!(a > 1)) throw std::invalid_argument("cz_select requires threshold base a > 1");
  if (!(f.mesh() == g.mesh())) throw std::invalid_argument("cz_select inputs must share a mesh");
  if (f.min_value() < 0 || g.min_value() < 0)
    throw std::invalid_argument("cz_select requires non-negative inputs");
  const Mesh& mesh = f.mesh();
  if (grid.dim() != mesh.dim) throw std::invalid_argument("grid dimension mismatch");

  const CzFunctional functional{&f, &g, phi, psi, alpha, include_volume};
  SparseFamily family(mesh, grid, a);

  // Build the forest from the attainability window upward: roots start at
  // side 4W and are raised until every root falls below the smallest
  // threshold, so reported selections are genuinely maximal.
  const double w = mesh.half_width();
  const double eps = mesh.cell_side() / 4;
  int top_level = -(mesh.box_level + 2);

  std::vector<ForestNode> forest;
  std::vector<size_t> roots;

  const auto build_level_roots = [&](int level) {
    std::vector<size_t> out;
    const Cube lo_c = grid.cube_at(level, {-w, -w});
    const Cube hi_c = grid.cube_at(level, {w - eps, w - eps});
    const auto lo = lo_c.address().index;
    const auto hi = hi_c.address().index;
    for (long long my = lo[1]; my <= (mesh.dim == 2 ? hi[1] : lo[1]); ++my) {
      for (long long mx = lo[0]; mx <= hi[0]; ++mx) {
        const Cube q = grid.cube(level, {mx, my});
        forest.push_back({q, functional(q), {}});
        out.push_back(forest.size() - 1);
      }
    }
    return out;
  };

  // depth-first expansion down to cell level
  const std::function<void(size_t)> expand = [&](size_t node) {
    const int level = forest[node].cube.address().level;
    if (level >= mesh.res_level) return;
    for (const Cube& child : grid.children(forest[node].cube)) {
      // skip children fully outside the domain box
      bool outside = false;
      for (int ax = 0; ax < mesh.dim; ++ax)
        if (child.upper(ax) <= -w || child.corner(ax) >= w) outside = true;
      if (outside) continue;
      forest.push_back({child, functional(child), {}});
      forest[node].children.push_back(forest.size() - 1);
      expand(forest.size() - 1);
    }
  };

  roots = build_level_roots(top_level);
  for (size_t r : roots) expand(r);

  // attainability window from the functional values in the base forest
  double max_f = 0, min_pos = std::numeric_limits<double>::infinity();
  for (const auto& node : forest) {
    max_f = std::max(max_f, node.functional);
    if (node.functional > 0) min_pos = std::min(min_pos, node.functional);
  }
  if (max_f == 0) return family;  // zero data: empty family

  const double log_a = std::log(a);
  int k_max = static_cast<int>(std::ceil(std::log(max_f) / log_a)) - 1;
  while (std::pow(a, k_max + 1) < max_f) ++k_max;  // guard rounding
  int k_min = static_cast<int>(std::floor(std::log(min_pos) / log_a));
  while (std::pow(a, k_min) >= min_pos) --k_min;
  family.k_min_ = k_min;
  family.k_max_ = k_max;

  // raise the roots until none exceeds the smallest threshold of interest
  const double floor_threshold = std::pow(a, k_min);
  for (int guard = 0; guard < 80; ++guard) {
    double top_max = 0;
    for (size_t r : roots) top_max = std::max(top_max, forest[r].functional);
    if (top_max <= floor_threshold) break;
    --top_level;
    std::vector<size_t> new_roots = build_level_roots(top_level);
    // attach the old roots as children of the enclosing new cubes
    for (size_t nr : new_roots) {
      for (size_t old : roots)
        if (grid.contains_cube(forest[nr].cube, forest[old].cube))
          forest[nr].children.push_back(old);
    }
    roots = std::move(new_roots);
    if (guard == 79)
      throw std::runtime_error("cz_select: root extension did not terminate");
  }

  // per-level selection: maximal cubes with F > a^k, then carve masks
  const long long s = mesh.cells_per_axis();
  std::vector<uint8_t> omega_above(static_cast<size_t>(mesh.cell_count()), 0);
  for (int k = k_max; k >= k_min; --k) {
    const double threshold = std::pow(a, k);
    std::vector<SparseFamily::Selected> picked;
    std::vector<uint8_t> omega(static_cast<size_t>(mesh.cell_count()), 0);
    const std::function<void(size_t)> walk = [&](size_t node) {
      if (forest[node].functional > threshold) {
        SparseFamily::Selected sel(forest[node].cube);
        sel.functional = forest[node].functional;
        center_cells(mesh, sel.cube, sel.cell_lo, sel.cell_hi);
        long long q_cells = 0, e_cells = 0;
        for (long long j = sel.cell_lo[1]; j < sel.cell_hi[1]; ++j) {
          for (long long i = sel.cell_lo[0]; i < sel.cell_hi[0]; ++i) {
            const size_t idx = static_cast<size_t>(i + (mesh.dim == 2 ? s * j : 0));
            omega[idx] = 1;
            ++q_cells;
            if (!omega_above[idx]) ++e_cells;
          }
        }
        sel.q_cells = q_cells;
        sel.e_cells = e_cells;
        sel.q_volume = sel.cube.volume();
        sel.e_volume = sel.q_volume;
        picked.push_back(std::move(sel));
        return;  // maximality: do not descend into a selected cube
      }
      for (size_t c : forest[node].children) walk(c);
    };
    for (size_t r : roots) walk(r);
    // exact carved measures: E_j^k loses the level-(k+1) selected volume
    const auto above = family.levels_.find(k + 1);
    if (above != family.levels_.end()) {
      for (const auto& inner : above->second) {
        for (auto& sel : picked) {
          if (grid.contains_cube(sel.cube, inner.cube)) {
            sel.e_volume -= inner.cube.volume();
            break;
          }
        }
      }
    }
    family.omega_[k] = omega;
    omega_above = std::move(omega);
    family.levels_[k] = std::move(picked);
  }
  return family;
}

double sparse_sum(const SparseFamily& family, double volume_exponent,
                  const std::vector<SparseTerm>& terms) {
  for (const auto& t : terms) {
    if (!t.base) throw std::invalid_argument("sparse term without a base function");
    if (!(t.base->mesh() == family.mesh()))
      throw std::invalid_argument("sparse term mesh mismatch");
  }
  long double total = 0;
  for (int k : family.level_indices()) {
    for (const auto& sel : family.level(k)) {
      long double val = std::pow(sel.cube.volume(), volume_exponent);
      for (const auto& t : terms)
        val *= std::pow(orlicz_norm(cube_slice(*t.base, sel.cube), t.young), t.exponent);
      total += val;
    }
  }
  return static_cast<double>(total);
}

double dyadic_subtree_weight_sum(const DyadicGrid& grid, const Cube& top, double alpha, double q,
                                 int explicit_depth, double tail_tol) {
  if (!(alpha > 0) || !(q > 0))
    throw std::invalid_argument("subtree weight sum requires alpha, q > 0");
  const double exponent = alpha * q / grid.dim() + 1.0;
  const double top_volume = top.volume();
  long double total = 0;
  // explicit enumeration: validates the 2^{rn} level counts via children()
  std::vector<Cube> level_cubes{top};
  int depth = 0;
  for (; depth <= explicit_depth; ++depth) {
    const long long expected = 1LL << (static_cast<long long>(depth) * grid.dim());
    if (static_cast<long long>(level_cubes.size()) != expected)
      throw std::logic_error("dyadic level count mismatch in subtree enumeration");
    for (const Cube& c : level_cubes) total += std::pow(c.volume() / top_volume, exponent);
    if (depth == explicit_depth) break;
    std::vector<Cube> next;
    next.reserve(level_cubes.size() * (1u << grid.dim()));
    for (const Cube& c : level_cubes)
      for (const Cube& child : grid.children(c)) next.push_back(child);
    level_cubes = std::move(next);
  }
  // geometric tail: per level r the cubes contribute 2^{-r alpha q}
  const double ratio = std::exp2(-alpha * q);
  double term = std::pow(ratio, depth + 1);
  for (int r = depth + 1; term > tail_tol && r < 100000; ++r, term *= ratio) total += term;
  return static_cast<double>(total);
}

}  // namespace bifrac
