#include "bifrac/operators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "bifrac/parallel.hpp"
#include "bifrac/quadrature.hpp"

namespace bifrac {

namespace {
std::atomic<int> g_thread_cap{0};
}

int max_threads() {
  const int cap = g_thread_cap.load();
  if (cap > 0) return cap;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void set_max_threads(int n) { g_thread_cap.store(n); }

std::vector<double> kernel_cell_weights(const Mesh& mesh, double alpha) {
  if (!(alpha > 0) || !(alpha < mesh.dim))
    throw std::invalid_argument("fractional order requires 0 < alpha < n");
  const double e = alpha - mesh.dim;
  const long long s = mesh.cells_per_axis();
  std::vector<double> k(static_cast<size_t>(mesh.cell_count()));
  if (mesh.dim == 1) {
    for (long long i = 0; i < s; ++i) {
      k[static_cast<size_t>(i)] =
          abs_power_box_integral({mesh.cell_corner(i), 0}, {mesh.cell_corner(i + 1), 0}, 1, e);
    }
    return k;
  }
  const double h = mesh.cell_side();
  for (long long j = 0; j < s; ++j) {
    for (long long i = 0; i < s; ++i) {
      const double x0 = mesh.cell_corner(i), x1 = mesh.cell_corner(i + 1);
      const double y0 = mesh.cell_corner(j), y1 = mesh.cell_corner(j + 1);
      const bool touches_origin = x0 <= 0 && 0 <= x1 && y0 <= 0 && 0 <= y1;
      double w;
      if (touches_origin) {
        w = abs_power_box_integral({x0, y0}, {x1, y1}, 2, e);
      } else {
        // midpoint rule away from the singular cells
        w = std::pow(std::hypot(0.5 * (x0 + x1), 0.5 * (y0 + y1)), e) * h * h;
      }
      k[static_cast<size_t>(i + s * j)] = w;
    }
  }
  return k;
}

namespace {

void check_pair(const GridFunction& f, const GridFunction& g) {
  if (!(f.mesh() == g.mesh())) throw std::invalid_argument("operator inputs must share a mesh");
}

// out(x_i) = sum_j f[i - j + S/2] g[i + j + 1 - S/2] K[j], indices per axis.
GridFunction bilinear_with_weights(const GridFunction& f, const GridFunction& g,
                                   const std::vector<double>& kernel) {
  const Mesh& mesh = f.mesh();
  const long long s = mesh.cells_per_axis();
  const long long half = s / 2;
  std::vector<double> out(static_cast<size_t>(mesh.cell_count()), 0.0);
  const auto fv = f.values(), gv = g.values(), kv = std::span<const double>(kernel);
  if (mesh.dim == 1) {
    parallel_for(s, [&](long long i) {
      // f index in range: j in [i - half + 1 ... i + half]; g index: j in [half - i - 1, ...)
      const long long j_lo = std::max<long long>(i - half, half - i - 1);
      const long long j_hi = std::min<long long>(i + half, 3 * half - i - 1);  // inclusive? keep < s
      long double acc = 0;
      for (long long j = std::max<long long>(j_lo, 0); j <= std::min<long long>(j_hi, s - 1); ++j) {
        const long long fi = i - j + half;
        const long long gi = i + j + 1 - half;
        if (fi < 0 || fi >= s || gi < 0 || gi >= s) continue;
        acc += static_cast<long double>(fv[static_cast<size_t>(fi)]) *
               gv[static_cast<size_t>(gi)] * kv[static_cast<size_t>(j)];
      }
      out[static_cast<size_t>(i)] = static_cast<double>(acc);
    });
    return GridFunction(mesh, std::move(out));
  }
  parallel_for(s * s, [&](long long flat) {
    const long long ix = flat % s, iy = flat / s;
    long double acc = 0;
    for (long long jy = 0; jy < s; ++jy) {
      const long long fy = iy - jy + half, gy = iy + jy + 1 - half;
      if (fy < 0 || fy >= s || gy < 0 || gy >= s) continue;
      const double* frow = fv.data() + fy * s;
      const double* grow = gv.data() + gy * s;
      const double* krow = kv.data() + jy * s;
      for (long long jx = 0; jx < s; ++jx) {
        const long long fx = ix - jx + half, gx = ix + jx + 1 - half;
        if (fx < 0 || fx >= s || gx < 0 || gx >= s) continue;
        acc += static_cast<long double>(frow[fx]) * grow[gx] * krow[jx];
      }
    }
    out[static_cast<size_t>(flat)] = static_cast<double>(acc);
  });
  return GridFunction(mesh, std::move(out));
}

}  // namespace

GridFunction bi_alpha(const GridFunction& f, const GridFunction& g, double alpha) {
  check_pair(f, g);
  return bilinear_with_weights(f, g, kernel_cell_weights(f.mesh(), alpha));
}

double bi_alpha_at(const GridFunction& f, const GridFunction& g, double alpha, const Point& x) {
  check_pair(f, g);
  const Mesh& mesh = f.mesh();
  const std::vector<double> kernel = kernel_cell_weights(mesh, alpha);
  const long long s = mesh.cells_per_axis();
  long double acc = 0;
  if (mesh.dim == 1) {
    for (long long j = 0; j < s; ++j) {
      const double yc = mesh.cell_center(j);
      acc += static_cast<long double>(f.value_at({x[0] - yc, 0})) * g.value_at({x[0] + yc, 0}) *
             kernel[static_cast<size_t>(j)];
    }
    return static_cast<double>(acc);
  }
  for (long long jy = 0; jy < s; ++jy) {
    for (long long jx = 0; jx < s; ++jx) {
      const Point yc{mesh.cell_center(jx), mesh.cell_center(jy)};
      const double fv = f.value_at({x[0] - yc[0], x[1] - yc[1]});
      if (fv == 0) continue;
      acc += static_cast<long double>(fv) * g.value_at({x[0] + yc[0], x[1] + yc[1]}) *
             kernel[static_cast<size_t>(jx + s * jy)];
    }
  }
  return static_cast<double>(acc);
}

GridFunction bm_field(const GridFunction& f, const GridFunction& g) {
  check_pair(f, g);
  const Mesh& mesh = f.mesh();
  const long long s = mesh.cells_per_axis();
  const long long half = s / 2;
  const int t_max = mesh.box_level + 1 + mesh.res_level;  // r = h * 2^t <= 2W
  std::vector<double> out(static_cast<size_t>(mesh.cell_count()), 0.0);
  const auto fv = f.values(), gv = g.values();
  if (mesh.dim == 1) {
    parallel_for(s, [&](long long i) {
      long double sum = 0;
      double best = 0;
      long long radius = 0;  // cells on each side so far
      for (int t = 0; t <= t_max; ++t) {
        const long long r = 1LL << t;
        for (long long j = half - r; j < half + r; ++j) {
          if (j >= half - radius && j < half + radius) continue;  // already summed
          const long long fi = i - j + half, gi = i + j + 1 - half;
          if (fi < 0 || fi >= s || gi < 0 || gi >= s) continue;
          sum += std::abs(static_cast<long double>(fv[static_cast<size_t>(fi)]) *
                          gv[static_cast<size_t>(gi)]);
        }
        radius = r;
        best = std::max(best, static_cast<double>(sum) / static_cast<double>(2 * r));
      }
      out[static_cast<size_t>(i)] = best;
    });
    return GridFunction(mesh, std::move(out));
  }
  parallel_for(s * s, [&](long long flat) {
    const long long ix = flat % s, iy = flat / s;
    long double sum = 0;
    double best = 0;
    long long radius = 0;
    for (int t = 0; t <= t_max; ++t) {
      const long long r = 1LL << t;
      for (long long jy = half - r; jy < half + r; ++jy) {
        const long long fy = iy - jy + half, gy = iy + jy + 1 - half;
        if (fy < 0 || fy >= s || gy < 0 || gy >= s) continue;
        const bool y_new = !(jy >= half - radius && jy < half + radius);
        const double* frow = fv.data() + fy * s;
        const double* grow = gv.data() + gy * s;
        for (long long jx = half - r; jx < half + r; ++jx) {
          if (!y_new && jx >= half - radius && jx < half + radius) continue;
          const long long fx = ix - jx + half, gx = ix + jx + 1 - half;
          if (fx < 0 || fx >= s || gx < 0 || gx >= s) continue;
          sum += std::abs(static_cast<long double>(frow[fx]) * grow[gx]);
        }
      }
      radius = r;
      const double vol = static_cast<double>(2 * r) * static_cast<double>(2 * r);
      best = std::max(best, static_cast<double>(sum) / vol);
    }
    out[static_cast<size_t>(flat)] = best;
  });
  return GridFunction(mesh, std::move(out));
}

namespace {

// Per-cube norm evaluator with a fast prefix path for power Young functions
// on cell-aligned cubes.
class CubeNorm {
 public:
  CubeNorm(const GridFunction& f, const YoungFunction& phi) : f_(f), phi_(phi) {
    double p;
    if (phi.is_power(&p)) {
      power_ = p;
      powered_.emplace(f.map([p](double v) { return std::pow(std::abs(v), p); }));
    }
  }

  double aligned(const ScanCube& sc) const {
    if (powered_) {
      const Mesh& mesh = f_.mesh();
      const long long cells = sc.span * (mesh.dim == 2 ? sc.span : 1);
      const double sum = mesh.dim == 1
                             ? powered_->block_sum(sc.start[0], sc.start[0] + sc.span)
                             : powered_->block_sum(sc.start[0], sc.start[0] + sc.span,
                                                   sc.start[1], sc.start[1] + sc.span);
      return std::pow(sum / static_cast<double>(cells), 1.0 / power_);
    }
    return free(cube_of(sc));
  }

  double free(const Cube& q) const { return orlicz_norm(cube_slice(f_, q), phi_); }

  Cube cube_of(const ScanCube& sc) const {
    const Mesh& mesh = f_.mesh();
    Point corner{mesh.cell_corner(sc.start[0]),
                 mesh.dim == 2 ? mesh.cell_corner(sc.start[1]) : 0.0};
    return Cube(mesh.dim, corner, std::ldexp(1.0, -sc.side_level));
  }

 private:
  const GridFunction& f_;
  YoungFunction phi_;
  double power_ = 0;
  std::optional<GridFunction> powered_;
};

}  // namespace

GridFunction m_orlicz_alpha(const GridFunction& f, const GridFunction& g,
                            const YoungFunction& phi, const YoungFunction& psi, double alpha,
                            const CubeScan& scan) {
  check_pair(f, g);
  if (!(alpha >= 0) || !(alpha < f.mesh().dim))
    throw std::invalid_argument("maximal operator requires 0 <= alpha < n");
  const Mesh& mesh = f.mesh();
  const CubeNorm nf(f, phi), ng(g, psi);
  MaxField field(mesh);
  const double an = alpha / mesh.dim;
  for (const ScanCube& sc : scan.aligned()) {
    const Cube q = scan.to_cube(sc);
    const double val = std::pow(q.volume(), an) * nf.aligned(sc) * ng.aligned(sc);
    if (val > 0) field.paint(sc, val);
  }
  for (const Cube& q : scan.free_cubes()) {
    const double val = std::pow(q.volume(), an) * nf.free(q) * ng.free(q);
    if (val > 0) field.paint(q, val);
  }
  return field.take();
}

GridFunction m_orlicz_alpha_dyadic(const GridFunction& f, const GridFunction& g,
                                   const YoungFunction& phi, const YoungFunction& psi,
                                   double alpha, const DyadicGrid& grid, int coarse_extra) {
  check_pair(f, g);
  const Mesh& mesh = f.mesh();
  if (grid.dim() != mesh.dim) throw std::invalid_argument("grid dimension mismatch");
  const CubeNorm nf(f, phi), ng(g, psi);
  MaxField field(mesh);
  const double an = alpha / mesh.dim;
  const double w = mesh.half_width();
  const double eps = mesh.cell_side() / 4;
  for (int level = mesh.res_level; level >= -(mesh.box_level + coarse_extra); --level) {
    const Cube lo_cube = grid.cube_at(level, {-w, -w});
    const Cube hi_cube = grid.cube_at(level, {w - eps, w - eps});
    const auto lo_idx = lo_cube.address().index;
    const auto hi_idx = hi_cube.address().index;
    for (long long my = lo_idx[1]; my <= (mesh.dim == 2 ? hi_idx[1] : lo_idx[1]); ++my) {
      for (long long mx = lo_idx[0]; mx <= hi_idx[0]; ++mx) {
        const Cube q = grid.cube(level, {mx, my});
        const double val = std::pow(q.volume(), an) * nf.free(q) * ng.free(q);
        if (val > 0) field.paint(q, val);
      }
    }
  }
  return field.take();
}

GridFunction m_orlicz(const GridFunction& f, const YoungFunction& phi, const CubeScan& scan) {
  const CubeNorm nf(f, phi);
  MaxField field(f.mesh());
  for (const ScanCube& sc : scan.aligned()) {
    const double val = nf.aligned(sc);
    if (val > 0) field.paint(sc, val);
  }
  for (const Cube& q : scan.free_cubes()) {
    const double val = nf.free(q);
    if (val > 0) field.paint(q, val);
  }
  return field.take();
}

int CommutatorSpec::first_slot_count() const {
  int m = 0;
  for (int s : slots) m += (s == 1) ? 1 : 0;
  return m;
}

CommutatorSpec CommutatorSpec::canonical() const {
  CommutatorSpec out;
  for (int pass : {1, 2})
    for (size_t i = 0; i < slots.size(); ++i)
      if (slots[i] == pass) {
        out.symbols.push_back(symbols[i]);
        out.slots.push_back(pass);
      }
  return out;
}

void CommutatorSpec::validate(const Mesh& mesh) const {
  if (symbols.size() != slots.size())
    throw std::invalid_argument("commutator symbols and slots must pair up");
  if (symbols.size() > 4)
    throw std::length_error("commutator arity capped at 4 (2^N bilinear evaluations)");
  for (int s : slots)
    if (s != 1 && s != 2) throw std::invalid_argument("commutator slots must be 1 or 2");
  for (const auto& b : symbols)
    if (!(b.mesh() == mesh)) throw std::invalid_argument("commutator symbol mesh mismatch");
}

GridFunction commutator_direct(const CommutatorSpec& spec, const GridFunction& f,
                               const GridFunction& g, double alpha) {
  check_pair(f, g);
  spec.validate(f.mesh());
  const std::vector<double> kernel = kernel_cell_weights(f.mesh(), alpha);
  const auto mul = [](const GridFunction& a, const GridFunction& b) {
    return GridFunction::zip(a, b, [](double x, double y) { return x * y; });
  };
  const std::function<GridFunction(int, const GridFunction&, const GridFunction&)> rec =
      [&](int depth, const GridFunction& ff, const GridFunction& gg) -> GridFunction {
    if (depth == 0) return bilinear_with_weights(ff, gg, kernel);
    const GridFunction& b = spec.symbols[static_cast<size_t>(depth - 1)];
    const int slot = spec.slots[static_cast<size_t>(depth - 1)];
    GridFunction outer = rec(depth - 1, ff, gg);
    GridFunction inner = (slot == 1) ? rec(depth - 1, mul(b, ff), gg)
                                     : rec(depth - 1, ff, mul(b, gg));
    return GridFunction::zip(mul(b, outer), inner, [](double x, double y) { return x - y; });
  };
  return rec(spec.arity(), f, g);
}

GridFunction commutator_kernel(const CommutatorSpec& spec, const GridFunction& f,
                               const GridFunction& g, double alpha) {
  check_pair(f, g);
  spec.validate(f.mesh());
  const CommutatorSpec canon = spec.canonical();
  const Mesh& mesh = f.mesh();
  const std::vector<double> kernel = kernel_cell_weights(mesh, alpha);
  const long long s = mesh.cells_per_axis();
  const long long half = s / 2;
  const int m = canon.first_slot_count();
  const int n_sym = canon.arity();
  std::vector<std::span<const double>> sym;
  sym.reserve(static_cast<size_t>(n_sym));
  for (const auto& b : canon.symbols) sym.push_back(b.values());
  const auto fv = f.values(), gv = g.values();
  std::vector<double> out(static_cast<size_t>(mesh.cell_count()), 0.0);
  if (mesh.dim == 1) {
    parallel_for(s, [&](long long i) {
      long double acc = 0;
      for (long long j = 0; j < s; ++j) {
        const long long fi = i - j + half, gi = i + j + 1 - half;
        if (fi < 0 || fi >= s || gi < 0 || gi >= s) continue;
        const double prod_fg = fv[static_cast<size_t>(fi)] * gv[static_cast<size_t>(gi)];
        if (prod_fg == 0) continue;
        long double weight = 1;
        for (int k = 0; k < m; ++k)
          weight *= sym[static_cast<size_t>(k)][static_cast<size_t>(i)] -
                    sym[static_cast<size_t>(k)][static_cast<size_t>(fi)];
        for (int k = m; k < n_sym; ++k)
          weight *= sym[static_cast<size_t>(k)][static_cast<size_t>(i)] -
                    sym[static_cast<size_t>(k)][static_cast<size_t>(gi)];
        acc += weight * prod_fg * kernel[static_cast<size_t>(j)];
      }
      out[static_cast<size_t>(i)] = static_cast<double>(acc);
    });
    return GridFunction(mesh, std::move(out));
  }
  parallel_for(s * s, [&](long long flat) {
    const long long ix = flat % s, iy = flat / s;
    long double acc = 0;
    for (long long jy = 0; jy < s; ++jy) {
      const long long fy = iy - jy + half, gy = iy + jy + 1 - half;
      if (fy < 0 || fy >= s || gy < 0 || gy >= s) continue;
      for (long long jx = 0; jx < s; ++jx) {
        const long long fx = ix - jx + half, gx = ix + jx + 1 - half;
        if (fx < 0 || fx >= s || gx < 0 || gx >= s) continue;
        const long long fi = fx + s * fy, gi = gx + s * gy;
        const double prod_fg = fv[static_cast<size_t>(fi)] * gv[static_cast<size_t>(gi)];
        if (prod_fg == 0) continue;
        long double weight = 1;
        for (int k = 0; k < m; ++k)
          weight *= sym[static_cast<size_t>(k)][static_cast<size_t>(flat)] -
                    sym[static_cast<size_t>(k)][static_cast<size_t>(fi)];
        for (int k = m; k < n_sym; ++k)
          weight *= sym[static_cast<size_t>(k)][static_cast<size_t>(flat)] -
                    sym[static_cast<size_t>(k)][static_cast<size_t>(gi)];
        acc += weight * prod_fg * kernel[static_cast<size_t>(jx + s * jy)];
      }
    }
    out[static_cast<size_t>(flat)] = static_cast<double>(acc);
  });
  return GridFunction(mesh, std::move(out));
}

}  // namespace bifrac
