#include "bifrac/grid_function.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bifrac/quadrature.hpp"

namespace bifrac {

static_assert(std::endian::native == std::endian::little,
              "serialized layout assumes a little-endian host");

Cube Mesh::domain_box() const {
  const double w = half_width();
  if (dim == 1) return Cube::interval(-w, w);
  return Cube::square(-w, -w, 2 * w);
}

Cube Mesh::cell_box(long long ix, long long iy) const {
  if (dim == 1) return Cube::interval(cell_corner(ix), cell_corner(ix + 1));
  return Cube::square(cell_corner(ix), cell_corner(iy), cell_side());
}

void Mesh::validate() const {
  if (dim < 1 || dim > 2) throw std::invalid_argument("mesh dimension must be 1 or 2");
  if (box_level < -2 || box_level > 8) throw std::invalid_argument("mesh box_level out of range [-2, 8]");
  const int axis_bits = box_level + 1 + res_level;
  if (axis_bits < 1) throw std::invalid_argument("mesh has no cells: box_level+1+res_level < 1");
  if (dim == 1 && axis_bits > 22) throw std::invalid_argument("1-d mesh too fine (more than 2^22 cells)");
  if (dim == 2 && axis_bits > 10) throw std::invalid_argument("2-d mesh too fine (more than 2^10 cells per axis)");
}

GridFunction::GridFunction(const Mesh& mesh, std::vector<double> values)
    : mesh_(mesh), values_(std::move(values)) {
  mesh_.validate();
  if (static_cast<long long>(values_.size()) != mesh_.cell_count())
    throw std::invalid_argument("grid value array size does not match the mesh");
  min_ = std::numeric_limits<double>::infinity();
  max_ = -min_;
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("grid values must be finite");
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
  }
  const long long s = mesh_.cells_per_axis();
  if (mesh_.dim == 1) {
    prefix_.assign(static_cast<size_t>(s + 1), 0.0L);
    for (long long i = 0; i < s; ++i)
      prefix_[static_cast<size_t>(i + 1)] = prefix_[static_cast<size_t>(i)] + values_[static_cast<size_t>(i)];
  } else {
    prefix_.assign(static_cast<size_t>((s + 1) * (s + 1)), 0.0L);
    for (long long j = 0; j < s; ++j) {
      for (long long i = 0; i < s; ++i) {
        const size_t p = static_cast<size_t>(i + 1 + (s + 1) * (j + 1));
        prefix_[p] = prefix_[p - 1] + prefix_[p - static_cast<size_t>(s + 1)] -
                     prefix_[p - static_cast<size_t>(s + 2)] + values_[static_cast<size_t>(i + s * j)];
      }
    }
  }
}

GridFunction GridFunction::constant(const Mesh& mesh, double c) {
  return GridFunction(mesh, std::vector<double>(static_cast<size_t>(mesh.cell_count()), c));
}

GridFunction GridFunction::zeros(const Mesh& mesh) { return constant(mesh, 0.0); }

GridFunction GridFunction::indicator(const Mesh& mesh, const Cube& box) {
  if (box.dim() != mesh.dim) throw std::invalid_argument("indicator box dimension mismatch");
  std::vector<double> v(static_cast<size_t>(mesh.cell_count()), 0.0);
  const long long s = mesh.cells_per_axis();
  const AxisOverlap ox = axis_overlap(mesh, box.corner(0), box.upper(0));
  if (mesh.dim == 1) {
    for (long long i = ox.begin; i < ox.end; ++i)
      v[static_cast<size_t>(i)] = ox.w[static_cast<size_t>(i - ox.begin)];
  } else {
    const AxisOverlap oy = axis_overlap(mesh, box.corner(1), box.upper(1));
    for (long long j = oy.begin; j < oy.end; ++j)
      for (long long i = ox.begin; i < ox.end; ++i)
        v[static_cast<size_t>(i + s * j)] = ox.w[static_cast<size_t>(i - ox.begin)] *
                                            oy.w[static_cast<size_t>(j - oy.begin)];
  }
  return GridFunction(mesh, std::move(v));
}

GridFunction GridFunction::abs_power(const Mesh& mesh, double a) {
  const long long s = mesh.cells_per_axis();
  const double h = mesh.cell_side();
  std::vector<double> v(static_cast<size_t>(mesh.cell_count()));
  if (mesh.dim == 1) {
    for (long long i = 0; i < s; ++i) {
      const double x0 = mesh.cell_corner(i), x1 = mesh.cell_corner(i + 1);
      const bool touches_origin = x0 <= 0 && 0 <= x1;
      if (touches_origin && a <= -1) {
        v[static_cast<size_t>(i)] = std::pow(std::abs(mesh.cell_center(i)), a);
      } else {
        v[static_cast<size_t>(i)] = abs_power_box_integral({x0, 0}, {x1, 0}, 1, a) / h;
      }
    }
  } else {
    for (long long j = 0; j < s; ++j) {
      for (long long i = 0; i < s; ++i) {
        const double x0 = mesh.cell_corner(i), x1 = mesh.cell_corner(i + 1);
        const double y0 = mesh.cell_corner(j), y1 = mesh.cell_corner(j + 1);
        const bool touches_origin = x0 <= 0 && 0 <= x1 && y0 <= 0 && 0 <= y1;
        double val;
        if (touches_origin && a <= -2) {
          val = std::pow(std::hypot(mesh.cell_center(i), mesh.cell_center(j)), a);
        } else {
          val = abs_power_box_integral({x0, y0}, {x1, y1}, 2, a) / (h * h);
        }
        v[static_cast<size_t>(i + s * j)] = val;
      }
    }
  }
  return GridFunction(mesh, std::move(v));
}

GridFunction GridFunction::log_abs(const Mesh& mesh) {
  const long long s = mesh.cells_per_axis();
  const double h = mesh.cell_side();
  std::vector<double> v(static_cast<size_t>(mesh.cell_count()));
  auto antider = [](double x) { return x > 0 ? x * (std::log(x) - 1) : 0.0; };
  if (mesh.dim == 1) {
    for (long long i = 0; i < s; ++i) {
      double x0 = mesh.cell_corner(i), x1 = mesh.cell_corner(i + 1);
      if (x1 <= 0) std::swap(x0, x1), x0 = -x0, x1 = -x1;
      v[static_cast<size_t>(i)] = (antider(x1) - antider(std::max(x0, 0.0))) / h;
    }
  } else {
    for (long long j = 0; j < s; ++j) {
      for (long long i = 0; i < s; ++i) {
        const double r = std::hypot(mesh.cell_center(i), mesh.cell_center(j));
        v[static_cast<size_t>(i + s * j)] = std::log(std::max(r, 0.5 * h));
      }
    }
  }
  return GridFunction(mesh, std::move(v));
}

double GridFunction::value_at(const Point& p) const {
  const long long s = mesh_.cells_per_axis();
  const double w = mesh_.half_width(), h = mesh_.cell_side();
  long long idx[kMaxDim] = {0, 0};
  for (int a = 0; a < mesh_.dim; ++a) {
    const double g = (p[a] + w) / h;
    const long long i = static_cast<long long>(std::floor(g));
    if (i < 0 || i >= s) return 0.0;
    idx[a] = i;
  }
  return values_[static_cast<size_t>(idx[0] + (mesh_.dim == 2 ? s * idx[1] : 0))];
}

double GridFunction::block_sum(long long i0, long long i1) const {
  i0 = std::clamp<long long>(i0, 0, mesh_.cells_per_axis());
  i1 = std::clamp<long long>(i1, 0, mesh_.cells_per_axis());
  if (i1 <= i0) return 0.0;
  return static_cast<double>(prefix_[static_cast<size_t>(i1)] - prefix_[static_cast<size_t>(i0)]);
}

double GridFunction::block_sum(long long i0, long long i1, long long j0, long long j1) const {
  const long long s = mesh_.cells_per_axis();
  i0 = std::clamp<long long>(i0, 0, s);
  i1 = std::clamp<long long>(i1, 0, s);
  j0 = std::clamp<long long>(j0, 0, s);
  j1 = std::clamp<long long>(j1, 0, s);
  if (i1 <= i0 || j1 <= j0) return 0.0;
  const auto at = [&](long long i, long long j) { return prefix_[static_cast<size_t>(i + (s + 1) * j)]; };
  return static_cast<double>(at(i1, j1) - at(i0, j1) - at(i1, j0) + at(i0, j0));
}

double GridFunction::integral() const {
  const double hn = std::pow(mesh_.cell_side(), mesh_.dim);
  const long long s = mesh_.cells_per_axis();
  return (mesh_.dim == 1 ? block_sum(0, s) : block_sum(0, s, 0, s)) * hn;
}

AxisOverlap axis_overlap(const Mesh& mesh, double lo, double hi) {
  const double w = mesh.half_width(), h = mesh.cell_side();
  const long long s = mesh.cells_per_axis();
  AxisOverlap out;
  lo = std::max(lo, -w);
  hi = std::min(hi, w);
  if (hi <= lo) return out;
  const double g0 = (lo + w) / h, g1 = (hi + w) / h;
  out.begin = std::clamp<long long>(static_cast<long long>(std::floor(g0)), 0, s - 1);
  out.end = std::clamp<long long>(static_cast<long long>(std::ceil(g1)), out.begin + 1, s);
  out.w.resize(static_cast<size_t>(out.end - out.begin));
  for (long long i = out.begin; i < out.end; ++i) {
    const double cover = std::min(g1, static_cast<double>(i + 1)) - std::max(g0, static_cast<double>(i));
    out.w[static_cast<size_t>(i - out.begin)] = std::max(cover, 0.0);
  }
  return out;
}

std::pair<long long, long long> center_range(const Mesh& mesh, double lo, double hi) {
  const double w = mesh.half_width(), h = mesh.cell_side();
  const long long s = mesh.cells_per_axis();
  // centers c_i = -W + (i+1/2)h: c_i >= lo  <=>  i >= g0;  c_i < hi  <=>  i < g1
  const double g0 = (lo + w) / h - 0.5, g1 = (hi + w) / h - 0.5;
  const long long first = std::clamp<long long>(static_cast<long long>(std::ceil(g0)), 0, s);
  const long long last = std::clamp<long long>(static_cast<long long>(std::ceil(g1)), first, s);
  return {first, last};
}

double GridFunction::integral_over(const Cube& q) const {
  if (q.dim() != mesh_.dim) throw std::invalid_argument("cube dimension does not match the grid");
  if (!(q.volume() > 0)) throw std::invalid_argument("cube has zero volume");
  const double h = mesh_.cell_side();
  const AxisOverlap ox = axis_overlap(mesh_, q.corner(0), q.upper(0));
  if (ox.empty()) return 0.0;
  long double acc = 0;
  if (mesh_.dim == 1) {
    for (long long i = ox.begin; i < ox.end; ++i)
      acc += ox.w[static_cast<size_t>(i - ox.begin)] * values_[static_cast<size_t>(i)];
    return static_cast<double>(acc) * h;
  }
  const AxisOverlap oy = axis_overlap(mesh_, q.corner(1), q.upper(1));
  if (oy.empty()) return 0.0;
  const long long s = mesh_.cells_per_axis();
  for (long long j = oy.begin; j < oy.end; ++j) {
    const double wy = oy.w[static_cast<size_t>(j - oy.begin)];
    long double row = 0;
    for (long long i = ox.begin; i < ox.end; ++i)
      row += ox.w[static_cast<size_t>(i - ox.begin)] * values_[static_cast<size_t>(i + s * j)];
    acc += wy * row;
  }
  return static_cast<double>(acc) * h * h;
}

double GridFunction::average(const Cube& q) const { return integral_over(q) / q.volume(); }

double GridFunction::lp_norm(double p, const GridFunction* weight) const {
  if (!(p > 0)) throw std::invalid_argument("lp_norm requires p > 0");
  if (weight && !(weight->mesh() == mesh_)) throw std::invalid_argument("weight mesh mismatch");
  long double acc = 0;
  for (size_t i = 0; i < values_.size(); ++i) {
    const double a = std::abs(values_[i]);
    if (a == 0) continue;
    const double wv = weight ? weight->values_[i] : 1.0;
    acc += std::pow(a, p) * static_cast<long double>(wv);
  }
  const double hn = std::pow(mesh_.cell_side(), mesh_.dim);
  return std::pow(static_cast<double>(acc) * hn, 1.0 / p);
}

GridFunction GridFunction::map(const std::function<double(double)>& f) const {
  std::vector<double> v(values_.size());
  for (size_t i = 0; i < values_.size(); ++i) v[i] = f(values_[i]);
  return GridFunction(mesh_, std::move(v));
}

GridFunction GridFunction::zip(const GridFunction& a, const GridFunction& b,
                               const std::function<double(double, double)>& f) {
  if (!(a.mesh_ == b.mesh_)) throw std::invalid_argument("grid mesh mismatch");
  std::vector<double> v(a.values_.size());
  for (size_t i = 0; i < v.size(); ++i) v[i] = f(a.values_[i], b.values_[i]);
  return GridFunction(a.mesh_, std::move(v));
}

GridFunction GridFunction::powered(double e) const {
  return map([e](double v) { return std::pow(v, e); });
}

GridFunction GridFunction::scaled(double c) const {
  return map([c](double v) { return c * v; });
}

CubeSlice cube_slice(const GridFunction& f, const Cube& q) {
  if (q.dim() != f.mesh().dim) throw std::invalid_argument("cube dimension does not match the grid");
  CubeSlice out;
  out.volume = q.volume();
  const Mesh& mesh = f.mesh();
  const double h = mesh.cell_side();
  const AxisOverlap ox = axis_overlap(mesh, q.corner(0), q.upper(0));
  if (ox.empty()) return out;
  if (mesh.dim == 1) {
    out.weight.reserve(static_cast<size_t>(ox.end - ox.begin));
    for (long long i = ox.begin; i < ox.end; ++i) {
      const double wv = ox.w[static_cast<size_t>(i - ox.begin)] * h;
      if (wv <= 0) continue;
      out.weight.push_back(wv);
      out.value.push_back(f.value(i));
      out.max_abs = std::max(out.max_abs, std::abs(f.value(i)));
    }
    return out;
  }
  const AxisOverlap oy = axis_overlap(mesh, q.corner(1), q.upper(1));
  if (oy.empty()) return out;
  const long long s = mesh.cells_per_axis();
  for (long long j = oy.begin; j < oy.end; ++j) {
    const double wy = oy.w[static_cast<size_t>(j - oy.begin)];
    if (wy <= 0) continue;
    for (long long i = ox.begin; i < ox.end; ++i) {
      const double wv = ox.w[static_cast<size_t>(i - ox.begin)] * wy * h * h;
      if (wv <= 0) continue;
      const double val = f.value(i + s * j);
      out.weight.push_back(wv);
      out.value.push_back(val);
      out.max_abs = std::max(out.max_abs, std::abs(val));
    }
  }
  return out;
}

namespace {
constexpr char kMagic[4] = {'B', 'I', 'F', 'G'};
constexpr uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("truncated grid stream");
  return v;
}
}  // namespace

void GridFunction::write_binary(std::ostream& os) const {
  os.write(kMagic, 4);
  put<uint32_t>(os, kVersion);
  put<int32_t>(os, mesh_.dim);
  put<int32_t>(os, mesh_.box_level);
  put<int32_t>(os, mesh_.res_level);
  os.write(reinterpret_cast<const char*>(values_.data()),
           static_cast<std::streamsize>(values_.size() * sizeof(double)));
}

GridFunction GridFunction::read_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("bad grid magic");
  if (get<uint32_t>(is) != kVersion) throw std::runtime_error("unsupported grid version");
  Mesh mesh;
  mesh.dim = get<int32_t>(is);
  mesh.box_level = get<int32_t>(is);
  mesh.res_level = get<int32_t>(is);
  mesh.validate();
  std::vector<double> v(static_cast<size_t>(mesh.cell_count()));
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated grid stream");
  return GridFunction(mesh, std::move(v));
}

void GridFunction::write_csv(std::ostream& os) const {
  os << "# bifrac-grid dim=" << mesh_.dim << " box_level=" << mesh_.box_level
     << " res_level=" << mesh_.res_level << "\n";
  os << "index,value\n";
  os.precision(17);
  for (size_t i = 0; i < values_.size(); ++i) os << i << "," << values_[i] << "\n";
}

GridFunction GridFunction::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty grid csv");
  Mesh mesh;
  if (std::sscanf(line.c_str(), "# bifrac-grid dim=%d box_level=%d res_level=%d", &mesh.dim,
                  &mesh.box_level, &mesh.res_level) != 3)
    throw std::runtime_error("bad grid csv header");
  mesh.validate();
  if (!std::getline(is, line)) throw std::runtime_error("truncated grid csv");
  std::vector<double> v(static_cast<size_t>(mesh.cell_count()), 0.0);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    long long idx;
    double val;
    if (std::sscanf(line.c_str(), "%lld,%lf", &idx, &val) != 2)
      throw std::runtime_error("bad grid csv row: " + line);
    if (idx < 0 || idx >= static_cast<long long>(v.size()))
      throw std::runtime_error("grid csv index out of range");
    v[static_cast<size_t>(idx)] = val;
  }
  return GridFunction(mesh, std::move(v));
}

}  // namespace bifrac
