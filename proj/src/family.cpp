#include "bifrac/family.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bifrac {

FamilyKind family_kind_from_name(std::string_view name) {
  if (name == "indicator") return FamilyKind::indicator;
  if (name == "tent") return FamilyKind::tent;
  if (name == "truncated-power" || name == "truncated_power") return FamilyKind::truncated_power;
  if (name == "log-weight" || name == "log_weight") return FamilyKind::log_weight;
  if (name == "random" || name == "random-nonnegative") return FamilyKind::random_nonnegative;
  if (name == "necessity") return FamilyKind::necessity;
  throw std::invalid_argument("unknown test-family kind: " + std::string(name));
}

std::string_view family_kind_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::indicator: return "indicator";
    case FamilyKind::tent: return "tent";
    case FamilyKind::truncated_power: return "truncated-power";
    case FamilyKind::log_weight: return "log-weight";
    case FamilyKind::random_nonnegative: return "random";
    case FamilyKind::necessity: return "necessity";
  }
  return "?";
}

namespace {

Cube default_box(const Mesh& mesh) {
  if (mesh.dim == 1) return Cube::interval(0.0, 1.0);
  return Cube::square(0.0, 0.0, 1.0);
}

GridFunction restrict_to(const GridFunction& f, const Cube& box) {
  return GridFunction::zip(f, GridFunction::indicator(f.mesh(), box),
                           [](double v, double chi) { return chi > 0 ? v * chi : 0.0; });
}

}  // namespace

std::vector<GridFunction> make_test_family(const Mesh& mesh, const FamilySpec& spec,
                                           uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Cube box = spec.box.value_or(default_box(mesh));
  const double h = mesh.cell_side();
  std::vector<GridFunction> out;

  switch (spec.kind) {
    case FamilyKind::indicator: {
      out.push_back(GridFunction::indicator(mesh, box));
      break;
    }
    case FamilyKind::tent: {
      for (int k = 0; k < spec.count; ++k) {
        Point c{};
        for (int a = 0; a < mesh.dim; ++a)
          c[a] = box.corner(a) + unit(rng) * box.side();
        const double width = box.side() * (0.2 + 0.6 * unit(rng));
        GridFunction t = GridFunction::sample(mesh, [&](const Point& p) {
          double d = 0;
          for (int a = 0; a < mesh.dim; ++a) d = std::max(d, std::abs(p[a] - c[a]));
          return std::max(0.0, 1.0 - d / width);
        });
        out.push_back(restrict_to(t, box));
      }
      break;
    }
    case FamilyKind::truncated_power: {
      const double a = spec.exponent;
      const double cap = std::pow(h, a < 0 ? a : 0.0);
      GridFunction t = GridFunction::sample(mesh, [&](const Point& p) {
        double r = mesh.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
        double v = std::pow(r, a);
        return a < 0 ? std::min(v, cap) : v;
      });
      out.push_back(restrict_to(t, box));
      break;
    }
    case FamilyKind::log_weight: {
      GridFunction t = GridFunction::sample(mesh, [&](const Point& p) {
        double r = mesh.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
        return std::abs(std::log(std::max(r, h)));
      });
      out.push_back(restrict_to(t, box));
      break;
    }
    case FamilyKind::random_nonnegative: {
      // values drawn once per coarse lattice cell so the member is the same
      // function at every mesh resolution
      const double coarse_h = std::ldexp(1.0, -spec.coarse_level);
      const double w = mesh.half_width();
      const long long coarse_axis =
          static_cast<long long>(std::llround(2 * w / coarse_h));
      for (int k = 0; k < spec.count; ++k) {
        Point lo{};
        double frac = 0.25 + 0.75 * unit(rng);
        for (int a = 0; a < mesh.dim; ++a) {
          const double raw = box.corner(a) + unit(rng) * (1.0 - frac) * box.side();
          lo[a] = std::floor(raw / coarse_h) * coarse_h;  // snap to the coarse lattice
        }
        const double side =
            std::max(std::ceil(frac * box.side() / coarse_h), 1.0) * coarse_h;
        const Cube sub(mesh.dim, lo, std::max(side, 2 * h));
        std::vector<double> coarse(static_cast<size_t>(
            mesh.dim == 1 ? coarse_axis : coarse_axis * coarse_axis));
        for (auto& u : coarse) {
          const double draw = unit(rng);
          u = draw * draw;
        }
        GridFunction chi = GridFunction::indicator(mesh, sub);
        GridFunction noisy = GridFunction::sample(mesh, [&](const Point& p) {
          long long ix = static_cast<long long>(std::floor((p[0] + w) / coarse_h));
          ix = std::clamp<long long>(ix, 0, coarse_axis - 1);
          long long idx = ix;
          if (mesh.dim == 2) {
            long long iy = static_cast<long long>(std::floor((p[1] + w) / coarse_h));
            iy = std::clamp<long long>(iy, 0, coarse_axis - 1);
            idx = ix + coarse_axis * iy;
          }
          return coarse[static_cast<size_t>(idx)];
        });
        out.push_back(GridFunction::zip(noisy, chi,
                                        [](double v, double c) { return c > 0 ? v * c : 0.0; }));
      }
      break;
    }
    case FamilyKind::necessity: {
      if (!spec.base) throw std::invalid_argument("necessity family requires a base weight grid");
      if (!(spec.base->mesh() == mesh)) throw std::invalid_argument("necessity base mesh mismatch");
      GridFunction powered = spec.base->powered(spec.exponent);
      out.push_back(restrict_to(powered, box));
      break;
    }
  }
  return out;
}

}  // namespace bifrac
