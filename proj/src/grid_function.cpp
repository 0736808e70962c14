#include "hlw/grid_function.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "hlw/parallel.hpp"

namespace hlw {

GridFunction::GridFunction(GridGeom geom) : geom_(std::move(geom)) {
  samples_.assign(static_cast<size_t>(geom_.cell_count()), 0.0);
}

double GridFunction::value2(double x, double y) const {
  const double ux = (x - geom_.origin[0]) / geom_.spacing[0] - 0.5;
  const double uy = (y - geom_.origin[1]) / geom_.spacing[1] - 0.5;
  const std::int64_t ix = static_cast<std::int64_t>(std::floor(ux));
  const std::int64_t iy = static_cast<std::int64_t>(std::floor(uy));
  const double fx = ux - static_cast<double>(ix);
  const double fy = uy - static_cast<double>(iy);
  const std::int64_t nx = geom_.shape[0], ny = geom_.shape[1];
  auto sample = [&](std::int64_t i, std::int64_t j) -> double {
    if (i < 0 || i >= nx || j < 0 || j >= ny) return 0.0;
    return samples_[static_cast<size_t>(i * ny + j)];
  };
  const double v00 = sample(ix, iy), v01 = sample(ix, iy + 1);
  const double v10 = sample(ix + 1, iy), v11 = sample(ix + 1, iy + 1);
  return (1 - fx) * ((1 - fy) * v00 + fy * v01) + fx * ((1 - fy) * v10 + fy * v11);
}

double GridFunction::value(std::span<const double> p) const {
  const int d = dim();
  if (d == 2) return value2(p[0], p[1]);
  // Generic multilinear gather over the 2^d neighbors.
  std::vector<std::int64_t> base(d);
  std::vector<double> frac(d);
  for (int a = 0; a < d; ++a) {
    double u = (p[a] - geom_.origin[a]) / geom_.spacing[a] - 0.5;
    base[a] = static_cast<std::int64_t>(std::floor(u));
    frac[a] = u - static_cast<double>(base[a]);
  }
  double value = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    double w = 1.0;
    std::int64_t li = 0;
    bool ok = true;
    for (int a = 0; a < d; ++a) {
      const std::int64_t i = base[a] + ((mask >> a) & 1u);
      if (i < 0 || i >= geom_.shape[a]) {
        ok = false;
        break;
      }
      w *= ((mask >> a) & 1u) ? frac[a] : 1.0 - frac[a];
      li = li * geom_.shape[a] + i;
    }
    if (ok && w != 0.0) value += w * samples_[static_cast<size_t>(li)];
  }
  return value;
}

double GridFunction::column_value(std::int64_t leading, double u) const {
  const int last = dim() - 1;
  const std::int64_t n = geom_.shape[last];
  const double s = (u - geom_.origin[last]) / geom_.spacing[last] - 0.5;
  const std::int64_t j = static_cast<std::int64_t>(std::floor(s));
  const double f = s - static_cast<double>(j);
  const std::int64_t row = leading * n;
  const double v0 = (j < 0 || j >= n) ? 0.0 : samples_[static_cast<size_t>(row + j)];
  const double v1 = (j + 1 < 0 || j + 1 >= n) ? 0.0 : samples_[static_cast<size_t>(row + j + 1)];
  return (1 - f) * v0 + f * v1;
}

double GridFunction::integral() const {
  const double cv = geom_.cell_volume();
  return cv * parallel_sum(size(), [this](std::int64_t i) { return samples_[i]; });
}

double GridFunction::abs_max() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

bool GridFunction::nonnegative() const {
  for (double v : samples_)
    if (v < 0.0) return false;
  return true;
}

GridFunction sample_function(const GridGeom& geom,
                             const std::function<double(std::span<const double>)>& fn) {
  GridFunction f(geom);
  const int d = geom.dim();
  parallel_chunks(f.size(), 64, [&](std::int64_t b, std::int64_t e, int) {
    std::vector<double> p(d);
    std::vector<std::int64_t> idx(d);
    for (std::int64_t li = b; li < e; ++li) {
      std::int64_t rem = li;
      for (int a = d - 1; a >= 0; --a) {
        idx[a] = rem % geom.shape[a];
        rem /= geom.shape[a];
      }
      for (int a = 0; a < d; ++a) p[a] = geom.center(a, idx[a]);
      f[li] = fn(p);
    }
  });
  return f;
}

GridGeom grid_geom_2d(double xlo, double xhi, double ylo, double yhi, std::int64_t nx,
                      std::int64_t ny) {
  GridGeom geom;
  geom.origin = {xlo, ylo};
  geom.spacing = {(xhi - xlo) / static_cast<double>(nx), (yhi - ylo) / static_cast<double>(ny)};
  geom.shape = {nx, ny};
  return geom;
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const double cv = f.geom().cell_volume();
  double total = parallel_sum(
      f.size(), [&](std::int64_t i) { return std::pow(std::abs(f[i]), p); });
  return std::pow(total * cv, 1.0 / p);
}

std::string grid_function_to_csv(const GridFunction& f) {
  std::ostringstream os;
  const auto& geom = f.geom();
  os << "# " << geom.dim();
  for (auto s : geom.shape) os << ' ' << s;
  char buf[32];
  for (double v : geom.origin) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << ' ' << buf;
  }
  for (double v : geom.spacing) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << ' ' << buf;
  }
  os << '\n';
  for (std::int64_t i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", f[i]);
    os << buf << '\n';
  }
  return os.str();
}

GridFunction grid_function_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string hash;
  int d = 0;
  if (!(is >> hash >> d) || hash != "#" || d <= 0)
    throw std::invalid_argument("grid_function_from_csv: bad header");
  GridGeom geom;
  geom.shape.resize(d);
  geom.origin.resize(d);
  geom.spacing.resize(d);
  for (auto& v : geom.shape) is >> v;
  for (auto& v : geom.origin) is >> v;
  for (auto& v : geom.spacing) is >> v;
  if (!is) throw std::invalid_argument("grid_function_from_csv: truncated header");
  GridFunction f(geom);
  for (std::int64_t i = 0; i < f.size(); ++i)
    if (!(is >> f[i])) throw std::invalid_argument("grid_function_from_csv: missing samples");
  return f;
}

}  // namespace hlw
