#include "hlw/lw.hpp"

#include <cmath>
#include <sstream>

#include "hlw/parallel.hpp"

namespace hlw {

namespace {

double projection_exponent(HDim dim) {
  const double n = dim.n;
  return (n + 1.0) / (n * (2.0 * n + 1.0));
}

std::string join_doubles(std::span<const double> values) {
  std::ostringstream os;
  for (size_t i = 0; i < values.size(); ++i) os << (i ? " " : "") << values[i];
  return os.str();
}

RatioReport lw_ratio_dense(const Region& region, HDim dim, int resolution) {
  const double e = projection_exponent(dim);
  RatioReport report;
  report.resolution = resolution;

  VoxelGrid inner = rasterize(region, resolution, RasterMode::center);
  VoxelGrid outer = rasterize(region, resolution, RasterMode::cover);
  const double vol_lo = volume(inner);
  const double vol_hi = volume(outer);
  if (vol_lo == 0.0 && vol_hi == 0.0) {
    report.empty_region = true;
    report.metadata = "empty";
    return report;
  }

  double denom_lo = 1.0, denom_hi = 1.0;
  for (int j = 1; j <= dim.horizontal(); ++j) {
    const PointMap proj = vertical_projection_map(j, dim);
    const double a_lo = volume(project_voxels(inner, proj, resolution, RasterMode::center));
    const double a_hi = volume(project_voxels(outer, proj, resolution, RasterMode::cover));
    if (a_hi == 0.0) {
      if (vol_lo > 0.0)
        throw DiscretizationError("lw_ratio: projection bracket vanished against nonzero volume");
      report.empty_region = true;
      report.metadata = "empty-projection";
      return report;
    }
    denom_lo *= std::pow(a_lo, e);
    denom_hi *= std::pow(a_hi, e);
  }
  if (denom_lo == 0.0)
    throw DiscretizationError("lw_ratio: center-mode projection vanished; raise the resolution");

  report.value = vol_lo / denom_lo;
  report.conservative = vol_lo / denom_hi;
  report.optimistic = vol_hi / denom_lo;
  report.metadata = "region=" + region.label;
  return report;
}

RatioReport lw_ratio_monte_carlo(const Region& region, HDim dim, int resolution) {
  const double e = projection_exponent(dim);
  // Sample budget tied to the nominal resolution; hit-count grids stay coarse.
  const std::int64_t samples = static_cast<std::int64_t>(resolution) * 40000;
  const std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  const int target_cells = std::min(resolution, 24);

  RatioReport report;
  report.resolution = resolution;
  report.monte_carlo = true;

  McMeasure vol = mc_volume(region, samples, seed);
  if (vol.hits == 0) {
    report.empty_region = true;
    report.metadata = "empty;mc";
    return report;
  }
  double denom = 1.0;
  double rel_err = 1.0 / std::sqrt(static_cast<double>(vol.hits));
  for (int j = 1; j <= dim.horizontal(); ++j) {
    McMeasure area = mc_projection_measure(region, vertical_projection_map(j, dim), samples,
                                           target_cells, seed + j);
    if (area.hits == 0)
      throw DiscretizationError("lw_ratio: Monte Carlo projection measure vanished");
    denom *= std::pow(area.value, e);
    rel_err += e / std::sqrt(static_cast<double>(area.hits));
  }
  report.value = vol.value / denom;
  report.conservative = report.value * std::max(0.0, 1.0 - 2.0 * rel_err);
  report.optimistic = report.value * (1.0 + 2.0 * rel_err);
  std::ostringstream meta;
  meta << "region=" << region.label << ";mc_samples=" << samples << ";seed=" << seed;
  report.metadata = meta.str();
  return report;
}

}  // namespace

RatioReport lw_ratio(const Region& region, HDim dim, int resolution) {
  if (region.dim != dim.ambient()) throw std::invalid_argument("lw_ratio: dimension mismatch");
  if (dim.n <= 2) return lw_ratio_dense(region, dim, resolution);
  return lw_ratio_monte_carlo(region, dim, resolution);
}

// ---------------------------------------------------------------------------
// Function-form ratios
// ---------------------------------------------------------------------------

namespace {

// Slot of coordinate x_i (1-based) inside the deleted-coordinate tuple of
// f_j's grid (axes: surviving horizontal coordinates ascending, then t).
int hat_slot(int i, int j) { return i < j ? i - 1 : i - 2; }

struct QuadratureBox {
  std::vector<double> xlo, xhi;  // 2n horizontal ranges
  double tlo = 0, thi = 0;
  bool empty = false;
};

QuadratureBox preimage_box(const std::vector<GridFunction>& f, HDim dim) {
  const int m = dim.horizontal();
  QuadratureBox qb;
  qb.xlo.assign(m, -std::numeric_limits<double>::infinity());
  qb.xhi.assign(m, std::numeric_limits<double>::infinity());
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= m; ++j) {
      if (j == i) continue;
      const Box box = f[j - 1].geom().box();
      const int slot = hat_slot(i, j);
      qb.xlo[i - 1] = std::max(qb.xlo[i - 1], box.lo[slot]);
      qb.xhi[i - 1] = std::min(qb.xhi[i - 1], box.hi[slot]);
    }
    if (!(qb.xlo[i - 1] < qb.xhi[i - 1])) qb.empty = true;
  }
  if (qb.empty) return qb;

  // t must satisfy t + h_j(x) in [t-support of f_j] for every j; h_j is
  // bilinear in x so its range over the box is spanned by the corners.
  const int n = dim.n;
  qb.tlo = -std::numeric_limits<double>::infinity();
  qb.thi = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= m; ++j) {
    const Box box = f[j - 1].geom().box();
    const int k = (j <= n) ? j : j - n;
    const double sign = (j <= n) ? 0.5 : -0.5;
    double hmin = std::numeric_limits<double>::infinity();
    double hmax = -hmin;
    for (double u : {qb.xlo[k - 1], qb.xhi[k - 1]})
      for (double v : {qb.xlo[n + k - 1], qb.xhi[n + k - 1]}) {
        hmin = std::min(hmin, sign * u * v);
        hmax = std::max(hmax, sign * u * v);
      }
    qb.tlo = std::max(qb.tlo, box.lo.back() - hmax);
    qb.thi = std::min(qb.thi, box.hi.back() - hmin);
  }
  if (!(qb.tlo < qb.thi)) qb.empty = true;
  return qb;
}

}  // namespace

double lw_integral(const std::vector<GridFunction>& f, HDim dim, int resolution) {
  const int m = dim.horizontal();
  const int n = dim.n;
  if (static_cast<int>(f.size()) != m)
    throw std::invalid_argument("lw_integral: need 2n grid functions");
  for (const auto& fj : f) {
    if (fj.dim() != m) throw std::invalid_argument("lw_integral: inputs must live on R^{2n}");
    if (!fj.nonnegative()) throw std::invalid_argument("lw_integral: inputs must be nonnegative");
  }
  QuadratureBox qb = preimage_box(f, dim);
  if (qb.empty) return 0.0;

  const int d = m + 1;
  std::vector<double> lo(d), step(d);
  for (int a = 0; a < m; ++a) {
    lo[a] = qb.xlo[a];
    step[a] = (qb.xhi[a] - qb.xlo[a]) / resolution;
  }
  lo[m] = qb.tlo;
  step[m] = (qb.thi - qb.tlo) / resolution;

  std::int64_t cells = 1;
  for (int a = 0; a < d; ++a) cells *= resolution;

  double cellvol = 1.0;
  for (int a = 0; a < d; ++a) cellvol *= step[a];

  return cellvol * parallel_sum(cells, [&](std::int64_t li) {
           double p[16];
           std::int64_t rem = li;
           for (int a = d - 1; a >= 0; --a) {
             p[a] = lo[a] + (static_cast<double>(rem % resolution) + 0.5) * step[a];
             rem /= resolution;
           }
           double w[16];
           double prod = 1.0;
           for (int j = 1; j <= m && prod != 0.0; ++j) {
             int o = 0;
             for (int i = 1; i <= m; ++i)
               if (i != j) w[o++] = p[i - 1];
             const int k = (j <= n) ? j : j - n;
             const double h = (j <= n ? 0.5 : -0.5) * p[k - 1] * p[n + k - 1];
             w[o] = p[m] + h;
             prod *= f[j - 1].value(std::span<const double>(w, m));
           }
           return prod;
         });
}

namespace {

RatioReport function_ratio(const std::vector<GridFunction>& f, HDim dim, int resolution,
                           const std::vector<double>& exponents, const std::string& label) {
  RatioReport report;
  report.resolution = resolution;
  double denom = 1.0;
  for (size_t j = 0; j < f.size(); ++j) {
    const double norm = lp_norm(f[j], exponents[j]);
    if (norm == 0.0) throw std::invalid_argument(label + ": zero-norm input");
    denom *= norm;
  }
  const double coarse = lw_integral(f, dim, std::max(8, resolution / 2));
  const double fine = lw_integral(f, dim, resolution);
  report.value = fine / denom;
  report.conservative = std::min(fine, coarse) / denom;
  report.optimistic = std::max(fine, coarse) / denom;
  report.metadata = label;
  return report;
}

}  // namespace

RatioReport strong_ratio(const std::vector<GridFunction>& f, HDim dim, int resolution) {
  const ExponentTable table = exponent_table(dim);
  std::vector<double> exponents(f.size(), table.p_main.to_double());
  return function_ratio(f, dim, resolution, exponents, "strong");
}

RatioReport vertex_ratio(const std::vector<GridFunction>& f, HDim dim, int k, int resolution) {
  if (k < 1 || k > dim.n) throw std::invalid_argument("vertex_ratio: k out of range");
  const int m = dim.horizontal();
  std::vector<double> exponents(m, 2.0 * dim.n + 1.0);
  exponents[k - 1] = (2.0 * dim.n + 1.0) / 2.0;
  exponents[dim.n + k - 1] = (2.0 * dim.n + 1.0) / 2.0;
  return function_ratio(f, dim, resolution, exponents, "vertex_k" + std::to_string(k));
}

// ---------------------------------------------------------------------------
// Sharpness sweep and the flat counterexample
// ---------------------------------------------------------------------------

Region sharp_box_region(double r, HDim dim) {
  Box box;
  box.lo.assign(dim.ambient(), -r);
  box.hi.assign(dim.ambient(), r);
  box.lo.back() = -r * r;
  box.hi.back() = r * r;
  return box_region(box, "sharp_box_r=" + std::to_string(r));
}

SharpnessTable sharpness_sweep(HDim dim, std::span<const double> r_values, int resolution) {
  SharpnessTable table;
  for (double r : r_values) {
    if (!(r > 0.0)) throw std::invalid_argument("sharpness_sweep: r must be positive");
    SharpnessRow row;
    row.r = r;
    row.report = lw_ratio(sharp_box_region(r, dim), dim, resolution);
    table.rows.push_back(std::move(row));
  }
  table.min_value = table.rows.front().report.value;
  table.max_value = table.min_value;
  for (const auto& row : table.rows) {
    table.min_value = std::min(table.min_value, row.report.value);
    table.max_value = std::max(table.max_value, row.report.value);
  }
  table.spread = table.min_value > 0.0 ? table.max_value / table.min_value - 1.0 : 0.0;
  return table;
}

CounterexampleResult euclidean_counterexample(double delta, double R, int resolution) {
  if (!(delta > 0.0 && delta < 1.0 && R > 1.0))
    throw std::invalid_argument("euclidean_counterexample: need 0 < delta < 1 < R");
  const HDim dim{1};

  auto box3 = [](double x1, double y1, double t1) {
    Box b;
    b.lo = {0.0, 0.0, 0.0};
    b.hi = {x1, y1, t1};
    return b;
  };
  const Region thin = box_region(box3(1.0, 1.0, delta), "thin_slab");
  const Region cube = box_region(box3(R, R, R), "large_cube");

  // Exact target geometry (the projected bounding box) keeps box measures
  // exact: mapped cell centers coincide with target cell centers.
  auto flat_measure = [&](const Region& region, int drop_axis) {
    VoxelGrid grid = rasterize(region, resolution, RasterMode::center);
    const PointMap proj = euclidean_projection_map(drop_axis, 3);
    GridGeom target;
    target.origin.resize(2);
    target.spacing.resize(2);
    target.shape.resize(2);
    int o = 0;
    for (int a = 0; a < 3; ++a) {
      if (a == drop_axis - 1) continue;
      target.spacing[o] = grid.geom().spacing[a];
      target.origin[o] = grid.geom().origin[a] - target.spacing[o];
      target.shape[o] = grid.geom().shape[a] + 2;
      ++o;
    }
    return volume(project_voxels(grid, proj, resolution, RasterMode::center, target));
  };

  CounterexampleResult out;
  out.volume_small = volume(rasterize(thin, resolution, RasterMode::center));
  out.proj1_small = flat_measure(thin, 1);
  out.proj2_small = flat_measure(thin, 2);
  out.volume_large = volume(rasterize(cube, resolution, RasterMode::center));
  out.proj1_large = flat_measure(cube, 1);
  out.proj2_large = flat_measure(cube, 2);
  out.lambda_max = std::log(out.volume_small) / std::log(out.proj1_small * out.proj2_small);
  out.lambda_min = std::log(out.volume_large) / std::log(out.proj1_large * out.proj2_large);

  VoxelGrid cube_grid = rasterize(cube, resolution, RasterMode::center);
  out.heis_proj1_large =
      volume(project_voxels(cube_grid, vertical_projection_map(1, dim), resolution,
                            RasterMode::center));
  out.heis_proj2_large =
      volume(project_voxels(cube_grid, vertical_projection_map(2, dim), resolution,
                            RasterMode::center));
  return out;
}

// ---------------------------------------------------------------------------
// Invariance suite
// ---------------------------------------------------------------------------

InvarianceReport invariance_suite(const Region& region, HDim dim,
                                  const std::vector<HPoint>& translations,
                                  const std::vector<double>& dilations, int resolution,
                                  double tolerance) {
  InvarianceReport report;
  report.tolerance = tolerance;
  report.base_value = lw_ratio(region, dim, resolution).value;

  auto add_row = [&](const std::string& label, const Region& moved) {
    InvarianceRow row;
    row.transform = label;
    row.value = lw_ratio(moved, dim, resolution).value;
    row.rel_change = std::abs(row.value - report.base_value) / report.base_value;
    report.max_rel_change = std::max(report.max_rel_change, row.rel_change);
    report.rows.push_back(std::move(row));
  };

  for (size_t i = 0; i < translations.size(); ++i)
    add_row("translate[" + join_doubles(translations[i].x) + " " +
                std::to_string(translations[i].t) + "]",
            translate_region(region, translations[i], dim));
  for (double r : dilations) add_row("dilate r=" + std::to_string(r), dilate_region(region, r, dim));

  report.pass = report.max_rel_change <= tolerance;
  return report;
}

std::vector<Region> builtin_region_suite() {
  const HDim dim{1};
  std::vector<Region> suite;
  suite.push_back(sharp_box_region(1.0, dim));

  Box uneven;
  uneven.lo = {-0.7, -1.3, -0.9};
  uneven.hi = {0.7, 1.3, 0.9};
  suite.push_back(box_region(uneven, "uneven_box"));

  suite.push_back(koranyi_ball_region(identity_point(dim), 1.0, dim));
  suite.push_back(koranyi_ball_region(HPoint{{0.4, -0.3}, 0.2}, 0.8, dim));

  Box small1, small2;
  small1.lo = {-1.0, -0.5, -0.5};
  small1.hi = {0.2, 0.5, 0.5};
  small2.lo = {-0.2, -0.6, -0.4};
  small2.hi = {1.0, 0.6, 0.6};
  suite.push_back(union_region(box_region(small1, "boxA"), box_region(small2, "boxB")));

  suite.push_back(
      translate_region(sharp_box_region(0.8, dim), HPoint{{0.3, -0.2}, 0.1}, dim));
  return suite;
}

}  // namespace hlw
