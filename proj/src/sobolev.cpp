#include "hlw/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hlw/parallel.hpp"

namespace hlw {

namespace {

void require_margin(const SampledFunction& u, const char* who) {
  if (u.support_margin < 1)
    throw std::invalid_argument(std::string(who) + ": support margin must be >= 1 cell");
}

}  // namespace

SampledFunction sample_compact_function(
    HDim dim, const Box& support_box, int cells_per_axis, int margin,
    const std::function<double(std::span<const double>)>& fn) {
  if (support_box.dim() != dim.ambient())
    throw std::invalid_argument("sample_compact_function: box dimension mismatch");
  if (margin < 1) throw std::invalid_argument("sample_compact_function: margin must be >= 1");
  const int d = dim.ambient();
  GridGeom geom;
  geom.origin.resize(d);
  geom.spacing.resize(d);
  geom.shape.resize(d);
  for (int a = 0; a < d; ++a) {
    geom.spacing[a] = support_box.extent(a) / cells_per_axis;
    geom.origin[a] = support_box.lo[a] - margin * geom.spacing[a];
    geom.shape[a] = cells_per_axis + 2 * margin;
  }
  GridFunction grid = sample_function(geom, fn);
  // Hard-zero the margin ring; the samples must honor compact support.
  parallel_chunks(grid.size(), 64, [&](std::int64_t b, std::int64_t e, int) {
    std::vector<std::int64_t> idx(d);
    for (std::int64_t li = b; li < e; ++li) {
      std::int64_t rem = li;
      bool interior = true;
      for (int a = d - 1; a >= 0; --a) {
        idx[a] = rem % geom.shape[a];
        rem /= geom.shape[a];
        if (idx[a] < margin || idx[a] >= geom.shape[a] - margin) interior = false;
      }
      if (!interior) grid[li] = 0.0;
    }
  });
  return SampledFunction{std::move(grid), margin};
}

std::vector<GridFunction> horizontal_gradient(const SampledFunction& u, HDim dim) {
  require_margin(u, "horizontal_gradient");
  const int n = dim.n;
  const int d = dim.ambient();
  if (u.grid.dim() != d) throw std::invalid_argument("horizontal_gradient: dimension mismatch");
  const GridGeom& geom = u.grid.geom();

  std::vector<std::int64_t> stride(d, 1);
  for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * geom.shape[a + 1];

  std::vector<GridFunction> out;
  out.reserve(2 * n);
  for (int j = 0; j < 2 * n; ++j) out.emplace_back(geom);

  parallel_chunks(u.grid.size(), 64, [&](std::int64_t b, std::int64_t e, int) {
    std::vector<std::int64_t> idx(d);
    for (std::int64_t li = b; li < e; ++li) {
      std::int64_t rem = li;
      for (int a = d - 1; a >= 0; --a) {
        idx[a] = rem % geom.shape[a];
        rem /= geom.shape[a];
      }
      auto central = [&](int axis) -> double {
        const double up = idx[axis] + 1 < geom.shape[axis] ? u.grid[li + stride[axis]] : 0.0;
        const double dn = idx[axis] > 0 ? u.grid[li - stride[axis]] : 0.0;
        return (up - dn) / (2.0 * geom.spacing[axis]);
      };
      const double dt = central(d - 1);
      for (int k = 1; k <= n; ++k) {
        const double xk = geom.center(k - 1, idx[k - 1]);
        const double xnk = geom.center(n + k - 1, idx[n + k - 1]);
        out[k - 1][li] = central(k - 1) - 0.5 * xnk * dt;
        out[n + k - 1][li] = central(n + k - 1) + 0.5 * xk * dt;
      }
    }
  });
  return out;
}

RatioReport sobolev_ratio(const SampledFunction& u, HDim dim) {
  require_margin(u, "sobolev_ratio");
  const double q = (2.0 * dim.n + 2.0) / (2.0 * dim.n + 1.0);
  const double unorm = lp_norm(u.grid, q);
  if (unorm == 0.0) throw std::invalid_argument("sobolev_ratio: u is identically zero");

  RatioReport report;
  report.resolution = static_cast<int>(*std::max_element(u.grid.geom().shape.begin(),
                                                         u.grid.geom().shape.end()));
  std::vector<GridFunction> grads = horizontal_gradient(u, dim);
  double denom = 1.0;
  for (const auto& g : grads) {
    const double gnorm = lp_norm(g, 1.0);
    if (gnorm == 0.0)
      throw DiscretizationError("sobolev_ratio: a horizontal gradient vanished (under-resolved)");
    denom *= std::pow(gnorm, 1.0 / (2.0 * dim.n));
  }
  report.value = unorm / denom;
  report.conservative = report.value;
  report.optimistic = report.value;
  report.metadata = "sobolev";
  return report;
}

// ---------------------------------------------------------------------------
// Level sets
// ---------------------------------------------------------------------------

namespace {

// Dyadic levels of |v|: always k with 2^{k-1} <= |v| <= 2^k, plus k-1 when
// |v| is an exact power of two.
inline void dyadic_levels(double v, int& k, bool& boundary) {
  int e = 0;
  const double m = std::frexp(std::abs(v), &e);  // |v| = m 2^e, m in [0.5, 1)
  k = e;
  boundary = (m == 0.5);
}

}  // namespace

LevelSetDecomposition level_decomposition(const SampledFunction& u) {
  LevelSetDecomposition dec;
  int kmin = std::numeric_limits<int>::max();
  int kmax = std::numeric_limits<int>::min();
  for (std::int64_t li = 0; li < u.grid.size(); ++li) {
    const double v = u.grid[li];
    if (v == 0.0) continue;
    int k = 0;
    bool boundary = false;
    dyadic_levels(v, k, boundary);
    kmin = std::min(kmin, boundary ? k - 1 : k);
    kmax = std::max(kmax, k);
  }
  if (kmin > kmax) return dec;
  dec.k_min = kmin;
  dec.k_max = kmax;
  dec.sets.reserve(static_cast<size_t>(kmax - kmin + 1));
  for (int k = kmin; k <= kmax; ++k) dec.sets.emplace_back(u.grid.geom());
  for (std::int64_t li = 0; li < u.grid.size(); ++li) {
    const double v = u.grid[li];
    if (v == 0.0) continue;
    int k = 0;
    bool boundary = false;
    dyadic_levels(v, k, boundary);
    dec.sets[static_cast<size_t>(k - kmin)].set(li);
    if (boundary) dec.sets[static_cast<size_t>(k - 1 - kmin)].set(li);
  }
  return dec;
}

namespace {

LemmaCheck lemma_check_from_parts(const LevelSetDecomposition& dec, const GridFunction& xj_abs,
                                  int j, int k, HDim dim, int target_cells) {
  LemmaCheck check;
  const double cellvol = xj_abs.geom().cell_volume();
  check.fk_empty = !dec.has(k) || dec.at(k).occupied_count() == 0;
  check.fkm1_empty = !dec.has(k - 1) || dec.at(k - 1).occupied_count() == 0;
  if (!check.fk_empty) {
    check.lhs = volume(project_voxels(dec.at(k), vertical_projection_map(j, dim), target_cells,
                                      RasterMode::center));
  }
  if (!check.fkm1_empty) {
    const VoxelGrid& fkm1 = dec.at(k - 1);
    KahanSum acc;
    for (std::int64_t li = 0; li < xj_abs.size(); ++li)
      if (fkm1.test(li)) acc.add(std::abs(xj_abs[li]));
    check.rhs = std::exp2(-k + 2) * acc.value() * cellvol;
  }
  check.slack = check.lhs > 0.0 ? check.rhs / check.lhs
                                : std::numeric_limits<double>::infinity();
  return check;
}

}  // namespace

LemmaCheck levelset_lemma_check(const SampledFunction& u, int j, int k, HDim dim) {
  require_margin(u, "levelset_lemma_check");
  if (j < 1 || j > dim.horizontal())
    throw std::invalid_argument("levelset_lemma_check: j out of range");
  LevelSetDecomposition dec = level_decomposition(u);
  std::vector<GridFunction> grads = horizontal_gradient(u, dim);
  const int target = static_cast<int>(*std::max_element(u.grid.geom().shape.begin(),
                                                        u.grid.geom().shape.end()));
  return lemma_check_from_parts(dec, grads[j - 1], j, k, dim, target);
}

std::vector<LemmaRow> levelset_lemma_table(const SampledFunction& u, HDim dim) {
  require_margin(u, "levelset_lemma_table");
  LevelSetDecomposition dec = level_decomposition(u);
  std::vector<LemmaRow> rows;
  if (dec.empty()) return rows;
  std::vector<GridFunction> grads = horizontal_gradient(u, dim);
  const int target = static_cast<int>(*std::max_element(u.grid.geom().shape.begin(),
                                                        u.grid.geom().shape.end()));
  for (int j = 1; j <= dim.horizontal(); ++j)
    for (int k = dec.k_min; k <= dec.k_max; ++k) {
      LemmaRow row;
      row.j = j;
      row.k = k;
      row.check = lemma_check_from_parts(dec, grads[j - 1], j, k, dim, target);
      if (!row.check.fk_empty) rows.push_back(std::move(row));
    }
  return rows;
}

// ---------------------------------------------------------------------------
// Perimeter and isoperimetric ratio
// ---------------------------------------------------------------------------

namespace {

// Separable mollification with the C^2 bump (1 - s^2)^3, taps at cell
// centers, weights normalized to unit sum (mass-preserving).
GridFunction mollify(const GridFunction& f, double width) {
  GridFunction out = f;
  const GridGeom& geom = f.geom();
  const int d = geom.dim();
  std::vector<std::int64_t> stride(d, 1);
  for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * geom.shape[a + 1];

  for (int axis = 0; axis < d; ++axis) {
    const double h = geom.spacing[axis];
    const int M = static_cast<int>(std::floor(width / h));
    if (M < 1) continue;
    std::vector<double> taps(2 * M + 1);
    double total = 0.0;
    for (int m = -M; m <= M; ++m) {
      const double s = m * h / width;
      taps[m + M] = std::pow(std::max(0.0, 1.0 - s * s), 3.0);
      total += taps[m + M];
    }
    for (double& w : taps) w /= total;

    const GridFunction in = out;
    const std::int64_t S = stride[axis];
    const std::int64_t extent = geom.shape[axis];
    parallel_chunks(in.size(), 64, [&](std::int64_t b, std::int64_t e, int) {
      for (std::int64_t li = b; li < e; ++li) {
        const std::int64_t ia = (li / S) % extent;
        KahanSum acc;
        for (int m = -M; m <= M; ++m) {
          const std::int64_t q = ia + m;
          if (q < 0 || q >= extent) continue;
          acc.add(taps[m + M] * in[li + static_cast<std::int64_t>(m) * S]);
        }
        out[li] = acc.value();
      }
    });
  }
  return out;
}

double horizontal_variation(const GridFunction& u, HDim dim) {
  SampledFunction su{u, 1};
  std::vector<GridFunction> grads = horizontal_gradient(su, dim);
  const double cellvol = u.geom().cell_volume();
  return cellvol * parallel_sum(u.size(), [&](std::int64_t li) {
           double s = 0.0;
           for (const auto& g : grads) s += g[li] * g[li];
           return std::sqrt(s);
         });
}

}  // namespace

PerimeterReport perimeter_estimate(const Region& region, HDim dim, double mollification_width,
                                   int resolution) {
  if (region.dim != dim.ambient())
    throw std::invalid_argument("perimeter_estimate: dimension mismatch");
  double min_extent = std::numeric_limits<double>::infinity();
  double max_extent = 0.0;
  for (int a = 0; a < region.dim; ++a) {
    min_extent = std::min(min_extent, region.bounds.extent(a));
    max_extent = std::max(max_extent, region.bounds.extent(a));
  }
  double w0 = mollification_width > 0.0 ? mollification_width : 0.25 * min_extent;

  // One grid serves the whole ladder: spacing from the largest extent, pad
  // sized for the widest kernel plus the difference margin.
  const double h = max_extent / resolution;
  const int pad = static_cast<int>(std::ceil(w0 / h)) + 2;
  GridGeom geom;
  geom.origin.resize(region.dim);
  geom.spacing.resize(region.dim);
  geom.shape.resize(region.dim);
  for (int a = 0; a < region.dim; ++a) {
    geom.spacing[a] = h;
    const std::int64_t cells =
        static_cast<std::int64_t>(std::ceil(region.bounds.extent(a) / h));
    geom.origin[a] = region.bounds.lo[a] - pad * h;
    geom.shape[a] = cells + 2 * pad;
  }
  const GridFunction chi = sample_function(
      geom, [&](std::span<const double> p) { return region.membership(p) ? 1.0 : 0.0; });

  PerimeterReport report;
  double w = w0;
  while (w >= 2.0 * h) {
    const double estimate = horizontal_variation(mollify(chi, w), dim);
    report.ladder.emplace_back(w, estimate);
    const size_t m = report.ladder.size();
    if (m >= 3) {
      const double p0 = report.ladder[m - 3].second;
      const double p1 = report.ladder[m - 2].second;
      const double p2 = report.ladder[m - 1].second;
      if (p1 > 0.0 && p0 > 0.0 && std::abs(p1 - p0) <= 0.03 * p0 &&
          std::abs(p2 - p1) <= 0.03 * p1) {
        report.stabilized = true;
        report.value = p2;
        report.width = report.ladder[m - 1].first;
        return report;
      }
    }
    w *= 0.5;
  }
  if (!report.ladder.empty()) {
    report.value = report.ladder.back().second;
    report.width = report.ladder.back().first;
  }
  return report;
}

RatioReport isoperimetric_ratio(const Region& region, HDim dim, int resolution,
                                double mollification_width) {
  const double exponent = (2.0 * dim.n + 1.0) / (2.0 * dim.n + 2.0);
  const double vol_lo = volume(rasterize(region, resolution, RasterMode::center));
  if (vol_lo == 0.0) throw std::invalid_argument("isoperimetric_ratio: region has zero volume");
  const double vol_hi = volume(rasterize(region, resolution, RasterMode::cover));
  PerimeterReport perimeter = perimeter_estimate(region, dim, mollification_width, resolution);
  if (perimeter.value == 0.0)
    throw DiscretizationError("isoperimetric_ratio: perimeter estimate vanished");

  RatioReport report;
  report.resolution = resolution;
  report.value = std::pow(vol_lo, exponent) / perimeter.value;
  report.conservative = report.value;
  report.optimistic = std::pow(vol_hi, exponent) / perimeter.value;
  std::ostringstream meta;
  meta << "region=" << region.label << ";perimeter=" << perimeter.value
       << ";width=" << perimeter.width << ";stabilized=" << (perimeter.stabilized ? 1 : 0);
  report.metadata = meta.str();
  return report;
}

// ---------------------------------------------------------------------------
// Boundary containment
// ---------------------------------------------------------------------------

ContainmentReport boundary_containment_check(const Region& region, HDim dim, int resolution) {
  if (region.dim != dim.ambient())
    throw std::invalid_argument("boundary_containment_check: dimension mismatch");
  VoxelGrid center = rasterize(region, resolution, RasterMode::center);
  VoxelGrid cover = rasterize(region, resolution, RasterMode::cover);
  VoxelGrid eroded = center;
  eroded.erode_one_cell();

  // Voxel boundary on the cover geometry: cover minus the eroded interior.
  // Cover cell index c corresponds spatially to center cell c-1 per axis.
  VoxelGrid boundary(cover.geom());
  const int d = region.dim;
  parallel_chunks(cover.cell_count(), 64, [&](std::int64_t b, std::int64_t e, int) {
    std::vector<std::int64_t> idx(d);
    for (std::int64_t li = b; li < e; ++li) {
      if (!cover.test(li)) continue;
      cover.decompose(li, idx);
      bool inside_center_grid = true;
      for (int a = 0; a < d; ++a) {
        idx[a] -= 1;
        if (idx[a] < 0 || idx[a] >= center.geom().shape[a]) inside_center_grid = false;
      }
      const bool interior = inside_center_grid && eroded.test(center.compose(idx));
      if (!interior) boundary.set(li);
    }
  });

  ContainmentReport report;
  for (int j = 1; j <= dim.horizontal(); ++j) {
    const PointMap proj = vertical_projection_map(j, dim);
    VoxelGrid proj_e = project_voxels(center, proj, resolution, RasterMode::center);
    VoxelGrid proj_b =
        project_voxels(boundary, proj, resolution, RasterMode::center, proj_e.geom());
    proj_b.dilate_one_cell();
    ContainmentRow row;
    row.j = j;
    for (std::int64_t li = 0; li < proj_e.cell_count(); ++li) {
      if (!proj_e.test(li)) continue;
      ++row.projected_cells;
      if (!proj_b.test(li)) ++row.violations;
    }
    report.total_violations += row.violations;
    report.rows.push_back(row);
  }
  report.pass = report.total_violations == 0;
  return report;
}

}  // namespace hlw
