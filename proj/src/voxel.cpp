#include "hlw/voxel.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "hlw/parallel.hpp"

namespace hlw {

namespace {

void atomic_or(std::uint64_t& word, std::uint64_t bits) {
  std::atomic_ref<std::uint64_t> ref(word);
  ref.fetch_or(bits, std::memory_order_relaxed);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Box / Region
// ---------------------------------------------------------------------------

double Box::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= extent(a);
  return v;
}

bool Box::contains(std::span<const double> p) const {
  for (int a = 0; a < dim(); ++a)
    if (p[a] < lo[a] || p[a] > hi[a]) return false;
  return true;
}

std::vector<double> Box::corner(std::uint32_t mask) const {
  std::vector<double> c(dim());
  for (int a = 0; a < dim(); ++a) c[a] = (mask >> a) & 1u ? hi[a] : lo[a];
  return c;
}

Box Box::padded(double amount) const {
  Box out = *this;
  for (int a = 0; a < dim(); ++a) {
    out.lo[a] -= amount;
    out.hi[a] += amount;
  }
  return out;
}

Region box_region(const Box& box, std::string label) {
  Region region;
  region.dim = box.dim();
  region.bounds = box;
  region.membership = [box](std::span<const double> p) { return box.contains(p); };
  region.label = std::move(label);
  return region;
}

Region koranyi_ball_region(const HPoint& center, double radius, HDim dim) {
  const int d = dim.ambient();
  Box box;
  box.lo.assign(d, -radius);
  box.hi.assign(d, radius);
  box.lo[d - 1] = -radius * radius / 4.0;
  box.hi[d - 1] = radius * radius / 4.0;
  Region ball;
  ball.dim = d;
  ball.bounds = box;
  ball.membership = [radius, box](std::span<const double> p) {
    if (!box.contains(p)) return false;
    double s = 0.0;
    for (size_t i = 0; i + 1 < p.size(); ++i) s += p[i] * p[i];
    const double t = p.back();
    return s * s + 16.0 * t * t <= std::pow(radius, 4.0);
  };
  ball.label = "koranyi_ball";
  bool at_origin = center.t == 0.0;
  for (double v : center.x) at_origin = at_origin && v == 0.0;
  return at_origin ? ball : translate_region(ball, center, dim);
}

Region euclidean_ball_region(std::vector<double> center, double radius, std::string label) {
  Region ball;
  ball.dim = static_cast<int>(center.size());
  ball.bounds.lo.resize(center.size());
  ball.bounds.hi.resize(center.size());
  for (size_t a = 0; a < center.size(); ++a) {
    ball.bounds.lo[a] = center[a] - radius;
    ball.bounds.hi[a] = center[a] + radius;
  }
  ball.membership = [center = std::move(center), radius](std::span<const double> p) {
    double s = 0.0;
    for (size_t a = 0; a < center.size(); ++a) s += (p[a] - center[a]) * (p[a] - center[a]);
    return s <= radius * radius;
  };
  ball.label = std::move(label);
  return ball;
}

Region union_region(const Region& a, const Region& b) {
  if (a.dim != b.dim) throw std::invalid_argument("union_region: dimension mismatch");
  Region out;
  out.dim = a.dim;
  out.bounds.lo.resize(a.dim);
  out.bounds.hi.resize(a.dim);
  for (int ax = 0; ax < a.dim; ++ax) {
    out.bounds.lo[ax] = std::min(a.bounds.lo[ax], b.bounds.lo[ax]);
    out.bounds.hi[ax] = std::max(a.bounds.hi[ax], b.bounds.hi[ax]);
  }
  out.membership = [ma = a.membership, mb = b.membership](std::span<const double> p) {
    return ma(p) || mb(p);
  };
  out.label = a.label + "+" + b.label;
  return out;
}

Region difference_region(const Region& a, const Region& b) {
  if (a.dim != b.dim) throw std::invalid_argument("difference_region: dimension mismatch");
  Region out = a;
  out.membership = [ma = a.membership, mb = b.membership](std::span<const double> p) {
    return ma(p) && !mb(p);
  };
  out.label = a.label + "-" + b.label;
  return out;
}

Region translate_region(const Region& region, const HPoint& p, HDim dim) {
  if (region.dim != dim.ambient())
    throw std::invalid_argument("translate_region: dimension mismatch");
  const HPoint pinv = group_inverse(p);
  Region out;
  out.dim = region.dim;
  out.label = region.label + "@translated";
  out.membership = [member = region.membership, pinv, dim](std::span<const double> q) {
    HPoint s = hpoint_from_coords(q);
    HPoint moved = group_product(pinv, s, dim);
    std::vector<double> coords(q.size());
    hpoint_to_coords(moved, coords);
    return member(coords);
  };
  // Left translation by p is affine in q, so the image of the bounding box is
  // bracketed by its mapped corners.
  const int d = region.dim;
  out.bounds.lo.assign(d, 0.0);
  out.bounds.hi.assign(d, 0.0);
  bool first = true;
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    std::vector<double> c = region.bounds.corner(mask);
    HPoint moved = group_product(p, hpoint_from_coords(c), dim);
    std::vector<double> mc(d);
    hpoint_to_coords(moved, mc);
    for (int a = 0; a < d; ++a) {
      if (first) {
        out.bounds.lo[a] = out.bounds.hi[a] = mc[a];
      } else {
        out.bounds.lo[a] = std::min(out.bounds.lo[a], mc[a]);
        out.bounds.hi[a] = std::max(out.bounds.hi[a], mc[a]);
      }
    }
    first = false;
  }
  return out;
}

Region dilate_region(const Region& region, double r, HDim dim) {
  if (region.dim != dim.ambient())
    throw std::invalid_argument("dilate_region: dimension mismatch");
  if (!(r > 0.0)) throw std::invalid_argument("dilate_region: r must be positive");
  Region out;
  out.dim = region.dim;
  out.label = region.label + "@dilated";
  out.membership = [member = region.membership, r](std::span<const double> q) {
    std::vector<double> back(q.size());
    for (size_t a = 0; a + 1 < q.size(); ++a) back[a] = q[a] / r;
    back.back() = q.back() / (r * r);
    return member(back);
  };
  out.bounds = region.bounds;
  const int d = region.dim;
  for (int a = 0; a < d - 1; ++a) {
    out.bounds.lo[a] *= r;
    out.bounds.hi[a] *= r;
  }
  out.bounds.lo[d - 1] *= r * r;
  out.bounds.hi[d - 1] *= r * r;
  return out;
}

// ---------------------------------------------------------------------------
// GridGeom / VoxelGrid
// ---------------------------------------------------------------------------

std::int64_t GridGeom::cell_count() const {
  std::int64_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

double GridGeom::cell_volume() const {
  double v = 1.0;
  for (double s : spacing) v *= s;
  return v;
}

Box GridGeom::box() const {
  Box b;
  b.lo = origin;
  b.hi.resize(origin.size());
  for (size_t a = 0; a < origin.size(); ++a)
    b.hi[a] = origin[a] + spacing[a] * static_cast<double>(shape[a]);
  return b;
}

VoxelGrid::VoxelGrid(GridGeom geom) : geom_(std::move(geom)) {
  cells_ = geom_.cell_count();
  words_.assign(static_cast<size_t>((cells_ + 63) / 64), 0);
}

std::int64_t VoxelGrid::occupied_count() const {
  std::int64_t count = 0;
  for (std::uint64_t w : words_) count += std::popcount(w);
  return count;
}

void VoxelGrid::decompose(std::int64_t li, std::span<std::int64_t> idx) const {
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = li % geom_.shape[a];
    li /= geom_.shape[a];
  }
}

std::int64_t VoxelGrid::compose(std::span<const std::int64_t> idx) const {
  std::int64_t li = 0;
  for (int a = 0; a < dim(); ++a) li = li * geom_.shape[a] + idx[a];
  return li;
}

void VoxelGrid::cell_center(std::int64_t li, std::span<double> out) const {
  for (int a = dim() - 1; a >= 0; --a) {
    std::int64_t i = li % geom_.shape[a];
    li /= geom_.shape[a];
    out[a] = geom_.center(a, i);
  }
}

std::optional<std::int64_t> VoxelGrid::locate(std::span<const double> p) const {
  std::int64_t li = 0;
  for (int a = 0; a < dim(); ++a) {
    double u = (p[a] - geom_.origin[a]) / geom_.spacing[a];
    std::int64_t i = static_cast<std::int64_t>(std::floor(u));
    if (i < 0 || i >= geom_.shape[a]) return std::nullopt;
    li = li * geom_.shape[a] + i;
  }
  return li;
}

void VoxelGrid::dilate_one_cell() {
  const int d = dim();
  for (int axis = d - 1; axis >= 0; --axis) {
    std::int64_t stride = 1;
    for (int a = axis + 1; a < d; ++a) stride *= geom_.shape[a];
    const std::int64_t extent = geom_.shape[axis];
    std::vector<std::uint64_t> out = words_;
    parallel_chunks((cells_ + 63) / 64, 1, [&](std::int64_t wb, std::int64_t we, int) {
      for (std::int64_t w = wb; w < we; ++w) {
        std::uint64_t bits = words_[w];
        while (bits) {
          int b = std::countr_zero(bits);
          bits &= bits - 1;
          std::int64_t li = w * 64 + b;
          std::int64_t ia = (li / stride) % extent;
          if (ia > 0) atomic_or(out[(li - stride) >> 6], 1ull << ((li - stride) & 63));
          if (ia + 1 < extent) atomic_or(out[(li + stride) >> 6], 1ull << ((li + stride) & 63));
        }
      }
    });
    words_ = std::move(out);
  }
}

void VoxelGrid::erode_one_cell() {
  const int d = dim();
  for (int axis = d - 1; axis >= 0; --axis) {
    std::int64_t stride = 1;
    for (int a = axis + 1; a < d; ++a) stride *= geom_.shape[a];
    const std::int64_t extent = geom_.shape[axis];
    std::vector<std::uint64_t> out = words_;
    parallel_chunks(cells_, 64, [&](std::int64_t b, std::int64_t e, int) {
      for (std::int64_t li = b; li < e; ++li) {
        if (!test(li)) continue;
        std::int64_t ia = (li / stride) % extent;
        bool keep = ia > 0 && ia + 1 < extent && test(li - stride) && test(li + stride);
        if (!keep) out[static_cast<std::uint64_t>(li) >> 6] &= ~(1ull << (li & 63));
      }
    });
    words_ = std::move(out);
  }
}

double volume(const VoxelGrid& grid) {
  return static_cast<double>(grid.occupied_count()) * grid.cell_volume();
}

// ---------------------------------------------------------------------------
// Rasterization
// ---------------------------------------------------------------------------

namespace {

GridGeom geom_over_box(const Box& box, int cells_per_axis, int pad_cells) {
  GridGeom geom;
  const int d = box.dim();
  geom.origin.resize(d);
  geom.spacing.resize(d);
  geom.shape.resize(d);
  for (int a = 0; a < d; ++a) {
    double extent = box.extent(a);
    if (!(extent > 0.0)) throw std::invalid_argument("rasterize: degenerate bounds");
    geom.spacing[a] = extent / cells_per_axis;
    geom.origin[a] = box.lo[a] - pad_cells * geom.spacing[a];
    geom.shape[a] = cells_per_axis + 2 * pad_cells;
  }
  return geom;
}

}  // namespace

VoxelGrid rasterize(const Region& region, int cells_per_axis, RasterMode mode) {
  if (cells_per_axis < 2) throw std::invalid_argument("rasterize: need at least 2 cells per axis");
  const int d = region.dim;

  if (mode == RasterMode::center) {
    VoxelGrid grid(geom_over_box(region.bounds, cells_per_axis, 0));
    parallel_chunks(grid.cell_count(), 64, [&](std::int64_t b, std::int64_t e, int) {
      std::vector<double> p(d);
      for (std::int64_t li = b; li < e; ++li) {
        grid.cell_center(li, p);
        if (region.membership(p)) grid.set(li);
      }
    });
    return grid;
  }

  VoxelGrid grid(geom_over_box(region.bounds, cells_per_axis, 1));
  const auto& geom = grid.geom();

  // Shared corner lattice (shape+1 per axis) so each corner is evaluated once.
  std::vector<std::int64_t> cshape(d);
  std::int64_t corners = 1;
  for (int a = 0; a < d; ++a) {
    cshape[a] = geom.shape[a] + 1;
    corners *= cshape[a];
  }
  std::vector<std::uint64_t> corner_bits(static_cast<size_t>((corners + 63) / 64), 0);
  parallel_chunks(corners, 64, [&](std::int64_t b, std::int64_t e, int) {
    std::vector<double> p(d);
    std::vector<std::int64_t> idx(d);
    for (std::int64_t ci = b; ci < e; ++ci) {
      std::int64_t rem = ci;
      for (int a = d - 1; a >= 0; --a) {
        idx[a] = rem % cshape[a];
        rem /= cshape[a];
      }
      for (int a = 0; a < d; ++a) p[a] = geom.origin[a] + geom.spacing[a] * idx[a];
      if (region.membership(p))
        corner_bits[static_cast<std::uint64_t>(ci) >> 6] |= 1ull << (ci & 63);
    }
  });

  parallel_chunks(grid.cell_count(), 64, [&](std::int64_t b, std::int64_t e, int) {
    std::vector<double> p(d);
    std::vector<std::int64_t> idx(d);
    for (std::int64_t li = b; li < e; ++li) {
      grid.decompose(li, idx);
      bool hit = false;
      for (std::uint32_t mask = 0; mask < (1u << d) && !hit; ++mask) {
        std::int64_t ci = 0;
        for (int a = 0; a < d; ++a) ci = ci * cshape[a] + idx[a] + ((mask >> a) & 1u);
        hit = (corner_bits[static_cast<std::uint64_t>(ci) >> 6] >> (ci & 63)) & 1u;
      }
      if (!hit) {
        grid.cell_center(li, p);
        hit = region.membership(p);
      }
      if (hit) grid.set(li);
    }
  });

  grid.dilate_one_cell();
  return grid;
}

// ---------------------------------------------------------------------------
// Projection maps
// ---------------------------------------------------------------------------

PointMap vertical_projection_map(int j, HDim dim) {
  if (j < 1 || j > dim.horizontal())
    throw std::invalid_argument("vertical_projection_map: index out of range");
  PointMap map;
  map.in_dim = dim.ambient();
  map.out_dim = dim.horizontal();
  map.vertical_j = j;
  map.vertical_n = dim.n;
  map.label = "pi_" + std::to_string(j);
  return map;
}

PointMap rho_projection_map(const HeightFamily& family, int j) {
  if (j < 1 || j > family.dim.horizontal())
    throw std::invalid_argument("rho_projection_map: index out of range");
  PointMap map;
  map.in_dim = family.dim.ambient();
  map.out_dim = family.dim.horizontal();
  map.label = "rho_" + std::to_string(j);
  const HeightFn h = family.h[j - 1];
  const int m = family.dim.horizontal();
  map.fn = [h, j, m](std::span<const double> in, std::span<double> out) {
    int o = 0;
    for (int i = 1; i <= m; ++i)
      if (i != j) out[o++] = in[i - 1];
    out[o] = in[m] + h(in.subspan(0, m));
  };
  return map;
}

PointMap euclidean_projection_map(int drop_axis, int dim) {
  if (drop_axis < 1 || drop_axis > dim)
    throw std::invalid_argument("euclidean_projection_map: axis out of range");
  PointMap map;
  map.in_dim = dim;
  map.out_dim = dim - 1;
  map.label = "euclid_" + std::to_string(drop_axis);
  map.fn = [drop_axis, dim](std::span<const double> in, std::span<double> out) {
    int o = 0;
    for (int i = 1; i <= dim; ++i)
      if (i != drop_axis) out[o++] = in[i - 1];
  };
  return map;
}

// ---------------------------------------------------------------------------
// Voxel projection
// ---------------------------------------------------------------------------

VoxelGrid project_voxels(const VoxelGrid& grid, const PointMap& proj, int target_cells,
                         RasterMode mode, const std::optional<GridGeom>& target_geom) {
  if (proj.in_dim != grid.dim())
    throw std::invalid_argument("project_voxels: projection input dimension mismatch");
  const int din = proj.in_dim;
  const int dout = proj.out_dim;
  const auto& geom = grid.geom();
  const std::int64_t n_words = static_cast<std::int64_t>(grid.words().size());
  const std::uint32_t corner_masks = 1u << din;

  GridGeom tgeom;
  if (target_geom) {
    tgeom = *target_geom;
  } else {
    // Bounds of the mapped occupied cells (centers, plus corners in cover
    // mode), merged over fixed chunks.
    const int n_chunks = 256;
    std::vector<std::vector<double>> cmin(n_chunks), cmax(n_chunks);
    parallel_chunks(n_words, 1, [&](std::int64_t wb, std::int64_t we, int ci) {
      std::vector<double> in(din), out(dout);
      std::vector<double> mn, mx;
      for (std::int64_t w = wb; w < we; ++w) {
        std::uint64_t bits = grid.words()[w];
        while (bits) {
          int b = std::countr_zero(bits);
          bits &= bits - 1;
          std::int64_t li = w * 64 + b;
          grid.cell_center(li, in);
          const std::uint32_t n_masks = (mode == RasterMode::cover) ? corner_masks : 0;
          for (std::uint32_t mask = 0; mask <= n_masks; ++mask) {
            std::vector<double> pt(din);
            if (mask == n_masks) {
              pt.assign(in.begin(), in.end());  // center sample
            } else {
              for (int a = 0; a < din; ++a)
                pt[a] = in[a] + (((mask >> a) & 1u) ? 0.5 : -0.5) * geom.spacing[a];
            }
            proj.eval(pt, out);
            if (mn.empty()) {
              mn = out;
              mx = out;
            } else {
              for (int a = 0; a < dout; ++a) {
                mn[a] = std::min(mn[a], out[a]);
                mx[a] = std::max(mx[a], out[a]);
              }
            }
            if (mode != RasterMode::cover) break;
          }
        }
      }
      if (ci < n_chunks && !mn.empty()) {
        cmin[ci] = std::move(mn);
        cmax[ci] = std::move(mx);
      }
    });
    std::vector<double> lo, hi;
    for (int ci = 0; ci < n_chunks; ++ci) {
      if (cmin[ci].empty()) continue;
      if (lo.empty()) {
        lo = cmin[ci];
        hi = cmax[ci];
      } else {
        for (int a = 0; a < dout; ++a) {
          lo[a] = std::min(lo[a], cmin[ci][a]);
          hi[a] = std::max(hi[a], cmax[ci][a]);
        }
      }
    }
    if (lo.empty()) {
      // Empty source: degenerate one-cell target around the origin.
      lo.assign(dout, 0.0);
      hi.assign(dout, 1.0);
    }
    const int pad = (mode == RasterMode::cover) ? 2 : 1;
    tgeom.origin.resize(dout);
    tgeom.spacing.resize(dout);
    tgeom.shape.resize(dout);
    for (int a = 0; a < dout; ++a) {
      double extent = hi[a] - lo[a];
      if (!(extent > 0.0)) extent = std::max(1e-12, std::abs(lo[a]) * 1e-12);
      tgeom.spacing[a] = extent / target_cells;
      tgeom.origin[a] = lo[a] - pad * tgeom.spacing[a];
      tgeom.shape[a] = target_cells + 2 * pad;
    }
  }

  VoxelGrid target(tgeom);
  auto& twords = target.words();

  parallel_chunks(n_words, 1, [&](std::int64_t wb, std::int64_t we, int) {
    std::vector<double> in(din), out(dout), pt(din);
    std::vector<double> mn(dout), mx(dout);
    std::vector<std::int64_t> lo_idx(dout), hi_idx(dout), it(dout);
    for (std::int64_t w = wb; w < we; ++w) {
      std::uint64_t bits = grid.words()[w];
      while (bits) {
        int b = std::countr_zero(bits);
        bits &= bits - 1;
        std::int64_t li = w * 64 + b;
        grid.cell_center(li, in);
        if (mode == RasterMode::center) {
          proj.eval(in, out);
          if (auto ti = target.locate(out))
            atomic_or(twords[static_cast<std::uint64_t>(*ti) >> 6], 1ull << (*ti & 63));
          continue;
        }
        // Cover: bounding box of the mapped corners and center.
        for (std::uint32_t mask = 0; mask <= corner_masks; ++mask) {
          if (mask == corner_masks) {
            pt = in;
          } else {
            for (int a = 0; a < din; ++a)
              pt[a] = in[a] + (((mask >> a) & 1u) ? 0.5 : -0.5) * geom.spacing[a];
          }
          proj.eval(pt, out);
          if (mask == 0) {
            mn = out;
            mx = out;
          } else {
            for (int a = 0; a < dout; ++a) {
              mn[a] = std::min(mn[a], out[a]);
              mx[a] = std::max(mx[a], out[a]);
            }
          }
        }
        bool ok = true;
        for (int a = 0; a < dout; ++a) {
          double u0 = (mn[a] - tgeom.origin[a]) / tgeom.spacing[a];
          double u1 = (mx[a] - tgeom.origin[a]) / tgeom.spacing[a];
          lo_idx[a] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(u0)));
          hi_idx[a] =
              std::min<std::int64_t>(tgeom.shape[a] - 1, static_cast<std::int64_t>(std::floor(u1)));
          if (lo_idx[a] > hi_idx[a]) ok = false;
        }
        if (!ok) continue;
        it = lo_idx;
        for (;;) {
          std::int64_t ti = 0;
          for (int a = 0; a < dout; ++a) ti = ti * tgeom.shape[a] + it[a];
          atomic_or(twords[static_cast<std::uint64_t>(ti) >> 6], 1ull << (ti & 63));
          int a = dout - 1;
          while (a >= 0) {
            if (++it[a] <= hi_idx[a]) break;
            it[a] = lo_idx[a];
            --a;
          }
          if (a < 0) break;
        }
      }
    }
  });

  if (mode == RasterMode::cover) target.dilate_one_cell();
  return target;
}

std::vector<MeasureBracket> measure_bracket(const Region& region,
                                            const std::optional<PointMap>& proj,
                                            std::span<const int> resolutions) {
  std::vector<MeasureBracket> out;
  out.reserve(resolutions.size());
  for (int res : resolutions) {
    MeasureBracket bracket;
    bracket.resolution = res;
    VoxelGrid inner = rasterize(region, res, RasterMode::center);
    VoxelGrid outer = rasterize(region, res, RasterMode::cover);
    if (proj) {
      bracket.lower = volume(project_voxels(inner, *proj, res, RasterMode::center));
      bracket.upper = volume(project_voxels(outer, *proj, res, RasterMode::cover));
    } else {
      bracket.lower = volume(inner);
      bracket.upper = volume(outer);
    }
    out.push_back(bracket);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string serialize(const VoxelGrid& grid) {
  const auto& geom = grid.geom();
  std::ostringstream os;
  os << geom.dim();
  for (auto s : geom.shape) os << ' ' << s;
  for (double v : geom.origin) os << ' ' << format_double(v);
  for (double v : geom.spacing) os << ' ' << format_double(v);
  os << '\n';
  // Alternating run lengths, starting with an unoccupied run (possibly 0).
  std::int64_t run = 0;
  bool value = false;
  bool first = true;
  for (std::int64_t li = 0; li < grid.cell_count(); ++li) {
    if (grid.test(li) == value) {
      ++run;
      continue;
    }
    os << (first ? "" : " ") << run;
    first = false;
    value = !value;
    run = 1;
  }
  os << (first ? "" : " ") << run << '\n';
  return os.str();
}

VoxelGrid deserialize_voxel_grid(const std::string& text) {
  std::istringstream is(text);
  int d = 0;
  if (!(is >> d) || d <= 0) throw std::invalid_argument("deserialize_voxel_grid: bad header");
  GridGeom geom;
  geom.shape.resize(d);
  geom.origin.resize(d);
  geom.spacing.resize(d);
  for (auto& v : geom.shape) is >> v;
  for (auto& v : geom.origin) is >> v;
  for (auto& v : geom.spacing) is >> v;
  if (!is) throw std::invalid_argument("deserialize_voxel_grid: truncated header");
  VoxelGrid grid(geom);
  std::int64_t li = 0, run = 0;
  bool value = false;
  while (is >> run) {
    if (run < 0 || li + run > grid.cell_count())
      throw std::invalid_argument("deserialize_voxel_grid: runs exceed cell count");
    if (value)
      for (std::int64_t i = 0; i < run; ++i) grid.set(li + i);
    li += run;
    value = !value;
  }
  if (li != grid.cell_count())
    throw std::invalid_argument("deserialize_voxel_grid: runs do not fill the grid");
  return grid;
}

// ---------------------------------------------------------------------------
// Monte Carlo fallback
// ---------------------------------------------------------------------------

McMeasure mc_volume(const Region& region, std::int64_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int d = region.dim;
  std::vector<double> p(d);
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int a = 0; a < d; ++a)
      p[a] = region.bounds.lo[a] + region.bounds.extent(a) * uni(rng);
    if (region.membership(p)) ++hits;
  }
  McMeasure out;
  out.hits = hits;
  out.samples = samples;
  out.value = region.bounds.volume() * static_cast<double>(hits) / static_cast<double>(samples);
  return out;
}

McMeasure mc_projection_measure(const Region& region, const PointMap& proj,
                                std::int64_t samples, int target_cells, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int d = region.dim;
  const int dout = proj.out_dim;
  std::vector<double> p(d), q(dout);
  std::vector<double> points;
  std::int64_t hits = 0;
  std::vector<double> lo(dout), hi(dout);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int a = 0; a < d; ++a)
      p[a] = region.bounds.lo[a] + region.bounds.extent(a) * uni(rng);
    if (!region.membership(p)) continue;
    proj.eval(p, q);
    if (hits == 0) {
      lo.assign(q.begin(), q.end());
      hi.assign(q.begin(), q.end());
    } else {
      for (int a = 0; a < dout; ++a) {
        lo[a] = std::min(lo[a], q[a]);
        hi[a] = std::max(hi[a], q[a]);
      }
    }
    points.insert(points.end(), q.begin(), q.end());
    ++hits;
  }
  McMeasure out;
  out.hits = hits;
  out.samples = samples;
  if (hits == 0) return out;
  GridGeom geom;
  geom.origin.resize(dout);
  geom.spacing.resize(dout);
  geom.shape.resize(dout);
  for (int a = 0; a < dout; ++a) {
    double extent = hi[a] - lo[a];
    if (!(extent > 0.0)) extent = std::max(1e-12, std::abs(lo[a]) * 1e-12);
    geom.spacing[a] = extent / target_cells;
    geom.origin[a] = lo[a] - geom.spacing[a];
    geom.shape[a] = target_cells + 2;
  }
  VoxelGrid grid(geom);
  for (std::int64_t h = 0; h < hits; ++h) {
    std::span<const double> pt(points.data() + h * dout, dout);
    if (auto li = grid.locate(pt)) grid.set(*li);
  }
  out.value = volume(grid);
  return out;
}

}  // namespace hlw
