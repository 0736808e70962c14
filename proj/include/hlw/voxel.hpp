#pragma once

// Voxelized regions: rasterization in inner-leaning (center) and
// outer-leaning (cover) modes, Lebesgue volume, projection-image measures,
// and the inner/outer measure brackets built from them.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hlw/geometry.hpp"

namespace hlw {

// Raised when a voxel estimate is too coarse to decide the question asked of
// it (bracket violations, vanishing discrete gradients, unstable windows).
struct DiscretizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Box {
  std::vector<double> lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double extent(int axis) const { return hi[axis] - lo[axis]; }
  double volume() const;
  bool contains(std::span<const double> p) const;
  // Corner selected by bitmask (bit a set -> hi on axis a).
  std::vector<double> corner(std::uint32_t mask) const;
  Box padded(double amount) const;
};

struct Region {
  int dim = 0;
  std::function<bool(std::span<const double>)> membership;
  Box bounds;
  std::string label;
};

// Region builders used across the verification suites.
Region box_region(const Box& box, std::string label = "box");
Region koranyi_ball_region(const HPoint& center, double radius, HDim dim);
Region euclidean_ball_region(std::vector<double> center, double radius,
                             std::string label = "ball");
Region union_region(const Region& a, const Region& b);
Region difference_region(const Region& a, const Region& b);  // a minus b
// Left translate p . E and Heisenberg dilation delta_r(E); bounds are mapped
// exactly (left translation is affine for fixed p).
Region translate_region(const Region& region, const HPoint& p, HDim dim);
Region dilate_region(const Region& region, double r, HDim dim);

// --------------------------------------------------------------------------
// Grids
// --------------------------------------------------------------------------

struct GridGeom {
  std::vector<double> origin, spacing;
  std::vector<std::int64_t> shape;

  int dim() const { return static_cast<int>(shape.size()); }
  std::int64_t cell_count() const;
  double cell_volume() const;
  double center(int axis, std::int64_t i) const {
    return origin[axis] + (static_cast<double>(i) + 0.5) * spacing[axis];
  }
  Box box() const;
};

class VoxelGrid {
 public:
  VoxelGrid() = default;
  explicit VoxelGrid(GridGeom geom);

  const GridGeom& geom() const { return geom_; }
  int dim() const { return geom_.dim(); }
  std::int64_t cell_count() const { return cells_; }
  double cell_volume() const { return geom_.cell_volume(); }

  bool test(std::int64_t li) const {
    return (words_[static_cast<std::uint64_t>(li) >> 6] >> (li & 63)) & 1u;
  }
  void set(std::int64_t li) { words_[static_cast<std::uint64_t>(li) >> 6] |= 1ull << (li & 63); }
  void reset(std::int64_t li) {
    words_[static_cast<std::uint64_t>(li) >> 6] &= ~(1ull << (li & 63));
  }

  std::int64_t occupied_count() const;
  void cell_center(std::int64_t li, std::span<double> out) const;
  // Containing cell of a point under the half-open convention [low, high).
  std::optional<std::int64_t> locate(std::span<const double> p) const;

  // Morphology with the one-cell Chebyshev ball (separable passes).
  void dilate_one_cell();
  void erode_one_cell();

  std::vector<std::uint64_t>& words() { return words_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

  // Decomposes a linear index into per-axis indices (row-major, last axis
  // fastest).
  void decompose(std::int64_t li, std::span<std::int64_t> idx) const;
  std::int64_t compose(std::span<const std::int64_t> idx) const;

 private:
  GridGeom geom_;
  std::int64_t cells_ = 0;
  std::vector<std::uint64_t> words_;
};

double volume(const VoxelGrid& grid);

enum class RasterMode { center, cover };

// center: marks cells whose center satisfies membership (inner-leaning).
// cover: grid padded by one cell; marks cells with any corner or the center
// inside, then dilates by one cell (outer-leaning; sampling the center too
// makes center-occupancy a subset of cover-occupancy by construction).
VoxelGrid rasterize(const Region& region, int cells_per_axis, RasterMode mode);

// --------------------------------------------------------------------------
// Projections of voxel sets
// --------------------------------------------------------------------------

// A map R^in -> R^out evaluated in hot loops. Vertical projections carry a
// tag so the per-corner evaluation stays inline.
struct PointMap {
  int in_dim = 0, out_dim = 0;
  int vertical_j = 0;  // 1-based; > 0 selects the fast path
  int vertical_n = 0;
  std::function<void(std::span<const double>, std::span<double>)> fn;
  std::string label;

  void eval(std::span<const double> in, std::span<double> out) const {
    if (vertical_j > 0) {
      const int n = vertical_n, j = vertical_j;
      int o = 0;
      for (int i = 1; i <= 2 * n; ++i)
        if (i != j) out[o++] = in[i - 1];
      out[o] = (j <= n) ? in[2 * n] + 0.5 * in[j - 1] * in[n + j - 1]
                        : in[2 * n] - 0.5 * in[j - n - 1] * in[j - 1];
      return;
    }
    fn(in, out);
  }
};

PointMap vertical_projection_map(int j, HDim dim);
PointMap rho_projection_map(const HeightFamily& family, int j);
// Orthogonal coordinate projection deleting `drop_axis` (1-based).
PointMap euclidean_projection_map(int drop_axis, int dim);

// center: maps occupied cell centers and marks the containing target cell.
// cover: maps each occupied cell's corners and center, marks every target
// cell met by the image's bounding box, then dilates by one cell. The target
// geometry is derived from the mapped points unless one is supplied.
VoxelGrid project_voxels(const VoxelGrid& grid, const PointMap& proj, int target_cells,
                         RasterMode mode, const std::optional<GridGeom>& target_geom = {});

struct MeasureBracket {
  double lower = 0.0;
  double upper = 0.0;
  int resolution = 0;
};

// Per resolution: lower = center-mode measure, upper = cover-mode measure of
// the region (or of its image when a projection is given).
std::vector<MeasureBracket> measure_bracket(const Region& region,
                                            const std::optional<PointMap>& proj,
                                            std::span<const int> resolutions);

// Text serialization: "dim shape... origin... spacing..." then run-length
// encoded occupancy (alternating runs starting with unoccupied).
std::string serialize(const VoxelGrid& grid);
VoxelGrid deserialize_voxel_grid(const std::string& text);

// --------------------------------------------------------------------------
// Monte Carlo fallback (ambient dimension too large for dense bitsets)
// --------------------------------------------------------------------------

struct McMeasure {
  double value = 0.0;
  std::int64_t hits = 0;
  std::int64_t samples = 0;
};

McMeasure mc_volume(const Region& region, std::int64_t samples, std::uint64_t seed);
McMeasure mc_projection_measure(const Region& region, const PointMap& proj,
                                std::int64_t samples, int target_cells, std::uint64_t seed);

}  // namespace hlw
