#pragma once

// The dyadic chain behind the geometric Sobolev inequality: horizontal
// finite-difference gradients X_j, the Sobolev ratio, level-set
// decomposition with its projection bound, mollified perimeter, and the
// boundary-containment route to the isoperimetric inequality.

#include <functional>
#include <optional>
#include <vector>

#include "hlw/grid_function.hpp"
#include "hlw/lw.hpp"
#include "hlw/voxel.hpp"

namespace hlw {

// Compactly supported samples on R^{2n+1}: the outer `support_margin` cells
// are guaranteed zero, which lets central differences use zero extension.
struct SampledFunction {
  GridFunction grid;
  int support_margin = 0;
};

SampledFunction sample_compact_function(
    HDim dim, const Box& support_box, int cells_per_axis, int margin,
    const std::function<double(std::span<const double>)>& fn);

// X_j u = d_{x_j} u - (x_{n+j}/2) d_t u and X_{n+j} u = d_{x_{n+j}} u +
// (x_j/2) d_t u by central differences; requires support_margin >= 1.
std::vector<GridFunction> horizontal_gradient(const SampledFunction& u, HDim dim);

// ||u||_{(2n+2)/(2n+1)} / prod_j ||X_j u||_1^{1/(2n)}.
RatioReport sobolev_ratio(const SampledFunction& u, HDim dim);

// F_k = cells with 2^{k-1} <= |u| <= 2^k at the center; adjacent levels
// overlap only on exact powers of two.
struct LevelSetDecomposition {
  int k_min = 0;
  int k_max = -1;  // empty when k_max < k_min
  std::vector<VoxelGrid> sets;

  bool empty() const { return k_max < k_min; }
  bool has(int k) const { return k >= k_min && k <= k_max; }
  const VoxelGrid& at(int k) const { return sets.at(static_cast<size_t>(k - k_min)); }
};

LevelSetDecomposition level_decomposition(const SampledFunction& u);

struct LemmaCheck {
  double lhs = 0.0;    // |pi_j(F_k)|, center mode
  double rhs = 0.0;    // 2^{-k+2} int_{F_{k-1}} |X_j u|
  double slack = 0.0;  // rhs / lhs (inf when lhs = 0)
  bool fk_empty = false;
  bool fkm1_empty = false;
};

LemmaCheck levelset_lemma_check(const SampledFunction& u, int j, int k, HDim dim);

struct LemmaRow {
  int j = 0, k = 0;
  LemmaCheck check;
};

// All (j, k) rows sharing one decomposition and one gradient pass.
std::vector<LemmaRow> levelset_lemma_table(const SampledFunction& u, HDim dim);

struct PerimeterReport {
  double value = 0.0;
  double width = 0.0;  // mollification width the value was taken at
  bool stabilized = false;
  std::vector<std::pair<double, double>> ladder;  // (width, estimate)
};

// ||grad_H of the mollified indicator||_1, walked down a width ladder until
// two successive halvings agree within 3%. width <= 0 picks a quarter of the
// smallest bounding extent.
PerimeterReport perimeter_estimate(const Region& region, HDim dim, double mollification_width,
                                   int resolution);

// |E|^{(2n+1)/(2n+2)} / P_H(E).
RatioReport isoperimetric_ratio(const Region& region, HDim dim, int resolution = 96,
                                double mollification_width = 0.0);

struct ContainmentRow {
  int j = 0;
  std::int64_t projected_cells = 0;
  std::int64_t violations = 0;
};

struct ContainmentReport {
  std::vector<ContainmentRow> rows;
  std::int64_t total_violations = 0;
  bool pass = false;
};

// Checks pi_j(E) within one cell of pi_j(boundary E) for every j, where the
// voxel boundary is cover-occupancy minus the one-cell-eroded center
// occupancy.
ContainmentReport boundary_containment_check(const Region& region, HDim dim, int resolution);

}  // namespace hlw
