#pragma once

// The Loomis-Whitney engine: inequality ratios for sets and functions,
// sharpness sweeps, the flat-projection counterexample, and invariance
// suites. All ratios are empirical; the inequalities' implicit constants are
// recorded, never asserted against.

#include <optional>
#include <string>
#include <vector>

#include "hlw/exponents.hpp"
#include "hlw/geometry.hpp"
#include "hlw/grid_function.hpp"
#include "hlw/voxel.hpp"

namespace hlw {

struct RatioReport {
  double value = 0.0;
  int resolution = 0;
  double conservative = 0.0;  // inner numerator over outer denominators
  double optimistic = 0.0;    // outer numerator over inner denominators
  std::string metadata;
  bool empty_region = false;
  bool monte_carlo = false;
};

// |K| / prod_j |pi_j(K)|^{(n+1)/(n(2n+1))}. Dense bitsets for n <= 2, Monte
// Carlo fallback (flagged) for n >= 3. An empty region reports value 0 with
// the empty flag; a zero projection bracket against nonzero inner volume
// raises DiscretizationError.
RatioReport lw_ratio(const Region& region, HDim dim, int resolution);

// int prod f_j(pi_j(p)) dp / prod ||f_j||_{p_main} by midpoint quadrature
// over the preimage bounding box of the supports.
RatioReport strong_ratio(const std::vector<GridFunction>& f, HDim dim, int resolution);

// Same numerator over the vertex-exponent denominator of level k.
RatioReport vertex_ratio(const std::vector<GridFunction>& f, HDim dim, int k, int resolution);

// Shared numerator of the two ratios above.
double lw_integral(const std::vector<GridFunction>& f, HDim dim, int resolution);

struct SharpnessRow {
  double r = 0.0;
  RatioReport report;
};

struct SharpnessTable {
  std::vector<SharpnessRow> rows;
  double min_value = 0.0, max_value = 0.0;
  double spread = 0.0;  // max/min - 1
};

// The box [-r, r]^{2n} x [-r^2, r^2] that witnesses sharpness of the
// exponents.
Region sharp_box_region(double r, HDim dim);
SharpnessTable sharpness_sweep(HDim dim, std::span<const double> r_values, int resolution);

struct CounterexampleResult {
  double volume_small = 0, proj1_small = 0, proj2_small = 0;
  double volume_large = 0, proj1_large = 0, proj2_large = 0;
  double lambda_max = 0;  // log|K| / log(|p1(K)| |p2(K)|), K thin
  double lambda_min = 0;  // same for K_R
  double heis_proj1_large = 0, heis_proj2_large = 0;  // |pi_j(K_R)|
};

// Flat coordinate projections admit no Loomis-Whitney exponent: the slab
// K = [0,1]^2 x [0,delta] forces lambda <= 1/2 and the cube K_R = [0,R]^3
// forces lambda >= 3/4. Also measures the Heisenberg projections of K_R.
CounterexampleResult euclidean_counterexample(double delta, double R, int resolution = 128);

struct InvarianceRow {
  std::string transform;
  double value = 0.0;
  double rel_change = 0.0;
};

struct InvarianceReport {
  double base_value = 0.0;
  std::vector<InvarianceRow> rows;
  double max_rel_change = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

InvarianceReport invariance_suite(const Region& region, HDim dim,
                                  const std::vector<HPoint>& translations,
                                  const std::vector<double>& dilations, int resolution,
                                  double tolerance = 0.02);

// The built-in n=1 region suite used for the empirical-constant record:
// boxes, Koranyi balls, a union, and a sheared translate.
std::vector<Region> builtin_region_suite();

}  // namespace hlw
