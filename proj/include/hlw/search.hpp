#pragma once

// Derivative-free extremizer search over parametric region families. The
// objective (a voxel ratio) is piecewise constant, so pattern search with a
// shrinking step replaces gradient methods.

#include <functional>
#include <string>
#include <vector>

#include "hlw/lw.hpp"

namespace hlw {

struct RegionFamily {
  std::string name;
  std::vector<double> lo, hi;  // parameter box
  std::function<Region(std::span<const double>)> make;

  int param_count() const { return static_cast<int>(lo.size()); }
};

RegionFamily box_family(HDim dim);           // per-axis half-widths
RegionFamily koranyi_ball_family(HDim dim);  // radius and center
RegionFamily two_box_family(HDim dim);       // two boxes, second one offset

struct SearchConfig {
  int iterations = 60;  // pattern-search sweeps per restart
  std::uint64_t seed = 1;
  int resolution = 64;
  int restarts = 2;
};

struct TracePoint {
  int restart = 0;
  int iteration = 0;
  std::vector<double> params;
  double value = 0.0;
};

struct SearchResult {
  std::vector<double> best_params;
  double best_ratio = 0.0;
  std::vector<TracePoint> trace;
  std::uint64_t seed = 0;
};

// Maximizes lw_ratio over the family's parameter box; deterministic given
// the seed. Throws if no feasible evaluation succeeds within the budget.
SearchResult extremizer_search(const RegionFamily& family, HDim dim, const SearchConfig& config);

}  // namespace hlw
