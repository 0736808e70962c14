#include "hlw/search.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hlw {

RegionFamily box_family(HDim dim) {
  RegionFamily family;
  family.name = "box";
  const int d = dim.ambient();
  family.lo.assign(d, 0.2);
  family.hi.assign(d, 2.0);
  family.make = [d](std::span<const double> params) {
    Box box;
    box.lo.resize(d);
    box.hi.resize(d);
    for (int a = 0; a < d; ++a) {
      box.lo[a] = -params[a];
      box.hi[a] = params[a];
    }
    return box_region(box, "search_box");
  };
  return family;
}

RegionFamily koranyi_ball_family(HDim dim) {
  RegionFamily family;
  family.name = "koranyi_ball";
  const int d = dim.ambient();
  family.lo.assign(d + 1, -0.5);
  family.hi.assign(d + 1, 0.5);
  family.lo[0] = 0.4;
  family.hi[0] = 1.6;
  family.make = [dim](std::span<const double> params) {
    HPoint center;
    center.x.assign(params.begin() + 1, params.end() - 1);
    center.t = params.back();
    return koranyi_ball_region(center, params[0], dim);
  };
  return family;
}

RegionFamily two_box_family(HDim dim) {
  RegionFamily family;
  family.name = "two_boxes";
  const int d = dim.ambient();
  family.lo.assign(3 * d, 0.0);
  family.hi.assign(3 * d, 0.0);
  for (int a = 0; a < 2 * d; ++a) {
    family.lo[a] = 0.2;
    family.hi[a] = 1.5;
  }
  for (int a = 2 * d; a < 3 * d; ++a) {
    family.lo[a] = -1.0;
    family.hi[a] = 1.0;
  }
  family.make = [d](std::span<const double> params) {
    Box b1, b2;
    b1.lo.resize(d);
    b1.hi.resize(d);
    b2.lo.resize(d);
    b2.hi.resize(d);
    for (int a = 0; a < d; ++a) {
      b1.lo[a] = -params[a];
      b1.hi[a] = params[a];
      b2.lo[a] = params[2 * d + a] - params[d + a];
      b2.hi[a] = params[2 * d + a] + params[d + a];
    }
    return union_region(box_region(b1, "boxA"), box_region(b2, "boxB"));
  };
  return family;
}

SearchResult extremizer_search(const RegionFamily& family, HDim dim, const SearchConfig& config) {
  const int P = family.param_count();
  SearchResult result;
  result.seed = config.seed;
  result.best_ratio = -1.0;

  int feasible_evals = 0;
  auto objective = [&](std::span<const double> params) -> double {
    try {
      RatioReport report = lw_ratio(family.make(params), dim, config.resolution);
      if (report.empty_region) return -1.0;
      ++feasible_evals;
      return report.value;
    } catch (const DiscretizationError&) {
      return -1.0;
    } catch (const std::invalid_argument&) {
      return -1.0;
    }
  };

  for (int restart = 0; restart < config.restarts; ++restart) {
    std::vector<double> params(P);
    if (restart == 0) {
      for (int a = 0; a < P; ++a) params[a] = 0.5 * (family.lo[a] + family.hi[a]);
    } else {
      std::mt19937_64 rng(config.seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(restart));
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      for (int a = 0; a < P; ++a)
        params[a] = family.lo[a] + (family.hi[a] - family.lo[a]) * uni(rng);
    }
    std::vector<double> step(P);
    for (int a = 0; a < P; ++a) step[a] = 0.25 * (family.hi[a] - family.lo[a]);

    double current = objective(params);
    result.trace.push_back({restart, 0, params, current});
    if (current > result.best_ratio) {
      result.best_ratio = current;
      result.best_params = params;
    }

    for (int iter = 1; iter <= config.iterations; ++iter) {
      double best_value = current;
      std::vector<double> best_params = params;
      for (int a = 0; a < P; ++a) {
        for (double sign : {+1.0, -1.0}) {
          std::vector<double> candidate = params;
          candidate[a] = std::clamp(candidate[a] + sign * step[a], family.lo[a], family.hi[a]);
          if (candidate[a] == params[a]) continue;
          const double value = objective(candidate);
          if (value > best_value) {
            best_value = value;
            best_params = std::move(candidate);
          }
        }
      }
      if (best_value > current) {
        current = best_value;
        params = best_params;
      } else {
        for (double& s : step) s *= 0.5;
      }
      result.trace.push_back({restart, iter, params, current});
      if (current > result.best_ratio) {
        result.best_ratio = current;
        result.best_params = params;
      }
      double max_rel_step = 0.0;
      for (int a = 0; a < P; ++a)
        max_rel_step = std::max(max_rel_step, step[a] / (family.hi[a] - family.lo[a]));
      if (max_rel_step < 1e-3) break;
    }
  }

  if (feasible_evals == 0)
    throw std::runtime_error("extremizer_search: budget exhausted without a feasible evaluation");
  return result;
}

}  // namespace hlw
