#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hlw/voxel.hpp"

using namespace hlw;

namespace {

Region unit_cube() {
  Box box;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 1.0};
  return box_region(box, "unit_cube");
}

Region empty_region_3d() {
  Region region;
  region.dim = 3;
  region.bounds.lo = {0.0, 0.0, 0.0};
  region.bounds.hi = {1.0, 1.0, 1.0};
  region.membership = [](std::span<const double>) { return false; };
  region.label = "empty";
  return region;
}

Region h1_box(double r) {
  Box box;
  box.lo = {-r, -r, -r};
  box.hi = {r, r, r};
  return box_region(box, "h1_box");
}

// Independent Monte Carlo estimate of |pi_j(box)| using the projection
// formula directly and a hand-rolled histogram.
double mc_projection_area_oracle(double r, int j, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-r, r);
  const int grid = 512;
  std::vector<std::uint8_t> hit(static_cast<size_t>(grid) * grid, 0);
  const double tmax = r + r * r / 2.0;  // |t + xy/2| <= r + r^2/2
  const std::int64_t samples = 400000;
  for (std::int64_t s = 0; s < samples; ++s) {
    const double x = uni(rng), y = uni(rng), t = uni(rng);
    const double w0 = (j == 1) ? y : x;
    const double w1 = (j == 1) ? t + 0.5 * x * y : t - 0.5 * x * y;
    const int i0 = static_cast<int>((w0 + r) / (2.0 * r) * grid);
    const int i1 = static_cast<int>((w1 + tmax) / (2.0 * tmax) * grid);
    if (i0 >= 0 && i0 < grid && i1 >= 0 && i1 < grid)
      hit[static_cast<size_t>(i0) * grid + i1] = 1;
  }
  std::int64_t occupied = 0;
  for (auto h : hit) occupied += h;
  const double cell = (2.0 * r / grid) * (2.0 * tmax / grid);
  return static_cast<double>(occupied) * cell;
}

}  // namespace

TEST_CASE("rasterize basics") {
  SUBCASE("unit cube at 2 cells per axis, center mode") {
    const VoxelGrid grid = rasterize(unit_cube(), 2, RasterMode::center);
    CHECK(grid.occupied_count() == 8);
    CHECK(volume(grid) == doctest::Approx(1.0));
  }
  SUBCASE("empty region") {
    CHECK(rasterize(empty_region_3d(), 8, RasterMode::center).occupied_count() == 0);
    CHECK(rasterize(empty_region_3d(), 8, RasterMode::cover).occupied_count() == 0);
  }
  SUBCASE("unit ball volume against the closed form") {
    const Region ball = euclidean_ball_region({0.0, 0.0, 0.0}, 1.0);
    const double measured = volume(rasterize(ball, 128, RasterMode::center));
    const double exact = 4.0 * std::numbers::pi / 3.0;
    CHECK(std::abs(measured - exact) / exact < 0.02);
  }
  SUBCASE("degenerate bounds") {
    Region flat = unit_cube();
    flat.bounds.hi[1] = flat.bounds.lo[1];
    CHECK_THROWS_AS(rasterize(flat, 8, RasterMode::center), std::invalid_argument);
  }
}

TEST_CASE("volume") {
  SUBCASE("empty and full grids") {
    GridGeom geom;
    geom.origin = {0.0, 0.0, 0.0};
    geom.spacing = {0.5, 0.5, 0.5};
    geom.shape = {4, 4, 4};
    VoxelGrid grid(geom);
    CHECK(volume(grid) == 0.0);
    for (std::int64_t li = 0; li < grid.cell_count(); ++li) grid.set(li);
    CHECK(volume(grid) == doctest::Approx(8.0));
  }
  SUBCASE("H1 box tiles exactly") {
    for (int res : {16, 64, 100}) {
      CHECK(volume(rasterize(h1_box(1.0), res, RasterMode::center)) == doctest::Approx(8.0));
    }
  }
}

TEST_CASE("project_voxels") {
  const HDim dim{1};
  SUBCASE("slab inside W_1 projects to its face") {
    Box slab;
    const double eps = 1.0 / 64.0;
    slab.lo = {-eps, -1.0, -1.0};
    slab.hi = {eps, 1.0, 1.0};
    const VoxelGrid grid = rasterize(box_region(slab, "slab"), 64, RasterMode::center);
    const double area =
        volume(project_voxels(grid, vertical_projection_map(1, dim), 64, RasterMode::center));
    CHECK(std::abs(area - 4.0) / 4.0 < 0.1);
  }
  SUBCASE("H1 box projection area 5r^3 at 256 cells") {
    const VoxelGrid grid = rasterize(h1_box(1.0), 256, RasterMode::center);
    for (int j : {1, 2}) {
      const double area =
          volume(project_voxels(grid, vertical_projection_map(j, dim), 256, RasterMode::center));
      CHECK(std::abs(area - 5.0) / 5.0 < 0.03);
      const double oracle = mc_projection_area_oracle(1.0, j, 99 + j);
      CHECK(std::abs(area - oracle) / oracle < 0.05);
    }
  }
  SUBCASE("center area never exceeds cover area") {
    std::vector<Region> regions = {h1_box(0.9), euclidean_ball_region({0.1, -0.2, 0.3}, 0.8),
                                   koranyi_ball_region(HPoint{{0.2, 0.1}, 0.0}, 1.0, dim)};
    for (const Region& region : regions) {
      const VoxelGrid inner = rasterize(region, 48, RasterMode::center);
      const VoxelGrid outer = rasterize(region, 48, RasterMode::cover);
      CHECK(volume(inner) <= volume(outer));
      for (int j : {1, 2}) {
        const PointMap proj = vertical_projection_map(j, dim);
        CHECK(volume(project_voxels(inner, proj, 48, RasterMode::center)) <=
              volume(project_voxels(outer, proj, 48, RasterMode::cover)));
      }
    }
  }
  SUBCASE("projection index mismatch") {
    const VoxelGrid grid = rasterize(h1_box(1.0), 8, RasterMode::center);
    CHECK_THROWS(project_voxels(grid, vertical_projection_map(1, HDim{2}), 8, RasterMode::center));
  }
}

TEST_CASE("measure brackets") {
  const HDim dim{1};
  SUBCASE("box projection brackets contain 5.0") {
    const std::vector<int> resolutions{48, 96};
    const auto brackets = measure_bracket(h1_box(1.0), vertical_projection_map(1, dim),
                                          resolutions);
    REQUIRE(brackets.size() == 2);
    for (const auto& bracket : brackets) {
      CHECK(bracket.lower <= 5.0);
      CHECK(bracket.upper >= 5.0);
      CHECK(bracket.lower <= bracket.upper);
    }
  }
  SUBCASE("bracket width at 256 at most half the width at 64") {
    const std::vector<int> resolutions{64, 256};
    const auto brackets = measure_bracket(h1_box(1.0), vertical_projection_map(1, dim),
                                          resolutions);
    CHECK(brackets[1].upper - brackets[1].lower <=
          0.5 * (brackets[0].upper - brackets[0].lower));
  }
  SUBCASE("empty region brackets are zero") {
    const std::vector<int> resolutions{16};
    const auto brackets = measure_bracket(empty_region_3d(), std::nullopt, resolutions);
    CHECK(brackets[0].lower == 0.0);
    CHECK(brackets[0].upper == 0.0);
  }
}

TEST_CASE("invariance of voxel measures") {
  const HDim dim{1};
  const Region box = h1_box(1.0);
  const HPoint shift{{0.4, -0.3}, 0.2};
  SUBCASE("Haar invariance of volume") {
    const double base = volume(rasterize(box, 128, RasterMode::center));
    const double moved =
        volume(rasterize(translate_region(box, shift, dim), 128, RasterMode::center));
    CHECK(std::abs(moved - base) / base < 0.02);
  }
  SUBCASE("projection measure is translation invariant") {
    const PointMap proj = vertical_projection_map(1, dim);
    const double base =
        volume(project_voxels(rasterize(box, 128, RasterMode::center), proj, 128,
                              RasterMode::center));
    const double moved = volume(project_voxels(
        rasterize(translate_region(box, shift, dim), 128, RasterMode::center), proj, 128,
        RasterMode::center));
    CHECK(std::abs(moved - base) / base < 0.02);
  }
  SUBCASE("dilation scaling of volume and projection measure") {
    const Region ball = koranyi_ball_region(identity_point(dim), 1.0, dim);
    const Region big = dilate_region(ball, 2.0, dim);
    const double v1 = volume(rasterize(ball, 96, RasterMode::center));
    const double v2 = volume(rasterize(big, 96, RasterMode::center));
    CHECK(std::abs(v2 / v1 - 16.0) / 16.0 < 0.02);  // r^{2n+2} = 2^4

    const PointMap proj = vertical_projection_map(2, dim);
    const double a1 = volume(
        project_voxels(rasterize(ball, 96, RasterMode::center), proj, 96, RasterMode::center));
    const double a2 = volume(
        project_voxels(rasterize(big, 96, RasterMode::center), proj, 96, RasterMode::center));
    CHECK(std::abs(a2 / a1 - 8.0) / 8.0 < 0.02);  // r^{2n+1} = 2^3
  }
}

TEST_CASE("serialization round trip") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  std::uniform_int_distribution<int> small(2, 6);
  std::uniform_int_distribution<int> dim_pick(1, 3);
  std::uniform_int_distribution<int> coin(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = dim_pick(rng);
    GridGeom geom;
    geom.origin.resize(d);
    geom.spacing.resize(d);
    geom.shape.resize(d);
    for (int a = 0; a < d; ++a) {
      geom.origin[a] = uni(rng);
      geom.spacing[a] = 0.1 + std::abs(uni(rng)) / 10.0;
      geom.shape[a] = small(rng);
    }
    VoxelGrid grid(geom);
    for (std::int64_t li = 0; li < grid.cell_count(); ++li)
      if (coin(rng) == 0) grid.set(li);
    const VoxelGrid round = deserialize_voxel_grid(serialize(grid));
    REQUIRE(round.cell_count() == grid.cell_count());
    CHECK(round.geom().origin == grid.geom().origin);
    CHECK(round.geom().spacing == grid.geom().spacing);
    CHECK(round.geom().shape == grid.geom().shape);
    for (std::int64_t li = 0; li < grid.cell_count(); ++li)
      CHECK(round.test(li) == grid.test(li));
  }
}

TEST_CASE("monte carlo fallback") {
  // A 7-D box (the n=3 ambient dimension) with known volume.
  Region region;
  region.dim = 7;
  region.bounds.lo.assign(7, -1.0);
  region.bounds.hi.assign(7, 1.0);
  region.membership = [](std::span<const double> p) {
    for (size_t a = 0; a < p.size(); ++a)
      if (std::abs(p[a]) > (a % 2 == 0 ? 1.0 : 0.5)) return false;
    return true;
  };
  region.label = "mc_box";
  const McMeasure vol = mc_volume(region, 200000, 7);
  const double exact = std::pow(2.0, 4) * std::pow(1.0, 3);  // extents 2 and 1 alternating
  CHECK(std::abs(vol.value - exact) / exact < 0.05);

  const McMeasure proj = mc_projection_measure(region, euclidean_projection_map(1, 7), 200000,
                                               12, 11);
  CHECK(proj.value > 0.0);
  CHECK(proj.hits > 0);
}
