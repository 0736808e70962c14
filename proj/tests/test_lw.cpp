#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hlw/lw.hpp"
#include "hlw/planar_ops.hpp"

using namespace hlw;

namespace {

constexpr double kBoxRatio = 0.93568928567124832;  // 8 / 25^(2/3)

GridFunction square_01(int cells) {
  return sample_function(grid_geom_2d(-0.2, 1.2, -0.2, 1.2, cells, cells),
                         [](std::span<const double> p) {
                           return p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0 ? 1.0
                                                                                           : 0.0;
                         });
}

}  // namespace

TEST_CASE("lw_ratio of the H1 sharp box") {
  const HDim dim{1};
  const RatioReport report = lw_ratio(sharp_box_region(1.0, dim), dim, 96);
  CHECK(std::abs(report.value - kBoxRatio) / kBoxRatio < 0.05);
  CHECK(report.conservative <= report.value);
  CHECK(report.value <= report.optimistic);
  CHECK(report.conservative > 0.8);
}

TEST_CASE("lw_ratio flags an empty region") {
  const HDim dim{1};
  Region region;
  region.dim = 3;
  region.bounds.lo = {0.0, 0.0, 0.0};
  region.bounds.hi = {1.0, 1.0, 1.0};
  region.membership = [](std::span<const double>) { return false; };
  region.label = "empty";
  const RatioReport report = lw_ratio(region, dim, 16);
  CHECK(report.empty_region);
  CHECK(report.value == 0.0);
}

TEST_CASE("lw_ratio H2 smoke (small resolution)") {
  const HDim dim{2};
  Region box = sharp_box_region(1.0, dim);
  const RatioReport base = lw_ratio(box, dim, 12);
  CHECK(std::isfinite(base.value));
  CHECK(base.value > 0.0);
  const RatioReport dilated = lw_ratio(dilate_region(box, 2.0, dim), dim, 12);
  CHECK(std::abs(dilated.value - base.value) / base.value < 0.05);
}

TEST_CASE("lw_ratio Monte Carlo route for n=3") {
  const HDim dim{3};
  Box box;
  box.lo.assign(7, -1.0);
  box.hi.assign(7, 1.0);
  const RatioReport report = lw_ratio(box_region(box, "h3_box"), dim, 8);
  CHECK(report.monte_carlo);
  CHECK(std::isfinite(report.value));
  CHECK(report.value > 0.0);
  CHECK(report.conservative <= report.value);
}

TEST_CASE("strong ratio") {
  const HDim dim{1};
  SUBCASE("zero input is rejected") {
    GridFunction zero(grid_geom_2d(0.0, 1.0, 0.0, 1.0, 8, 8));
    CHECK_THROWS_AS(strong_ratio({zero, zero}, dim, 16), std::invalid_argument);
  }
  SUBCASE("numerator matches the pairing quadrature") {
    const GridFunction square = square_01(96);
    const double numerator = lw_integral({square, square}, dim, 64);
    const PairingResult pairing = pairing_check(square, square, 64);
    CHECK(std::abs(numerator - pairing.lhs) / pairing.lhs < 0.02);
  }
  SUBCASE("invariance under simultaneous left translation") {
    const GridFunction square = square_01(128);
    const RatioReport base = strong_ratio({square, square}, dim, 72);

    const HPoint p{{0.3, -0.2}, 0.1};
    std::vector<GridFunction> moved;
    for (int j = 1; j <= 2; ++j) {
      const AffinePlaneMap action = translation_action_on_plane(p, j, dim);
      const AffinePlaneMap back = action.inverse();
      // Resample f on the affinely mapped support box.
      const Box box = square.geom().box();
      double lo0 = 1e300, hi0 = -1e300, lo1 = 1e300, hi1 = -1e300;
      for (std::uint32_t mask = 0; mask < 4; ++mask) {
        const PlanePoint corner = action.apply(PlanePoint{box.corner(mask)});
        lo0 = std::min(lo0, corner.coords[0]);
        hi0 = std::max(hi0, corner.coords[0]);
        lo1 = std::min(lo1, corner.coords[1]);
        hi1 = std::max(hi1, corner.coords[1]);
      }
      const GridGeom geom = grid_geom_2d(lo0, hi0, lo1, hi1, 128, 128);
      moved.push_back(sample_function(geom, [&](std::span<const double> w) {
        const PlanePoint source = back.apply(PlanePoint{{w[0], w[1]}});
        return square.value2(source.coords[0], source.coords[1]);
      }));
    }
    const RatioReport shifted = strong_ratio(moved, dim, 72);
    CHECK(std::abs(shifted.value - base.value) / base.value < 0.02);
  }
}

TEST_CASE("vertex ratio") {
  const HDim dim{1};
  SUBCASE("n=1 vertex equals strong") {
    const GridFunction square = square_01(64);
    const RatioReport vertex = vertex_ratio({square, square}, dim, 1, 48);
    const RatioReport strong = strong_ratio({square, square}, dim, 48);
    CHECK(vertex.value == doctest::Approx(strong.value).epsilon(1e-12));
  }
  SUBCASE("scaling one factor leaves the value unchanged") {
    const GridFunction square = square_01(64);
    GridFunction scaled = square;
    for (auto& v : scaled.samples()) v *= 3.0;
    const RatioReport base = vertex_ratio({square, square}, dim, 1, 32);
    const RatioReport bumped = vertex_ratio({scaled, square}, dim, 1, 32);
    CHECK(bumped.value == doctest::Approx(base.value).epsilon(1e-10));
  }
  SUBCASE("n=2 geometric mean dominates the strong ratio for product inputs") {
    const HDim d2{2};
    // Product-form inputs on R^4: indicator of a box.
    GridGeom geom;
    geom.origin.assign(4, -1.0);
    geom.spacing.assign(4, 2.0 / 20);
    geom.shape.assign(4, 20);
    const GridFunction box_f = sample_function(geom, [](std::span<const double> w) {
      for (double v : w)
        if (std::abs(v) > 0.8) return 0.0;
      return 1.0;
    });
    std::vector<GridFunction> f(4, box_f);
    const RatioReport strong = strong_ratio(f, d2, 12);
    const RatioReport v1 = vertex_ratio(f, d2, 1, 12);
    const RatioReport v2 = vertex_ratio(f, d2, 2, 12);
    const double geomean = std::sqrt(v1.value * v2.value);
    CHECK(geomean >= strong.value * 0.98);
  }
}

TEST_CASE("sharpness sweep") {
  const HDim dim{1};
  const std::vector<double> rs{0.5, 1.0, 2.0};
  const SharpnessTable table = sharpness_sweep(dim, rs, 64);
  REQUIRE(table.rows.size() == 3);
  for (const auto& row : table.rows)
    CHECK(std::abs(row.report.value - kBoxRatio) / kBoxRatio < 0.05);
  CHECK(table.spread < 0.01);
  // The grids scale with the region, so doubling the resolution must not
  // widen the spread.
  const SharpnessTable fine = sharpness_sweep(dim, rs, 128);
  CHECK(fine.spread <= table.spread + 1e-9);
}

TEST_CASE("euclidean counterexample") {
  const CounterexampleResult out = euclidean_counterexample(0.01, 10.0, 64);
  CHECK(out.lambda_max == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.lambda_min == doctest::Approx(0.75).epsilon(1e-12));
  // Heisenberg projections of the cube against the closed form R^2 + R^3/4.
  const double expected = 100.0 + 250.0;
  CHECK(std::abs(out.heis_proj1_large - expected) / expected < 0.03);
  CHECK(std::abs(out.heis_proj2_large - expected) / expected < 0.03);
  CHECK_THROWS(euclidean_counterexample(1.5, 10.0));
}

TEST_CASE("invariance suite") {
  const HDim dim{1};
  const Region box = sharp_box_region(1.0, dim);
  SUBCASE("identity transforms change nothing") {
    const InvarianceReport report =
        invariance_suite(box, dim, {identity_point(dim)}, {1.0}, 48);
    CHECK(report.max_rel_change == 0.0);
    CHECK(report.pass);
  }
  SUBCASE("random translations and dilations stay within 2%") {
    const std::vector<HPoint> translations{HPoint{{0.31, -0.22}, 0.17},
                                           HPoint{{-0.45, 0.11}, -0.09}};
    const InvarianceReport report = invariance_suite(box, dim, translations, {0.5, 2.0}, 96);
    CHECK(report.pass);
    CHECK(report.max_rel_change <= 0.02);
  }
}

TEST_CASE("builtin region suite evaluates everywhere") {
  const HDim dim{1};
  for (const Region& region : builtin_region_suite()) {
    const RatioReport report = lw_ratio(region, dim, 48);
    CHECK(std::isfinite(report.value));
    CHECK(report.value > 0.0);
  }
}
