#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hlw/sobolev.hpp"

using namespace hlw;

namespace {

Box cube(double r) {
  Box box;
  box.lo = {-r, -r, -r};
  box.hi = {r, r, r};
  return box;
}

SampledFunction bump(int cells, double amplitude = 1.5) {
  return sample_compact_function(HDim{1}, cube(1.2), cells, 2,
                                 [amplitude](std::span<const double> p) {
                                   const double r2 =
                                       (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 1.44;
                                   return amplitude * std::pow(std::max(0.0, 1.0 - r2), 3.0);
                                 });
}

// True on cells at least `band` cells away from the grid border.
bool deep_interior(const GridGeom& geom, std::int64_t li, int band) {
  for (int a = geom.dim() - 1; a >= 0; --a) {
    const std::int64_t i = li % geom.shape[a];
    li /= geom.shape[a];
    if (i < band || i >= geom.shape[a] - band) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("horizontal gradients") {
  const HDim dim{1};
  SUBCASE("u = t has X_1 u = -y/2 on the flat interior") {
    const SampledFunction u = sample_compact_function(
        dim, cube(1.0), 32, 2, [](std::span<const double> p) { return p[2]; });
    const auto grads = horizontal_gradient(u, dim);
    const GridGeom& geom = u.grid.geom();
    const std::int64_t ny = geom.shape[1], nt = geom.shape[2];
    for (std::int64_t li = 0; li < u.grid.size(); ++li) {
      if (!deep_interior(geom, li, 4)) continue;
      const double y = geom.center(1, (li / nt) % ny);
      CHECK(grads[0][li] == doctest::Approx(-0.5 * y).epsilon(1e-10).scale(1.0));
    }
  }
  SUBCASE("u = x1 has X_1 u = 1 and X_2 u = 0 inside") {
    const SampledFunction u = sample_compact_function(
        dim, cube(1.0), 32, 2, [](std::span<const double> p) { return p[0]; });
    const auto grads = horizontal_gradient(u, dim);
    for (std::int64_t li = 0; li < u.grid.size(); ++li) {
      if (!deep_interior(u.grid.geom(), li, 4)) continue;
      CHECK(grads[0][li] == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(grads[1][li] == doctest::Approx(0.0).epsilon(1e-10).scale(1.0));
    }
  }
  SUBCASE("central differences are exact on quadratics") {
    const SampledFunction u = sample_compact_function(
        dim, cube(1.0), 24, 2, [](std::span<const double> p) {
          return p[0] * p[0] + 0.5 * p[0] * p[1] - p[1] * p[2] + 2.0 * p[2];
        });
    const auto grads = horizontal_gradient(u, dim);
    const GridGeom& geom = u.grid.geom();
    const std::int64_t ny = geom.shape[1], nt = geom.shape[2];
    for (std::int64_t li = 0; li < u.grid.size(); ++li) {
      if (!deep_interior(geom, li, 4)) continue;
      const double x = geom.center(0, li / (ny * nt));
      const double y = geom.center(1, (li / nt) % ny);
      const double t = geom.center(2, li % nt);
      (void)t;
      const double dx = 2.0 * x + 0.5 * y;
      const double dy = 0.5 * x - t;
      const double dt = -y + 2.0;
      CHECK(grads[0][li] == doctest::Approx(dx - 0.5 * y * dt).epsilon(1e-10).scale(1.0));
      CHECK(grads[1][li] == doctest::Approx(dy + 0.5 * x * dt).epsilon(1e-10).scale(1.0));
    }
  }
  SUBCASE("commutator [X1, X2] recovers d/dt") {
    const int cells = 40;
    const SampledFunction u = sample_compact_function(
        dim, cube(1.2), cells, 2, [](std::span<const double> p) {
          const double r2 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 1.44;
          return std::pow(std::max(0.0, 1.0 - r2), 4.0);
        });
    const auto first = horizontal_gradient(u, dim);
    const auto x2x1 = horizontal_gradient(SampledFunction{first[0], 1}, dim);
    const auto x1x2 = horizontal_gradient(SampledFunction{first[1], 1}, dim);
    const GridGeom& geom = u.grid.geom();
    const std::int64_t nt = geom.shape[2];
    const double ht = geom.spacing[2];
    double worst = 0.0, scale = 0.0;
    for (std::int64_t li = 0; li < u.grid.size(); ++li) {
      if (!deep_interior(geom, li, 6)) continue;
      const std::int64_t it = li % nt;
      const double dt = (it + 1 < nt && it > 0)
                            ? (u.grid[li + 1] - u.grid[li - 1]) / (2.0 * ht)
                            : 0.0;
      const double commutator = x1x2[1 - 1][li] * 0.0 + (x2x1[1][li] - x1x2[0][li]);
      worst = std::max(worst, std::abs(commutator - dt));
      scale = std::max(scale, std::abs(dt));
    }
    CHECK(scale > 0.0);
    CHECK(worst <= 0.08 * scale);
  }
  SUBCASE("margin requirement") {
    SampledFunction u = bump(16);
    u.support_margin = 0;
    CHECK_THROWS_AS(horizontal_gradient(u, dim), std::invalid_argument);
  }
}

TEST_CASE("sobolev ratio") {
  const HDim dim{1};
  SUBCASE("finite and refinement-stable") {
    const double coarse = sobolev_ratio(bump(48), dim).value;
    const double fine = sobolev_ratio(bump(96), dim).value;
    CHECK(std::isfinite(coarse));
    CHECK(std::abs(fine - coarse) / fine < 0.02);
  }
  SUBCASE("scalar multiples leave the ratio unchanged") {
    const double base = sobolev_ratio(bump(32, 1.0), dim).value;
    const double scaled = sobolev_ratio(bump(32, 7.0), dim).value;
    CHECK(scaled == doctest::Approx(base).epsilon(1e-10));
  }
  SUBCASE("zero input rejected") {
    const SampledFunction zero = sample_compact_function(
        dim, cube(1.0), 12, 2, [](std::span<const double>) { return 0.0; });
    CHECK_THROWS(sobolev_ratio(zero, dim));
  }
}

TEST_CASE("level decomposition") {
  const HDim dim{1};
  SUBCASE("zero function decomposes to nothing") {
    const SampledFunction zero = sample_compact_function(
        dim, cube(1.0), 12, 2, [](std::span<const double>) { return 0.0; });
    CHECK(level_decomposition(zero).empty());
  }
  SUBCASE("a 0.75-plateau concentrates in k = 0") {
    const SampledFunction u = sample_compact_function(
        dim, cube(1.2), 48, 2, [](std::span<const double> p) {
          const double r2 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 1.44;
          return 0.75 * std::min(1.0, 4.0 * std::pow(std::max(0.0, 1.0 - r2), 2.0));
        });
    const LevelSetDecomposition dec = level_decomposition(u);
    REQUIRE(dec.has(0));
    std::int64_t best_count = 0;
    int best_k = dec.k_min;
    for (int k = dec.k_min; k <= dec.k_max; ++k) {
      if (dec.at(k).occupied_count() > best_count) {
        best_count = dec.at(k).occupied_count();
        best_k = k;
      }
    }
    CHECK(best_k == 0);
  }
  SUBCASE("dyadic reconstruction brackets the integral") {
    const SampledFunction u = bump(48);
    const LevelSetDecomposition dec = level_decomposition(u);
    const double q = 4.0 / 3.0;  // (2n+2)/(2n+1) at n=1
    double reconstruction = 0.0;
    for (int k = dec.k_min; k <= dec.k_max; ++k)
      reconstruction += std::pow(2.0, q * k) * volume(dec.at(k));
    double integral = 0.0;
    for (std::int64_t i = 0; i < u.grid.size(); ++i)
      integral += std::pow(std::abs(u.grid[i]), q);
    integral *= u.grid.geom().cell_volume();
    const double ratio = reconstruction / integral;
    CHECK(ratio >= 0.999);
    CHECK(ratio <= std::pow(2.0, q) * 1.001);
  }
}

TEST_CASE("level-set lemma") {
  const HDim dim{1};
  const SampledFunction u = bump(64);
  SUBCASE("projection bound holds with discretization allowance") {
    const auto rows = levelset_lemma_table(u, dim);
    REQUIRE(!rows.empty());
    int checked = 0;
    for (const auto& row : rows) {
      if (row.check.fkm1_empty || row.check.rhs == 0.0) continue;
      ++checked;
      CHECK(row.check.lhs <= 1.1 * row.check.rhs);
    }
    CHECK(checked >= 5);
  }
  SUBCASE("doubling u shifts the table by one level with equal slacks") {
    SampledFunction doubled = u;
    for (auto& v : doubled.grid.samples()) v *= 2.0;
    const LemmaCheck base = levelset_lemma_check(u, 1, 0, dim);
    const LemmaCheck shifted = levelset_lemma_check(doubled, 1, 1, dim);
    CHECK(base.lhs == doctest::Approx(shifted.lhs).epsilon(1e-12));
    CHECK(base.rhs == doctest::Approx(shifted.rhs).epsilon(1e-12));
  }
  SUBCASE("empty F_k flags infinity") {
    const LevelSetDecomposition dec = level_decomposition(u);
    const LemmaCheck check = levelset_lemma_check(u, 1, dec.k_max + 3, dim);
    CHECK(check.fk_empty);
    CHECK(std::isinf(check.slack));
  }
}

TEST_CASE("perimeter estimate") {
  const HDim dim{1};
  SUBCASE("euclidean ball against the surface-quadrature oracle") {
    // P_H(B) = int over the unit sphere of sqrt(x^2+y^2) sqrt(1 + t^2/4) dS,
    // the flat integral of the horizontal normal component.
    const int nphi = 2000;
    double oracle = 0.0;
    for (int i = 0; i < nphi; ++i) {
      const double phi = (i + 0.5) * std::numbers::pi / nphi;
      oracle += std::sin(phi) * std::sqrt(1.0 + 0.25 * std::cos(phi) * std::cos(phi)) *
                std::sin(phi) * (std::numbers::pi / nphi);
    }
    oracle *= 2.0 * std::numbers::pi;

    const Region ball = euclidean_ball_region({0.0, 0.0, 0.0}, 1.0);
    const PerimeterReport report = perimeter_estimate(ball, dim, 0.0, 96);
    CHECK(std::abs(report.value - oracle) / oracle < 0.10);
  }
  SUBCASE("dilation scaling r^{2n+1}") {
    const Region ball = euclidean_ball_region({0.0, 0.0, 0.0}, 0.8);
    const double base = perimeter_estimate(ball, dim, 0.0, 72).value;
    const double big = perimeter_estimate(dilate_region(ball, 2.0, dim), dim, 0.0, 72).value;
    CHECK(std::abs(big / base - 8.0) / 8.0 < 0.05);
  }
  SUBCASE("empty region has zero perimeter") {
    Region empty;
    empty.dim = 3;
    empty.bounds.lo = {0.0, 0.0, 0.0};
    empty.bounds.hi = {1.0, 1.0, 1.0};
    empty.membership = [](std::span<const double>) { return false; };
    empty.label = "empty";
    CHECK(perimeter_estimate(empty, dim, 0.0, 32).value == 0.0);
  }
}

TEST_CASE("isoperimetric ratio") {
  const HDim dim{1};
  const Region ball = euclidean_ball_region({0.0, 0.0, 0.0}, 1.0);
  SUBCASE("dilation and translation invariance") {
    const double base = isoperimetric_ratio(ball, dim, 72).value;
    const double dilated = isoperimetric_ratio(dilate_region(ball, 2.0, dim), dim, 72).value;
    CHECK(std::abs(dilated - base) / base < 0.05);
    const double moved =
        isoperimetric_ratio(translate_region(ball, HPoint{{0.3, -0.2}, 0.15}, dim), dim, 72)
            .value;
    CHECK(std::abs(moved - base) / base < 0.03);
  }
  SUBCASE("suite maximum is finite") {
    Box small;
    small.lo = {-0.8, -0.8, -0.8};
    small.hi = {0.8, 0.8, 0.8};
    double max_ratio = 0.0;
    for (const Region& region :
         {ball, box_region(small, "box"),
          union_region(box_region(small, "box"),
                       euclidean_ball_region({0.5, 0.5, 0.5}, 0.6, "offset_ball"))}) {
      const double value = isoperimetric_ratio(region, dim, 64).value;
      CHECK(std::isfinite(value));
      max_ratio = std::max(max_ratio, value);
    }
    CHECK(max_ratio > 0.0);
  }
  SUBCASE("zero volume rejected") {
    Region empty;
    empty.dim = 3;
    empty.bounds.lo = {0.0, 0.0, 0.0};
    empty.bounds.hi = {1.0, 1.0, 1.0};
    empty.membership = [](std::span<const double>) { return false; };
    CHECK_THROWS(isoperimetric_ratio(empty, dim, 32));
  }
}

TEST_CASE("boundary containment") {
  const HDim dim{1};
  SUBCASE("solid box") {
    Box box;
    box.lo = {-1.0, -1.0, -1.0};
    box.hi = {1.0, 1.0, 1.0};
    const ContainmentReport report =
        boundary_containment_check(box_region(box, "solid"), dim, 96);
    CHECK(report.pass);
    CHECK(report.total_violations == 0);
    for (const auto& row : report.rows) CHECK(row.projected_cells > 0);
  }
  SUBCASE("empty region is trivially contained") {
    Region empty;
    empty.dim = 3;
    empty.bounds.lo = {0.0, 0.0, 0.0};
    empty.bounds.hi = {1.0, 1.0, 1.0};
    empty.membership = [](std::span<const double>) { return false; };
    const ContainmentReport report = boundary_containment_check(empty, dim, 24);
    CHECK(report.pass);
  }
  SUBCASE("ball with an interior cavity") {
    const Region shell = difference_region(euclidean_ball_region({0.0, 0.0, 0.0}, 1.0),
                                           euclidean_ball_region({0.0, 0.0, 0.0}, 0.45));
    const ContainmentReport report = boundary_containment_check(shell, dim, 96);
    CHECK(report.pass);
  }
}
