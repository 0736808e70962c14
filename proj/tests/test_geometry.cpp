#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hlw/geometry.hpp"

using namespace hlw;

namespace {

HPoint random_point(std::mt19937_64& rng, HDim dim, double scale = 2.0) {
  std::uniform_real_distribution<double> uni(-scale, scale);
  HPoint p;
  p.x.resize(dim.horizontal());
  for (double& v : p.x) v = uni(rng);
  p.t = uni(rng);
  return p;
}

// Dyadic coordinates (multiples of 1/8) keep the fibre identity exact in
// floating point.
HPoint random_dyadic_point(std::mt19937_64& rng, HDim dim) {
  std::uniform_int_distribution<int> grid(-16, 16);
  HPoint p;
  p.x.resize(dim.horizontal());
  for (double& v : p.x) v = grid(rng) / 8.0;
  p.t = grid(rng) / 8.0;
  return p;
}

bool close(const HPoint& a, const HPoint& b, double tol) {
  if (a.x.size() != b.x.size()) return false;
  for (size_t i = 0; i < a.x.size(); ++i)
    if (std::abs(a.x[i] - b.x[i]) > tol) return false;
  return std::abs(a.t - b.t) <= tol;
}

}  // namespace

TEST_CASE("group product basics") {
  const HDim dim{1};
  const HPoint p{{1.0, 0.0}, 0.0};
  const HPoint q{{0.0, 1.0}, 0.0};

  SUBCASE("identity") {
    const HPoint r = group_product(p, identity_point(dim), dim);
    CHECK(close(r, p, 0.0));
  }
  SUBCASE("hand value (1,0,0)*(0,1,0)") {
    const HPoint r = group_product(p, q, dim);
    CHECK(r.x[0] == doctest::Approx(1.0));
    CHECK(r.x[1] == doctest::Approx(1.0));
    CHECK(r.t == doctest::Approx(0.5));
  }
  SUBCASE("inverse is (-x,-t)") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
      const HPoint a = random_point(rng, dim);
      CHECK(close(group_product(a, group_inverse(a), dim), identity_point(dim), 1e-15));
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(group_product(p, HPoint{{1.0, 2.0, 3.0, 4.0}, 0.0}, dim),
                    std::invalid_argument);
  }
}

TEST_CASE("associativity for n in {1,2,3}") {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 3; ++n) {
    const HDim dim{n};
    for (int trial = 0; trial < 40; ++trial) {
      const HPoint p = random_point(rng, dim);
      const HPoint q = random_point(rng, dim);
      const HPoint r = random_point(rng, dim);
      const HPoint lhs = group_product(group_product(p, q, dim), r, dim);
      const HPoint rhs = group_product(p, group_product(q, r, dim), dim);
      CHECK(close(lhs, rhs, 1e-12));
    }
  }
}

TEST_CASE("dilation") {
  const HDim dim{1};
  std::mt19937_64 rng(13);
  SUBCASE("r = 1 is the identity") {
    const HPoint p = random_point(rng, dim);
    CHECK(close(dilate(p, 1.0, dim), p, 0.0));
  }
  SUBCASE("hand value") {
    const HPoint r = dilate(HPoint{{1.0, 1.0}, 1.0}, 2.0, dim);
    CHECK(r.x[0] == doctest::Approx(2.0));
    CHECK(r.x[1] == doctest::Approx(2.0));
    CHECK(r.t == doctest::Approx(4.0));
  }
  SUBCASE("semigroup law") {
    for (int i = 0; i < 20; ++i) {
      const HPoint p = random_point(rng, dim);
      CHECK(close(dilate(dilate(p, 1.7, dim), 0.4, dim), dilate(p, 1.7 * 0.4, dim), 1e-12));
    }
  }
  SUBCASE("nonpositive r") { CHECK_THROWS(dilate(identity_point(dim), 0.0, dim)); }
}

TEST_CASE("koranyi norm") {
  const HDim dim{2};
  SUBCASE("origin") { CHECK(koranyi_norm(identity_point(dim)) == 0.0); }
  SUBCASE("vanishing t gives the euclidean norm") {
    const HPoint p{{3.0, 0.0, 4.0, 0.0}, 0.0};
    CHECK(koranyi_norm(p) == doctest::Approx(5.0));
  }
  SUBCASE("homogeneity under dilation") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 20; ++i) {
      const HPoint p = random_point(rng, dim);
      for (double r : {0.3, 2.5}) {
        CHECK(koranyi_norm(dilate(p, r, dim)) ==
              doctest::Approx(r * koranyi_norm(p)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("vertical projections") {
  const HDim dim{1};
  const HPoint p{{2.0, 3.0}, 1.0};
  SUBCASE("pi_1 hand value") {
    const PlanePoint w = vertical_projection(p, 1, dim);
    CHECK(w.coords[0] == doctest::Approx(3.0));
    CHECK(w.coords[1] == doctest::Approx(4.0));
  }
  SUBCASE("pi_2 hand value") {
    const PlanePoint w = vertical_projection(p, 2, dim);
    CHECK(w.coords[0] == doctest::Approx(2.0));
    CHECK(w.coords[1] == doctest::Approx(-2.0));
  }
  SUBCASE("points of W_j are fixed") {
    const HPoint q{{0.0, 3.0}, 1.5};
    const PlanePoint w = vertical_projection(q, 1, dim);
    CHECK(w.coords[0] == 3.0);
    CHECK(w.coords[1] == 1.5);
  }
  SUBCASE("index range") { CHECK_THROWS(vertical_projection(p, 3, dim)); }
}

TEST_CASE("fibres are left translates of L_j") {
  std::mt19937_64 rng(19);
  for (int n : {1, 2}) {
    const HDim dim{n};
    for (int trial = 0; trial < 40; ++trial) {
      const HPoint base = random_dyadic_point(rng, dim);
      for (int j = 1; j <= 2 * n; ++j) {
        PlanePoint w = vertical_projection(base, j, dim);
        const HPoint embedded = embed_plane_point(w, j, dim);
        std::uniform_int_distribution<int> grid(-16, 16);
        HPoint along = identity_point(dim);
        along.x[j - 1] = grid(rng) / 8.0;
        const PlanePoint back =
            vertical_projection(group_product(embedded, along, dim), j, dim);
        for (int c = 0; c < 2 * n; ++c) CHECK(back.coords[c] == w.coords[c]);
      }
    }
  }
}

TEST_CASE("projection-dilation covariance") {
  std::mt19937_64 rng(23);
  const HDim dim{2};
  for (int trial = 0; trial < 30; ++trial) {
    const HPoint p = random_point(rng, dim);
    for (int j = 1; j <= 4; ++j) {
      for (double r : {0.5, 2.0}) {
        const PlanePoint lhs = vertical_projection(dilate(p, r, dim), j, dim);
        const PlanePoint base = vertical_projection(p, j, dim);
        for (int c = 0; c < 3; ++c)
          CHECK(lhs.coords[c] == doctest::Approx(r * base.coords[c]).epsilon(1e-13));
        CHECK(lhs.coords[3] == doctest::Approx(r * r * base.coords[3]).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("generalized projections") {
  const HDim dim{1};
  SUBCASE("standard family reproduces the vertical projections") {
    const HeightFamily family = standard_height_family(dim);
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
      const HPoint p = random_point(rng, dim);
      for (int j : {1, 2}) {
        const PlanePoint a = rho_projection(p, j, family);
        const PlanePoint b = vertical_projection(p, j, dim);
        CHECK(a.coords[0] == doctest::Approx(b.coords[0]).epsilon(1e-14));
        CHECK(a.coords[1] == doctest::Approx(b.coords[1]).epsilon(1e-14));
      }
    }
  }
  SUBCASE("zero heights give the euclidean coordinate projection") {
    const HeightFamily family = poly_height_family(constant_poly_spec(dim, {0.0, 0.0}));
    const HPoint p{{1.5, -0.5}, 0.75};
    const PlanePoint w = rho_projection(p, 1, family);
    CHECK(w.coords[0] == -0.5);
    CHECK(w.coords[1] == 0.75);
  }
  SUBCASE("h1 = x1 x2 hand value") {
    PolyHeightSpec spec = constant_poly_spec(dim, {1.0, 0.0});
    const HeightFamily family = poly_height_family(spec);
    const PlanePoint w = rho_projection(HPoint{{1.0, 2.0}, 0.0}, 1, family);
    CHECK(w.coords[0] == doctest::Approx(2.0));
    CHECK(w.coords[1] == doctest::Approx(2.0));
  }
}

TEST_CASE("polynomial height families") {
  SUBCASE("zero family flags every pair degenerate") {
    const HDim dim{2};
    const HeightFamily family =
        poly_height_family(constant_poly_spec(dim, {0.0, 0.0, 0.0, 0.0}));
    CHECK(family.degeneracy_flags == std::vector<bool>{true, true});
  }
  SUBCASE("b = (1/2, -1/2) matches the standard family") {
    const HDim dim{1};
    const HeightFamily built = poly_height_family(constant_poly_spec(dim, {0.5, -0.5}));
    const HeightFamily standard = standard_height_family(dim);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
      const double x[2] = {uni(rng), uni(rng)};
      for (int j = 0; j < 2; ++j)
        CHECK(built.h[j](std::span<const double>(x, 2)) ==
              doctest::Approx(standard.h[j](std::span<const double>(x, 2))).epsilon(1e-14));
    }
    CHECK_FALSE(built.degeneracy_flags[0]);
  }
  SUBCASE("b = (1, 1) is degenerate") {
    const HeightFamily family = poly_height_family(constant_poly_spec(HDim{1}, {1.0, 1.0}));
    CHECK(family.degeneracy_flags[0]);
  }
}

TEST_CASE("rank certificates") {
  const HDim dim{1};
  const HeightFamily standard = standard_height_family(dim);
  SUBCASE("origin") {
    const RankCertificate cert = rank_certificate(standard, 1, identity_point(dim));
    REQUIRE(cert.analytic.has_value());
    CHECK(*cert.analytic == doctest::Approx(1.0));
    CHECK(cert.finite_difference == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("hand value at (0,2,0)") {
    const RankCertificate cert = rank_certificate(standard, 1, HPoint{{0.0, 2.0}, 0.0});
    REQUIRE(cert.analytic.has_value());
    CHECK(*cert.analytic == doctest::Approx(2.0));
  }
  SUBCASE("finite differences agree with the analytic path") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> uni(-1.5, 1.5);
    for (int n : {1, 2}) {
      const HDim d{n};
      std::vector<double> b(d.horizontal());
      std::vector<std::array<double, 5>> c(d.horizontal());
      for (auto& v : b) v = uni(rng);
      for (auto& row : c)
        for (auto& v : row) v = 0.5 * uni(rng);
      const HeightFamily family = poly_height_family(constant_poly_spec(d, b, c));
      for (int trial = 0; trial < 25; ++trial) {
        const HPoint p = random_point(rng, d, 1.5);
        for (int j = 1; j <= d.horizontal(); ++j) {
          const RankCertificate cert = rank_certificate(family, j, p);
          REQUIRE(cert.analytic.has_value());
          CHECK(*cert.analytic >= 1.0);
          CHECK(cert.finite_difference >= 1.0 - 1e-9);
          CHECK(std::abs(*cert.analytic - cert.finite_difference) < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("translation action on planes") {
  std::mt19937_64 rng(41);
  SUBCASE("identity translation gives the identity map") {
    const HDim dim{1};
    const AffinePlaneMap map = translation_action_on_plane(identity_point(dim), 1, dim);
    CHECK(map.linear_determinant() == doctest::Approx(1.0));
    const PlanePoint w{{0.7, -0.3}};
    const PlanePoint out = map.apply(w);
    CHECK(out.coords[0] == doctest::Approx(0.7));
    CHECK(out.coords[1] == doctest::Approx(-0.3));
  }
  SUBCASE("n=1, j=2 closed form") {
    const HDim dim{1};
    const double a = 0.8, b = -1.1, c = 0.4;
    const AffinePlaneMap map = translation_action_on_plane(HPoint{{a, b}, c}, 2, dim);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
      const double x = uni(rng), s = uni(rng);
      const PlanePoint out = map.apply(PlanePoint{{x, s}});
      CHECK(out.coords[0] == doctest::Approx(x + a).epsilon(1e-13));
      CHECK(out.coords[1] == doctest::Approx(s + c - a * b / 2.0 - b * x).epsilon(1e-13));
    }
  }
  SUBCASE("defining identity pi_j(p q) = A(pi_j q)") {
    for (int n : {1, 2}) {
      const HDim dim{n};
      for (int trial = 0; trial < 25; ++trial) {
        const HPoint p = random_point(rng, dim);
        const HPoint q = random_point(rng, dim);
        for (int j = 1; j <= 2 * n; ++j) {
          const AffinePlaneMap map = translation_action_on_plane(p, j, dim);
          const PlanePoint direct = vertical_projection(group_product(p, q, dim), j, dim);
          const PlanePoint mapped = map.apply(vertical_projection(q, j, dim));
          for (int cidx = 0; cidx < 2 * n; ++cidx)
            CHECK(direct.coords[cidx] == doctest::Approx(mapped.coords[cidx]).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("unit determinant for 100 random p") {
    for (int n : {1, 2}) {
      const HDim dim{n};
      for (int trial = 0; trial < 100; ++trial) {
        const HPoint p = random_point(rng, dim);
        for (int j = 1; j <= 2 * n; ++j)
          CHECK(translation_action_on_plane(p, j, dim).linear_determinant() ==
                doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  SUBCASE("homomorphism property") {
    for (int n : {1, 2}) {
      const HDim dim{n};
      for (int trial = 0; trial < 20; ++trial) {
        const HPoint p = random_point(rng, dim);
        const HPoint q = random_point(rng, dim);
        for (int j = 1; j <= 2 * n; ++j) {
          const AffinePlaneMap composed =
              translation_action_on_plane(p, j, dim).compose(translation_action_on_plane(q, j, dim));
          const AffinePlaneMap direct =
              translation_action_on_plane(group_product(p, q, dim), j, dim);
          for (size_t i = 0; i < composed.linear.size(); ++i)
            CHECK(composed.linear[i] == doctest::Approx(direct.linear[i]).epsilon(1e-12));
          for (size_t i = 0; i < composed.offset.size(); ++i)
            CHECK(composed.offset[i] ==
                  doctest::Approx(direct.offset[i]).epsilon(1e-12).scale(1.0));
        }
      }
    }
  }
  SUBCASE("inverse undoes the map") {
    const HDim dim{2};
    const HPoint p = random_point(rng, dim);
    const AffinePlaneMap map = translation_action_on_plane(p, 3, dim);
    const AffinePlaneMap round = map.compose(map.inverse());
    for (int r = 0; r < round.dim; ++r)
      for (int c = 0; c < round.dim; ++c)
        CHECK(round.linear[static_cast<size_t>(r) * round.dim + c] ==
              doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
  }
}
