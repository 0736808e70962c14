#pragma once

// Heisenberg group algebra: product, dilations, Koranyi gauge, vertical and
// generalized projections, and the affine plane maps induced by left
// translation. All operations are pure functions of immutable values.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hlw {

// Heisenberg index n. The group lives on R^{2n+1}: 2n horizontal coordinates
// x_1..x_{2n} followed by the vertical coordinate t.
struct HDim {
  int n = 1;

  int horizontal() const { return 2 * n; }
  int ambient() const { return 2 * n + 1; }
  int homogeneous() const { return 2 * n + 2; }
};

struct HPoint {
  std::vector<double> x;  // length 2n
  double t = 0.0;
};

// Point of the vertical hyperplane W_j identified with R^{2n}: the 2n-1
// surviving horizontal coordinates in ascending index order, then the plane
// t-coordinate in the last slot.
struct PlanePoint {
  std::vector<double> coords;
};

HPoint identity_point(HDim dim);
// coords = (x_1, ..., x_{2n}, t)
HPoint hpoint_from_coords(std::span<const double> coords);
void hpoint_to_coords(const HPoint& p, std::span<double> out);

HPoint group_product(const HPoint& p, const HPoint& q, HDim dim);
HPoint group_inverse(const HPoint& p);
double koranyi_norm(const HPoint& p);
double koranyi_distance(const HPoint& p, const HPoint& q, HDim dim);
// Heisenberg dilation (x, t) -> (r x, r^2 t); requires r > 0.
HPoint dilate(const HPoint& p, double r, HDim dim);

// Vertical projection onto W_j = {x_j = 0}, j in 1..2n.
PlanePoint vertical_projection(const HPoint& p, int j, HDim dim);
// Group element of W_j whose plane coordinates are w (sets x_j = 0).
HPoint embed_plane_point(const PlanePoint& w, int j, HDim dim);

// --------------------------------------------------------------------------
// Generalized projections rho_j(x, t) = (x-hat_j, t + h_j(x))
// --------------------------------------------------------------------------

using HeightFn = std::function<double(std::span<const double>)>;

struct HeightFamily {
  HDim dim;
  std::vector<HeightFn> h;  // 2n functions on R^{2n}
  // Optional analytic derivative of h_j in its own deleted coordinate x_j;
  // that is the only gradient component the rank condition consumes. Empty
  // when only finite differences are available (flagged in outputs).
  std::vector<HeightFn> dh_own;
  std::vector<bool> degeneracy_flags;  // per k in 1..n: b_k == b_{n+k}

  bool has_gradients() const { return !dh_own.empty(); }
};

// Heights (1/2) x_j x_{n+j} and -(1/2) x_{j-n} x_j of the standard vertical
// projections.
HeightFamily standard_height_family(HDim dim);

PlanePoint rho_projection(const HPoint& p, int j, const HeightFamily& family);

// Polynomial height families: h_k = b_k x_k x_{n+k} + sum_a c_{k,a} x_k^{a1}
// x_{n+k}^{a2} over the five multi-indices below, with coefficient functions
// c_{j,a} of the remaining 2n-2 coordinates.
inline constexpr std::array<std::array<int, 2>, 5> kPolyMultiIndices{
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {0, 2}}};

using CoeffFn = std::function<double(std::span<const double>)>;  // on R^{2n-2}

struct PolyHeightSpec {
  HDim dim;
  std::vector<double> b;                   // length 2n
  std::vector<std::array<CoeffFn, 5>> c;   // per j in 1..2n, per multi-index
};

// Convenience: constant coefficients (c[j][a] a plain number).
PolyHeightSpec constant_poly_spec(HDim dim, std::vector<double> b,
                                  std::vector<std::array<double, 5>> c = {});

HeightFamily poly_height_family(const PolyHeightSpec& spec);

// Rank condition det(D rho_j D rho_j^t) = 1 + (d h_j / d x_j)^2.
struct RankCertificate {
  std::optional<double> analytic;  // present when the family has gradients
  double finite_difference = 0.0;
};

RankCertificate rank_certificate(const HeightFamily& family, int j, const HPoint& p);

// --------------------------------------------------------------------------
// Affine plane actions induced by left translation
// --------------------------------------------------------------------------

// Affine map of plane coordinates (2n-vector), w -> L w + offset.
struct AffinePlaneMap {
  int dim = 0;                 // 2n
  std::vector<double> linear;  // row-major dim x dim
  std::vector<double> offset;  // dim

  PlanePoint apply(const PlanePoint& w) const;
  // this after inner: (this ∘ inner)(w) = this(inner(w))
  AffinePlaneMap compose(const AffinePlaneMap& inner) const;
  AffinePlaneMap inverse() const;
  double linear_determinant() const;
};

AffinePlaneMap identity_plane_map(int dim);

// The unique affine map A with pi_j(p . q) = A(pi_j(q)) for all q. The linear
// part is a unit-Jacobian shear.
AffinePlaneMap translation_action_on_plane(const HPoint& p, int j, HDim dim);

}  // namespace hlw
