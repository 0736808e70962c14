#pragma once

// Discrete planar operators: Radon transform, the shear average T, the
// quadratic-phase average S, parabola convolution, the slice operators T_k,
// plus L^p norms and empirical L^{3/2} -> L^3 improving ratios.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hlw/geometry.hpp"
#include "hlw/grid_function.hpp"

namespace hlw {

// --------------------------------------------------------------------------
// Radon transform
// --------------------------------------------------------------------------

struct Sinogram {
  std::vector<double> angles;  // uniform over [0, pi); completed by symmetry
  double offset_min = 0.0;
  double offset_step = 0.0;
  std::int64_t n_offsets = 0;
  double circumradius = 0.0;
  std::vector<double> samples;  // angle-major

  double& at(std::int64_t ia, std::int64_t is) { return samples[ia * n_offsets + is]; }
  double at(std::int64_t ia, std::int64_t is) const { return samples[ia * n_offsets + is]; }
};

// Line integrals over <z, sigma> = s with uniform sampling along the line and
// bilinear interpolation. Angles cover [0, pi); offsets cover the support
// circumradius. line_samples = 0 picks step = min spacing / 2.
Sinogram radon_transform(const GridFunction& f, int n_angles, int n_offsets,
                         int line_samples = 0, std::optional<double> offset_halfwidth = {});

// L^p over S^1 x R, the [pi, 2pi) half supplied by Rf(-sigma, -s) = Rf(sigma, s).
double lp_norm(const Sinogram& sino, double p);

// --------------------------------------------------------------------------
// Averaging operators
// --------------------------------------------------------------------------

struct SCoeffs {
  double alpha = 0, beta = 0, gamma = 0, delta = 0, epsilon = 0, kappa = 0;
};

// Tf(x,t) = int f(y, t + x y) dy
GridFunction op_T(const GridFunction& f, const GridGeom& out_spec);
// Sf(x,t) = int f(y, t + a y^2 + b x y + c x^2 + d x + e y + k) dy
GridFunction op_S(const GridFunction& f, const SCoeffs& c, const GridGeom& out_spec);
// (mu_alpha * f)(x,t) = |alpha|^{1/3} int f(x - y, t - alpha y^2) dy
GridFunction parabola_convolution(const GridFunction& f, double alpha, const GridGeom& out_spec);

// Shear-type operator out(x,t) = int f(y, t + G(x,y)) dy packaged with its
// kernel so window sizing can bound |G| over any box.
struct PlanarOperator {
  enum class Kind { shear, parabola };
  Kind kind = Kind::shear;
  std::string name;
  std::function<double(double, double)> shift;  // G(x, y), shear kind
  double alpha = 0.0;                           // parabola kind

  GridFunction apply(const GridFunction& f, const GridGeom& out_spec) const;
};

PlanarOperator make_op_T();
PlanarOperator make_op_S(const SCoeffs& c);
PlanarOperator make_parabola(double alpha);

// Slice operator of the generalized family: freeze the 2n-2 coordinates
// other than (x_k, x_{n+k}) at `slice` and average with kernel shift
// h_k - h_{n+k}. For n = 1 the slice is empty and the shift is h_1 - h_2.
PlanarOperator op_Tk(const HeightFamily& family, int k, std::vector<double> slice = {});

// --------------------------------------------------------------------------
// Improving ratios
// --------------------------------------------------------------------------

struct ImprovingOptions {
  double spacing_scale = 1.0;   // output spacing = f spacing * scale
  int max_doublings = 7;
  double stabilize_rel = 0.005; // stop when the L3 norm moves less than this
  double initial_halfwidth = 0.0;  // 0 = derive from f's support
};

// ||op f||_3 over [-W, W] x (full t-support), with W fixed.
double windowed_l3(const PlanarOperator& op, const GridFunction& f, double x_halfwidth,
                   double spacing_scale = 1.0);
double windowed_ratio(const PlanarOperator& op, const GridFunction& f, double x_halfwidth,
                      double spacing_scale = 1.0);

// ||op f||_3 / ||f||_{3/2} with the output window doubled until the norm is
// stable. Throws DiscretizationError if it never stabilizes.
double improving_ratio(const PlanarOperator& op, const GridFunction& f,
                       const ImprovingOptions& opts = {});
double improving_ratio_radon(const GridFunction& f, int n_angles, int n_offsets,
                             int line_samples = 0);

// --------------------------------------------------------------------------
// Pairing identity and the L^{3/2}-L^3 certificate
// --------------------------------------------------------------------------

struct PairingResult {
  double lhs = 0.0;  // int f1(pi_1 p) f2(pi_2 p) dp, 3-D midpoint quadrature
  double rhs = 0.0;  // int T f1 . f2
  double relative_error = 0.0;
};

PairingResult pairing_check(const GridFunction& f1, const GridFunction& f2, int resolution);

struct L32L3Entry {
  int k = 0;
  std::vector<double> slice;
  std::vector<double> windows;
  std::vector<double> max_ratio;   // per window, max over the test bank
  double growth_factor = 0.0;      // geometric mean per window doubling
  double growth_exponent = 0.0;    // log2(growth_factor)
  bool degenerate = false;
  double empirical_constant = 0.0; // max ratio at the largest window
};

struct L32L3Report {
  std::vector<L32L3Entry> entries;
  bool any_degenerate = false;
  double empirical_constant = 0.0;  // max over bounded entries
};

// Flags DEGENERATE when the max ratio grows by a factor >= 1.25 per window
// doubling; windows must be increasing and dyadic.
L32L3Report l32l3_certificate(const HeightFamily& family,
                              const std::vector<std::vector<double>>& slices,
                              const std::vector<GridFunction>& test_bank,
                              const std::vector<double>& windows,
                              double spacing_scale = 1.0);

// Indicators, Gaussians, stretched and parabolic-sheared indicators, and
// seeded smooth bumps on [-1.5, 1.5]^2.
std::vector<GridFunction> standard_test_bank(int cells, std::uint64_t seed);

}  // namespace hlw
