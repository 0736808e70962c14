#include "hlw/planar_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hlw/parallel.hpp"

namespace hlw {

namespace {

void require_dim2(const GridFunction& f, const char* who) {
  if (f.dim() != 2) throw std::invalid_argument(std::string(who) + ": expected a dim-2 grid");
}

double support_circumradius(const GridGeom& geom) {
  Box box = geom.box();
  double r = 0.0;
  for (std::uint32_t mask = 0; mask < 4; ++mask) {
    auto c = box.corner(mask);
    r = std::max(r, std::hypot(c[0], c[1]));
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Radon transform
// ---------------------------------------------------------------------------

Sinogram radon_transform(const GridFunction& f, int n_angles, int n_offsets, int line_samples,
                         std::optional<double> offset_halfwidth) {
  require_dim2(f, "radon_transform");
  if (n_angles < 1 || n_offsets < 1)
    throw std::invalid_argument("radon_transform: need positive angle/offset counts");

  Sinogram sino;
  sino.circumradius = support_circumradius(f.geom());
  const double rc = sino.circumradius;
  if (offset_halfwidth) {
    if (*offset_halfwidth < rc)
      throw std::invalid_argument("radon_transform: support exceeds offset range");
  }
  const double shw = offset_halfwidth.value_or(rc);

  sino.n_offsets = n_offsets;
  sino.offset_step = 2.0 * shw / n_offsets;
  sino.offset_min = -shw + 0.5 * sino.offset_step;
  sino.angles.resize(n_angles);
  const double dtheta = std::numbers::pi / n_angles;
  for (int ia = 0; ia < n_angles; ++ia) sino.angles[ia] = ia * dtheta;

  int m = line_samples;
  if (m <= 0) {
    const double step = 0.5 * std::min(f.geom().spacing[0], f.geom().spacing[1]);
    m = std::max<int>(2, static_cast<int>(std::ceil(2.0 * rc / step)));
  }
  const double dtau = 2.0 * rc / m;

  sino.samples.assign(static_cast<size_t>(n_angles) * n_offsets, 0.0);
  parallel_chunks(static_cast<std::int64_t>(n_angles) * n_offsets, 1,
                  [&](std::int64_t b, std::int64_t e, int) {
                    for (std::int64_t i = b; i < e; ++i) {
                      const std::int64_t ia = i / n_offsets;
                      const std::int64_t is = i % n_offsets;
                      const double theta = sino.angles[ia];
                      const double cx = std::cos(theta), sx = std::sin(theta);
                      const double s = sino.offset_min + is * sino.offset_step;
                      KahanSum acc;
                      for (int q = 0; q < m; ++q) {
                        const double tau = -rc + (q + 0.5) * dtau;
                        // z = s sigma + tau sigma_perp, sigma = (cx, sx)
                        acc.add(f.value2(s * cx - tau * sx, s * sx + tau * cx));
                      }
                      sino.samples[i] = acc.value() * dtau;
                    }
                  });
  return sino;
}

double lp_norm(const Sinogram& sino, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm(sinogram): p must be >= 1");
  const double dtheta = std::numbers::pi / static_cast<double>(sino.angles.size());
  double total = parallel_sum(static_cast<std::int64_t>(sino.samples.size()),
                              [&](std::int64_t i) { return std::pow(std::abs(sino.samples[i]), p); });
  // Factor 2: the [pi, 2pi) half of S^1 carries the same values.
  return std::pow(2.0 * total * dtheta * sino.offset_step, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Averaging operators
// ---------------------------------------------------------------------------

namespace {

// out(x,t) = int f(y, t + G(x,y)) dy with y at f's first-axis cell centers.
GridFunction shear_apply(const GridFunction& f, const std::function<double(double, double)>& shift,
                         const GridGeom& out_spec) {
  require_dim2(f, "shear operator");
  GridFunction out(out_spec);
  const std::int64_t ny = f.geom().shape[0];
  const double dy = f.geom().spacing[0];
  const std::int64_t nt = out_spec.shape[1];
  parallel_chunks(out.size(), 64, [&](std::int64_t b, std::int64_t e, int) {
    for (std::int64_t li = b; li < e; ++li) {
      const std::int64_t ix = li / nt;
      const std::int64_t it = li % nt;
      const double x = out_spec.center(0, ix);
      const double t = out_spec.center(1, it);
      KahanSum acc;
      for (std::int64_t iy = 0; iy < ny; ++iy) {
        const double y = f.geom().center(0, iy);
        acc.add(f.column_value(iy, t + shift(x, y)));
      }
      out[li] = acc.value() * dy;
    }
  });
  return out;
}

}  // namespace

GridFunction op_T(const GridFunction& f, const GridGeom& out_spec) {
  return shear_apply(f, [](double x, double y) { return x * y; }, out_spec);
}

GridFunction op_S(const GridFunction& f, const SCoeffs& c, const GridGeom& out_spec) {
  return shear_apply(
      f,
      [c](double x, double y) {
        return c.alpha * y * y + c.beta * x * y + c.gamma * x * x + c.delta * x + c.epsilon * y +
               c.kappa;
      },
      out_spec);
}

GridFunction parabola_convolution(const GridFunction& f, double alpha, const GridGeom& out_spec) {
  require_dim2(f, "parabola_convolution");
  if (alpha == 0.0) throw std::invalid_argument("parabola_convolution: alpha must be nonzero");
  GridFunction out(out_spec);
  const double x0 = f.geom().origin[0];
  const double x1 = x0 + f.geom().spacing[0] * static_cast<double>(f.geom().shape[0]);
  const double dy = f.geom().spacing[0];
  const double scale = std::pow(std::abs(alpha), 1.0 / 3.0);
  const std::int64_t nt = out_spec.shape[1];
  parallel_chunks(out.size(), 64, [&](std::int64_t b, std::int64_t e, int) {
    for (std::int64_t li = b; li < e; ++li) {
      const std::int64_t ix = li / nt;
      const std::int64_t it = li % nt;
      const double x = out_spec.center(0, ix);
      const double t = out_spec.center(1, it);
      // f(x - y, .) is supported for y in [x - x1, x - x0].
      const double ylo = x - x1;
      const std::int64_t m = f.geom().shape[0];
      KahanSum acc;
      for (std::int64_t q = 0; q < m; ++q) {
        const double y = ylo + (static_cast<double>(q) + 0.5) * dy;
        acc.add(f.value2(x - y, t - alpha * y * y));
      }
      out[li] = acc.value() * dy * scale;
    }
  });
  return out;
}

GridFunction PlanarOperator::apply(const GridFunction& f, const GridGeom& out_spec) const {
  if (kind == Kind::parabola) return parabola_convolution(f, alpha, out_spec);
  return shear_apply(f, shift, out_spec);
}

PlanarOperator make_op_T() {
  PlanarOperator op;
  op.name = "T";
  op.shift = [](double x, double y) { return x * y; };
  return op;
}

PlanarOperator make_op_S(const SCoeffs& c) {
  PlanarOperator op;
  op.name = "S";
  op.shift = [c](double x, double y) {
    return c.alpha * y * y + c.beta * x * y + c.gamma * x * x + c.delta * x + c.epsilon * y +
           c.kappa;
  };
  return op;
}

PlanarOperator make_parabola(double alpha) {
  if (alpha == 0.0) throw std::invalid_argument("make_parabola: alpha must be nonzero");
  PlanarOperator op;
  op.kind = PlanarOperator::Kind::parabola;
  op.name = "parabola";
  op.alpha = alpha;
  return op;
}

PlanarOperator op_Tk(const HeightFamily& family, int k, std::vector<double> slice) {
  const int n = family.dim.n;
  if (k < 1 || k > n) throw std::invalid_argument("op_Tk: k out of range 1..n");
  if (n > 1 && static_cast<int>(slice.size()) != 2 * n - 2)
    throw std::invalid_argument("op_Tk: slice must have 2n-2 coordinates");
  PlanarOperator op;
  op.name = "T_" + std::to_string(k);
  const HeightFn hk = family.h[k - 1];
  const HeightFn hnk = family.h[n + k - 1];
  if (n == 1) {
    op.shift = [hk, hnk](double x1, double x2) {
      const double x[2] = {x1, x2};
      return hk(std::span<const double>(x, 2)) - hnk(std::span<const double>(x, 2));
    };
    return op;
  }
  // Assemble the full horizontal vector with x_k, x_{n+k} varying and the
  // rest frozen at the slice (ascending index order).
  const int m = 2 * n;
  op.shift = [hk, hnk, slice = std::move(slice), k, n, m](double xk, double xnk) {
    std::vector<double> x(m);
    int s = 0;
    for (int i = 1; i <= m; ++i) {
      if (i == k)
        x[i - 1] = xk;
      else if (i == n + k)
        x[i - 1] = xnk;
      else
        x[i - 1] = slice[s++];
    }
    return hk(x) - hnk(x);
  };
  return op;
}

// ---------------------------------------------------------------------------
// Improving ratios
// ---------------------------------------------------------------------------

namespace {

// t-halfwidth that contains the output support for |x| <= W: the input
// t-halfwidth plus the kernel shift range, found by sampling the shift.
double t_halfwidth_for_window(const PlanarOperator& op, const GridFunction& f, double W) {
  const auto& g = f.geom();
  const double u_abs = std::max(std::abs(g.origin[1]),
                                std::abs(g.origin[1] + g.spacing[1] * g.shape[1]));
  const double x_abs = std::max(std::abs(g.origin[0]),
                                std::abs(g.origin[0] + g.spacing[0] * g.shape[0]));
  if (op.kind == PlanarOperator::Kind::parabola) {
    const double ymax = W + x_abs;
    return u_abs + std::abs(op.alpha) * ymax * ymax + g.spacing[1];
  }
  double shift_abs = 0.0;
  const int nx_probe = 65;
  for (int i = 0; i < nx_probe; ++i) {
    const double x = -W + 2.0 * W * i / (nx_probe - 1);
    for (std::int64_t iy = 0; iy < g.shape[0]; ++iy)
      shift_abs = std::max(shift_abs, std::abs(op.shift(x, g.center(0, iy))));
  }
  return u_abs + shift_abs + g.spacing[1];
}

GridGeom window_spec(const PlanarOperator& op, const GridFunction& f, double W,
                     double spacing_scale) {
  const double hx = f.geom().spacing[0] * spacing_scale;
  const double ht = f.geom().spacing[1] * spacing_scale;
  const double H = t_halfwidth_for_window(op, f, W);
  const std::int64_t nx = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(2.0 * W / hx)));
  const std::int64_t nt = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(2.0 * H / ht)));
  return grid_geom_2d(-W, W, -H, H, nx, nt);
}

}  // namespace

double windowed_l3(const PlanarOperator& op, const GridFunction& f, double x_halfwidth,
                   double spacing_scale) {
  return lp_norm(op.apply(f, window_spec(op, f, x_halfwidth, spacing_scale)), 3.0);
}

double windowed_ratio(const PlanarOperator& op, const GridFunction& f, double x_halfwidth,
                      double spacing_scale) {
  const double denom = lp_norm(f, 1.5);
  if (denom == 0.0) throw std::invalid_argument("windowed_ratio: zero input");
  return windowed_l3(op, f, x_halfwidth, spacing_scale) / denom;
}

double improving_ratio(const PlanarOperator& op, const GridFunction& f,
                       const ImprovingOptions& opts) {
  if (!f.nonnegative()) throw std::invalid_argument("improving_ratio: input must be nonnegative");
  const double denom = lp_norm(f, 1.5);
  if (denom == 0.0) throw std::invalid_argument("improving_ratio: zero input");

  const auto& g = f.geom();
  double W = opts.initial_halfwidth;
  if (W <= 0.0) {
    W = 2.0 * std::max({std::abs(g.origin[0]), std::abs(g.origin[0] + g.spacing[0] * g.shape[0]),
                        std::abs(g.origin[1]), std::abs(g.origin[1] + g.spacing[1] * g.shape[1]),
                        1.0});
  }
  double prev = -1.0;
  for (int d = 0; d <= opts.max_doublings; ++d) {
    const double norm = windowed_l3(op, f, W, opts.spacing_scale);
    if (prev >= 0.0 && norm > 0.0 && std::abs(norm - prev) <= opts.stabilize_rel * norm)
      return norm / denom;
    prev = norm;
    W *= 2.0;
  }
  throw DiscretizationError("improving_ratio: L3 window failed to stabilize (operator may be unbounded)");
}

double improving_ratio_radon(const GridFunction& f, int n_angles, int n_offsets,
                             int line_samples) {
  if (!f.nonnegative())
    throw std::invalid_argument("improving_ratio_radon: input must be nonnegative");
  const double denom = lp_norm(f, 1.5);
  if (denom == 0.0) throw std::invalid_argument("improving_ratio_radon: zero input");
  return lp_norm(radon_transform(f, n_angles, n_offsets, line_samples), 3.0) / denom;
}

// ---------------------------------------------------------------------------
// Pairing identity
// ---------------------------------------------------------------------------

PairingResult pairing_check(const GridFunction& f1, const GridFunction& f2, int resolution) {
  require_dim2(f1, "pairing_check");
  require_dim2(f2, "pairing_check");
  if (!f1.nonnegative() || !f2.nonnegative())
    throw std::invalid_argument("pairing_check: inputs must be nonnegative");

  // f1 lives on the (y, s) plane, f2 on the (x, s) plane. The integrand
  // f1(y, t + xy/2) f2(x, t - xy/2) is supported in a box readable from the
  // two supports.
  const Box b1 = f1.geom().box();
  const Box b2 = f2.geom().box();
  const double ylo = b1.lo[0], yhi = b1.hi[0];
  const double xlo = b2.lo[0], xhi = b2.hi[0];
  const double half_xy = 0.5 * std::max({std::abs(xlo * ylo), std::abs(xlo * yhi),
                                         std::abs(xhi * ylo), std::abs(xhi * yhi)});
  const double tlo = std::min(b1.lo[1], b2.lo[1]) - half_xy;
  const double thi = std::max(b1.hi[1], b2.hi[1]) + half_xy;

  const std::int64_t n = resolution;
  const double dx = (xhi - xlo) / static_cast<double>(n);
  const double dyq = (yhi - ylo) / static_cast<double>(n);
  const double dt = (thi - tlo) / static_cast<double>(n);

  PairingResult out;
  out.lhs = dx * dyq * dt *
            parallel_sum(n * n * n, [&](std::int64_t li) {
              const std::int64_t it = li % n;
              const std::int64_t iy = (li / n) % n;
              const std::int64_t ix = li / (n * n);
              const double x = xlo + (ix + 0.5) * dx;
              const double y = ylo + (iy + 0.5) * dyq;
              const double t = tlo + (it + 0.5) * dt;
              const double v1 = f1.value2(y, t + 0.5 * x * y);
              if (v1 == 0.0) return 0.0;
              return v1 * f2.value2(x, t - 0.5 * x * y);
            });

  GridFunction tf1 = op_T(f1, f2.geom());
  out.rhs = f2.geom().cell_volume() *
            parallel_sum(f2.size(), [&](std::int64_t i) { return tf1[i] * f2[i]; });

  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.relative_error = scale == 0.0 ? 0.0 : std::abs(out.lhs - out.rhs) / scale;
  return out;
}

// ---------------------------------------------------------------------------
// L^{3/2}-L^3 certificate
// ---------------------------------------------------------------------------

L32L3Report l32l3_certificate(const HeightFamily& family,
                              const std::vector<std::vector<double>>& slices,
                              const std::vector<GridFunction>& test_bank,
                              const std::vector<double>& windows, double spacing_scale) {
  if (test_bank.empty()) throw std::invalid_argument("l32l3_certificate: empty test bank");
  if (windows.size() < 2) throw std::invalid_argument("l32l3_certificate: need >= 2 windows");
  for (size_t i = 1; i < windows.size(); ++i)
    if (!(windows[i] > windows[i - 1]))
      throw std::invalid_argument("l32l3_certificate: windows must be increasing");

  const int n = family.dim.n;
  std::vector<std::vector<double>> effective_slices = slices;
  if (n == 1 || effective_slices.empty()) effective_slices = {std::vector<double>{}};

  L32L3Report report;
  for (int k = 1; k <= n; ++k) {
    for (const auto& slice : effective_slices) {
      L32L3Entry entry;
      entry.k = k;
      entry.slice = slice;
      entry.windows = windows;
      PlanarOperator op = op_Tk(family, k, slice);
      for (double W : windows) {
        double best = 0.0;
        for (const auto& f : test_bank) best = std::max(best, windowed_ratio(op, f, W, spacing_scale));
        entry.max_ratio.push_back(best);
      }
      double log_growth = 0.0;
      int steps = 0;
      for (size_t i = 1; i < windows.size(); ++i) {
        if (entry.max_ratio[i - 1] <= 0.0) continue;
        const double per_doubling = std::log2(windows[i] / windows[i - 1]);
        log_growth += std::log2(entry.max_ratio[i] / entry.max_ratio[i - 1]) / per_doubling;
        ++steps;
      }
      entry.growth_exponent = steps > 0 ? log_growth / steps : 0.0;
      entry.growth_factor = std::exp2(entry.growth_exponent);
      entry.degenerate = entry.growth_factor >= 1.25;
      entry.empirical_constant = entry.max_ratio.back();
      report.any_degenerate = report.any_degenerate || entry.degenerate;
      if (!entry.degenerate)
        report.empirical_constant = std::max(report.empirical_constant, entry.empirical_constant);
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

std::vector<GridFunction> standard_test_bank(int cells, std::uint64_t seed) {
  const GridGeom geom = grid_geom_2d(-1.5, 1.5, -1.5, 1.5, cells, cells);
  std::vector<GridFunction> bank;

  bank.push_back(sample_function(geom, [](std::span<const double> p) {
    return p[0] * p[0] + p[1] * p[1] <= 1.0 ? 1.0 : 0.0;
  }));
  bank.push_back(sample_function(geom, [](std::span<const double> p) {
    return std::abs(p[0]) <= 1.0 && std::abs(p[1]) <= 1.0 ? 1.0 : 0.0;
  }));
  bank.push_back(sample_function(geom, [](std::span<const double> p) {
    return std::exp(-std::numbers::pi * (p[0] * p[0] + p[1] * p[1]));
  }));
  bank.push_back(sample_function(geom, [](std::span<const double> p) {
    return std::abs(p[0]) <= 1.4 && std::abs(p[1]) <= 0.2 ? 1.0 : 0.0;
  }));
  bank.push_back(sample_function(geom, [](std::span<const double> p) {
    return std::abs(p[0]) <= 1.0 && std::abs(p[1] - 0.8 * p[0] * p[0]) <= 0.3 ? 1.0 : 0.0;
  }));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-0.8, 0.8);
  std::uniform_real_distribution<double> width(0.15, 0.5);
  struct Blob {
    double cx, cy, w;
  };
  std::vector<Blob> blobs;
  for (int i = 0; i < 3; ++i) blobs.push_back({pos(rng), pos(rng), width(rng)});
  bank.push_back(sample_function(geom, [blobs](std::span<const double> p) {
    double v = 0.0;
    for (const auto& blob : blobs) {
      const double dx = (p[0] - blob.cx) / blob.w;
      const double dy = (p[1] - blob.cy) / blob.w;
      v += std::exp(-(dx * dx + dy * dy));
    }
    return v;
  }));
  return bank;
}

}  // namespace hlw
