#include "hlw/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace hlw {

namespace {

void check_dim(const HPoint& p, HDim dim, const char* who) {
  if (static_cast<int>(p.x.size()) != dim.horizontal())
    throw std::invalid_argument(std::string(who) + ": horizontal length " +
                                std::to_string(p.x.size()) + " does not match 2n = " +
                                std::to_string(dim.horizontal()));
}

void check_index(int j, HDim dim, const char* who) {
  if (j < 1 || j > dim.horizontal())
    throw std::invalid_argument(std::string(who) + ": index j = " + std::to_string(j) +
                                " out of range 1.." + std::to_string(dim.horizontal()));
}

}  // namespace

HPoint identity_point(HDim dim) {
  return HPoint{std::vector<double>(dim.horizontal(), 0.0), 0.0};
}

HPoint hpoint_from_coords(std::span<const double> coords) {
  if (coords.size() < 3 || coords.size() % 2 == 0)
    throw std::invalid_argument("hpoint_from_coords: need 2n+1 coordinates");
  HPoint p;
  p.x.assign(coords.begin(), coords.end() - 1);
  p.t = coords.back();
  return p;
}

void hpoint_to_coords(const HPoint& p, std::span<double> out) {
  for (size_t i = 0; i < p.x.size(); ++i) out[i] = p.x[i];
  out[p.x.size()] = p.t;
}

HPoint group_product(const HPoint& p, const HPoint& q, HDim dim) {
  check_dim(p, dim, "group_product");
  check_dim(q, dim, "group_product");
  const int n = dim.n;
  HPoint out;
  out.x.resize(2 * n);
  for (int i = 0; i < 2 * n; ++i) out.x[i] = p.x[i] + q.x[i];
  double twist = 0.0;
  for (int j = 0; j < n; ++j) twist += p.x[j] * q.x[n + j] - p.x[n + j] * q.x[j];
  out.t = p.t + q.t + 0.5 * twist;
  return out;
}

HPoint group_inverse(const HPoint& p) {
  HPoint out = p;
  for (double& v : out.x) v = -v;
  out.t = -out.t;
  return out;
}

double koranyi_norm(const HPoint& p) {
  double s = 0.0;
  for (double v : p.x) s += v * v;
  return std::pow(s * s + 16.0 * p.t * p.t, 0.25);
}

double koranyi_distance(const HPoint& p, const HPoint& q, HDim dim) {
  return koranyi_norm(group_product(group_inverse(q), p, dim));
}

HPoint dilate(const HPoint& p, double r, HDim dim) {
  check_dim(p, dim, "dilate");
  if (!(r > 0.0)) throw std::invalid_argument("dilate: r must be positive");
  HPoint out;
  out.x.resize(p.x.size());
  for (size_t i = 0; i < p.x.size(); ++i) out.x[i] = r * p.x[i];
  out.t = r * r * p.t;
  return out;
}

PlanePoint vertical_projection(const HPoint& p, int j, HDim dim) {
  check_dim(p, dim, "vertical_projection");
  check_index(j, dim, "vertical_projection");
  const int n = dim.n;
  PlanePoint w;
  w.coords.resize(2 * n);
  int out = 0;
  for (int i = 1; i <= 2 * n; ++i)
    if (i != j) w.coords[out++] = p.x[i - 1];
  if (j <= n)
    w.coords[out] = p.t + 0.5 * p.x[j - 1] * p.x[n + j - 1];
  else
    w.coords[out] = p.t - 0.5 * p.x[j - n - 1] * p.x[j - 1];
  return w;
}

HPoint embed_plane_point(const PlanePoint& w, int j, HDim dim) {
  check_index(j, dim, "embed_plane_point");
  if (static_cast<int>(w.coords.size()) != dim.horizontal())
    throw std::invalid_argument("embed_plane_point: plane point has wrong length");
  HPoint p;
  p.x.assign(dim.horizontal(), 0.0);
  int in = 0;
  for (int i = 1; i <= dim.horizontal(); ++i)
    if (i != j) p.x[i - 1] = w.coords[in++];
  p.t = w.coords.back();
  return p;
}

HeightFamily standard_height_family(HDim dim) {
  std::vector<double> b(dim.horizontal());
  for (int k = 0; k < dim.n; ++k) {
    b[k] = 0.5;
    b[dim.n + k] = -0.5;
  }
  return poly_height_family(constant_poly_spec(dim, std::move(b)));
}

PlanePoint rho_projection(const HPoint& p, int j, const HeightFamily& family) {
  check_dim(p, family.dim, "rho_projection");
  check_index(j, family.dim, "rho_projection");
  const int m = family.dim.horizontal();
  PlanePoint w;
  w.coords.resize(m);
  int out = 0;
  for (int i = 1; i <= m; ++i)
    if (i != j) w.coords[out++] = p.x[i - 1];
  w.coords[out] = p.t + family.h[j - 1](p.x);
  return w;
}

PolyHeightSpec constant_poly_spec(HDim dim, std::vector<double> b,
                                  std::vector<std::array<double, 5>> c) {
  PolyHeightSpec spec;
  spec.dim = dim;
  spec.b = std::move(b);
  spec.c.resize(dim.horizontal());
  for (int j = 0; j < dim.horizontal(); ++j) {
    std::array<double, 5> row{};
    if (!c.empty()) row = c.at(j);
    for (int a = 0; a < 5; ++a) {
      double value = row[a];
      spec.c[j][a] = [value](std::span<const double>) { return value; };
    }
  }
  return spec;
}

HeightFamily poly_height_family(const PolyHeightSpec& spec) {
  const HDim dim = spec.dim;
  const int n = dim.n;
  const int m = dim.horizontal();
  if (static_cast<int>(spec.b.size()) != m)
    throw std::invalid_argument("poly_height_family: b must have 2n entries");
  if (static_cast<int>(spec.c.size()) != m)
    throw std::invalid_argument("poly_height_family: c must have 2n rows");
  for (int j = 0; j < m; ++j)
    for (int a = 0; a < 5; ++a)
      if (!spec.c[j][a]) throw std::invalid_argument("poly_height_family: missing coefficient");

  HeightFamily family;
  family.dim = dim;
  family.h.resize(m);
  family.dh_own.resize(m);
  family.degeneracy_flags.resize(n);
  for (int k = 0; k < n; ++k) family.degeneracy_flags[k] = spec.b[k] == spec.b[n + k];

  for (int j1 = 1; j1 <= m; ++j1) {
    // h_j is a polynomial in the pair (x_k, x_{n+k}) with k = j or j-n.
    const int k = (j1 <= n) ? j1 : j1 - n;
    const int ia = k - 1;       // index of x_k
    const int ib = n + k - 1;   // index of x_{n+k}
    const double bj = spec.b[j1 - 1];
    const auto& coeffs = spec.c[j1 - 1];

    auto gather_hat = [n, ia, ib](std::span<const double> x) {
      std::vector<double> hat;
      hat.reserve(x.size() - 2);
      for (int i = 0; i < static_cast<int>(x.size()); ++i)
        if (i != ia && i != ib) hat.push_back(x[i]);
      return hat;
    };

    family.h[j1 - 1] = [=](std::span<const double> x) {
      std::vector<double> hat = gather_hat(x);
      const double u = x[ia], v = x[ib];
      double value = bj * u * v;
      for (int a = 0; a < 5; ++a) {
        const auto& mi = kPolyMultiIndices[a];
        value += coeffs[a](hat) * std::pow(u, mi[0]) * std::pow(v, mi[1]);
      }
      return value;
    };

    // d h_j / d x_j: for j <= n the own coordinate is x_k = u, otherwise
    // x_{n+k} = v.
    const bool own_is_first = (j1 <= n);
    family.dh_own[j1 - 1] = [=](std::span<const double> x) {
      std::vector<double> hat = gather_hat(x);
      const double u = x[ia], v = x[ib];
      double value = bj * (own_is_first ? v : u);
      for (int a = 0; a < 5; ++a) {
        const auto& mi = kPolyMultiIndices[a];
        if (own_is_first) {
          if (mi[0] > 0)
            value += coeffs[a](hat) * mi[0] * std::pow(u, mi[0] - 1) * std::pow(v, mi[1]);
        } else {
          if (mi[1] > 0)
            value += coeffs[a](hat) * mi[1] * std::pow(u, mi[0]) * std::pow(v, mi[1] - 1);
        }
      }
      return value;
    };
  }
  return family;
}

RankCertificate rank_certificate(const HeightFamily& family, int j, const HPoint& p) {
  check_dim(p, family.dim, "rank_certificate");
  check_index(j, family.dim, "rank_certificate");
  RankCertificate cert;
  if (family.has_gradients() && family.dh_own[j - 1]) {
    double d = family.dh_own[j - 1](p.x);
    cert.analytic = 1.0 + d * d;
  }
  // Central difference in the deleted coordinate; step scales with the
  // coordinate magnitude to balance truncation and rounding.
  std::vector<double> xs(p.x.begin(), p.x.end());
  const double h = 1e-5 * (1.0 + std::abs(xs[j - 1]));
  const double x0 = xs[j - 1];
  xs[j - 1] = x0 + h;
  double hi = family.h[j - 1](xs);
  xs[j - 1] = x0 - h;
  double lo = family.h[j - 1](xs);
  double d = (hi - lo) / (2.0 * h);
  cert.finite_difference = 1.0 + d * d;
  return cert;
}

PlanePoint AffinePlaneMap::apply(const PlanePoint& w) const {
  PlanePoint out;
  out.coords.resize(dim);
  for (int r = 0; r < dim; ++r) {
    double v = offset[r];
    const double* row = linear.data() + static_cast<size_t>(r) * dim;
    for (int col = 0; col < dim; ++col) v += row[col] * w.coords[col];
    out.coords[r] = v;
  }
  return out;
}

AffinePlaneMap AffinePlaneMap::compose(const AffinePlaneMap& inner) const {
  AffinePlaneMap out;
  out.dim = dim;
  out.linear.assign(static_cast<size_t>(dim) * dim, 0.0);
  out.offset = offset;
  for (int r = 0; r < dim; ++r) {
    const double* lrow = linear.data() + static_cast<size_t>(r) * dim;
    double* orow = out.linear.data() + static_cast<size_t>(r) * dim;
    for (int k = 0; k < dim; ++k) {
      const double lv = lrow[k];
      if (lv == 0.0) continue;
      const double* irow = inner.linear.data() + static_cast<size_t>(k) * dim;
      for (int col = 0; col < dim; ++col) orow[col] += lv * irow[col];
      out.offset[r] += lv * inner.offset[k];
    }
  }
  return out;
}

AffinePlaneMap AffinePlaneMap::inverse() const {
  // Gauss-Jordan on [L | I]; the maps here are unit-determinant shears, so
  // conditioning is not a concern at these sizes.
  AffinePlaneMap out = identity_plane_map(dim);
  std::vector<double> a = linear;
  auto at = [this](std::vector<double>& m, int r, int c) -> double& {
    return m[static_cast<size_t>(r) * dim + c];
  };
  for (int col = 0; col < dim; ++col) {
    int pivot = col;
    for (int r = col + 1; r < dim; ++r)
      if (std::abs(at(a, r, col)) > std::abs(at(a, pivot, col))) pivot = r;
    if (at(a, pivot, col) == 0.0) throw std::invalid_argument("AffinePlaneMap: singular linear part");
    if (pivot != col)
      for (int c2 = 0; c2 < dim; ++c2) {
        std::swap(at(a, pivot, c2), at(a, col, c2));
        std::swap(at(out.linear, pivot, c2), at(out.linear, col, c2));
      }
    const double piv = at(a, col, col);
    for (int c2 = 0; c2 < dim; ++c2) {
      at(a, col, c2) /= piv;
      at(out.linear, col, c2) /= piv;
    }
    for (int r = 0; r < dim; ++r) {
      if (r == col) continue;
      const double f = at(a, r, col);
      if (f == 0.0) continue;
      for (int c2 = 0; c2 < dim; ++c2) {
        at(a, r, c2) -= f * at(a, col, c2);
        at(out.linear, r, c2) -= f * at(out.linear, col, c2);
      }
    }
  }
  // offset' = -L^{-1} offset
  out.offset.assign(dim, 0.0);
  for (int r = 0; r < dim; ++r) {
    double v = 0.0;
    for (int c = 0; c < dim; ++c) v += out.linear[static_cast<size_t>(r) * dim + c] * offset[c];
    out.offset[r] = -v;
  }
  return out;
}

double AffinePlaneMap::linear_determinant() const {
  // Gaussian elimination with partial pivoting on a copy; dim <= 2n is tiny.
  std::vector<double> a = linear;
  double det = 1.0;
  for (int col = 0; col < dim; ++col) {
    int pivot = col;
    for (int r = col + 1; r < dim; ++r)
      if (std::abs(a[static_cast<size_t>(r) * dim + col]) >
          std::abs(a[static_cast<size_t>(pivot) * dim + col]))
        pivot = r;
    if (a[static_cast<size_t>(pivot) * dim + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (int c2 = 0; c2 < dim; ++c2)
        std::swap(a[static_cast<size_t>(pivot) * dim + c2], a[static_cast<size_t>(col) * dim + c2]);
      det = -det;
    }
    const double piv = a[static_cast<size_t>(col) * dim + col];
    det *= piv;
    for (int r = col + 1; r < dim; ++r) {
      const double f = a[static_cast<size_t>(r) * dim + col] / piv;
      if (f == 0.0) continue;
      for (int c2 = col; c2 < dim; ++c2)
        a[static_cast<size_t>(r) * dim + c2] -= f * a[static_cast<size_t>(col) * dim + c2];
    }
  }
  return det;
}

AffinePlaneMap identity_plane_map(int dim) {
  AffinePlaneMap map;
  map.dim = dim;
  map.linear.assign(static_cast<size_t>(dim) * dim, 0.0);
  map.offset.assign(dim, 0.0);
  for (int i = 0; i < dim; ++i) map.linear[static_cast<size_t>(i) * dim + i] = 1.0;
  return map;
}

AffinePlaneMap translation_action_on_plane(const HPoint& p, int j, HDim dim) {
  check_dim(p, dim, "translation_action_on_plane");
  check_index(j, dim, "translation_action_on_plane");
  const int n = dim.n;
  const int m = 2 * n;
  AffinePlaneMap map = identity_plane_map(m);

  // Plane coordinate slots: surviving horizontal indices ascending, then t.
  // slot_of[i] = slot of horizontal coordinate x_i (1-based i != j).
  std::vector<int> slot_of(m + 1, -1);
  {
    int out = 0;
    for (int i = 1; i <= m; ++i)
      if (i != j) slot_of[i] = out++;
  }
  const int t_slot = m - 1;

  // Horizontal offsets.
  for (int i = 1; i <= m; ++i)
    if (i != j) map.offset[slot_of[i]] = p.x[i - 1];

  // t-row of the shear: coefficients found by expanding pi_j(p.q) and
  // rewriting in terms of pi_j(q). The partner coordinate of the deleted
  // x_j carries the full +/- a coefficient, all other pairs contribute the
  // half-twist terms.
  double* trow = map.linear.data() + static_cast<size_t>(t_slot) * m;
  double t_off;
  if (j <= n) {
    const int partner = n + j;
    for (int i = 1; i <= n; ++i) {
      if (i == j) continue;
      trow[slot_of[i]] = -0.5 * p.x[n + i - 1];
      trow[slot_of[n + i]] = 0.5 * p.x[i - 1];
    }
    trow[slot_of[partner]] = p.x[j - 1];
    t_off = p.t + 0.5 * p.x[j - 1] * p.x[n + j - 1];
  } else {
    const int k = j - n;
    const int partner = k;
    for (int i = 1; i <= n; ++i) {
      if (i == k) continue;
      trow[slot_of[i]] = -0.5 * p.x[n + i - 1];
      trow[slot_of[n + i]] = 0.5 * p.x[i - 1];
    }
    trow[slot_of[partner]] = -p.x[j - 1];
    t_off = p.t - 0.5 * p.x[k - 1] * p.x[j - 1];
  }
  map.offset[t_slot] = t_off;
  return map;
}

}  // namespace hlw
