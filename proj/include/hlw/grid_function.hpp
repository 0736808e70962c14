#pragma once

// Real samples on a uniform rectangular grid: the discrete stand-in for the
// functions f_j, u, and Radon inputs. Samples live at cell centers; the
// interpolant is multilinear between centers and zero outside.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hlw/voxel.hpp"

namespace hlw {

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridGeom geom);

  const GridGeom& geom() const { return geom_; }
  int dim() const { return geom_.dim(); }
  std::int64_t size() const { return static_cast<std::int64_t>(samples_.size()); }

  double& operator[](std::int64_t li) { return samples_[li]; }
  double operator[](std::int64_t li) const { return samples_[li]; }
  std::vector<double>& samples() { return samples_; }
  const std::vector<double>& samples() const { return samples_; }

  // Multilinear interpolation of the center samples; zero outside the grid.
  double value(std::span<const double> p) const;
  double value2(double x, double y) const;  // dim-2 fast path

  // Linear interpolation along the last axis at fixed leading index; used by
  // the planar averaging kernels where quadrature nodes sit on sample
  // columns.
  double column_value(std::int64_t leading, double u) const;

  double integral() const;
  double abs_max() const;
  bool nonnegative() const;

 private:
  GridGeom geom_;
  std::vector<double> samples_;
};

GridFunction sample_function(const GridGeom& geom,
                             const std::function<double(std::span<const double>)>& fn);
GridGeom grid_geom_2d(double xlo, double xhi, double ylo, double yhi, std::int64_t nx,
                      std::int64_t ny);

// (sum |f|^p cellvol)^{1/p}; requires p >= 1.
double lp_norm(const GridFunction& f, double p);

// CSV I/O: header "# dim shape... origin... spacing...", one sample per line
// in row-major order.
std::string grid_function_to_csv(const GridFunction& f);
GridFunction grid_function_from_csv(const std::string& text);

}  // namespace hlw
