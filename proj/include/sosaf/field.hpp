#pragma once

#include <cstddef>
#include <vector>

namespace sosaf {

/// Row-major 2D scalar field: rows are axial samples (z), columns lateral (x).
struct Field2D {
  std::size_t nx = 0;
  std::size_t nz = 0;
  std::vector<double> values;

  Field2D() = default;
  Field2D(std::size_t nx_, std::size_t nz_, double fill = 0.0)
      : nx(nx_), nz(nz_), values(nx_ * nz_, fill) {}

  double &operator()(std::size_t ix, std::size_t iz) { return values[iz * nx + ix]; }
  double operator()(std::size_t ix, std::size_t iz) const { return values[iz * nx + ix]; }

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

} // namespace sosaf
