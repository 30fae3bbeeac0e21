#include "sosaf/geometry.hpp"

#include "sosaf/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sosaf {

double distance(const Point &a, const Point &b) { return std::hypot(a.x - b.x, a.z - b.z); }

double distance(const Point3 &a, const Point3 &b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

double ArrayGeometry::max_element_z() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto &e : elements_)
    m = std::max(m, e.z);
  return m;
}

ArrayGeometry build_curvilinear_array(std::size_t num_elements, double pitch,
                                      double radius, double f0) {
  if (num_elements == 0)
    throw Error(ErrorKind::invalid_geometry, "array needs at least one element");
  if (!(pitch > 0.0) || !std::isfinite(pitch))
    throw Error(ErrorKind::invalid_geometry, "pitch must be positive");
  if (!(f0 > 0.0) || !std::isfinite(f0))
    throw Error(ErrorKind::invalid_geometry, "center frequency must be positive");
  if (!(radius > 0.0))
    throw Error(ErrorKind::invalid_geometry, "radius must be positive (or flat)");

  const bool flat = radius == kFlatRadius;
  if (!flat && static_cast<double>(num_elements) * pitch >= std::numbers::pi * radius)
    throw Error(ErrorKind::invalid_geometry, "array arc exceeds half a circle");

  ArrayGeometry g;
  g.pitch_ = pitch;
  g.radius_ = radius;
  g.center_frequency_ = f0;
  g.elements_.resize(num_elements);
  const double center = (static_cast<double>(num_elements) - 1.0) / 2.0;
  for (std::size_t i = 0; i < num_elements; ++i) {
    const double offset = static_cast<double>(i) - center;
    if (flat) {
      g.elements_[i] = {offset * pitch, 0.0};
    } else {
      const double theta = offset * pitch / radius;
      g.elements_[i] = {radius * std::sin(theta), -radius * (1.0 - std::cos(theta))};
    }
  }
  // Enforce exact mirror symmetry; sin/cos of +-theta already agree, but the
  // offsets of an even-sized array are only symmetric up to rounding.
  for (std::size_t i = 0; i < num_elements / 2; ++i) {
    auto &lo = g.elements_[i];
    auto &hi = g.elements_[num_elements - 1 - i];
    hi.x = -lo.x;
    hi.z = lo.z;
  }
  if (num_elements % 2 == 1)
    g.elements_[num_elements / 2] = {0.0, 0.0};
  return g;
}

LayeredMedium::LayeredMedium(double thickness, double layer_sos, double background_sos)
    : thickness_(thickness), layer_sos_(layer_sos), background_sos_(background_sos) {
  if (!(thickness >= 0.0) || !std::isfinite(thickness))
    throw Error(ErrorKind::invalid_geometry, "layer thickness must be >= 0");
  if (!(layer_sos > 0.0) || !(background_sos > 0.0) || !std::isfinite(layer_sos) ||
      !std::isfinite(background_sos))
    throw Error(ErrorKind::invalid_sos, "speeds of sound must be positive");
}

double LayeredMedium::min_sos() const {
  return thickness_ > 0.0 ? std::min(layer_sos_, background_sos_) : background_sos_;
}

double LayeredMedium::max_sos() const {
  return thickness_ > 0.0 ? std::max(layer_sos_, background_sos_) : background_sos_;
}

ImagingGrid ImagingGrid::cartesian(double x_min, double x_max, double dx, double z_min,
                                   double z_max, double dz) {
  ImagingGrid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.dx = dx;
  g.z_min = z_min;
  g.z_max = z_max;
  g.dz = dz;
  g.validate();
  return g;
}

ImagingGrid ImagingGrid::polar(std::size_t num_lines, double sector, double r_min,
                               double r_max, double dr, double radius) {
  if (num_lines < 2 || !(sector > 0.0) || sector >= std::numbers::pi)
    throw Error(ErrorKind::invalid_geometry, "polar grid needs >= 2 lines and 0 < sector < pi");
  if (!(radius > 0.0) || radius == kFlatRadius)
    throw Error(ErrorKind::invalid_geometry, "polar grid needs a finite apex radius");
  ImagingGrid g;
  g.layout = GridLayout::polar;
  g.polar_radius = radius;
  g.x_min = -sector / 2.0;
  g.x_max = sector / 2.0;
  g.dx = sector / static_cast<double>(num_lines - 1);
  g.z_min = r_min;
  g.z_max = r_max;
  g.dz = dr;
  g.validate();
  return g;
}

std::size_t ImagingGrid::nx() const {
  return static_cast<std::size_t>(std::floor((x_max - x_min) / dx + 1e-9)) + 1;
}

std::size_t ImagingGrid::nz() const {
  return static_cast<std::size_t>(std::floor((z_max - z_min) / dz + 1e-9)) + 1;
}

Point ImagingGrid::position(std::size_t ix, std::size_t iz, double axial_scale) const {
  const double lateral = x_at(ix);
  const double axial = z_at(iz) * axial_scale;
  if (layout == GridLayout::cartesian)
    return {lateral, axial};
  const double rho = polar_radius + axial;
  return {rho * std::sin(lateral), rho * std::cos(lateral) - polar_radius};
}

double ImagingGrid::spacing_x() const {
  if (layout == GridLayout::cartesian)
    return dx;
  return dx * (polar_radius + 0.5 * (z_min + z_max));
}

void ImagingGrid::validate() const {
  if (!(dx > 0.0) || !(dz > 0.0))
    throw Error(ErrorKind::invalid_geometry, "grid spacings must be positive");
  if (!(x_max >= x_min) || !(z_max >= z_min))
    throw Error(ErrorKind::invalid_geometry, "grid extents must be nonempty");
  if (layout == GridLayout::cartesian) {
    if (!(z_min > 0.0))
      throw Error(ErrorKind::invalid_geometry, "grid points must lie below the probe face (z > 0)");
  } else {
    const double edge = std::max(std::abs(x_min), std::abs(x_max));
    if (!(polar_radius * (1.0 / std::cos(edge) - 1.0) < z_min) || !(z_min > 0.0))
      throw Error(ErrorKind::invalid_geometry, "polar grid points must lie below z = 0");
  }
}

bool element_satisfies_aperture(const Point &point, const Point &element, double f_number,
                                ApertureConvention convention) {
  const double lateral = std::abs(point.x - element.x);
  if (lateral == 0.0)
    return true;
  const double axial = point.z - element.z;
  if (convention == ApertureConvention::inequality)
    return 2.0 * axial / lateral > f_number;
  return axial / (2.0 * lateral) > f_number;
}

Aperture active_aperture(const Point &point, const ArrayGeometry &array, double f_number,
                         ApertureConvention convention) {
  if (array.size() == 0)
    throw Error(ErrorKind::degenerate_aperture, "empty array");
  if (!(f_number > 0.0))
    throw Error(ErrorKind::invalid_argument, "f-number must be positive");
  if (!(point.z > array.max_element_z()))
    throw Error(ErrorKind::degenerate_aperture, "field point must lie below every element");

  const auto elements = array.elements();
  std::size_t nearest = 0;
  double best = std::abs(point.x - elements[0].x);
  for (std::size_t i = 1; i < elements.size(); ++i) {
    const double d = std::abs(point.x - elements[i].x);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }

  Aperture ap{nearest, nearest};
  while (ap.first > 0 &&
         element_satisfies_aperture(point, elements[ap.first - 1], f_number, convention))
    --ap.first;
  while (ap.last + 1 < elements.size() &&
         element_satisfies_aperture(point, elements[ap.last + 1], f_number, convention))
    ++ap.last;
  return ap;
}

ApertureConvention parse_aperture_convention(const std::string &name) {
  if (name == "inequality")
    return ApertureConvention::inequality;
  if (name == "conventional")
    return ApertureConvention::conventional;
  throw Error(ErrorKind::configuration, "unknown aperture convention '" + name + "'");
}

std::string to_string(ApertureConvention convention) {
  return convention == ApertureConvention::inequality ? "inequality" : "conventional";
}

} // namespace sosaf
