#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace sosaf {

/// Position in the imaging plane. Origin at the center of the probe face,
/// x tangent to it, z positive into the body. Meters.
struct Point {
  double x = 0.0;
  double z = 0.0;
};

/// Position with elevation coordinate y. Meters.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Point &a, const Point &b);
double distance(const Point3 &a, const Point3 &b);

/// Radius sentinel for a linear (flat) array.
inline constexpr double kFlatRadius = std::numeric_limits<double>::infinity();

class ArrayGeometry {
public:
  ArrayGeometry() = default;

  std::size_t size() const { return elements_.size(); }
  double pitch() const { return pitch_; }
  double radius() const { return radius_; }
  bool is_flat() const { return radius_ == kFlatRadius; }
  double center_frequency() const { return center_frequency_; }

  std::span<const Point> elements() const { return elements_; }
  const Point &element(std::size_t i) const { return elements_.at(i); }
  double max_element_z() const;

  friend ArrayGeometry build_curvilinear_array(std::size_t, double, double, double);

private:
  std::vector<Point> elements_;
  double pitch_ = 0.0;
  double radius_ = kFlatRadius;
  double center_frequency_ = 0.0;
};

/// Convex array with elements spaced by `pitch` of arc on a circle of
/// `radius` whose apex touches the origin. radius == kFlatRadius gives a
/// linear array on z = 0.
ArrayGeometry build_curvilinear_array(std::size_t num_elements, double pitch,
                                      double radius, double f0);

/// Single flat layer of thickness d and speed c_layer over a background.
/// For d > 0 the layer fills z <= d (including the gap above the tangent
/// plane for a convex probe) and the background fills z > d. d == 0 means no
/// layer at all.
class LayeredMedium {
public:
  LayeredMedium() = default;
  LayeredMedium(double thickness, double layer_sos, double background_sos);

  static LayeredMedium uniform(double sos) { return {0.0, sos, sos}; }

  double thickness() const { return thickness_; }
  double layer_sos() const { return layer_sos_; }
  double background_sos() const { return background_sos_; }

  double sos_at(double z) const {
    return thickness_ > 0.0 && z <= thickness_ ? layer_sos_ : background_sos_;
  }
  bool is_uniform() const { return thickness_ == 0.0 || layer_sos_ == background_sos_; }
  double min_sos() const;
  double max_sos() const;

private:
  double thickness_ = 0.0;
  double layer_sos_ = 1540.0;
  double background_sos_ = 1540.0;
};

enum class GridLayout {
  cartesian,
  /// Scan lines fanning from the array's center of curvature; the lateral
  /// axis is steering angle (rad), the axial axis is range from the face.
  polar,
};

/// Regular pixel grid. Pixel (ix, iz) sits at (x_min + ix*dx, z_min + iz*dz)
/// in layout coordinates.
struct ImagingGrid {
  double x_min = 0.0;
  double x_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
  double dx = 0.0;
  double dz = 0.0;
  GridLayout layout = GridLayout::cartesian;
  /// Apex radius used by the polar layout.
  double polar_radius = 0.0;

  static ImagingGrid cartesian(double x_min, double x_max, double dx,
                               double z_min, double z_max, double dz);
  /// `num_lines` scan lines evenly spanning +-sector/2 about the axis.
  static ImagingGrid polar(std::size_t num_lines, double sector,
                           double r_min, double r_max, double dr, double radius);

  std::size_t nx() const;
  std::size_t nz() const;
  double x_at(std::size_t ix) const { return x_min + static_cast<double>(ix) * dx; }
  double z_at(std::size_t iz) const { return z_min + static_cast<double>(iz) * dz; }

  /// Physical position of a pixel. `axial_scale` stretches the axial
  /// coordinate (range rescaling across a speed-of-sound sweep).
  Point position(std::size_t ix, std::size_t iz, double axial_scale = 1.0) const;

  /// Lateral and axial pixel spacing in meters (polar: arc length at mid-range).
  double spacing_x() const;
  double spacing_z() const { return dz; }

  void validate() const;
};

enum class ApertureConvention {
  /// Element n active iff 2(z - z_n) / |x - x_n| > F#.
  inequality,
  /// Element n active iff (z - z_n) / (2 |x - x_n|) > F#.
  conventional,
};

/// Contiguous inclusive run of element indices [first, last].
struct Aperture {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first + 1; }
  bool contains(std::size_t i) const { return i >= first && i <= last; }
};

bool element_satisfies_aperture(const Point &point, const Point &element,
                                double f_number, ApertureConvention convention);

/// Active receive elements for a field point: the largest contiguous run of
/// elements satisfying the aperture inequality that contains the element
/// laterally nearest to the point (which is always included).
Aperture active_aperture(const Point &point, const ArrayGeometry &array,
                         double f_number,
                         ApertureConvention convention = ApertureConvention::inequality);

ApertureConvention parse_aperture_convention(const std::string &name);
std::string to_string(ApertureConvention convention);

} // namespace sosaf
