#pragma once

#include "sosaf/geometry.hpp"

#include <iosfwd>
#include <vector>

namespace sosaf {

/// Straight-ray travel time between an element and a field point through the
/// layered medium: the integral of 1/c along the segment, in closed form.
double true_delay_straight(const Point &element, const Point &point,
                           const LayeredMedium &medium);

/// Travel time assuming a uniform speed c0. Coincident points give 0.
double geometric_delay(const Point &element, const Point &point, double c0);

/// Snell's-law ray through the layer interface, solved independently in the
/// x-z and y-z planes. For a convex array the layer traversal below the
/// element is d - z' rather than d.
struct RefractionSolution {
  double theta1_x = 0.0; ///< incidence angle in the layer, x-z plane (rad)
  double theta2_x = 0.0; ///< transmitted angle in the background, x-z plane
  double theta1_y = 0.0;
  double theta2_y = 0.0;
  double tau_layer = 0.0;      ///< time spent in the layer (s)
  double tau_background = 0.0; ///< time spent in the background (s)
  double tau_uniform = 0.0;    ///< straight path at background speed (s)
  double tau_extra = 0.0;      ///< tau_layer + tau_background - tau_uniform
};

RefractionSolution refracted_delay(const Point3 &element, const Point3 &point,
                                   const LayeredMedium &medium);

/// Ratio of the spread of refracted excess delay across every array element
/// to its spread across the elevational extent of the element nearest the
/// point. +infinity when the elevational spread vanishes.
double transverse_vs_elevational_error(const ArrayGeometry &array, const Point &point,
                                       const LayeredMedium &medium,
                                       double elevation_extent);

enum class DelayModel { true_layered, uniform, refracted };

/// Per-element arrival times at one field point over an aperture.
struct DelayProfile {
  Point point;
  DelayModel model = DelayModel::true_layered;
  double assumed_sos = 0.0; ///< c0 for the uniform model, unused otherwise
  Aperture aperture;
  std::vector<double> times;
};

DelayProfile delay_profile(const ArrayGeometry &array, const Point &point,
                           const LayeredMedium &medium, const Aperture &aperture,
                           DelayModel model, double assumed_sos = 0.0);

/// CSV with header `element_index,x,z,tau_seconds`.
void write_delay_csv(std::ostream &out, const ArrayGeometry &array,
                     const DelayProfile &profile);

} // namespace sosaf
