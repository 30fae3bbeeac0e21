#include "sosaf/delay.hpp"

#include "sosaf/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace sosaf {

double true_delay_straight(const Point &element, const Point &point,
                           const LayeredMedium &medium) {
  const double length = distance(element, point);
  if (length == 0.0)
    throw Error(ErrorKind::zero_length, "field point coincides with the element");
  if (!(point.z > element.z))
    throw Error(ErrorKind::invalid_geometry, "field point must lie below the element");

  const double d = medium.thickness();
  if (d == 0.0 || element.z >= d)
    return length / medium.background_sos();
  if (point.z <= d)
    return length / medium.layer_sos();
  const double in_layer = (d - element.z) / (point.z - element.z);
  return length * in_layer / medium.layer_sos() +
         length * (1.0 - in_layer) / medium.background_sos();
}

double geometric_delay(const Point &element, const Point &point, double c0) {
  if (!(c0 > 0.0) || !std::isfinite(c0))
    throw Error(ErrorKind::invalid_sos, "assumed speed of sound must be positive");
  return distance(element, point) / c0;
}

namespace {

struct PlaneSolution {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

// Solves offset = h1 tan(t1) + h2 tan(t2) with sin(t1)/c1 = sin(t2)/c2.
// The right side increases monotonically in t1 over the admissible range,
// so bisection always brackets the unique root.
PlaneSolution solve_plane(double offset, double h1, double h2, double c1, double c2) {
  if (offset == 0.0)
    return {};
  const double ratio = c2 / c1;
  const double limit = ratio > 1.0 ? std::asin(1.0 / ratio) : std::numbers::pi / 2.0;

  auto transmitted = [&](double t1) {
    return std::asin(std::clamp(ratio * std::sin(t1), -1.0, 1.0));
  };
  auto residual = [&](double t1) {
    return h1 * std::tan(t1) + h2 * std::tan(transmitted(t1)) - offset;
  };

  double lo = -limit;
  double hi = limit;
  // Shrink the open bracket until both ends are finite and straddle the root.
  double eps = 1e-6;
  while (!(residual(-limit + eps) < 0.0 && residual(limit - eps) > 0.0)) {
    eps *= 0.5;
    if (eps < 1e-300)
      throw Error(ErrorKind::refraction_unsolvable, "no root in the angle bracket");
  }
  lo = -limit + eps;
  hi = limit - eps;

  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    if (residual(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double rlo = std::abs(residual(lo));
  const double rhi = std::abs(residual(hi));
  const double t1 = rlo <= rhi ? lo : hi;
  if (std::min(rlo, rhi) >= 1e-12)
    throw Error(ErrorKind::refraction_unsolvable, "Snell system did not converge");
  return {t1, transmitted(t1)};
}

} // namespace

RefractionSolution refracted_delay(const Point3 &element, const Point3 &point,
                                   const LayeredMedium &medium) {
  const double d = medium.thickness();
  if (!(point.z > d && d > element.z))
    throw Error(ErrorKind::invalid_geometry,
                "refraction requires the element above and the point below the interface");
  const double c1 = medium.layer_sos();
  const double c2 = medium.background_sos();
  const double h1 = d - element.z;
  const double h2 = point.z - d;

  const auto x_plane = solve_plane(point.x - element.x, h1, h2, c1, c2);
  const auto y_plane = solve_plane(point.y - element.y, h1, h2, c1, c2);

  RefractionSolution s;
  s.theta1_x = x_plane.theta1;
  s.theta2_x = x_plane.theta2;
  s.theta1_y = y_plane.theta1;
  s.theta2_y = y_plane.theta2;
  const double t1x = std::tan(s.theta1_x), t1y = std::tan(s.theta1_y);
  const double t2x = std::tan(s.theta2_x), t2y = std::tan(s.theta2_y);
  s.tau_layer = h1 * std::sqrt(1.0 + t1x * t1x + t1y * t1y) / c1;
  s.tau_background = h2 * std::sqrt(1.0 + t2x * t2x + t2y * t2y) / c2;
  s.tau_uniform = distance(element, point) / c2;
  s.tau_extra = s.tau_layer + s.tau_background - s.tau_uniform;
  return s;
}

double transverse_vs_elevational_error(const ArrayGeometry &array, const Point &point,
                                       const LayeredMedium &medium,
                                       double elevation_extent) {
  if (!(elevation_extent > 0.0))
    throw Error(ErrorKind::invalid_argument, "elevation extent must be positive");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (medium.is_uniform())
    return inf;

  const Point3 target{point.x, 0.0, point.z};
  double lat_min = inf, lat_max = -inf;
  std::size_t nearest = 0;
  for (std::size_t n = 0; n < array.size(); ++n) {
    const auto &e = array.element(n);
    const double t = refracted_delay({e.x, 0.0, e.z}, target, medium).tau_extra;
    lat_min = std::min(lat_min, t);
    lat_max = std::max(lat_max, t);
    if (std::abs(e.x - point.x) < std::abs(array.element(nearest).x - point.x))
      nearest = n;
  }

  constexpr int samples = 101;
  const auto &ref = array.element(nearest);
  double ele_min = inf, ele_max = -inf;
  for (int k = 0; k < samples; ++k) {
    const double y = elevation_extent * (static_cast<double>(k) / (samples - 1) - 0.5);
    const double t = refracted_delay({ref.x, y, ref.z}, target, medium).tau_extra;
    ele_min = std::min(ele_min, t);
    ele_max = std::max(ele_max, t);
  }

  const double elevational = ele_max - ele_min;
  if (elevational <= 0.0)
    return inf;
  return (lat_max - lat_min) / elevational;
}

DelayProfile delay_profile(const ArrayGeometry &array, const Point &point,
                           const LayeredMedium &medium, const Aperture &aperture,
                           DelayModel model, double assumed_sos) {
  DelayProfile p;
  p.point = point;
  p.model = model;
  p.assumed_sos = assumed_sos;
  p.aperture = aperture;
  p.times.reserve(aperture.size());
  for (std::size_t n = aperture.first; n <= aperture.last; ++n) {
    const auto &e = array.element(n);
    switch (model) {
    case DelayModel::true_layered:
      p.times.push_back(true_delay_straight(e, point, medium));
      break;
    case DelayModel::uniform:
      p.times.push_back(geometric_delay(e, point, assumed_sos));
      break;
    case DelayModel::refracted: {
      const auto s = refracted_delay({e.x, 0.0, e.z}, {point.x, 0.0, point.z}, medium);
      p.times.push_back(s.tau_layer + s.tau_background);
      break;
    }
    }
  }
  return p;
}

void write_delay_csv(std::ostream &out, const ArrayGeometry &array,
                     const DelayProfile &profile) {
  out << "element_index,x,z,tau_seconds\n";
  out << std::setprecision(17);
  for (std::size_t k = 0; k < profile.times.size(); ++k) {
    const std::size_t n = profile.aperture.first + k;
    const auto &e = array.element(n);
    out << n << ',' << e.x << ',' << e.z << ',' << profile.times[k] << '\n';
  }
}

} // namespace sosaf
