#include "sosaf/optimal_sos.hpp"

#include "sosaf/delay.hpp"
#include "sosaf/error.hpp"
#include "sosaf/parallel.hpp"

#include <cmath>
#include <limits>

namespace sosaf {

std::vector<double> SosGrid::values() const {
  if (!(step > 0.0) || !(hi >= lo))
    throw Error(ErrorKind::invalid_argument, "SoS grid needs step > 0 and hi >= lo");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + static_cast<double>(i) * step;
  return out;
}

SosGrid default_sos_grid(const LayeredMedium &medium, double step, double margin) {
  return {medium.min_sos() - margin, medium.max_sos() + margin, step};
}

OptimalSosResult solve_c_opt(const Point &point, const LayeredMedium &medium,
                             const ArrayGeometry &array, const OptimalSosOptions &options) {
  const Aperture ap = active_aperture(point, array, options.f_number, options.convention);
  const std::size_t n = ap.size();
  if (n == 0)
    throw Error(ErrorKind::degenerate_aperture, "empty aperture");

  std::vector<double> truth(n), length(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto &e = array.element(ap.first + k);
    truth[k] = true_delay_straight(e, point, medium);
    length[k] = distance(e, point);
  }

  const auto candidates = options.grid.value_or(default_sos_grid(medium)).values();
  double best_cost = std::numeric_limits<double>::infinity();
  double best_c = candidates.front();
  for (const double c : candidates) {
    if (!(c > 0.0))
      continue;
    double cost = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      cost += std::abs(truth[k] - length[k] / c);
    if (cost < best_cost) {
      best_cost = cost;
      best_c = c;
    }
  }

  OptimalSosResult r;
  r.c_opt = best_c;
  r.aperture = ap;
  r.per_element_errors.resize(n);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    r.per_element_errors[k] = truth[k] - length[k] / best_c;
    sum += std::abs(r.per_element_errors[k]);
  }
  r.mean_abs_error = sum / static_cast<double>(n);
  const double f = options.analysis_frequency.value_or(array.center_frequency());
  r.coherent_fraction =
      coherent_aperture_fraction(r.per_element_errors, 1.0 / f, options.threshold_periods);
  return r;
}

double coherent_aperture_fraction(std::span<const double> per_element_errors, double period,
                                  double threshold_periods) {
  if (per_element_errors.empty())
    throw Error(ErrorKind::degenerate_aperture, "no element errors");
  if (!(threshold_periods > 0.0) || !(period > 0.0))
    throw Error(ErrorKind::invalid_argument, "threshold and period must be positive");
  const double limit = threshold_periods * period;
  std::size_t best = 0, run = 0;
  for (const double e : per_element_errors) {
    run = std::abs(e) < limit ? run + 1 : 0;
    best = std::max(best, run);
  }
  return static_cast<double>(best) / static_cast<double>(per_element_errors.size());
}

SosMap map_fields(const ImagingGrid &region, const LayeredMedium &medium,
                  const ArrayGeometry &array, const OptimalSosOptions &options) {
  region.validate();
  const std::size_t nx = region.nx(), nz = region.nz();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SosMap map{region, Field2D(nx, nz, nan), Field2D(nx, nz, nan), Field2D(nx, nz, nan), 0};
  const double f = options.analysis_frequency.value_or(array.center_frequency());

  std::vector<char> failed(nx * nz, 0);
  parallel_for(nz, [&](std::size_t iz) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      try {
        const auto r = solve_c_opt(region.position(ix, iz), medium, array, options);
        map.c_opt(ix, iz) = r.c_opt;
        map.mean_error_periods(ix, iz) = r.mean_abs_error * f;
        map.coherent_fraction(ix, iz) = r.coherent_fraction;
      } catch (const Error &) {
        failed[iz * nx + ix] = 1;
      }
    }
  });
  for (const char c : failed)
    map.missing += static_cast<std::size_t>(c);
  return map;
}

} // namespace sosaf
