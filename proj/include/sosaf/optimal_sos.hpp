#pragma once

#include "sosaf/field.hpp"
#include "sosaf/geometry.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sosaf {

/// Candidate speeds lo, lo + step, ..., up to hi (inclusive within rounding).
struct SosGrid {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  std::vector<double> values() const;
};

/// Grid spanning [min(c_l, c_bg) - margin, max(c_l, c_bg) + margin].
SosGrid default_sos_grid(const LayeredMedium &medium, double step = 1.0,
                         double margin = 10.0);

struct OptimalSosOptions {
  double f_number = 1.41;
  ApertureConvention convention = ApertureConvention::inequality;
  /// Frequency whose period scales the coherence threshold and the mapped
  /// error. Defaults to the array center frequency.
  std::optional<double> analysis_frequency;
  double threshold_periods = 0.2;
  /// Explicit candidate grid; defaults to default_sos_grid(medium).
  std::optional<SosGrid> grid;
};

struct OptimalSosResult {
  double c_opt = 0.0;
  double mean_abs_error = 0.0;            ///< seconds
  std::vector<double> per_element_errors; ///< tau_true - tau_geometric, seconds
  double coherent_fraction = 0.0;
  Aperture aperture;
};

/// Bulk speed minimizing the summed absolute receive-delay error over the
/// active aperture, by exhaustive search; ties go to the smallest speed.
OptimalSosResult solve_c_opt(const Point &point, const LayeredMedium &medium,
                             const ArrayGeometry &array, const OptimalSosOptions &options = {});

/// Longest run of consecutive elements with |error| < threshold * period,
/// as a fraction of the aperture size.
double coherent_aperture_fraction(std::span<const double> per_element_errors, double period,
                                  double threshold_periods = 0.2);

struct SosMap {
  ImagingGrid grid;
  Field2D c_opt;               ///< m/s, NaN where the solve failed
  Field2D mean_error_periods;  ///< mean |error| in periods of the analysis frequency
  Field2D coherent_fraction;
  std::size_t missing = 0;
};

SosMap map_fields(const ImagingGrid &region, const LayeredMedium &medium,
                  const ArrayGeometry &array, const OptimalSosOptions &options = {});

} // namespace sosaf
