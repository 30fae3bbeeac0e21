#pragma once

#include "sosaf/beamformer.hpp"
#include "sosaf/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sosaf {

/// FWHM of a sampled profile around `peak` with linearly interpolated
/// half-maximum crossings. Throws unresolved_target if a side never drops
/// below half the peak.
double profile_fwhm(std::span<const double> positions, std::span<const double> values,
                    std::size_t peak);

struct FwhmMeasurement {
  Point peak;        ///< grid position of the envelope maximum
  double fwhm = 0.0; ///< meters
};

/// Finds the envelope maximum within +-half_window of `approximate_peak` and
/// measures the lateral FWHM of the row through it (whole row available for
/// the crossings). Cartesian grids only.
///
/// `peak_tolerance_x` narrows the lateral peak search when the target's
/// position is known: a defocused X-shaped PSF can have arms brighter than
/// its center. Values <= 0 or above half_window_x mean the whole window.
FwhmMeasurement lateral_fwhm(const BeamformedImage &image, const Point &approximate_peak,
                             double half_window_x, double half_window_z,
                             double peak_tolerance_x = 0.0);

/// Beamforms a fine local grid around `target` at `c_bf` (axially registered
/// like one image of a sweep) and measures the lateral FWHM there. The
/// lateral extent is twice the search window so both crossings fit.
FwhmMeasurement focused_fwhm(const ChannelDataSet &channels, double c_bf, const Point &target,
                             const BeamformOptions &options, double half_window_x,
                             double half_window_z, double step, double peak_tolerance_x = 0.0);

struct FwhmReport {
  Point target;
  std::vector<double> speeds;
  std::vector<double> fwhm;
  double fwhm_selected = 0.0;
  double fwhm_reference = 0.0;
  double reduction = 0.0; ///< 1 - selected / reference
};

/// FWHM of one target across a stack, compared between two of its speeds.
FwhmReport fwhm_report(const ImageStack &stack, const Point &target, double selected_speed,
                       double reference_speed, double half_window_x, double half_window_z);

/// 20 log10(|mu_in - mu_out| / sqrt(var_in + var_out)); -inf when the means are
/// equal. ROIs must be disjoint and hold at least 100 pixels each.
double cnr(const BeamformedImage &image, const Roi &inside, const Roi &outside);

struct CnrReport {
  double cnr_selected = 0.0;
  double cnr_reference = 0.0;
  double delta = 0.0;
};

struct BoundaryProfile {
  std::vector<double> offsets;      ///< distance along the segment, meters
  std::vector<double> mean_profile; ///< mean over the parallel profiles
  double max_abs_slope = 0.0;       ///< intensity units per meter
  std::size_t clipped = 0;          ///< samples that fell outside the grid
};

/// Samples `num_profiles` profiles parallel to the segment from -> to (which
/// should cross the boundary), offset perpendicular by `spacing`, averages
/// them and returns the steepest slope of the mean. Bilinear sampling.
BoundaryProfile boundary_gradient(const BeamformedImage &image, const Point &from,
                                  const Point &to, std::size_t num_profiles, double spacing);

struct BenchmarkRow {
  std::size_t roi_size = 0;
  std::size_t num_sos = 0;
  std::size_t repetitions = 0;
  double median_seconds = 0.0;
  double min_seconds = 0.0;
  double max_seconds = 0.0;
};

/// Median wall time of composite_metric on seeded synthetic stacks for every
/// (roi_size, num_sos) pair. One warm-up call precedes each measurement.
std::vector<BenchmarkRow> benchmark_metrics(std::span<const std::size_t> roi_sizes,
                                            std::span<const std::size_t> num_sos,
                                            std::size_t repetitions = 10, std::uint64_t seed = 1);

/// Coefficient of determination of the least-squares line through (x, y).
double linear_fit_r2(std::span<const double> x, std::span<const double> y);

void write_benchmark_csv(const std::filesystem::path &path, std::span<const BenchmarkRow> rows);

} // namespace sosaf
