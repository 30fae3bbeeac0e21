#pragma once

#include "sosaf/beamformer.hpp"
#include "sosaf/geometry.hpp"
#include "sosaf/metrics.hpp"
#include "sosaf/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sosaf::cli {

/// Desk-scale probe: 64 elements at three times the clinical pitch, so the
/// aperture matches the 192-element array.
struct ProbeConfig {
  std::size_t elements = 64;
  double pitch = 1.05e-3;
  double radius = 60e-3; ///< kFlatRadius for a linear array
  double center_frequency = 3.0e6;
  double bandwidth = 0.6;
  double sampling_rate = 20.0e6;
};

struct MediumConfig {
  double thickness = 20e-3;
  double layer_sos = 1450.0;
  double background_sos = 1540.0;
};

struct SceneConfig {
  SceneKind kind = SceneKind::point_grid;
  std::vector<Point> pins{{0.0, 40e-3}, {0.0, 60e-3}};
  double pin_reflectivity = 1.0;
  double x_min = -10e-3, x_max = 10e-3, z_min = 30e-3, z_max = 70e-3;
  double scatterers_per_cell = 10.0;
  std::vector<Lesion> lesions;
};

struct TransmitConfig {
  TransmitModel model = TransmitModel::ideal;
  std::size_t element = 0;
  TransmitTiming timing = TransmitTiming::beamforming_sos;
  double noise_rms = 0.0;
};

struct SweepConfig {
  double c_min = 1460.0;
  double c_max = 1550.0;
  double step = 10.0;
  double interp_step = 1.0;
  double c_ref = 1540.0;
  SplineKind spline = SplineKind::natural;

  std::vector<double> speeds() const;
};

struct GridConfig {
  double x_min = -8e-3, x_max = 8e-3, dx = 0.25e-3;
  double z_min = 30e-3, z_max = 70e-3, dz = 0.25e-3;
};

/// ROI centered on (x, z), nx by nz pixels.
struct RoiSpec {
  Point center;
  std::size_t nx = 50;
  std::size_t nz = 50;
};

struct BeamformConfig {
  double f_number = 1.41;
  ApertureConvention convention = ApertureConvention::inequality;
  double dynamic_range_db = 54.0;
};

struct EvaluationConfig {
  double fwhm_half_window_x = 3e-3;
  double fwhm_half_window_z = 4e-3; ///< covers the apparent-depth shift across the sweep
  double fwhm_step = 50e-6; ///< fine-grid spacing for FWHM measurement
  double fwhm_peak_tolerance_x = 1e-3; ///< lateral peak search around the known pin
  std::optional<RoiSpec> cnr_inside;
  std::optional<RoiSpec> cnr_outside;
  std::optional<std::pair<Point, Point>> boundary;
  std::size_t boundary_profiles = 10;
  double boundary_spacing = 1e-3;
};

struct AtlasConfig {
  std::vector<double> thicknesses{20e-3};
  std::vector<double> layer_sos{1450.0};
  std::vector<double> f_numbers{1.41};
  double x_min = -40e-3, x_max = 40e-3, dx = 1e-3;
  double z_min = 5e-3, z_max = 125e-3, dz = 1e-3;
  /// The atlas uses the full clinical array, independent of the desk-scale probe.
  std::size_t elements = 192;
  double pitch = 350e-6;
};

struct BenchConfig {
  std::vector<std::size_t> roi_sizes{25, 50, 100, 200};
  std::vector<std::size_t> num_sos{10};
  std::size_t repetitions = 10;
};

struct RunConfig {
  ProbeConfig probe;
  MediumConfig medium;
  SceneConfig scene;
  TransmitConfig transmit;
  SweepConfig sweep;
  GridConfig grid;
  BeamformConfig beamform;
  MetricOptions metrics;
  std::vector<RoiSpec> rois{{{0.0, 60e-3}, 50, 50}};
  EvaluationConfig evaluation;
  AtlasConfig atlas;
  BenchConfig bench;
  std::uint64_t seed = 1;

  /// Checks every module precondition that can be checked without compute.
  /// Throws Error(configuration) on the first violation.
  void validate() const;

  ArrayGeometry array() const;
  ArrayGeometry atlas_array() const;
  LayeredMedium layered_medium() const;
  ImagingGrid imaging_grid() const;
  BeamformOptions beamform_options() const;
};

/// Reads an INI file; unknown sections or keys are rejected.
RunConfig load_config(const std::filesystem::path &path);
RunConfig parse_config(std::istream &in);

/// Writes every field, so that loading the output reproduces the config.
void write_config(std::ostream &out, const RunConfig &config);
void save_config(const std::filesystem::path &path, const RunConfig &config);

} // namespace sosaf::cli
