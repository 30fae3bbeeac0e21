#pragma once

#include "sosaf/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sosaf {

/// Gaussian-modulated cosine, peak 1 at t = 0, truncated at +-4 envelope
/// standard deviations. The envelope width is chosen so the -6 dB spectral
/// width equals fractional_bandwidth * f0.
class Pulse {
public:
  double center_frequency() const { return f0_; }
  double fractional_bandwidth() const { return bandwidth_; }
  double sampling_rate() const { return fs_; }
  double envelope_sigma() const { return sigma_; }
  double half_duration() const { return 4.0 * sigma_; }

  /// Continuous waveform value; zero outside the truncation window.
  double operator()(double t) const;

  /// Samples at t = (k - center_index()) / fs.
  std::span<const double> samples() const { return samples_; }
  std::size_t center_index() const { return center_; }

  friend Pulse make_pulse(double, double, double);

private:
  double f0_ = 0.0;
  double bandwidth_ = 0.0;
  double fs_ = 0.0;
  double sigma_ = 0.0;
  std::vector<double> samples_;
  std::size_t center_ = 0;
};

Pulse make_pulse(double f0, double fractional_bandwidth, double fs);

struct Scatterer {
  Point position;
  double reflectivity = 1.0;
};

enum class SceneKind { point_grid, speckle, anechoic_lesion, composite };

std::string to_string(SceneKind kind);
SceneKind parse_scene_kind(const std::string &name);

struct Lesion {
  Point center;
  double radius = 0.0;
};

/// Parameters for make_scene. Which fields are read depends on `kind`:
/// point_grid uses `pins`; speckle uses the region, density and seed;
/// anechoic_lesion adds `lesions`; composite uses all of them.
struct SceneSpec {
  SceneKind kind = SceneKind::point_grid;
  std::vector<Point> pins;
  double pin_reflectivity = 1.0;
  // Speckle region (meters).
  double x_min = 0.0, x_max = 0.0, z_min = 0.0, z_max = 0.0;
  /// Scatterers per (wavelength * f_number)^2 resolution cell.
  double scatterers_per_cell = 10.0;
  double wavelength = 1540.0 / 3.0e6;
  double f_number = 1.41;
  std::vector<Lesion> lesions;
  std::uint64_t seed = 0;
};

struct Scene {
  SceneKind kind = SceneKind::point_grid;
  std::vector<Scatterer> scatterers;
};

Scene make_scene(const SceneSpec &spec);

enum class TransmitModel {
  /// Virtual source at the array origin firing with true layered timing.
  ideal,
  /// Single transmitting element (synthetic-aperture style).
  reciprocal,
};

struct TransmitSpec {
  TransmitModel model = TransmitModel::ideal;
  std::size_t element = 0; ///< transmitting element for the reciprocal model
};

std::string to_string(TransmitModel model);
TransmitModel parse_transmit_model(const std::string &name);

/// Origin of the transmit wave for a given transmit spec.
Point transmit_origin(const TransmitSpec &transmit, const ArrayGeometry &array);

struct SynthesisOptions {
  TransmitSpec transmit;
  double noise_rms = 0.0; ///< relative to the peak scatterer amplitude
  std::uint64_t seed = 0;
  bool spherical_spreading = false;
  bool element_directivity = false;
  double attenuation_db_per_cm_mhz = 0.0;
  /// Record length; defaults to cover every echo plus the pulse tail.
  std::optional<double> duration;
};

/// Per-element received time series, element-major.
struct ChannelDataSet {
  std::size_t num_elements = 0;
  std::size_t num_samples = 0;
  double sampling_rate = 0.0;
  double start_time = 0.0;
  ArrayGeometry array;
  std::optional<LayeredMedium> medium;
  TransmitSpec transmit;
  std::vector<double> samples;

  std::span<const double> channel(std::size_t e) const {
    return {samples.data() + e * num_samples, num_samples};
  }
  std::span<double> channel(std::size_t e) {
    return {samples.data() + e * num_samples, num_samples};
  }
  double time_at(std::size_t k) const {
    return start_time + static_cast<double>(k) / sampling_rate;
  }
};

/// s_n(t) = sum_i a_i pulse(t - tau_tx(i) - tau_n(i)) + noise, with straight-ray
/// layered travel times for both legs.
ChannelDataSet synthesize_channel_data(const Scene &scene, const LayeredMedium &medium,
                                       const ArrayGeometry &array, const Pulse &pulse,
                                       const SynthesisOptions &options = {});

/// Writes `<stem>.hdr` (key = value text) and `<stem>.bin` (little-endian
/// float32, elements x samples, row-major).
void write_channel_data(const std::filesystem::path &stem, const ChannelDataSet &data);
ChannelDataSet read_channel_data(const std::filesystem::path &stem);

} // namespace sosaf
