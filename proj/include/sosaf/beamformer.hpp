#pragma once

#include "sosaf/field.hpp"
#include "sosaf/geometry.hpp"
#include "sosaf/simulator.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace sosaf {

enum class CompressionState { linear, log_db };

/// Speed used for the transmit leg of each pixel's time of flight.
enum class TransmitTiming {
  /// Same speed as the receive leg, so a pixel's round-trip time maps to range
  /// as r = c_bf t / 2 and the c_bf/c_ref range rescaling registers the stack.
  beamforming_sos,
  /// Fixed reference speed c_ref regardless of c_bf.
  reference_sos,
  /// Exact straight-ray layered time from the ground-truth medium recorded in
  /// the channel data, isolating receive-side aberration.
  true_medium,
};

struct BeamformOptions {
  double f_number = 1.41;
  ApertureConvention convention = ApertureConvention::inequality;
  double c_ref = 1540.0;
  TransmitTiming transmit_timing = TransmitTiming::beamforming_sos;
  /// Overrides the transmit model recorded in the channel data.
  std::optional<TransmitSpec> transmit;
};

struct BeamformedImage {
  ImagingGrid grid;
  Field2D intensity; ///< envelope (linear) or dB (log_db)
  double c_bf = 0.0;
  double f_number = 0.0;
  CompressionState state = CompressionState::linear;
};

struct ImageStack {
  ImagingGrid grid;
  double c_ref = 1540.0;
  std::vector<BeamformedImage> images; ///< ascending c_bf

  std::vector<double> speeds() const;
  std::size_t size() const { return images.size(); }
};

/// Delay-and-sum with rectangular apodization over the active aperture.
/// Channels are converted to analytic signals first, so the output is the
/// magnitude of the analytic beamsum. Samples outside the record contribute 0.
BeamformedImage das_beamform(const ChannelDataSet &channels, double c_bf,
                             const ImagingGrid &grid, const BeamformOptions &options = {});

/// Beamforms every speed in `c_list` (ascending, uniformly spaced). Image k is
/// evaluated at axial positions scaled by c_list[k] / c_ref so that echoes keep
/// their pixel index across the stack.
ImageStack sweep_beamform(const ChannelDataSet &channels, std::span<const double> c_list,
                          const ImagingGrid &grid, const BeamformOptions &options = {});

enum class SplineKind {
  natural,  ///< natural cubic spline
  monotone, ///< piecewise cubic Hermite (PCHIP), never overshoots the data
};

/// Per-pixel spline resampling of the stack along c_bf to `target_step`.
/// Original samples are reproduced exactly.
ImageStack interpolate_stack(const ImageStack &stack, double target_step,
                             SplineKind kind = SplineKind::natural);

/// 20 log10(I / max I), clamped to [-dynamic_range_db, 0].
BeamformedImage log_compress(const BeamformedImage &image, double dynamic_range_db = 54.0);

/// RF samples of every element delayed to every pixel (the input of
/// coherence-based weighting). Elements outside a pixel's aperture are 0.
struct DelayedChannels {
  ImagingGrid grid;
  double c_bf = 0.0;
  std::size_t num_elements = 0;
  std::vector<double> samples; ///< [iz][ix][element]
  std::vector<Aperture> apertures; ///< [iz][ix]

  std::span<const double> at(std::size_t ix, std::size_t iz) const {
    return {samples.data() + (iz * grid.nx() + ix) * num_elements, num_elements};
  }
};

DelayedChannels delay_channels(const ChannelDataSet &channels, double c_bf,
                               const ImagingGrid &grid, const BeamformOptions &options = {});

/// `<stem>.hdr` + `<stem>.bin` (float32 LE, image-major then row-major).
void write_image_stack(const std::filesystem::path &stem, const ImageStack &stack);
ImageStack read_image_stack(const std::filesystem::path &stem);

} // namespace sosaf
