#pragma once

#include "sosaf/beamformer.hpp"
#include "sosaf/field.hpp"
#include "sosaf/geometry.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sosaf {

/// Pixel rectangle [ix0, ix0 + nx) x [iz0, iz0 + nz).
struct Roi {
  std::size_t ix0 = 0;
  std::size_t iz0 = 0;
  std::size_t nx = 0;
  std::size_t nz = 0;

  static constexpr std::size_t kMinSide = 8;

  /// nx x nz pixels centered on the pixel nearest `center`, shifted to fit.
  static Roi centered(const ImagingGrid &grid, const Point &center, std::size_t nx,
                      std::size_t nz);

  std::size_t size() const { return nx * nz; }
  bool overlaps(const Roi &other) const;
  /// Throws invalid_argument unless the ROI is at least kMinSide square and
  /// lies inside an image of grid_nx x grid_nz pixels.
  void validate(std::size_t grid_nx, std::size_t grid_nz) const;
};

/// Largest singular value of the (N x 2) matrix of flattened d/dx and d/dz.
/// Central differences inside the ROI, one-sided on its border.
double sharpness_metric(const Field2D &image, const Roi &roi, double dx = 1.0, double dz = 1.0);

/// Sum over the ROI of |grad I|, same stencil as sharpness_metric.
double gradient_metric(const Field2D &image, const Roi &roi, double dx = 1.0, double dz = 1.0);

struct HighpassBand {
  /// Pass band as fractions of the per-axis Nyquist wavenumber pi / spacing.
  double low = 0.75;
  double high = 0.95;
  /// Separable Hann taper before the transform.
  bool taper = false;
};

/// Sum of magnitudes of the ROI after an ideal radial band-pass in the 2D
/// DFT domain. The radial coordinate is sqrt((kx/kx_max)^2 + (kz/kz_max)^2).
double highpass_metric(const Field2D &image, const Roi &roi, const HighpassBand &band = {},
                       double dx = 1.0, double dz = 1.0);

struct MetricCurve {
  std::vector<double> speeds;
  std::vector<double> sharpness; ///< normalized to max 1
  std::vector<double> gradient;  ///< normalized to max 1
  std::vector<double> highpass;  ///< normalized to max 1
  std::vector<double> composite; ///< pointwise product
  std::size_t best_index = 0;    ///< first index attaining max composite
  double c_opt = 0.0;
  /// More than one speed attains the maximum (e.g. identical images).
  bool ambiguous = false;
};

/// What the component metrics see. The envelope of a receive-focused point
/// is dominated by faint per-element arcs that lengthen with defocus, so
/// envelope sums grow away from focus; squaring (acoustic intensity) lets the
/// focal peak dominate.
enum class MetricInput { power, envelope };

std::string to_string(MetricInput input);
MetricInput parse_metric_input(const std::string &name);

struct MetricOptions {
  HighpassBand band;
  MetricInput input = MetricInput::power;
};

/// Evaluates the three metrics on every image of the stack over `roi`,
/// normalizes each by its sweep maximum and selects the composite argmax.
/// Ties go to the smallest speed.
MetricCurve composite_metric(const ImageStack &stack, const Roi &roi,
                             const MetricOptions &options = {});

/// 1 - mean(composite): 0 for a flat curve, larger for a sharper peak.
double peak_prominence(const MetricCurve &curve);

void write_metric_curve_csv(const std::filesystem::path &path, const MetricCurve &curve);

struct SlscOptions {
  std::size_t lag_max = 12;
  std::size_t kernel = 12; ///< axial samples (pixel rows)
  double weight_exponent = 0.5;
};

/// Short-lag spatial coherence per pixel, in [0, 1].
Field2D slsc_field(const DelayedChannels &delayed, const SlscOptions &options = {});

/// slsc^weight_exponent * das, on the grid of `das`.
BeamformedImage slsc_weighted_image(const DelayedChannels &delayed, const BeamformedImage &das,
                                    const SlscOptions &options = {});

} // namespace sosaf
