#include "sosaf/metrics.hpp"

#include "sosaf/error.hpp"
#include "sosaf/fft.hpp"
#include "sosaf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

namespace sosaf {

namespace {

void check_spacing(double dx, double dz) {
  if (!(dx > 0.0) || !(dz > 0.0))
    throw Error(ErrorKind::invalid_argument, "pixel spacing must be positive");
}

// ROI-local gradient with central differences inside, one-sided on the border.
struct Gradient {
  std::vector<double> gx, gz;
};

Gradient roi_gradient(const Field2D &image, const Roi &roi, double dx, double dz) {
  roi.validate(image.nx, image.nz);
  check_spacing(dx, dz);
  Gradient g;
  g.gx.resize(roi.size());
  g.gz.resize(roi.size());
  auto at = [&](std::size_t i, std::size_t k) { return image(roi.ix0 + i, roi.iz0 + k); };
  for (std::size_t k = 0; k < roi.nz; ++k) {
    for (std::size_t i = 0; i < roi.nx; ++i) {
      double gx, gz;
      if (i == 0)
        gx = (at(1, k) - at(0, k)) / dx;
      else if (i + 1 == roi.nx)
        gx = (at(i, k) - at(i - 1, k)) / dx;
      else
        gx = (at(i + 1, k) - at(i - 1, k)) / (2.0 * dx);
      if (k == 0)
        gz = (at(i, 1) - at(i, 0)) / dz;
      else if (k + 1 == roi.nz)
        gz = (at(i, k) - at(i, k - 1)) / dz;
      else
        gz = (at(i, k + 1) - at(i, k - 1)) / (2.0 * dz);
      g.gx[k * roi.nx + i] = gx;
      g.gz[k * roi.nx + i] = gz;
    }
  }
  return g;
}

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) /
                                static_cast<double>(n));
  return w;
}

void normalize(std::vector<double> &v, const char *name) {
  const double peak = *std::max_element(v.begin(), v.end());
  if (!(peak > 0.0))
    throw Error(ErrorKind::degenerate_metric,
                std::string(name) + " metric is zero across the whole sweep");
  for (double &x : v)
    x /= peak;
  // Exactly 1 at the maximum even if division rounds.
  for (double &x : v)
    x = std::min(x, 1.0);
}

} // namespace

Roi Roi::centered(const ImagingGrid &grid, const Point &center, std::size_t nx,
                  std::size_t nz) {
  const std::size_t gnx = grid.nx(), gnz = grid.nz();
  if (nx > gnx || nz > gnz)
    throw Error(ErrorKind::invalid_argument, "ROI larger than the image grid");
  auto clamp_start = [](double idx, std::size_t n, std::size_t total) {
    const double start = std::round(idx) - static_cast<double>(n / 2);
    const double hi = static_cast<double>(total - n);
    return static_cast<std::size_t>(std::clamp(start, 0.0, hi));
  };
  Roi r;
  r.nx = nx;
  r.nz = nz;
  r.ix0 = clamp_start((center.x - grid.x_min) / grid.dx, nx, gnx);
  r.iz0 = clamp_start((center.z - grid.z_min) / grid.dz, nz, gnz);
  return r;
}

bool Roi::overlaps(const Roi &o) const {
  return ix0 < o.ix0 + o.nx && o.ix0 < ix0 + nx && iz0 < o.iz0 + o.nz && o.iz0 < iz0 + nz;
}

void Roi::validate(std::size_t grid_nx, std::size_t grid_nz) const {
  if (nx < kMinSide || nz < kMinSide)
    throw Error(ErrorKind::invalid_argument, "ROI must be at least 8 x 8 pixels");
  if (ix0 + nx > grid_nx || iz0 + nz > grid_nz)
    throw Error(ErrorKind::invalid_argument, "ROI extends outside the image");
}

double sharpness_metric(const Field2D &image, const Roi &roi, double dx, double dz) {
  const auto g = roi_gradient(image, roi, dx, dz);
  // 2x2 Gram matrix [a b; b c]; s1 = sqrt(largest eigenvalue).
  double a = 0.0, b = 0.0, c = 0.0;
  for (std::size_t i = 0; i < g.gx.size(); ++i) {
    a += g.gx[i] * g.gx[i];
    b += g.gx[i] * g.gz[i];
    c += g.gz[i] * g.gz[i];
  }
  const double half_tr = 0.5 * (a + c);
  const double lambda = half_tr + std::hypot(0.5 * (a - c), b);
  return std::sqrt(std::max(lambda, 0.0));
}

double gradient_metric(const Field2D &image, const Roi &roi, double dx, double dz) {
  const auto g = roi_gradient(image, roi, dx, dz);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.gx.size(); ++i)
    sum += std::hypot(g.gx[i], g.gz[i]);
  return sum;
}

double highpass_metric(const Field2D &image, const Roi &roi, const HighpassBand &band,
                       double dx, double dz) {
  roi.validate(image.nx, image.nz);
  check_spacing(dx, dz);
  if (!(band.low > 0.0) || !(band.high <= 1.0) || !(band.low < band.high))
    throw Error(ErrorKind::invalid_argument, "high-pass band must satisfy 0 < low < high <= 1");
  const std::size_t nx = roi.nx, nz = roi.nz;
  std::vector<fft::cplx> buf(nx * nz);
  std::vector<double> wx(nx, 1.0), wz(nz, 1.0);
  if (band.taper) {
    wx = hann(nx);
    wz = hann(nz);
  }
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t i = 0; i < nx; ++i)
      buf[k * nx + i] = image(roi.ix0 + i, roi.iz0 + k) * wx[i] * wz[k];
  fft::forward_2d(buf, nz, nx);
  // Normalized wavenumber of bin m on an n-point axis: |m| / (n / 2), with 1
  // at the Nyquist wavenumber pi / spacing. Spacing cancels in the ratio.
  const double lo2 = band.low * band.low, hi2 = band.high * band.high;
  for (std::size_t k = 0; k < nz; ++k) {
    const double fz = static_cast<double>(fft::signed_bin(k, nz)) / (0.5 * static_cast<double>(nz));
    for (std::size_t i = 0; i < nx; ++i) {
      const double fx =
          static_cast<double>(fft::signed_bin(i, nx)) / (0.5 * static_cast<double>(nx));
      const double r2 = fx * fx + fz * fz;
      if (r2 < lo2 || r2 > hi2)
        buf[k * nx + i] = 0.0;
    }
  }
  fft::inverse_2d(buf, nz, nx);
  const double scale = 1.0 / static_cast<double>(nx * nz);
  double sum = 0.0;
  for (const auto &v : buf)
    sum += std::abs(v);
  return sum * scale;
}

std::string to_string(MetricInput input) {
  return input == MetricInput::power ? "power" : "envelope";
}

MetricInput parse_metric_input(const std::string &name) {
  if (name == "power")
    return MetricInput::power;
  if (name == "envelope")
    return MetricInput::envelope;
  throw Error(ErrorKind::configuration, "unknown metric input '" + name + "'");
}

MetricCurve composite_metric(const ImageStack &stack, const Roi &roi,
                             const MetricOptions &options) {
  const std::size_t n = stack.images.size();
  if (n == 0)
    throw Error(ErrorKind::invalid_argument, "empty image stack");
  const double dx = stack.grid.spacing_x(), dz = stack.grid.spacing_z();
  for (const auto &img : stack.images) {
    if (img.state != CompressionState::linear)
      throw Error(ErrorKind::invalid_argument, "metrics need linear envelope images");
    roi.validate(img.intensity.nx, img.intensity.nz);
  }

  MetricCurve curve;
  curve.speeds = stack.speeds();
  curve.sharpness.resize(n);
  curve.gradient.resize(n);
  curve.highpass.resize(n);
  parallel_for(n, [&](std::size_t k) {
    Field2D img = stack.images[k].intensity;
    if (options.input == MetricInput::power)
      for (auto &v : img.values)
        v *= v;
    curve.sharpness[k] = sharpness_metric(img, roi, dx, dz);
    curve.gradient[k] = gradient_metric(img, roi, dx, dz);
    curve.highpass[k] = highpass_metric(img, roi, options.band, dx, dz);
  });
  normalize(curve.sharpness, "sharpness");
  normalize(curve.gradient, "gradient");
  normalize(curve.highpass, "high-pass");

  curve.composite.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    curve.composite[k] = curve.sharpness[k] * curve.gradient[k] * curve.highpass[k];
  std::size_t best = 0;
  for (std::size_t k = 1; k < n; ++k)
    if (curve.composite[k] > curve.composite[best])
      best = k;
  curve.best_index = best;
  curve.c_opt = curve.speeds[best];
  const auto ties = std::count(curve.composite.begin(), curve.composite.end(),
                               curve.composite[best]);
  curve.ambiguous = ties > 1;
  return curve;
}

double peak_prominence(const MetricCurve &curve) {
  if (curve.composite.empty())
    throw Error(ErrorKind::invalid_argument, "empty metric curve");
  double mean = 0.0;
  for (double v : curve.composite)
    mean += v;
  mean /= static_cast<double>(curve.composite.size());
  return curve.composite[curve.best_index] - mean;
}

void write_metric_curve_csv(const std::filesystem::path &path, const MetricCurve &curve) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::io, "cannot write " + path.string());
  out.precision(10);
  out << "c_bf,M_S,M_G,M_HP,M\n";
  for (std::size_t k = 0; k < curve.speeds.size(); ++k)
    out << curve.speeds[k] << ',' << curve.sharpness[k] << ',' << curve.gradient[k] << ','
        << curve.highpass[k] << ',' << curve.composite[k] << '\n';
  if (!out)
    throw Error(ErrorKind::io, "failed writing " + path.string());
}

Field2D slsc_field(const DelayedChannels &delayed, const SlscOptions &options) {
  const std::size_t nx = delayed.grid.nx(), nz = delayed.grid.nz();
  const std::size_t ne = delayed.num_elements;
  if (options.lag_max == 0 || options.lag_max >= ne)
    throw Error(ErrorKind::invalid_argument, "lag_max must be in [1, elements)");
  if (options.kernel == 0)
    throw Error(ErrorKind::invalid_argument, "kernel must be at least one sample");
  if (delayed.samples.size() != nx * nz * ne || delayed.apertures.size() != nx * nz)
    throw Error(ErrorKind::invalid_argument, "delayed channel data is inconsistent");

  Field2D out(nx, nz);
  const std::size_t half = options.kernel / 2;
  parallel_for(nz, [&](std::size_t iz) {
    const std::size_t k0 = iz >= half ? iz - half : 0;
    const std::size_t k1 = std::min(nz, k0 + options.kernel);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const auto &ap = delayed.apertures[iz * nx + ix];
      if (ap.last < ap.first || ap.size() < 2)
        continue;
      double total = 0.0;
      std::size_t lags = 0;
      for (std::size_t m = 1; m <= options.lag_max && m < ap.size(); ++m) {
        double acc = 0.0;
        std::size_t pairs = 0;
        for (std::size_t e = ap.first; e + m <= ap.last; ++e) {
          double sab = 0.0, saa = 0.0, sbb = 0.0;
          for (std::size_t k = k0; k < k1; ++k) {
            const auto s = delayed.at(ix, k);
            sab += s[e] * s[e + m];
            saa += s[e] * s[e];
            sbb += s[e + m] * s[e + m];
          }
          if (saa > 0.0 && sbb > 0.0)
            acc += sab / std::sqrt(saa * sbb);
          ++pairs;
        }
        total += acc / static_cast<double>(pairs);
        ++lags;
      }
      out(ix, iz) = std::clamp(total / static_cast<double>(lags), 0.0, 1.0);
    }
  });
  return out;
}

BeamformedImage slsc_weighted_image(const DelayedChannels &delayed, const BeamformedImage &das,
                                    const SlscOptions &options) {
  if (das.state != CompressionState::linear)
    throw Error(ErrorKind::invalid_argument, "SLSC weighting needs a linear envelope image");
  if (das.intensity.nx != delayed.grid.nx() || das.intensity.nz != delayed.grid.nz())
    throw Error(ErrorKind::invalid_argument, "DAS image and delayed data grids differ");
  if (!(options.weight_exponent >= 0.0))
    throw Error(ErrorKind::invalid_argument, "weight exponent must be >= 0");
  BeamformedImage out = das;
  if (options.weight_exponent == 0.0)
    return out;
  const auto coherence = slsc_field(delayed, options);
  for (std::size_t i = 0; i < out.intensity.size(); ++i)
    out.intensity.values[i] *= std::pow(coherence.values[i], options.weight_exponent);
  return out;
}

} // namespace sosaf
