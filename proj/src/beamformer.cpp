#include "sosaf/beamformer.hpp"

#include "sosaf/delay.hpp"
#include "sosaf/error.hpp"
#include "sosaf/fft.hpp"
#include "sosaf/io_util.hpp"
#include "sosaf/parallel.hpp"

// pchip.hpp in Boost 1.74 calls isnan unqualified; this header supplies it.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

namespace sosaf {

namespace {

using cplx = std::complex<double>;

void check_inputs(const ChannelDataSet &channels, double c_bf, const ImagingGrid &grid,
                  const BeamformOptions &options) {
  if (!(c_bf > 0.0) || !std::isfinite(c_bf))
    throw Error(ErrorKind::invalid_sos, "beamforming speed must be positive");
  if (!(options.c_ref > 0.0))
    throw Error(ErrorKind::invalid_sos, "reference speed must be positive");
  if (!(options.f_number > 0.0))
    throw Error(ErrorKind::invalid_argument, "f-number must be positive");
  if (channels.num_elements == 0 || channels.num_samples < 2 ||
      channels.samples.size() != channels.num_elements * channels.num_samples ||
      channels.array.size() != channels.num_elements)
    throw Error(ErrorKind::invalid_argument, "channel data is empty or inconsistent");
  if (!(channels.sampling_rate > 0.0))
    throw Error(ErrorKind::invalid_argument, "sampling rate must be positive");
  if (options.transmit_timing == TransmitTiming::true_medium && !channels.medium)
    throw Error(ErrorKind::configuration, "true-medium transmit timing needs a recorded medium");
  grid.validate();
}

// Shared per-pixel geometry: the transmit time and the receive aperture.
struct PixelGeometry {
  Point position;
  double tx_time = 0.0;
  Aperture aperture;
  bool valid = false;
};

PixelGeometry pixel_geometry(const ChannelDataSet &channels, const ImagingGrid &grid,
                             std::size_t ix, std::size_t iz, double axial_scale, double c_tx,
                             const Point &tx_origin, const BeamformOptions &options) {
  PixelGeometry g;
  g.position = grid.position(ix, iz, axial_scale);
  if (!(g.position.z > channels.array.max_element_z()) || !(g.position.z > tx_origin.z))
    return g;
  g.tx_time = options.transmit_timing == TransmitTiming::true_medium
                  ? true_delay_straight(tx_origin, g.position, *channels.medium)
                  : distance(tx_origin, g.position) / c_tx;
  g.aperture = active_aperture(g.position, channels.array, options.f_number, options.convention);
  g.valid = true;
  return g;
}

std::vector<std::vector<cplx>> analytic_channels(const ChannelDataSet &channels) {
  std::vector<std::vector<cplx>> out(channels.num_elements);
  parallel_for(channels.num_elements,
               [&](std::size_t e) { out[e] = fft::analytic_signal(channels.channel(e)); });
  return out;
}

BeamformedImage beamform_scaled(const ChannelDataSet &channels,
                                const std::vector<std::vector<cplx>> &analytic, double c_bf,
                                double axial_scale, const ImagingGrid &grid,
                                const BeamformOptions &options) {
  const TransmitSpec transmit = options.transmit.value_or(channels.transmit);
  const Point tx_origin = transmit_origin(transmit, channels.array);
  const double c_tx =
      options.transmit_timing == TransmitTiming::beamforming_sos ? c_bf : options.c_ref;
  const double fs = channels.sampling_rate;
  const double t0 = channels.start_time;
  const auto last = static_cast<double>(channels.num_samples - 1);

  BeamformedImage image;
  image.grid = grid;
  image.c_bf = c_bf;
  image.f_number = options.f_number;
  image.intensity = Field2D(grid.nx(), grid.nz());
  const std::size_t nx = grid.nx();

  parallel_for(grid.nz(), [&](std::size_t iz) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const auto g = pixel_geometry(channels, grid, ix, iz, axial_scale, c_tx, tx_origin, options);
      if (!g.valid)
        continue;
      cplx sum{0.0, 0.0};
      for (std::size_t e = g.aperture.first; e <= g.aperture.last; ++e) {
        const double t = g.tx_time + distance(channels.array.element(e), g.position) / c_bf;
        const double u = (t - t0) * fs;
        if (!(u >= 0.0) || !(u < last))
          continue;
        const auto k = static_cast<std::size_t>(u);
        const double w = u - static_cast<double>(k);
        const auto &ch = analytic[e];
        sum += ch[k] * (1.0 - w) + ch[k + 1] * w;
      }
      image.intensity(ix, iz) = std::abs(sum);
    }
  });
  return image;
}

std::vector<double> check_speed_list(std::span<const double> c_list) {
  if (c_list.empty())
    throw Error(ErrorKind::invalid_argument, "speed list is empty");
  std::vector<double> c(c_list.begin(), c_list.end());
  for (double v : c)
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::invalid_sos, "speeds must be positive");
  for (std::size_t i = 1; i < c.size(); ++i)
    if (!(c[i] > c[i - 1]))
      throw Error(ErrorKind::invalid_argument, "speed list must be strictly ascending");
  if (c.size() > 2) {
    const double h = c[1] - c[0];
    for (std::size_t i = 2; i < c.size(); ++i)
      if (std::abs((c[i] - c[i - 1]) - h) > 1e-6 * h)
        throw Error(ErrorKind::invalid_argument, "speed list must be uniformly spaced");
  }
  return c;
}

// Natural cubic spline through uniformly spaced samples, written as a linear
// map from the n samples to the m output points.
std::vector<double> natural_spline_weights(std::size_t n, double h,
                                           std::span<const double> offsets) {
  const std::size_t m = offsets.size();
  std::vector<double> weights(m * n, 0.0);
  // Second derivatives for each unit input; tridiagonal (1, 4, 1) interior.
  std::vector<std::vector<double>> second(n, std::vector<double>(n, 0.0));
  if (n > 2) {
    const std::size_t k = n - 2;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> rhs(k, 0.0);
      for (std::size_t i = 0; i < k; ++i) {
        // Row i covers knot i + 1.
        const double y0 = (i == j) ? 1.0 : 0.0;
        const double y1 = (i + 1 == j) ? 1.0 : 0.0;
        const double y2 = (i + 2 == j) ? 1.0 : 0.0;
        rhs[i] = 6.0 / (h * h) * (y0 - 2.0 * y1 + y2);
      }
      // Thomas algorithm.
      std::vector<double> cp(k, 0.0), dp(k, 0.0);
      cp[0] = 1.0 / 4.0;
      dp[0] = rhs[0] / 4.0;
      for (std::size_t i = 1; i < k; ++i) {
        const double denom = 4.0 - cp[i - 1];
        cp[i] = 1.0 / denom;
        dp[i] = (rhs[i] - dp[i - 1]) / denom;
      }
      std::vector<double> x(k);
      x[k - 1] = dp[k - 1];
      for (std::size_t i = k - 1; i-- > 0;)
        x[i] = dp[i] - cp[i] * x[i + 1];
      for (std::size_t i = 0; i < k; ++i)
        second[j][i + 1] = x[i];
    }
  }
  for (std::size_t q = 0; q < m; ++q) {
    const double s = offsets[q] / h;
    auto seg = static_cast<std::size_t>(std::floor(s));
    seg = std::min(seg, n - 2);
    const double b = s - static_cast<double>(seg);
    const double a = 1.0 - b;
    for (std::size_t j = 0; j < n; ++j) {
      double w = 0.0;
      if (j == seg)
        w += a;
      if (j == seg + 1)
        w += b;
      w += ((a * a * a - a) * second[j][seg] + (b * b * b - b) * second[j][seg + 1]) * h * h /
           6.0;
      weights[q * n + j] = w;
    }
  }
  return weights;
}

} // namespace

std::vector<double> ImageStack::speeds() const {
  std::vector<double> out;
  out.reserve(images.size());
  for (const auto &img : images)
    out.push_back(img.c_bf);
  return out;
}

BeamformedImage das_beamform(const ChannelDataSet &channels, double c_bf,
                             const ImagingGrid &grid, const BeamformOptions &options) {
  check_inputs(channels, c_bf, grid, options);
  const auto analytic = analytic_channels(channels);
  return beamform_scaled(channels, analytic, c_bf, 1.0, grid, options);
}

ImageStack sweep_beamform(const ChannelDataSet &channels, std::span<const double> c_list,
                          const ImagingGrid &grid, const BeamformOptions &options) {
  const auto speeds = check_speed_list(c_list);
  for (double c : speeds)
    check_inputs(channels, c, grid, options);
  const auto analytic = analytic_channels(channels);
  ImageStack stack;
  stack.grid = grid;
  stack.c_ref = options.c_ref;
  stack.images.reserve(speeds.size());
  for (double c : speeds)
    stack.images.push_back(beamform_scaled(channels, analytic, c, c / options.c_ref, grid, options));
  return stack;
}

ImageStack interpolate_stack(const ImageStack &stack, double target_step, SplineKind kind) {
  const std::size_t n = stack.images.size();
  if (n < 4)
    throw Error(ErrorKind::invalid_argument, "interpolation needs at least 4 images");
  if (!(target_step > 0.0))
    throw Error(ErrorKind::invalid_argument, "target step must be positive");
  const auto c = stack.speeds();
  check_speed_list(c);
  for (const auto &img : stack.images)
    if (img.intensity.nx != stack.grid.nx() || img.intensity.nz != stack.grid.nz())
      throw Error(ErrorKind::invalid_argument, "stack images do not match the grid");
  const double h = c[1] - c[0];
  const double span = c.back() - c.front();
  const double ratio = span / target_step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-6 * std::max(1.0, ratio))
    throw Error(ErrorKind::invalid_argument, "target step must divide the sweep span");
  const auto m = static_cast<std::size_t>(rounded) + 1;

  std::vector<double> offsets(m), targets(m);
  for (std::size_t q = 0; q < m; ++q) {
    offsets[q] = std::min(span, static_cast<double>(q) * target_step);
    targets[q] = c.front() + offsets[q];
  }
  // Land exactly on original samples where they coincide.
  for (std::size_t q = 0; q < m; ++q) {
    const double s = offsets[q] / h;
    if (std::abs(s - std::round(s)) < 1e-9) {
      offsets[q] = std::round(s) * h;
      targets[q] = c[static_cast<std::size_t>(std::round(s))];
    }
  }

  ImageStack out;
  out.grid = stack.grid;
  out.c_ref = stack.c_ref;
  out.images.resize(m);
  for (std::size_t q = 0; q < m; ++q) {
    out.images[q].grid = stack.grid;
    out.images[q].c_bf = targets[q];
    out.images[q].f_number = stack.images.front().f_number;
    out.images[q].state = stack.images.front().state;
    out.images[q].intensity = Field2D(stack.grid.nx(), stack.grid.nz());
  }
  const std::size_t npix = stack.grid.nx() * stack.grid.nz();

  if (kind == SplineKind::natural) {
    const auto weights = natural_spline_weights(n, h, offsets);
    parallel_for(npix, [&](std::size_t p) {
      for (std::size_t q = 0; q < m; ++q) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          v += weights[q * n + j] * stack.images[j].intensity.values[p];
        out.images[q].intensity.values[p] = v;
      }
    });
  } else {
    parallel_for(npix, [&](std::size_t p) {
      std::vector<double> xs(c), ys(n);
      for (std::size_t j = 0; j < n; ++j)
        ys[j] = stack.images[j].intensity.values[p];
      const auto ys_copy = ys;
      boost::math::interpolators::pchip<std::vector<double>> spline(std::move(xs), std::move(ys));
      for (std::size_t q = 0; q < m; ++q) {
        const double s = offsets[q] / h;
        const double r = std::round(s);
        out.images[q].intensity.values[p] =
            std::abs(s - r) < 1e-9 ? ys_copy[static_cast<std::size_t>(r)] : spline(targets[q]);
      }
    });
  }
  return out;
}

BeamformedImage log_compress(const BeamformedImage &image, double dynamic_range_db) {
  if (image.state != CompressionState::linear)
    throw Error(ErrorKind::invalid_argument, "image is already log-compressed");
  if (!(dynamic_range_db > 0.0))
    throw Error(ErrorKind::invalid_argument, "dynamic range must be positive");
  double peak = 0.0;
  for (double v : image.intensity.values) {
    if (!std::isfinite(v) || v < 0.0)
      throw Error(ErrorKind::invalid_argument, "envelope must be finite and non-negative");
    peak = std::max(peak, v);
  }
  if (!(peak > 0.0))
    throw Error(ErrorKind::degenerate_metric, "cannot log-compress an all-zero image");
  BeamformedImage out = image;
  out.state = CompressionState::log_db;
  for (double &v : out.intensity.values)
    v = v > 0.0 ? std::clamp(20.0 * std::log10(v / peak), -dynamic_range_db, 0.0)
                : -dynamic_range_db;
  return out;
}

DelayedChannels delay_channels(const ChannelDataSet &channels, double c_bf,
                               const ImagingGrid &grid, const BeamformOptions &options) {
  check_inputs(channels, c_bf, grid, options);
  const TransmitSpec transmit = options.transmit.value_or(channels.transmit);
  const Point tx_origin = transmit_origin(transmit, channels.array);
  const double c_tx =
      options.transmit_timing == TransmitTiming::beamforming_sos ? c_bf : options.c_ref;
  const double fs = channels.sampling_rate;
  const auto last = static_cast<double>(channels.num_samples - 1);
  const std::size_t ne = channels.num_elements;
  const std::size_t nx = grid.nx();

  DelayedChannels out;
  out.grid = grid;
  out.c_bf = c_bf;
  out.num_elements = ne;
  out.samples.assign(nx * grid.nz() * ne, 0.0);
  out.apertures.assign(nx * grid.nz(), Aperture{1, 0});

  parallel_for(grid.nz(), [&](std::size_t iz) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const auto g = pixel_geometry(channels, grid, ix, iz, 1.0, c_tx, tx_origin, options);
      if (!g.valid)
        continue;
      const std::size_t pix = iz * nx + ix;
      out.apertures[pix] = g.aperture;
      double *dst = out.samples.data() + pix * ne;
      for (std::size_t e = g.aperture.first; e <= g.aperture.last; ++e) {
        const double t = g.tx_time + distance(channels.array.element(e), g.position) / c_bf;
        const double u = (t - channels.start_time) * fs;
        if (!(u >= 0.0) || !(u < last))
          continue;
        const auto k = static_cast<std::size_t>(u);
        const double w = u - static_cast<double>(k);
        const auto ch = channels.channel(e);
        dst[e] = ch[k] * (1.0 - w) + ch[k + 1] * w;
      }
    }
  });
  return out;
}

void write_image_stack(const std::filesystem::path &stem, const ImageStack &stack) {
  if (stack.images.empty())
    throw Error(ErrorKind::invalid_argument, "cannot write an empty stack");
  const auto &g = stack.grid;
  const std::size_t npix = g.nx() * g.nz();
  std::vector<double> data;
  data.reserve(npix * stack.images.size());
  for (const auto &img : stack.images) {
    if (img.intensity.size() != npix)
      throw Error(ErrorKind::invalid_argument, "stack image does not match the grid");
    data.insert(data.end(), img.intensity.values.begin(), img.intensity.values.end());
  }
  auto hdr = stem;
  hdr += ".hdr";
  auto bin = stem;
  bin += ".bin";
  std::ofstream h(hdr);
  if (!h)
    throw Error(ErrorKind::io, "cannot write " + hdr.string());
  h.precision(17);
  h << "format = sosaf-stack-1\n";
  h << "layout = " << (g.layout == GridLayout::polar ? "polar" : "cartesian") << '\n';
  h << "grid = " << g.x_min << ' ' << g.x_max << ' ' << g.dx << ' ' << g.z_min << ' ' << g.z_max
    << ' ' << g.dz << ' ' << g.polar_radius << '\n';
  h << "nx = " << g.nx() << '\n';
  h << "nz = " << g.nz() << '\n';
  h << "c_ref = " << stack.c_ref << '\n';
  h << "f_number = " << stack.images.front().f_number << '\n';
  h << "state = "
    << (stack.images.front().state == CompressionState::log_db ? "log_db" : "linear") << '\n';
  h << "speeds =";
  for (const auto &img : stack.images)
    h << ' ' << img.c_bf;
  h << '\n';
  h << "dtype = float32le\n";
  h << "data = " << bin.filename().string() << '\n';
  if (!h)
    throw Error(ErrorKind::io, "failed writing " + hdr.string());
  write_float32_le(bin, data);
}

ImageStack read_image_stack(const std::filesystem::path &stem) {
  auto hdr = stem;
  hdr += ".hdr";
  const auto keys = read_key_values(hdr);
  if (require_key(keys, "format") != "sosaf-stack-1")
    throw Error(ErrorKind::io, "unknown stack format in " + hdr.string());
  if (require_key(keys, "dtype") != "float32le")
    throw Error(ErrorKind::io, "unsupported dtype in " + hdr.string());
  ImageStack stack;
  auto &g = stack.grid;
  {
    std::istringstream is(require_key(keys, "grid"));
    is >> g.x_min >> g.x_max >> g.dx >> g.z_min >> g.z_max >> g.dz >> g.polar_radius;
    if (!is)
      throw Error(ErrorKind::io, "malformed grid in " + hdr.string());
  }
  const auto &layout = require_key(keys, "layout");
  if (layout == "polar")
    g.layout = GridLayout::polar;
  else if (layout == "cartesian")
    g.layout = GridLayout::cartesian;
  else
    throw Error(ErrorKind::io, "unknown layout '" + layout + "'");
  g.validate();
  if (std::stoul(require_key(keys, "nx")) != g.nx() ||
      std::stoul(require_key(keys, "nz")) != g.nz())
    throw Error(ErrorKind::io, "grid size mismatch in " + hdr.string());
  stack.c_ref = std::stod(require_key(keys, "c_ref"));
  const double f_number = std::stod(require_key(keys, "f_number"));
  const auto state = require_key(keys, "state") == "log_db" ? CompressionState::log_db
                                                             : CompressionState::linear;
  std::vector<double> speeds;
  {
    std::istringstream is(require_key(keys, "speeds"));
    double v;
    while (is >> v)
      speeds.push_back(v);
  }
  if (speeds.empty())
    throw Error(ErrorKind::io, "stack header lists no speeds");
  const std::size_t npix = g.nx() * g.nz();
  const auto data = read_float32_le(stem.parent_path() / require_key(keys, "data"),
                                    npix * speeds.size());
  for (std::size_t k = 0; k < speeds.size(); ++k) {
    BeamformedImage img;
    img.grid = g;
    img.c_bf = speeds[k];
    img.f_number = f_number;
    img.state = state;
    img.intensity = Field2D(g.nx(), g.nz());
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(k * npix), npix,
                img.intensity.values.begin());
    stack.images.push_back(std::move(img));
  }
  return stack;
}

} // namespace sosaf
