#include "sosaf/evaluation.hpp"

#include "sosaf/error.hpp"
#include "sosaf/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <thread>

namespace sosaf {

namespace {

double half_crossing(double p0, double v0, double p1, double v1, double half) {
  // v0 >= half > v1 (or the reverse); linear interpolation between them.
  return p0 + (half - v0) * (p1 - p0) / (v1 - v0);
}

double bilinear(const BeamformedImage &image, double x, double z, bool &inside) {
  const auto &g = image.grid;
  const double u = (x - g.x_min) / g.dx;
  const double v = (z - g.z_min) / g.dz;
  const auto nx = static_cast<double>(image.intensity.nx);
  const auto nz = static_cast<double>(image.intensity.nz);
  inside = u >= 0.0 && v >= 0.0 && u <= nx - 1.0 && v <= nz - 1.0;
  if (!inside)
    return 0.0;
  const auto i = std::min(static_cast<std::size_t>(u), image.intensity.nx - 2);
  const auto k = std::min(static_cast<std::size_t>(v), image.intensity.nz - 2);
  const double a = u - static_cast<double>(i), b = v - static_cast<double>(k);
  const auto &f = image.intensity;
  return (1 - a) * (1 - b) * f(i, k) + a * (1 - b) * f(i + 1, k) + (1 - a) * b * f(i, k + 1) +
         a * b * f(i + 1, k + 1);
}

std::pair<double, double> roi_stats(const Field2D &f, const Roi &roi) {
  double sum = 0.0;
  for (std::size_t k = 0; k < roi.nz; ++k)
    for (std::size_t i = 0; i < roi.nx; ++i)
      sum += f(roi.ix0 + i, roi.iz0 + k);
  const double mean = sum / static_cast<double>(roi.size());
  double var = 0.0;
  for (std::size_t k = 0; k < roi.nz; ++k)
    for (std::size_t i = 0; i < roi.nx; ++i) {
      const double d = f(roi.ix0 + i, roi.iz0 + k) - mean;
      var += d * d;
    }
  return {mean, var / static_cast<double>(roi.size())};
}

} // namespace

double profile_fwhm(std::span<const double> positions, std::span<const double> values,
                    std::size_t peak) {
  if (positions.size() != values.size() || peak >= values.size())
    throw Error(ErrorKind::invalid_argument, "profile and positions must match");
  const double half = 0.5 * values[peak];
  if (!(half > 0.0))
    throw Error(ErrorKind::unresolved_target, "profile peak is not positive");
  std::size_t l = peak;
  while (l > 0 && values[l - 1] >= half)
    --l;
  if (l == 0)
    throw Error(ErrorKind::unresolved_target, "no half-maximum crossing left of the peak");
  std::size_t r = peak;
  while (r + 1 < values.size() && values[r + 1] >= half)
    ++r;
  if (r + 1 == values.size())
    throw Error(ErrorKind::unresolved_target, "no half-maximum crossing right of the peak");
  const double left = half_crossing(positions[l], values[l], positions[l - 1], values[l - 1], half);
  const double right =
      half_crossing(positions[r], values[r], positions[r + 1], values[r + 1], half);
  return right - left;
}

FwhmMeasurement lateral_fwhm(const BeamformedImage &image, const Point &approximate_peak,
                             double half_window_x, double half_window_z,
                             double peak_tolerance_x) {
  const auto &g = image.grid;
  if (g.layout != GridLayout::cartesian)
    throw Error(ErrorKind::invalid_argument, "lateral FWHM needs a Cartesian grid");
  if (image.state != CompressionState::linear)
    throw Error(ErrorKind::invalid_argument, "FWHM is measured on linear envelope data");
  const auto &f = image.intensity;
  const double tol_x = peak_tolerance_x > 0.0 ? std::min(peak_tolerance_x, half_window_x)
                                              : half_window_x;
  bool found = false;
  std::size_t bi = 0, bk = 0;
  for (std::size_t k = 0; k < f.nz; ++k) {
    if (std::abs(g.z_at(k) - approximate_peak.z) > half_window_z)
      continue;
    for (std::size_t i = 0; i < f.nx; ++i) {
      if (std::abs(g.x_at(i) - approximate_peak.x) > tol_x)
        continue;
      if (!found || f(i, k) > f(bi, bk)) {
        bi = i;
        bk = k;
        found = true;
      }
    }
  }
  if (!found)
    throw Error(ErrorKind::unresolved_target, "search window contains no pixels");
  const bool at_edge_x = std::abs(std::abs(g.x_at(bi) - approximate_peak.x) - tol_x) < 0.5 * g.dx;
  const bool at_edge_z = std::abs(std::abs(g.z_at(bk) - approximate_peak.z) - half_window_z) < 0.5 * g.dz;
  if (at_edge_x || at_edge_z)
    throw Error(ErrorKind::unresolved_target, "envelope peak sits on the search-window edge");
  std::vector<double> xs(f.nx), row(f.nx);
  for (std::size_t i = 0; i < f.nx; ++i) {
    xs[i] = g.x_at(i);
    row[i] = f(i, bk);
  }
  return {{g.x_at(bi), g.z_at(bk)}, profile_fwhm(xs, row, bi)};
}

FwhmMeasurement focused_fwhm(const ChannelDataSet &channels, double c_bf, const Point &target,
                             const BeamformOptions &options, double half_window_x,
                             double half_window_z, double step, double peak_tolerance_x) {
  if (!(step > 0.0) || !(half_window_x > 0.0) || !(half_window_z > 0.0))
    throw Error(ErrorKind::invalid_argument, "FWHM window and step must be positive");
  const double hx = 2.0 * half_window_x;
  const auto nx = static_cast<double>(std::ceil(hx / step));
  const auto nz = static_cast<double>(std::ceil(half_window_z / step));
  const double z_min = target.z - nz * step;
  if (!(z_min > 0.0))
    throw Error(ErrorKind::invalid_argument, "FWHM window reaches above the probe");
  const auto grid = ImagingGrid::cartesian(target.x - nx * step, target.x + nx * step, step,
                                           z_min, target.z + nz * step, step);
  const double c[] = {c_bf};
  const auto stack = sweep_beamform(channels, c, grid, options);
  return lateral_fwhm(stack.images.front(), target, half_window_x, half_window_z,
                      peak_tolerance_x);
}

FwhmReport fwhm_report(const ImageStack &stack, const Point &target, double selected_speed,
                       double reference_speed, double half_window_x, double half_window_z) {
  FwhmReport r;
  r.target = target;
  r.speeds = stack.speeds();
  r.fwhm.resize(stack.size());
  parallel_for(stack.size(), [&](std::size_t k) {
    r.fwhm[k] = lateral_fwhm(stack.images[k], target, half_window_x, half_window_z).fwhm;
  });
  auto lookup = [&](double c) {
    for (std::size_t k = 0; k < r.speeds.size(); ++k)
      if (std::abs(r.speeds[k] - c) < 1e-6)
        return r.fwhm[k];
    throw Error(ErrorKind::invalid_argument, "speed " + std::to_string(c) + " not in the stack");
  };
  r.fwhm_selected = lookup(selected_speed);
  r.fwhm_reference = lookup(reference_speed);
  r.reduction = 1.0 - r.fwhm_selected / r.fwhm_reference;
  return r;
}

double cnr(const BeamformedImage &image, const Roi &inside, const Roi &outside) {
  if (image.state != CompressionState::linear)
    throw Error(ErrorKind::invalid_argument, "CNR is measured on linear envelope data");
  inside.validate(image.intensity.nx, image.intensity.nz);
  outside.validate(image.intensity.nx, image.intensity.nz);
  if (inside.overlaps(outside))
    throw Error(ErrorKind::invalid_argument, "CNR regions must be disjoint");
  if (inside.size() < 100 || outside.size() < 100)
    throw Error(ErrorKind::invalid_argument, "CNR regions need at least 100 pixels each");
  const auto [mi, vi] = roi_stats(image.intensity, inside);
  const auto [mo, vo] = roi_stats(image.intensity, outside);
  const double denom = std::sqrt(vi + vo);
  if (!(denom > 0.0))
    throw Error(ErrorKind::degenerate_cnr, "both regions have zero variance");
  const double diff = std::abs(mi - mo);
  if (diff == 0.0)
    return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(diff / denom);
}

BoundaryProfile boundary_gradient(const BeamformedImage &image, const Point &from,
                                  const Point &to, std::size_t num_profiles, double spacing) {
  if (num_profiles == 0)
    throw Error(ErrorKind::invalid_argument, "need at least one profile");
  if (num_profiles > 1 && !(spacing > 0.0))
    throw Error(ErrorKind::invalid_argument, "profile spacing must be positive");
  if (image.grid.layout != GridLayout::cartesian)
    throw Error(ErrorKind::invalid_argument, "boundary profiles need a Cartesian grid");
  const double len = distance(from, to);
  if (!(len > 0.0))
    throw Error(ErrorKind::zero_length, "boundary segment has zero length");
  const double ux = (to.x - from.x) / len, uz = (to.z - from.z) / len;
  const double px = -uz, pz = ux;
  const double step = std::min(image.grid.dx, image.grid.dz);
  const auto samples = static_cast<std::size_t>(std::floor(len / step)) + 1;
  if (samples < 2)
    throw Error(ErrorKind::invalid_argument, "boundary segment shorter than one pixel");

  BoundaryProfile out;
  out.offsets.resize(samples);
  out.mean_profile.assign(samples, 0.0);
  std::vector<std::size_t> counts(samples, 0);
  for (std::size_t j = 0; j < num_profiles; ++j) {
    const double off = (static_cast<double>(j) - 0.5 * static_cast<double>(num_profiles - 1)) * spacing;
    for (std::size_t s = 0; s < samples; ++s) {
      const double t = static_cast<double>(s) * step;
      out.offsets[s] = t;
      bool inside = false;
      const double v =
          bilinear(image, from.x + ux * t + px * off, from.z + uz * t + pz * off, inside);
      if (!inside) {
        ++out.clipped;
        continue;
      }
      out.mean_profile[s] += v;
      ++counts[s];
    }
  }
  std::vector<double> xs, ys;
  for (std::size_t s = 0; s < samples; ++s) {
    if (counts[s] == 0)
      continue;
    out.mean_profile[s] /= static_cast<double>(counts[s]);
    xs.push_back(out.offsets[s]);
    ys.push_back(out.mean_profile[s]);
  }
  if (xs.size() < 2)
    throw Error(ErrorKind::invalid_argument, "boundary segment lies outside the image");
  for (std::size_t s = 1; s < xs.size(); ++s)
    out.max_abs_slope = std::max(out.max_abs_slope, std::abs((ys[s] - ys[s - 1]) / (xs[s] - xs[s - 1])));
  return out;
}

std::vector<BenchmarkRow> benchmark_metrics(std::span<const std::size_t> roi_sizes,
                                            std::span<const std::size_t> num_sos,
                                            std::size_t repetitions, std::uint64_t seed) {
  if (repetitions == 0)
    throw Error(ErrorKind::invalid_argument, "need at least one repetition");
  std::vector<BenchmarkRow> rows;
  for (std::size_t size : roi_sizes) {
    if (size < Roi::kMinSide)
      throw Error(ErrorKind::invalid_argument, "benchmark ROI smaller than 8 pixels");
    for (std::size_t count : num_sos) {
      if (count == 0)
        throw Error(ErrorKind::invalid_argument, "benchmark needs at least one speed");
      // Speckle-like Rayleigh field per image.
      ImageStack stack;
      stack.grid = ImagingGrid::cartesian(0.0, static_cast<double>(size - 1) * 1e-4, 1e-4, 1e-3,
                                          1e-3 + static_cast<double>(size - 1) * 1e-4, 1e-4);
      std::mt19937_64 rng(seed + 1000003u * size + count);
      std::normal_distribution<double> normal;
      for (std::size_t k = 0; k < count; ++k) {
        BeamformedImage img;
        img.grid = stack.grid;
        img.c_bf = 1400.0 + static_cast<double>(k);
        img.intensity = Field2D(size, size);
        for (double &v : img.intensity.values)
          v = std::hypot(normal(rng), normal(rng));
        stack.images.push_back(std::move(img));
      }
      const Roi roi{0, 0, size, size};
      (void)composite_metric(stack, roi);
      std::vector<double> times;
      for (std::size_t r = 0; r < repetitions; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto curve = composite_metric(stack, roi);
        const auto t1 = std::chrono::steady_clock::now();
        if (curve.speeds.size() != count)
          throw Error(ErrorKind::invalid_argument, "benchmark curve has the wrong length");
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
      std::sort(times.begin(), times.end());
      const std::size_t m = times.size();
      const double median = m % 2 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
      rows.push_back({size, count, repetitions, median, times.front(), times.back()});
    }
  }
  return rows;
}

double linear_fit_r2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorKind::invalid_argument, "linear fit needs >= 2 matching points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0))
    throw Error(ErrorKind::invalid_argument, "linear fit needs distinct x values");
  if (!(syy > 0.0))
    return 1.0;
  return sxy * sxy / (sxx * syy);
}

void write_benchmark_csv(const std::filesystem::path &path, std::span<const BenchmarkRow> rows) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::io, "cannot write " + path.string());
  out << "# threads=" << max_threads() << " hardware_concurrency=" << std::thread::hardware_concurrency()
      << '\n';
  out << "roi_size,num_sos,repetitions,median_s,min_s,max_s\n";
  out.precision(9);
  for (const auto &r : rows)
    out << r.roi_size << ',' << r.num_sos << ',' << r.repetitions << ',' << r.median_seconds
        << ',' << r.min_seconds << ',' << r.max_seconds << '\n';
  if (!out)
    throw Error(ErrorKind::io, "failed writing " + path.string());
}

} // namespace sosaf
