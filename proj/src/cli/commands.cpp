#include "sosaf/cli/commands.hpp"

#include "sosaf/beamformer.hpp"
#include "sosaf/error.hpp"
#include "sosaf/evaluation.hpp"
#include "sosaf/image_io.hpp"
#include "sosaf/metrics.hpp"
#include "sosaf/optimal_sos.hpp"
#include "sosaf/parallel.hpp"
#include "sosaf/simulator.hpp"

#include <boost/format.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

namespace sosaf::cli {

namespace fs = std::filesystem;

namespace {

class StageError : public Error {
public:
  StageError(const std::string &stage, const Error &inner)
      : Error(inner.kind(), "stage '" + stage + "' failed: " + detail(inner)) {}

private:
  // Message without the leading "kind: " prefix.
  static std::string detail(const Error &e) {
    const std::string what = e.what();
    const auto prefix = std::string(to_string(e.kind())) + ": ";
    return what.starts_with(prefix) ? what.substr(prefix.size()) : what;
  }
};

template <class Fn> auto stage(const char *name, const CommandContext &ctx, Fn &&fn) {
  if (ctx.verbose && ctx.log)
    *ctx.log << "[" << name << "]\n";
  try {
    return fn();
  } catch (const StageError &) {
    throw;
  } catch (const Error &e) {
    throw StageError(name, e);
  } catch (const std::exception &e) {
    throw StageError(name, Error(ErrorKind::io, e.what()));
  }
}

void prepare_output(const RunConfig &config, const CommandContext &ctx) {
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec)
    throw Error(ErrorKind::io, "cannot create output directory " + ctx.out_dir.string());
  save_config(ctx.out_dir / "config.ini", config);
}

std::ofstream open_out(const fs::path &path) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::io, "cannot write " + path.string());
  out.precision(10);
  return out;
}

std::string atlas_name(double d, double c, double f) {
  return (boost::format("d%.1fmm_cl%g_f%.2f") % (d * 1e3) % c % f).str();
}

// Index of the first ROI whose rectangle holds `p`, else 0.
std::size_t roi_for(const std::vector<Roi> &rois, const ImagingGrid &g, const Point &p) {
  const double u = std::round((p.x - g.x_min) / g.dx);
  const double v = std::round((p.z - g.z_min) / g.dz);
  for (std::size_t i = 0; i < rois.size(); ++i) {
    const auto &r = rois[i];
    if (u >= static_cast<double>(r.ix0) && u < static_cast<double>(r.ix0 + r.nx) &&
        v >= static_cast<double>(r.iz0) && v < static_cast<double>(r.iz0 + r.nz))
      return i;
  }
  return 0;
}

SceneSpec scene_spec(const RunConfig &c) {
  SceneSpec s;
  s.kind = c.scene.kind;
  s.pins = c.scene.pins;
  s.pin_reflectivity = c.scene.pin_reflectivity;
  s.x_min = c.scene.x_min;
  s.x_max = c.scene.x_max;
  s.z_min = c.scene.z_min;
  s.z_max = c.scene.z_max;
  s.scatterers_per_cell = c.scene.scatterers_per_cell;
  s.wavelength = c.medium.background_sos / c.probe.center_frequency;
  s.f_number = c.beamform.f_number;
  s.lesions = c.scene.lesions;
  s.seed = c.seed;
  return s;
}

} // namespace

void cmd_atlas(const RunConfig &config, const CommandContext &ctx) {
  prepare_output(config, ctx);
  const auto &at = config.atlas;
  const auto array = config.atlas_array();
  const auto region =
      ImagingGrid::cartesian(at.x_min, at.x_max, at.dx, at.z_min, at.z_max, at.dz);
  auto summary = open_out(ctx.out_dir / "atlas_summary.csv");
  summary << "name,layer_d_m,layer_c,f_number,c_opt_min,c_opt_max,mean_error_periods,"
             "mean_coherent_fraction,missing\n";
  for (double d : at.thicknesses)
    for (double c : at.layer_sos)
      for (double f : at.f_numbers) {
        const auto name = atlas_name(d, c, f);
        const auto map = stage("atlas", ctx, [&] {
          const LayeredMedium medium(d, c, config.medium.background_sos);
          OptimalSosOptions opts;
          opts.f_number = f;
          opts.convention = config.beamform.convention;
          if (ctx.verbose && ctx.log)
            *ctx.log << "  " << name << '\n';
          return map_fields(region, medium, array, opts);
        });
        stage("report", ctx, [&] {
          const auto dir = ctx.out_dir / name;
          fs::create_directories(dir);
          write_map(dir / "c_opt", map.c_opt);
          write_map(dir / "mean_error", map.mean_error_periods);
          write_map(dir / "coherent_fraction", map.coherent_fraction);
          double lo = std::numeric_limits<double>::infinity(), hi = -lo, err = 0.0, frac = 0.0;
          std::size_t n = 0;
          for (std::size_t i = 0; i < map.c_opt.size(); ++i) {
            if (!std::isfinite(map.c_opt.values[i]))
              continue;
            lo = std::min(lo, map.c_opt.values[i]);
            hi = std::max(hi, map.c_opt.values[i]);
            err += map.mean_error_periods.values[i];
            frac += map.coherent_fraction.values[i];
            ++n;
          }
          const double denom = n ? static_cast<double>(n) : 1.0;
          summary << name << ',' << d << ',' << c << ',' << f << ',' << lo << ',' << hi << ','
                  << err / denom << ',' << frac / denom << ',' << map.missing << '\n';
        });
      }
}

void cmd_pipeline(const RunConfig &config, const CommandContext &ctx) {
  prepare_output(config, ctx);
  const auto array = config.array();
  const auto medium = config.layered_medium();
  const auto grid = config.imaging_grid();
  const auto bf = config.beamform_options();
  const auto dir = ctx.out_dir;

  const auto channels = stage("simulate", ctx, [&] {
    const auto pulse =
        make_pulse(config.probe.center_frequency, config.probe.bandwidth, config.probe.sampling_rate);
    const auto scene = make_scene(scene_spec(config));
    SynthesisOptions so;
    so.transmit = {config.transmit.model, config.transmit.element};
    so.noise_rms = config.transmit.noise_rms;
    so.seed = config.seed;
    auto data = synthesize_channel_data(scene, medium, array, pulse, so);
    write_channel_data(dir / "channels", data);
    return data;
  });

  const auto speeds = config.sweep.speeds();
  const auto stack = stage("beamform", ctx, [&] {
    auto s = sweep_beamform(channels, speeds, grid, bf);
    write_image_stack(dir / "stack", s);
    return s;
  });

  const auto fine = stage("interpolate", ctx, [&] {
    if (config.sweep.interp_step == config.sweep.step)
      return stack;
    return interpolate_stack(stack, config.sweep.interp_step, config.sweep.spline);
  });

  struct RoiResult {
    Roi roi;
    MetricCurve curve;
    double analytic = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<RoiResult> results;
  std::vector<Roi> rois;
  stage("autofocus", ctx, [&] {
    for (std::size_t i = 0; i < config.rois.size(); ++i) {
      const auto &spec = config.rois[i];
      RoiResult r;
      r.roi = Roi::centered(grid, spec.center, spec.nx, spec.nz);
      r.curve = composite_metric(fine, r.roi, config.metrics);
      write_metric_curve_csv(dir / ("metric_curve_roi" + std::to_string(i) + ".csv"), r.curve);
      OptimalSosOptions opts;
      opts.f_number = config.beamform.f_number;
      opts.convention = config.beamform.convention;
      try {
        r.analytic = solve_c_opt(spec.center, medium, array, opts).c_opt;
      } catch (const Error &) {
        // Left as NaN in the summary (e.g. ROI center above the array).
      }
      rois.push_back(r.roi);
      results.push_back(std::move(r));
    }
  });

  const double c_ref = config.sweep.c_ref;
  const double selected = results.front().curve.c_opt;
  stage("report", ctx, [&] {
    auto out = open_out(dir / "summary.txt");
    out << "c_ref = " << c_ref << '\n';
    out << "c_opt = " << selected << '\n';
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto &r = results[i];
      out << "roi" << i << ".center_m = " << config.rois[i].center.x << ' '
          << config.rois[i].center.z << '\n';
      out << "roi" << i << ".c_opt_metric = " << r.curve.c_opt << '\n';
      out << "roi" << i << ".c_opt_analytic = " << r.analytic << '\n';
      out << "roi" << i << ".ambiguous = " << (r.curve.ambiguous ? "true" : "false") << '\n';
    }
  });

  stage("evaluate", ctx, [&] {
    const auto &ev = config.evaluation;
    if (!config.scene.pins.empty() && config.scene.kind != SceneKind::speckle &&
        config.scene.kind != SceneKind::anechoic_lesion) {
      // Speckle peaks inside the window can pass for the pin, so with a
      // background the width is measured on the pins alone, same geometry.
      std::optional<ChannelDataSet> isolated;
      if (config.scene.kind == SceneKind::composite) {
        SceneSpec pins_only;
        pins_only.pins = config.scene.pins;
        SynthesisOptions so;
        so.transmit = {config.transmit.model, config.transmit.element};
        isolated = synthesize_channel_data(
            make_scene(pins_only), medium, array,
            make_pulse(config.probe.center_frequency, config.probe.bandwidth,
                       config.probe.sampling_rate),
            so);
      }
      const ChannelDataSet &fwhm_data = isolated ? *isolated : channels;
      auto out = open_out(dir / "fwhm.csv");
      out << "pin_x_m,pin_z_m,c_selected,fwhm_selected_m,fwhm_reference_m,reduction\n";
      for (const auto &pin : config.scene.pins) {
        const double c = results[roi_for(rois, grid, pin)].curve.c_opt;
        const auto a = focused_fwhm(fwhm_data, c, pin, bf, ev.fwhm_half_window_x,
                                    ev.fwhm_half_window_z, ev.fwhm_step, ev.fwhm_peak_tolerance_x);
        const auto b = focused_fwhm(fwhm_data, c_ref, pin, bf, ev.fwhm_half_window_x,
                                    ev.fwhm_half_window_z, ev.fwhm_step, ev.fwhm_peak_tolerance_x);
        out << pin.x << ',' << pin.z << ',' << c << ',' << a.fwhm << ',' << b.fwhm << ','
            << 1.0 - a.fwhm / b.fwhm << '\n';
      }
    }

    const double pair[] = {std::min(selected, c_ref), std::max(selected, c_ref)};
    const std::span<const double> list(pair, selected == c_ref ? 1 : 2);
    const auto images = sweep_beamform(channels, list, grid, bf);
    const auto &img_sel = images.images[selected <= c_ref ? 0 : images.size() - 1];
    const auto &img_ref = images.images[selected <= c_ref ? images.size() - 1 : 0];
    const double dr = config.beamform.dynamic_range_db;
    const auto log_sel = log_compress(img_sel, dr);
    const auto log_ref = log_compress(img_ref, dr);
    write_log_png(dir / "image_c_opt.png", log_sel, dr);
    write_log_png(dir / "image_c_ref.png", log_ref, dr);

    if (ev.cnr_inside) {
      const auto in = Roi::centered(grid, ev.cnr_inside->center, ev.cnr_inside->nx, ev.cnr_inside->nz);
      const auto outside =
          Roi::centered(grid, ev.cnr_outside->center, ev.cnr_outside->nx, ev.cnr_outside->nz);
      const double a = cnr(img_sel, in, outside);
      const double b = cnr(img_ref, in, outside);
      auto out = open_out(dir / "cnr.csv");
      out << "c_selected,cnr_selected_db,cnr_reference_db,delta_db\n";
      out << selected << ',' << a << ',' << b << ',' << a - b << '\n';
    }
    if (ev.boundary) {
      const auto a = boundary_gradient(log_sel, ev.boundary->first, ev.boundary->second,
                                       ev.boundary_profiles, ev.boundary_spacing);
      const auto b = boundary_gradient(log_ref, ev.boundary->first, ev.boundary->second,
                                       ev.boundary_profiles, ev.boundary_spacing);
      auto out = open_out(dir / "boundary.csv");
      out << "c_selected,max_slope_selected_db_per_m,max_slope_reference_db_per_m,ratio,clipped\n";
      out << selected << ',' << a.max_abs_slope << ',' << b.max_abs_slope << ','
          << a.max_abs_slope / b.max_abs_slope << ',' << a.clipped + b.clipped << '\n';
    }
  });
}

void cmd_bench(const RunConfig &config, const CommandContext &ctx) {
  prepare_output(config, ctx);
  const auto rows = stage("bench", ctx, [&] {
    return benchmark_metrics(config.bench.roi_sizes, config.bench.num_sos,
                             config.bench.repetitions, config.seed);
  });
  stage("report", ctx, [&] { write_benchmark_csv(ctx.out_dir / "bench.csv", rows); });
  if (ctx.verbose && ctx.log)
    for (const auto &r : rows)
      *ctx.log << "  roi " << r.roi_size << " x " << r.num_sos << " speeds: " << r.median_seconds * 1e3
               << " ms\n";
}

int run_command(const CommandRequest &request, std::ostream &log) {
  RunConfig config;
  try {
    if (request.config_path)
      config = load_config(*request.config_path);
    if (request.seed)
      config.seed = *request.seed;
    config.validate();
  } catch (const Error &e) {
    log << "config error: " << e.what() << '\n';
    return exit_config;
  }
  if (request.command != "atlas" && request.command != "pipeline" && request.command != "bench") {
    log << "config error: unknown command '" << request.command << "'\n";
    return exit_config;
  }
  set_max_threads(request.threads);
  CommandContext ctx{request.out_dir, request.verbose, &log};
  try {
    if (request.command == "atlas")
      cmd_atlas(config, ctx);
    else if (request.command == "pipeline")
      cmd_pipeline(config, ctx);
    else
      cmd_bench(config, ctx);
  } catch (const Error &e) {
    log << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::configuration ? exit_config : exit_compute;
  } catch (const std::exception &e) {
    log << "error: " << e.what() << '\n';
    return exit_compute;
  }
  set_max_threads(0);
  return exit_ok;
}

} // namespace sosaf::cli
