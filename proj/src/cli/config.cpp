#include "sosaf/cli/config.hpp"

#include "sosaf/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sosaf::cli {

namespace pt = boost::property_tree;

namespace {

[[noreturn]] void config_error(const std::string &msg) { throw Error(ErrorKind::configuration, msg); }

std::string fmt_double(double v) {
  if (v == kFlatRadius)
    return "flat";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double to_double(const std::string &key, const std::string &text) {
  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(), ::isspace), t.end());
  if (t == "flat")
    return kFlatRadius;
  try {
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size())
      throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception &) {
    config_error("key '" + key + "': cannot parse number from '" + text + "'");
  }
}

std::size_t to_count(const std::string &key, const std::string &text) {
  const double v = to_double(key, text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e12)
    config_error("key '" + key + "': expected a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string &key, const std::string &text) {
  if (text == "true" || text == "1" || text == "yes")
    return true;
  if (text == "false" || text == "0" || text == "no")
    return false;
  config_error("key '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<std::string> split(const std::string &text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) {
    cur.erase(0, cur.find_first_not_of(" \t"));
    cur.erase(cur.find_last_not_of(" \t") + 1);
    if (!cur.empty())
      out.push_back(cur);
  }
  return out;
}

// "a, b, c" -> doubles.
std::vector<double> to_doubles(const std::string &key, const std::string &text) {
  std::vector<double> out;
  for (const auto &s : split(text, ','))
    out.push_back(to_double(key, s));
  return out;
}

// "a,b,...; a,b,..." -> tuples of fixed arity.
std::vector<std::vector<double>> to_tuples(const std::string &key, const std::string &text,
                                           std::size_t arity) {
  std::vector<std::vector<double>> out;
  for (const auto &group : split(text, ';')) {
    auto v = to_doubles(key, group);
    if (v.size() != arity)
      config_error("key '" + key + "': each entry needs " + std::to_string(arity) + " values");
    out.push_back(std::move(v));
  }
  return out;
}

template <class T> std::string join(const std::vector<T> &v, const char *sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      out += sep;
    if constexpr (std::is_floating_point_v<T>)
      out += fmt_double(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

std::string roi_text(const RoiSpec &r) {
  return fmt_double(r.center.x) + ", " + fmt_double(r.center.z) + ", " + std::to_string(r.nx) +
         ", " + std::to_string(r.nz);
}

RoiSpec roi_from(const std::string &key, const std::vector<double> &v) {
  RoiSpec r;
  r.center = {v[0], v[1]};
  r.nx = to_count(key, fmt_double(v[2]));
  r.nz = to_count(key, fmt_double(v[3]));
  return r;
}

SplineKind parse_spline(const std::string &s) {
  if (s == "natural")
    return SplineKind::natural;
  if (s == "monotone")
    return SplineKind::monotone;
  config_error("unknown spline '" + s + "' (natural | monotone)");
}

std::string spline_name(SplineKind k) { return k == SplineKind::natural ? "natural" : "monotone"; }

TransmitTiming parse_timing(const std::string &s) {
  if (s == "beamforming")
    return TransmitTiming::beamforming_sos;
  if (s == "reference")
    return TransmitTiming::reference_sos;
  if (s == "true_medium")
    return TransmitTiming::true_medium;
  config_error("unknown transmit timing '" + s + "' (beamforming | reference | true_medium)");
}

std::string timing_name(TransmitTiming t) {
  switch (t) {
  case TransmitTiming::beamforming_sos:
    return "beamforming";
  case TransmitTiming::reference_sos:
    return "reference";
  case TransmitTiming::true_medium:
    return "true_medium";
  }
  return "beamforming";
}

// Keys accepted per section, in the order they are written.
const std::map<std::string, std::vector<std::string>> &schema() {
  static const std::map<std::string, std::vector<std::string>> s{
      {"run", {"seed"}},
      {"probe", {"elements", "pitch_m", "radius_m", "f0_hz", "bandwidth", "fs_hz"}},
      {"medium", {"layer_d_m", "layer_c", "background_c"}},
      {"scene",
       {"kind", "pins", "pin_reflectivity", "x_min_m", "x_max_m", "z_min_m", "z_max_m",
        "scatterers_per_cell", "lesions"}},
      {"transmit", {"model", "element", "timing", "noise_rms"}},
      {"sweep", {"c_min", "c_max", "step", "interp_step", "c_ref", "spline"}},
      {"grid", {"x_min_m", "x_max_m", "dx_m", "z_min_m", "z_max_m", "dz_m"}},
      {"beamform", {"f_number", "aperture_convention", "dynamic_range_db"}},
      {"metrics", {"band_low", "band_high", "taper", "input", "rois"}},
      {"evaluation",
       {"fwhm_half_window_x_m", "fwhm_half_window_z_m", "fwhm_step_m", "fwhm_peak_tolerance_x_m",
        "cnr_inside", "cnr_outside", "boundary", "boundary_profiles", "boundary_spacing_m"}},
      {"atlas",
       {"layer_d_m", "layer_c", "f_numbers", "x_min_m", "x_max_m", "dx_m", "z_min_m", "z_max_m",
        "dz_m", "elements", "pitch_m"}},
      {"bench", {"roi_sizes", "num_sos", "repetitions"}},
  };
  return s;
}

} // namespace

std::vector<double> SweepConfig::speeds() const {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::llround((c_max - c_min) / step));
  for (std::size_t i = 0; i <= n; ++i)
    out.push_back(c_min + static_cast<double>(i) * step);
  return out;
}

ArrayGeometry RunConfig::array() const {
  return build_curvilinear_array(probe.elements, probe.pitch, probe.radius,
                                 probe.center_frequency);
}

ArrayGeometry RunConfig::atlas_array() const {
  return build_curvilinear_array(atlas.elements, atlas.pitch, probe.radius,
                                 probe.center_frequency);
}

LayeredMedium RunConfig::layered_medium() const {
  return {medium.thickness, medium.layer_sos, medium.background_sos};
}

ImagingGrid RunConfig::imaging_grid() const {
  return ImagingGrid::cartesian(grid.x_min, grid.x_max, grid.dx, grid.z_min, grid.z_max, grid.dz);
}

BeamformOptions RunConfig::beamform_options() const {
  BeamformOptions o;
  o.f_number = beamform.f_number;
  o.convention = beamform.convention;
  o.c_ref = sweep.c_ref;
  o.transmit_timing = transmit.timing;
  return o;
}

void RunConfig::validate() const {
  // Module constructors carry the authoritative checks; rethrow as config errors.
  try {
    (void)array();
    (void)layered_medium();
    (void)imaging_grid();
    (void)make_pulse(probe.center_frequency, probe.bandwidth, probe.sampling_rate);
    (void)atlas_array();
    (void)ImagingGrid::cartesian(atlas.x_min, atlas.x_max, atlas.dx, atlas.z_min, atlas.z_max,
                                 atlas.dz);
    for (double d : atlas.thicknesses)
      for (double c : atlas.layer_sos)
        (void)LayeredMedium(d, c, medium.background_sos);
  } catch (const Error &e) {
    config_error(std::string(e.what()));
  }
  if (transmit.model == TransmitModel::reciprocal && transmit.element >= probe.elements)
    config_error("transmit element index out of range");
  if (!(transmit.noise_rms >= 0.0))
    config_error("noise_rms must be >= 0");
  if (!(sweep.step > 0.0) || !(sweep.c_max >= sweep.c_min) || !(sweep.c_min > 0.0))
    config_error("sweep needs c_min > 0, c_max >= c_min and step > 0");
  const double steps = (sweep.c_max - sweep.c_min) / sweep.step;
  if (std::abs(steps - std::round(steps)) > 1e-6)
    config_error("sweep step must divide c_max - c_min");
  const double isteps = (sweep.c_max - sweep.c_min) / sweep.interp_step;
  if (!(sweep.interp_step > 0.0) || std::abs(isteps - std::round(isteps)) > 1e-6)
    config_error("interp_step must be positive and divide c_max - c_min");
  if (std::round(steps) + 1 < 4 && sweep.interp_step != sweep.step)
    config_error("interpolation needs at least 4 sweep speeds");
  if (!(sweep.c_ref > 0.0))
    config_error("c_ref must be positive");
  if (!(beamform.f_number > 0.0))
    config_error("f_number must be positive");
  for (double f : atlas.f_numbers)
    if (!(f > 0.0))
      config_error("atlas f_numbers must be positive");
  if (atlas.thicknesses.empty() || atlas.layer_sos.empty() || atlas.f_numbers.empty())
    config_error("atlas parameter lists must be nonempty");
  if (!(beamform.dynamic_range_db > 0.0))
    config_error("dynamic_range_db must be positive");
  if (!(metrics.band.low > 0.0) || !(metrics.band.high <= 1.0) ||
      !(metrics.band.low < metrics.band.high))
    config_error("metric band must satisfy 0 < band_low < band_high <= 1");
  if (rois.empty())
    config_error("at least one ROI is required");
  const auto g = imaging_grid();
  for (const auto &r : rois) {
    if (r.nx < Roi::kMinSide || r.nz < Roi::kMinSide)
      config_error("ROIs must be at least 8 x 8 pixels");
    if (r.nx > g.nx() || r.nz > g.nz())
      config_error("ROI larger than the imaging grid");
  }
  if (evaluation.cnr_inside.has_value() != evaluation.cnr_outside.has_value())
    config_error("cnr_inside and cnr_outside must be given together");
  if (evaluation.cnr_inside) {
    const auto a = Roi::centered(g, evaluation.cnr_inside->center, evaluation.cnr_inside->nx,
                                 evaluation.cnr_inside->nz);
    const auto b = Roi::centered(g, evaluation.cnr_outside->center, evaluation.cnr_outside->nx,
                                 evaluation.cnr_outside->nz);
    if (a.overlaps(b))
      config_error("CNR regions overlap");
    if (a.size() < 100 || b.size() < 100)
      config_error("CNR regions need at least 100 pixels each");
  }
  if (!(evaluation.fwhm_step > 0.0) || !(evaluation.fwhm_half_window_x > 0.0) ||
      !(evaluation.fwhm_half_window_z > 0.0) || !(evaluation.fwhm_peak_tolerance_x > 0.0))
    config_error("FWHM window, step and peak tolerance must be positive");
  if (evaluation.boundary_profiles == 0 || !(evaluation.boundary_spacing > 0.0))
    config_error("boundary profiles need a positive count and spacing");
  if (scene.kind != SceneKind::point_grid) {
    if (!(scene.x_max > scene.x_min) || !(scene.z_max > scene.z_min) || !(scene.z_min > 0.0))
      config_error("speckle region must be nonempty and below the probe");
    if (!(scene.scatterers_per_cell > 0.0))
      config_error("scatterers_per_cell must be positive");
  }
  if ((scene.kind == SceneKind::point_grid || scene.kind == SceneKind::composite) &&
      scene.pins.empty())
    config_error("point-grid scenes need at least one pin");
  for (const auto &l : scene.lesions)
    if (!(l.radius > 0.0))
      config_error("lesion radius must be positive");
  if (bench.roi_sizes.empty() || bench.num_sos.empty() || bench.repetitions == 0)
    config_error("bench lists must be nonempty and repetitions >= 1");
  for (auto s : bench.roi_sizes)
    if (s < Roi::kMinSide)
      config_error("bench ROI sizes must be at least 8");
  for (auto n : bench.num_sos)
    if (n == 0)
      config_error("bench num_sos entries must be >= 1");
}

RunConfig parse_config(std::istream &in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    config_error(std::string("malformed config: ") + e.what());
  }
  const auto &sch = schema();
  for (const auto &[section, body] : tree) {
    const auto it = sch.find(section);
    if (it == sch.end())
      config_error("unknown section [" + section + "]");
    for (const auto &[key, value] : body) {
      (void)value;
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        config_error("unknown key '" + key + "' in [" + section + "]");
    }
  }

  RunConfig c;
  auto get = [&](const std::string &section, const std::string &key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(section + "." + key, '.')))
      return *v;
    return std::nullopt;
  };
  auto num = [&](const char *s, const char *k, double &dst) {
    if (auto v = get(s, k))
      dst = to_double(std::string(s) + "." + k, *v);
  };
  auto count = [&](const char *s, const char *k, std::size_t &dst) {
    if (auto v = get(s, k))
      dst = to_count(std::string(s) + "." + k, *v);
  };
  auto wrap = [&](auto &&fn) {
    try {
      fn();
    } catch (const Error &e) {
      config_error(e.what());
    }
  };

  if (auto v = get("run", "seed"))
    c.seed = to_count("run.seed", *v);

  count("probe", "elements", c.probe.elements);
  num("probe", "pitch_m", c.probe.pitch);
  num("probe", "radius_m", c.probe.radius);
  num("probe", "f0_hz", c.probe.center_frequency);
  num("probe", "bandwidth", c.probe.bandwidth);
  num("probe", "fs_hz", c.probe.sampling_rate);

  num("medium", "layer_d_m", c.medium.thickness);
  num("medium", "layer_c", c.medium.layer_sos);
  num("medium", "background_c", c.medium.background_sos);

  if (auto v = get("scene", "kind"))
    wrap([&] { c.scene.kind = parse_scene_kind(*v); });
  if (auto v = get("scene", "pins")) {
    c.scene.pins.clear();
    for (const auto &t : to_tuples("scene.pins", *v, 2))
      c.scene.pins.push_back({t[0], t[1]});
  }
  num("scene", "pin_reflectivity", c.scene.pin_reflectivity);
  num("scene", "x_min_m", c.scene.x_min);
  num("scene", "x_max_m", c.scene.x_max);
  num("scene", "z_min_m", c.scene.z_min);
  num("scene", "z_max_m", c.scene.z_max);
  num("scene", "scatterers_per_cell", c.scene.scatterers_per_cell);
  if (auto v = get("scene", "lesions")) {
    c.scene.lesions.clear();
    for (const auto &t : to_tuples("scene.lesions", *v, 3))
      c.scene.lesions.push_back({{t[0], t[1]}, t[2]});
  }

  if (auto v = get("transmit", "model"))
    wrap([&] { c.transmit.model = parse_transmit_model(*v); });
  count("transmit", "element", c.transmit.element);
  if (auto v = get("transmit", "timing"))
    c.transmit.timing = parse_timing(*v);
  num("transmit", "noise_rms", c.transmit.noise_rms);

  num("sweep", "c_min", c.sweep.c_min);
  num("sweep", "c_max", c.sweep.c_max);
  num("sweep", "step", c.sweep.step);
  num("sweep", "interp_step", c.sweep.interp_step);
  num("sweep", "c_ref", c.sweep.c_ref);
  if (auto v = get("sweep", "spline"))
    c.sweep.spline = parse_spline(*v);

  num("grid", "x_min_m", c.grid.x_min);
  num("grid", "x_max_m", c.grid.x_max);
  num("grid", "dx_m", c.grid.dx);
  num("grid", "z_min_m", c.grid.z_min);
  num("grid", "z_max_m", c.grid.z_max);
  num("grid", "dz_m", c.grid.dz);

  num("beamform", "f_number", c.beamform.f_number);
  if (auto v = get("beamform", "aperture_convention"))
    wrap([&] { c.beamform.convention = parse_aperture_convention(*v); });
  num("beamform", "dynamic_range_db", c.beamform.dynamic_range_db);

  num("metrics", "band_low", c.metrics.band.low);
  num("metrics", "band_high", c.metrics.band.high);
  if (auto v = get("metrics", "taper"))
    c.metrics.band.taper = to_bool("metrics.taper", *v);
  if (auto v = get("metrics", "input"))
    c.metrics.input = parse_metric_input(*v);
  if (auto v = get("metrics", "rois")) {
    c.rois.clear();
    for (const auto &t : to_tuples("metrics.rois", *v, 4))
      c.rois.push_back(roi_from("metrics.rois", t));
  }

  auto &ev = c.evaluation;
  num("evaluation", "fwhm_half_window_x_m", ev.fwhm_half_window_x);
  num("evaluation", "fwhm_half_window_z_m", ev.fwhm_half_window_z);
  num("evaluation", "fwhm_step_m", ev.fwhm_step);
  num("evaluation", "fwhm_peak_tolerance_x_m", ev.fwhm_peak_tolerance_x);
  if (auto v = get("evaluation", "cnr_inside")) {
    const auto t = to_tuples("evaluation.cnr_inside", *v, 4);
    if (t.size() != 1)
      config_error("evaluation.cnr_inside takes exactly one region");
    ev.cnr_inside = roi_from("evaluation.cnr_inside", t[0]);
  }
  if (auto v = get("evaluation", "cnr_outside")) {
    const auto t = to_tuples("evaluation.cnr_outside", *v, 4);
    if (t.size() != 1)
      config_error("evaluation.cnr_outside takes exactly one region");
    ev.cnr_outside = roi_from("evaluation.cnr_outside", t[0]);
  }
  if (auto v = get("evaluation", "boundary")) {
    const auto t = to_tuples("evaluation.boundary", *v, 4);
    if (t.size() != 1)
      config_error("evaluation.boundary takes exactly one segment");
    ev.boundary = std::pair<Point, Point>{{t[0][0], t[0][1]}, {t[0][2], t[0][3]}};
  }
  count("evaluation", "boundary_profiles", ev.boundary_profiles);
  num("evaluation", "boundary_spacing_m", ev.boundary_spacing);

  auto &at = c.atlas;
  if (auto v = get("atlas", "layer_d_m"))
    at.thicknesses = to_doubles("atlas.layer_d_m", *v);
  if (auto v = get("atlas", "layer_c"))
    at.layer_sos = to_doubles("atlas.layer_c", *v);
  if (auto v = get("atlas", "f_numbers"))
    at.f_numbers = to_doubles("atlas.f_numbers", *v);
  num("atlas", "x_min_m", at.x_min);
  num("atlas", "x_max_m", at.x_max);
  num("atlas", "dx_m", at.dx);
  num("atlas", "z_min_m", at.z_min);
  num("atlas", "z_max_m", at.z_max);
  num("atlas", "dz_m", at.dz);
  count("atlas", "elements", at.elements);
  num("atlas", "pitch_m", at.pitch);

  if (auto v = get("bench", "roi_sizes")) {
    c.bench.roi_sizes.clear();
    for (double d : to_doubles("bench.roi_sizes", *v))
      c.bench.roi_sizes.push_back(to_count("bench.roi_sizes", fmt_double(d)));
  }
  if (auto v = get("bench", "num_sos")) {
    c.bench.num_sos.clear();
    for (double d : to_doubles("bench.num_sos", *v))
      c.bench.num_sos.push_back(to_count("bench.num_sos", fmt_double(d)));
  }
  count("bench", "repetitions", c.bench.repetitions);
  return c;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    config_error("cannot open config file " + path.string());
  return parse_config(in);
}

void write_config(std::ostream &out, const RunConfig &c) {
  auto kv = [&](const char *k, const std::string &v) { out << k << " = " << v << '\n'; };
  auto kd = [&](const char *k, double v) { kv(k, fmt_double(v)); };
  auto kn = [&](const char *k, std::size_t v) { kv(k, std::to_string(v)); };

  out << "[run]\n";
  kn("seed", c.seed);
  out << "\n[probe]\n";
  kn("elements", c.probe.elements);
  kd("pitch_m", c.probe.pitch);
  kd("radius_m", c.probe.radius);
  kd("f0_hz", c.probe.center_frequency);
  kd("bandwidth", c.probe.bandwidth);
  kd("fs_hz", c.probe.sampling_rate);
  out << "\n[medium]\n";
  kd("layer_d_m", c.medium.thickness);
  kd("layer_c", c.medium.layer_sos);
  kd("background_c", c.medium.background_sos);
  out << "\n[scene]\n";
  kv("kind", to_string(c.scene.kind));
  {
    std::string pins;
    for (std::size_t i = 0; i < c.scene.pins.size(); ++i)
      pins += (i ? "; " : "") + fmt_double(c.scene.pins[i].x) + ", " + fmt_double(c.scene.pins[i].z);
    if (!pins.empty())
      kv("pins", pins);
  }
  kd("pin_reflectivity", c.scene.pin_reflectivity);
  kd("x_min_m", c.scene.x_min);
  kd("x_max_m", c.scene.x_max);
  kd("z_min_m", c.scene.z_min);
  kd("z_max_m", c.scene.z_max);
  kd("scatterers_per_cell", c.scene.scatterers_per_cell);
  {
    std::string les;
    for (std::size_t i = 0; i < c.scene.lesions.size(); ++i) {
      const auto &l = c.scene.lesions[i];
      les += (i ? "; " : "") + fmt_double(l.center.x) + ", " + fmt_double(l.center.z) + ", " +
             fmt_double(l.radius);
    }
    if (!les.empty())
      kv("lesions", les);
  }
  out << "\n[transmit]\n";
  kv("model", to_string(c.transmit.model));
  kn("element", c.transmit.element);
  kv("timing", timing_name(c.transmit.timing));
  kd("noise_rms", c.transmit.noise_rms);
  out << "\n[sweep]\n";
  kd("c_min", c.sweep.c_min);
  kd("c_max", c.sweep.c_max);
  kd("step", c.sweep.step);
  kd("interp_step", c.sweep.interp_step);
  kd("c_ref", c.sweep.c_ref);
  kv("spline", spline_name(c.sweep.spline));
  out << "\n[grid]\n";
  kd("x_min_m", c.grid.x_min);
  kd("x_max_m", c.grid.x_max);
  kd("dx_m", c.grid.dx);
  kd("z_min_m", c.grid.z_min);
  kd("z_max_m", c.grid.z_max);
  kd("dz_m", c.grid.dz);
  out << "\n[beamform]\n";
  kd("f_number", c.beamform.f_number);
  kv("aperture_convention", to_string(c.beamform.convention));
  kd("dynamic_range_db", c.beamform.dynamic_range_db);
  out << "\n[metrics]\n";
  kd("band_low", c.metrics.band.low);
  kd("band_high", c.metrics.band.high);
  kv("taper", c.metrics.band.taper ? "true" : "false");
  kv("input", to_string(c.metrics.input));
  {
    std::string rois;
    for (std::size_t i = 0; i < c.rois.size(); ++i)
      rois += (i ? "; " : "") + roi_text(c.rois[i]);
    kv("rois", rois);
  }
  out << "\n[evaluation]\n";
  const auto &ev = c.evaluation;
  kd("fwhm_half_window_x_m", ev.fwhm_half_window_x);
  kd("fwhm_half_window_z_m", ev.fwhm_half_window_z);
  kd("fwhm_step_m", ev.fwhm_step);
  kd("fwhm_peak_tolerance_x_m", ev.fwhm_peak_tolerance_x);
  if (ev.cnr_inside)
    kv("cnr_inside", roi_text(*ev.cnr_inside));
  if (ev.cnr_outside)
    kv("cnr_outside", roi_text(*ev.cnr_outside));
  if (ev.boundary)
    kv("boundary", fmt_double(ev.boundary->first.x) + ", " + fmt_double(ev.boundary->first.z) +
                       ", " + fmt_double(ev.boundary->second.x) + ", " +
                       fmt_double(ev.boundary->second.z));
  kn("boundary_profiles", ev.boundary_profiles);
  kd("boundary_spacing_m", ev.boundary_spacing);
  out << "\n[atlas]\n";
  kv("layer_d_m", join(c.atlas.thicknesses));
  kv("layer_c", join(c.atlas.layer_sos));
  kv("f_numbers", join(c.atlas.f_numbers));
  kd("x_min_m", c.atlas.x_min);
  kd("x_max_m", c.atlas.x_max);
  kd("dx_m", c.atlas.dx);
  kd("z_min_m", c.atlas.z_min);
  kd("z_max_m", c.atlas.z_max);
  kd("dz_m", c.atlas.dz);
  kn("elements", c.atlas.elements);
  kd("pitch_m", c.atlas.pitch);
  out << "\n[bench]\n";
  kv("roi_sizes", join(c.bench.roi_sizes));
  kv("num_sos", join(c.bench.num_sos));
  kn("repetitions", c.bench.repetitions);
}

void save_config(const std::filesystem::path &path, const RunConfig &config) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::io, "cannot write " + path.string());
  write_config(out, config);
  if (!out)
    throw Error(ErrorKind::io, "failed writing " + path.string());
}

} // namespace sosaf::cli
