#include "sosaf/simulator.hpp"

#include "sosaf/delay.hpp"
#include "sosaf/error.hpp"
#include "sosaf/io_util.hpp"
#include "sosaf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace sosaf {

double Pulse::operator()(double t) const {
  if (std::abs(t) > half_duration())
    return 0.0;
  return std::exp(-t * t / (2.0 * sigma_ * sigma_)) *
         std::cos(2.0 * std::numbers::pi * f0_ * t);
}

Pulse make_pulse(double f0, double fractional_bandwidth, double fs) {
  if (!(f0 > 0.0) || !std::isfinite(f0))
    throw Error(ErrorKind::invalid_pulse, "center frequency must be positive");
  if (!(fractional_bandwidth > 0.0 && fractional_bandwidth < 2.0))
    throw Error(ErrorKind::invalid_pulse, "fractional bandwidth must lie in (0, 2)");
  if (!(fs >= 4.0 * f0))
    throw Error(ErrorKind::invalid_pulse, "sampling rate must be at least 4 * f0");

  Pulse p;
  p.f0_ = f0;
  p.bandwidth_ = fractional_bandwidth;
  p.fs_ = fs;
  p.sigma_ = std::sqrt(2.0 * std::numbers::ln2) / (std::numbers::pi * fractional_bandwidth * f0);
  const auto half = static_cast<std::size_t>(std::floor(p.half_duration() * fs));
  p.center_ = half;
  p.samples_.resize(2 * half + 1);
  for (std::size_t k = 0; k < p.samples_.size(); ++k) {
    const double t = (static_cast<double>(k) - static_cast<double>(half)) / fs;
    p.samples_[k] = p(t);
  }
  return p;
}

std::string to_string(SceneKind kind) {
  switch (kind) {
  case SceneKind::point_grid: return "point_grid";
  case SceneKind::speckle: return "speckle";
  case SceneKind::anechoic_lesion: return "anechoic_lesion";
  case SceneKind::composite: return "composite";
  }
  return "unknown";
}

SceneKind parse_scene_kind(const std::string &name) {
  for (auto k : {SceneKind::point_grid, SceneKind::speckle, SceneKind::anechoic_lesion,
                 SceneKind::composite})
    if (to_string(k) == name)
      return k;
  throw Error(ErrorKind::configuration, "unknown scene kind '" + name + "'");
}

namespace {

std::vector<Scatterer> speckle(const SceneSpec &spec) {
  if (!(spec.scatterers_per_cell > 0.0) || !(spec.wavelength > 0.0) || !(spec.f_number > 0.0))
    throw Error(ErrorKind::invalid_scene, "speckle density must be positive");
  const double width = spec.x_max - spec.x_min;
  const double depth = spec.z_max - spec.z_min;
  if (!(width > 0.0) || !(depth > 0.0))
    throw Error(ErrorKind::invalid_scene, "speckle region must have positive area");
  const double cell = std::pow(spec.wavelength * spec.f_number, 2);
  const auto count = static_cast<std::size_t>(std::ceil(width * depth / cell * spec.scatterers_per_cell));

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> ux(spec.x_min, spec.x_max);
  std::uniform_real_distribution<double> uz(spec.z_min, spec.z_max);
  std::normal_distribution<double> amplitude(0.0, 1.0);
  std::vector<Scatterer> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = ux(rng);
    const double z = uz(rng);
    out.push_back({{x, z}, amplitude(rng)});
  }
  return out;
}

void carve_lesions(std::vector<Scatterer> &scatterers, const std::vector<Lesion> &lesions) {
  for (const auto &lesion : lesions)
    if (!(lesion.radius > 0.0))
      throw Error(ErrorKind::invalid_scene, "lesion radius must be positive");
  std::erase_if(scatterers, [&](const Scatterer &s) {
    return std::any_of(lesions.begin(), lesions.end(), [&](const Lesion &l) {
      return distance(s.position, l.center) <= l.radius;
    });
  });
}

std::vector<Scatterer> pins(const SceneSpec &spec) {
  if (!std::isfinite(spec.pin_reflectivity))
    throw Error(ErrorKind::invalid_scene, "pin reflectivity must be finite");
  std::vector<Scatterer> out;
  for (const auto &p : spec.pins)
    out.push_back({p, spec.pin_reflectivity});
  return out;
}

} // namespace

Scene make_scene(const SceneSpec &spec) {
  Scene scene{spec.kind, {}};
  switch (spec.kind) {
  case SceneKind::point_grid:
    if (spec.pins.empty())
      throw Error(ErrorKind::invalid_scene, "point grid needs at least one pin");
    scene.scatterers = pins(spec);
    break;
  case SceneKind::speckle:
    scene.scatterers = speckle(spec);
    break;
  case SceneKind::anechoic_lesion:
    if (spec.lesions.empty())
      throw Error(ErrorKind::invalid_scene, "anechoic-lesion scene needs a lesion");
    scene.scatterers = speckle(spec);
    carve_lesions(scene.scatterers, spec.lesions);
    break;
  case SceneKind::composite: {
    scene.scatterers = speckle(spec);
    carve_lesions(scene.scatterers, spec.lesions);
    auto p = pins(spec);
    scene.scatterers.insert(scene.scatterers.end(), p.begin(), p.end());
    break;
  }
  }
  return scene;
}

std::string to_string(TransmitModel model) {
  return model == TransmitModel::ideal ? "ideal" : "reciprocal";
}

TransmitModel parse_transmit_model(const std::string &name) {
  if (name == "ideal")
    return TransmitModel::ideal;
  if (name == "reciprocal")
    return TransmitModel::reciprocal;
  throw Error(ErrorKind::configuration, "unsupported transmit model '" + name + "'");
}

Point transmit_origin(const TransmitSpec &transmit, const ArrayGeometry &array) {
  if (transmit.model == TransmitModel::ideal)
    return {0.0, 0.0};
  if (transmit.element >= array.size())
    throw Error(ErrorKind::configuration, "transmit element index out of range");
  return array.element(transmit.element);
}

namespace {

// Outward unit normal of an element face.
Point element_normal(const ArrayGeometry &array, const Point &e) {
  if (array.is_flat())
    return {0.0, 1.0};
  const double r = array.radius();
  const double nx = e.x, nz = e.z + r;
  const double len = std::hypot(nx, nz);
  return {nx / len, nz / len};
}

} // namespace

ChannelDataSet synthesize_channel_data(const Scene &scene, const LayeredMedium &medium,
                                       const ArrayGeometry &array, const Pulse &pulse,
                                       const SynthesisOptions &options) {
  if (scene.scatterers.empty() && !(options.noise_rms > 0.0))
    throw Error(ErrorKind::invalid_scene, "scene is empty and noise is off");
  if (!(options.noise_rms >= 0.0))
    throw Error(ErrorKind::invalid_argument, "noise rms must be >= 0");
  const Point tx = transmit_origin(options.transmit, array);

  const std::size_t ne = array.size();
  const std::size_t ns = scene.scatterers.size();
  for (const auto &s : scene.scatterers)
    if (!std::isfinite(s.reflectivity) || !(s.position.z > array.max_element_z()))
      throw Error(ErrorKind::invalid_scene, "scatterers must be finite and below the array");

  std::vector<double> tx_time(ns), tx_len(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    tx_time[i] = true_delay_straight(tx, scene.scatterers[i].position, medium);
    tx_len[i] = distance(tx, scene.scatterers[i].position);
  }

  // Receive legs, element-major.
  std::vector<double> rx_time(ne * ns), rx_gain(ne * ns);
  double latest = 0.0;
  const double f0_mhz = pulse.center_frequency() * 1e-6;
  for (std::size_t n = 0; n < ne; ++n) {
    const auto &e = array.element(n);
    const Point normal = element_normal(array, e);
    for (std::size_t i = 0; i < ns; ++i) {
      const auto &s = scene.scatterers[i];
      const double t = true_delay_straight(e, s.position, medium);
      double gain = s.reflectivity;
      const double r = distance(e, s.position);
      if (options.spherical_spreading)
        gain /= std::max(tx_len[i], 1e-6) * r;
      if (options.element_directivity)
        gain *= std::max(0.0, (normal.x * (s.position.x - e.x) + normal.z * (s.position.z - e.z)) / r);
      if (options.attenuation_db_per_cm_mhz > 0.0)
        gain *= std::pow(10.0, -options.attenuation_db_per_cm_mhz * f0_mhz *
                                   (tx_len[i] + r) * 100.0 / 20.0);
      rx_time[n * ns + i] = t;
      rx_gain[n * ns + i] = gain;
      latest = std::max(latest, tx_time[i] + t);
    }
  }

  ChannelDataSet out;
  out.num_elements = ne;
  out.sampling_rate = pulse.sampling_rate();
  out.start_time = 0.0;
  out.array = array;
  out.medium = medium;
  out.transmit = options.transmit;
  const double duration = options.duration.value_or(latest + pulse.half_duration() + 1e-6);
  if (!(duration > 0.0))
    throw Error(ErrorKind::invalid_argument, "record duration must be positive");
  out.num_samples = static_cast<std::size_t>(std::ceil(duration * out.sampling_rate)) + 1;
  out.samples.assign(ne * out.num_samples, 0.0);

  const double fs = out.sampling_rate;
  const double half = pulse.half_duration();
  const auto last = static_cast<long>(out.num_samples) - 1;
  parallel_for(ne, [&](std::size_t n) {
    auto channel = out.channel(n);
    for (std::size_t i = 0; i < ns; ++i) {
      const double arrival = tx_time[i] + rx_time[n * ns + i];
      const double gain = rx_gain[n * ns + i];
      const long k0 = std::max(0L, static_cast<long>(std::ceil((arrival - half) * fs)));
      const long k1 = std::min(last, static_cast<long>(std::floor((arrival + half) * fs)));
      for (long k = k0; k <= k1; ++k)
        channel[static_cast<std::size_t>(k)] += gain * pulse(static_cast<double>(k) / fs - arrival);
    }
  });

  if (options.noise_rms > 0.0) {
    double peak = 0.0;
    for (const auto &s : scene.scatterers)
      peak = std::max(peak, std::abs(s.reflectivity));
    if (peak == 0.0)
      peak = 1.0;
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> noise(0.0, options.noise_rms * peak);
    for (auto &v : out.samples)
      v += noise(rng);
  }
  return out;
}

namespace {

std::string geometry_record(const ArrayGeometry &a) {
  std::ostringstream os;
  os.precision(17);
  os << a.size() << ' ' << a.pitch() << ' ';
  if (a.is_flat())
    os << "flat";
  else
    os << a.radius();
  os << ' ' << a.center_frequency();
  return os.str();
}

ArrayGeometry parse_geometry_record(const std::string &text) {
  std::istringstream is(text);
  std::size_t n = 0;
  double pitch = 0.0, f0 = 0.0;
  std::string radius;
  if (!(is >> n >> pitch >> radius >> f0))
    throw Error(ErrorKind::io, "malformed geometry record");
  return build_curvilinear_array(n, pitch, radius == "flat" ? kFlatRadius : std::stod(radius), f0);
}

} // namespace

void write_channel_data(const std::filesystem::path &stem, const ChannelDataSet &data) {
  auto bin = stem;
  bin += ".bin";
  auto hdr = stem;
  hdr += ".hdr";

  std::ofstream h(hdr);
  if (!h)
    throw Error(ErrorKind::io, "cannot write " + hdr.string());
  h.precision(17);
  h << "format = sosaf-channels 1\n";
  h << "elements = " << data.num_elements << '\n';
  h << "samples = " << data.num_samples << '\n';
  h << "fs_hz = " << data.sampling_rate << '\n';
  h << "start_time_s = " << data.start_time << '\n';
  h << "geometry = " << geometry_record(data.array) << '\n';
  if (data.medium)
    h << "medium = " << data.medium->thickness() << ' ' << data.medium->layer_sos() << ' '
      << data.medium->background_sos() << '\n';
  else
    h << "medium = none\n";
  h << "transmit = " << to_string(data.transmit.model) << ' ' << data.transmit.element << '\n';
  h << "dtype = float32-le\n";
  h << "data = " << bin.filename().string() << '\n';
  if (!h)
    throw Error(ErrorKind::io, "failed writing " + hdr.string());

  write_float32_le(bin, data.samples);
}

ChannelDataSet read_channel_data(const std::filesystem::path &stem) {
  auto hdr = stem;
  hdr += ".hdr";
  const auto keys = read_key_values(hdr);
  ChannelDataSet d;
  d.num_elements = std::stoul(require_key(keys, "elements"));
  d.num_samples = std::stoul(require_key(keys, "samples"));
  d.sampling_rate = std::stod(require_key(keys, "fs_hz"));
  d.start_time = std::stod(require_key(keys, "start_time_s"));
  d.array = parse_geometry_record(require_key(keys, "geometry"));
  const auto medium = require_key(keys, "medium");
  if (medium != "none") {
    std::istringstream is(medium);
    double t = 0, cl = 0, cb = 0;
    if (!(is >> t >> cl >> cb))
      throw Error(ErrorKind::io, "malformed medium record");
    d.medium = LayeredMedium(t, cl, cb);
  }
  {
    std::istringstream is(require_key(keys, "transmit"));
    std::string model;
    is >> model >> d.transmit.element;
    d.transmit.model = parse_transmit_model(model);
  }
  if (d.array.size() != d.num_elements)
    throw Error(ErrorKind::io, "geometry does not match element count");
  d.samples = read_float32_le(stem.parent_path() / require_key(keys, "data"),
                              d.num_elements * d.num_samples);
  return d;
}

} // namespace sosaf
