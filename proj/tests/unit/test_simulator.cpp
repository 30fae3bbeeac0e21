#include "doctest.h"
#include "oracles.hpp"

#include "sosaf/delay.hpp"
#include "sosaf/error.hpp"
#include "sosaf/simulator.hpp"

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>

using namespace sosaf;

namespace {

ErrorKind kind_of(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected sosaf::Error");
  return ErrorKind::io;
}

std::size_t abs_argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (std::abs(v[k]) > std::abs(v[best]))
      best = k;
  return best;
}

Scene pins_at(std::vector<Point> pts) {
  SceneSpec s;
  s.pins = std::move(pts);
  return make_scene(s);
}

} // namespace

TEST_CASE("pulse peaks at 1 at t = 0 and is even") {
  const auto p = make_pulse(3e6, 0.6, 20e6);
  CHECK(p(0.0) == 1.0);
  const auto s = p.samples();
  CHECK(s[p.center_index()] == 1.0);
  for (std::size_t k = 0; k < s.size(); ++k)
    CHECK(s[k] == doctest::Approx(s[s.size() - 1 - k]).epsilon(1e-14));
  for (double t : {1e-8, 7.3e-8, 2.1e-7})
    CHECK(p(t) == doctest::Approx(p(-t)).epsilon(1e-14));
  CHECK(p(p.half_duration() * 1.01) == 0.0);
}

TEST_CASE("pulse spectrum: peak within one bin of f0, -6 dB width = bw * f0") {
  const auto p = make_pulse(3e6, 0.6, 20e6);
  const auto s = p.samples();
  // Zero-padded naive DFT for a fine frequency axis.
  const std::size_t n = 4096;
  const double fs = 20e6, df = fs / n;
  std::vector<double> mag(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double ph = -2.0 * std::numbers::pi * static_cast<double>(k * j) / n;
      acc += s[j] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    mag[k] = std::abs(acc);
  }
  std::size_t peak = 0;
  for (std::size_t k = 1; k < mag.size(); ++k)
    if (mag[k] > mag[peak])
      peak = k;
  CHECK(std::abs(peak * df - 3e6) <= df);
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && mag[lo] > 0.5 * mag[peak])
    --lo;
  while (hi + 1 < mag.size() && mag[hi] > 0.5 * mag[peak])
    ++hi;
  CHECK((hi - lo) * df == doctest::Approx(0.6 * 3e6).epsilon(0.02));
}

TEST_CASE("pulse preconditions") {
  CHECK(kind_of([] { make_pulse(0.0, 0.6, 20e6); }) == ErrorKind::invalid_pulse);
  CHECK(kind_of([] { make_pulse(3e6, 0.0, 20e6); }) == ErrorKind::invalid_pulse);
  CHECK(kind_of([] { make_pulse(3e6, 2.0, 20e6); }) == ErrorKind::invalid_pulse);
  CHECK(kind_of([] { make_pulse(3e6, 0.6, 11e6); }) == ErrorKind::invalid_pulse);
}

TEST_CASE("point grid scene") {
  const auto s = pins_at({{0, 20e-3}, {0, 40e-3}, {0, 60e-3}});
  REQUIRE(s.scatterers.size() == 3);
  for (const auto &sc : s.scatterers) {
    CHECK(sc.reflectivity == 1.0);
    CHECK(sc.position.x == 0.0);
  }
  CHECK(kind_of([] { make_scene(SceneSpec{}); }) == ErrorKind::invalid_scene);
}

TEST_CASE("speckle density, determinism and lesion voids") {
  SceneSpec s;
  s.kind = SceneKind::anechoic_lesion;
  s.x_min = -10e-3;
  s.x_max = 10e-3;
  s.z_min = 40e-3;
  s.z_max = 60e-3;
  s.lesions = {{{0.0, 50e-3}, 5e-3}};
  s.seed = 42;
  const auto a = make_scene(s);
  const auto b = make_scene(s);
  REQUIRE(a.scatterers.size() == b.scatterers.size());
  for (std::size_t i = 0; i < a.scatterers.size(); ++i) {
    CHECK(a.scatterers[i].position.x == b.scatterers[i].position.x);
    CHECK(a.scatterers[i].reflectivity == b.scatterers[i].reflectivity);
    CHECK(distance(a.scatterers[i].position, {0.0, 50e-3}) > 5e-3);
  }
  s.kind = SceneKind::speckle;
  const auto full = make_scene(s);
  const double cell = std::pow(s.wavelength * s.f_number, 2);
  CHECK(full.scatterers.size() / (20e-3 * 20e-3 / cell) >= 10.0);
  s.seed = 43;
  CHECK(make_scene(s).scatterers.front().position.x != full.scatterers.front().position.x);

  s.scatterers_per_cell = 0.0;
  CHECK(kind_of([&] { make_scene(s); }) == ErrorKind::invalid_scene);
  s.scatterers_per_cell = 10.0;
  s.kind = SceneKind::anechoic_lesion;
  s.lesions = {{{0.0, 50e-3}, -1e-3}};
  CHECK(kind_of([&] { make_scene(s); }) == ErrorKind::invalid_scene);
  CHECK(parse_scene_kind("composite") == SceneKind::composite);
  CHECK(kind_of([] { parse_scene_kind("cyst"); }) == ErrorKind::configuration);
}

TEST_CASE("single scatterer in a uniform medium: per-channel peaks at the round trip") {
  const auto arr = build_curvilinear_array(32, 1.05e-3, 60e-3, 3e6);
  const auto pulse = make_pulse(3e6, 0.6, 20e6);
  const Point sc{4e-3, 45e-3};
  const auto data =
      synthesize_channel_data(pins_at({sc}), LayeredMedium::uniform(1540), arr, pulse);
  const double tx = std::hypot(sc.x, sc.z) / 1540;
  for (std::size_t n = 0; n < arr.size(); ++n) {
    const auto &e = arr.element(n);
    const double t = tx + std::hypot(sc.x - e.x, sc.z - e.z) / 1540;
    const auto k = abs_argmax(data.channel(n));
    CHECK(std::abs(data.time_at(k) - t) <= 1.0 / data.sampling_rate);
  }
}

TEST_CASE("layered medium: peak times follow the straight-ray delays") {
  const auto arr = build_curvilinear_array(64, 1.05e-3, 60e-3, 3e6);
  const auto pulse = make_pulse(3e6, 0.6, 20e6);
  const double d = 20e-3, cl = 1450, cb = 1540;
  const Point sc{0.0, 60e-3};
  const auto data = synthesize_channel_data(pins_at({sc}), LayeredMedium(d, cl, cb), arr, pulse);
  const double tx = oracle::straight_delay({0, 0}, {sc.x, sc.z}, d, cl, cb);
  const double tx_uniform = std::hypot(sc.x, sc.z) / cb;
  for (std::size_t n = 0; n < arr.size(); ++n) {
    const auto &e = arr.element(n);
    const double rx = oracle::straight_delay({e.x, e.z}, {sc.x, sc.z}, d, cl, cb);
    const double rx_uniform = std::hypot(sc.x - e.x, sc.z - e.z) / cb;
    const double peak = data.time_at(abs_argmax(data.channel(n)));
    CHECK(std::abs(peak - (tx + rx)) <= 1.0 / data.sampling_rate);
    // The excess over the uniform prediction is the per-element aberration.
    CHECK(std::abs((peak - tx_uniform - rx_uniform) - (tx - tx_uniform) - (rx - rx_uniform)) <=
          1.0 / data.sampling_rate);
  }
}

TEST_CASE("superposition and reflectivity scaling") {
  const auto arr = build_curvilinear_array(16, 1.05e-3, 60e-3, 3e6);
  const auto pulse = make_pulse(3e6, 0.6, 20e6);
  const LayeredMedium m(20e-3, 1450, 1540);
  SynthesisOptions o;
  o.duration = 100e-6;
  const auto a = synthesize_channel_data(pins_at({{0, 40e-3}}), m, arr, pulse, o);
  const auto b = synthesize_channel_data(pins_at({{3e-3, 55e-3}}), m, arr, pulse, o);
  const auto ab = synthesize_channel_data(pins_at({{0, 40e-3}, {3e-3, 55e-3}}), m, arr, pulse, o);
  double worst = 0.0;
  for (std::size_t i = 0; i < ab.samples.size(); ++i)
    worst = std::max(worst, std::abs(ab.samples[i] - a.samples[i] - b.samples[i]));
  CHECK(worst < 1e-12);

  SceneSpec s;
  s.pins = {{0, 40e-3}};
  s.pin_reflectivity = 2.0;
  const auto twice = synthesize_channel_data(make_scene(s), m, arr, pulse, o);
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(twice.samples[i] == 2.0 * a.samples[i]);
}

TEST_CASE("noise: seeded, bit-identical, scaled by the peak reflectivity") {
  const auto arr = build_curvilinear_array(64, 1.05e-3, 60e-3, 3e6);
  const auto pulse = make_pulse(3e6, 0.6, 20e6);
  SynthesisOptions o;
  o.noise_rms = 0.1;
  o.seed = 9;
  o.duration = 20e-6;
  SceneSpec s;
  s.pins = {{0, 80e-3}}; // echo arrives after the record ends
  s.pin_reflectivity = 3.0;
  const auto a = synthesize_channel_data(make_scene(s), LayeredMedium::uniform(1540), arr, pulse, o);
  const auto b = synthesize_channel_data(make_scene(s), LayeredMedium::uniform(1540), arr, pulse, o);
  CHECK(a.samples == b.samples);
  double sq = 0.0;
  for (double v : a.samples)
    sq += v * v;
  CHECK(std::sqrt(sq / a.samples.size()) == doctest::Approx(0.3).epsilon(0.05));
  o.seed = 10;
  const auto c = synthesize_channel_data(make_scene(s), LayeredMedium::uniform(1540), arr, pulse, o);
  CHECK(c.samples != a.samples);
}

TEST_CASE("synthesis preconditions") {
  const auto arr = build_curvilinear_array(8, 1e-3, 60e-3, 3e6);
  const auto pulse = make_pulse(3e6, 0.6, 20e6);
  CHECK(kind_of([&] {
          synthesize_channel_data(Scene{}, LayeredMedium::uniform(1540), arr, pulse);
        }) == ErrorKind::invalid_scene);
  CHECK(kind_of([&] {
          SynthesisOptions o;
          o.transmit = {TransmitModel::reciprocal, 99};
          synthesize_channel_data(pins_at({{0, 1e-2}}), LayeredMedium::uniform(1540), arr, pulse, o);
        }) == ErrorKind::configuration);
  CHECK(kind_of([] { parse_transmit_model("plane"); }) == ErrorKind::configuration);
  CHECK(parse_transmit_model("reciprocal") == TransmitModel::reciprocal);
}

TEST_CASE("reciprocal transmit fires from the chosen element") {
  const auto arr = build_curvilinear_array(16, 1.05e-3, 60e-3, 3e6);
  const auto pulse = make_pulse(3e6, 0.6, 20e6);
  SynthesisOptions o;
  o.transmit = {TransmitModel::reciprocal, 3};
  const Point sc{2e-3, 30e-3};
  const auto data =
      synthesize_channel_data(pins_at({sc}), LayeredMedium::uniform(1540), arr, pulse, o);
  const auto &tx = arr.element(3);
  const double t_tx = distance(tx, sc) / 1540;
  for (std::size_t n = 0; n < arr.size(); ++n) {
    const double t = t_tx + distance(arr.element(n), sc) / 1540;
    CHECK(std::abs(data.time_at(abs_argmax(data.channel(n))) - t) <= 1.0 / 20e6);
  }
}

TEST_CASE("optional propagation effects reduce amplitude") {
  const auto arr = build_curvilinear_array(8, 1e-3, 60e-3, 3e6);
  const auto pulse = make_pulse(3e6, 0.6, 20e6);
  const auto scene = pins_at({{0, 40e-3}});
  const auto m = LayeredMedium::uniform(1540);
  auto peak = [&](const SynthesisOptions &o) {
    const auto d = synthesize_channel_data(scene, m, arr, pulse, o);
    return std::abs(d.samples[abs_argmax(d.channel(4))] );
  };
  SynthesisOptions plain;
  SynthesisOptions att;
  att.attenuation_db_per_cm_mhz = 0.5;
  SynthesisOptions dir;
  dir.element_directivity = true;
  CHECK(peak(att) < peak(plain));
  CHECK(peak(dir) <= peak(plain));
}

TEST_CASE("channel data file round trip") {
  const auto arr = build_curvilinear_array(12, 1.05e-3, 60e-3, 3e6);
  const auto pulse = make_pulse(3e6, 0.6, 20e6);
  const auto data =
      synthesize_channel_data(pins_at({{0, 30e-3}}), LayeredMedium(10e-3, 1450, 1540), arr, pulse);
  const auto dir = std::filesystem::temp_directory_path() / "sosaf_test_channels";
  std::filesystem::create_directories(dir);
  write_channel_data(dir / "ch", data);
  const auto back = read_channel_data(dir / "ch");
  CHECK(back.num_elements == data.num_elements);
  CHECK(back.num_samples == data.num_samples);
  CHECK(back.sampling_rate == data.sampling_rate);
  CHECK(back.start_time == data.start_time);
  REQUIRE(back.medium.has_value());
  CHECK(back.medium->thickness() == 10e-3);
  CHECK(back.medium->layer_sos() == 1450);
  CHECK(back.array.size() == 12);
  CHECK(back.array.element(0).x == doctest::Approx(data.array.element(0).x).epsilon(1e-15));
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    CHECK(back.samples[i] == doctest::Approx(data.samples[i]).epsilon(1e-6).scale(1.0));
  std::filesystem::remove_all(dir);
  CHECK(kind_of([&] { read_channel_data(dir / "missing"); }) == ErrorKind::io);
}
