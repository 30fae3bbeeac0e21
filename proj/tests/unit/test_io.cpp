#include "doctest.h"

#include "sosaf/error.hpp"
#include "sosaf/image_io.hpp"
#include "sosaf/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

using namespace sosaf;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const auto d = fs::temp_directory_path() / "sosaf_test_io";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::uint32_t be32(const std::string &s, std::size_t at) {
  return (std::uint32_t(std::uint8_t(s[at])) << 24) | (std::uint32_t(std::uint8_t(s[at + 1])) << 16) |
         (std::uint32_t(std::uint8_t(s[at + 2])) << 8) | std::uint32_t(std::uint8_t(s[at + 3]));
}

} // namespace

TEST_CASE("gray mapping clamps and maps NaN to black") {
  Field2D f(5, 1);
  f.values = {-1.0, 0.0, 0.5, 1.0, std::numeric_limits<double>::quiet_NaN()};
  const auto g = to_gray8(f, 0.0, 1.0);
  REQUIRE(g.size() == 5);
  CHECK(g[0] == 0);
  CHECK(g[1] == 0);
  CHECK((g[2] == 127 || g[2] == 128));
  CHECK(g[3] == 255);
  CHECK(g[4] == 0);
}

TEST_CASE("PGM and PNG headers carry the field size") {
  Field2D f(7, 3);
  for (std::size_t i = 0; i < f.size(); ++i)
    f.values[i] = static_cast<double>(i);
  const auto dir = scratch();
  write_pgm(dir / "a.pgm", f, 0.0, 20.0);
  const auto pgm = slurp(dir / "a.pgm");
  CHECK(pgm.rfind("P5", 0) == 0);
  CHECK(pgm.find("7 3") != std::string::npos);
  CHECK(std::uint8_t(pgm.back()) == 255);

  write_png(dir / "a.png", f, 0.0, 20.0);
  const auto png = slurp(dir / "a.png");
  REQUIRE(png.size() > 24);
  CHECK(png.substr(1, 3) == "PNG");
  CHECK(png.substr(12, 4) == "IHDR");
  CHECK(be32(png, 16) == 7);
  CHECK(be32(png, 20) == 3);
  CHECK_THROWS_AS(write_png(dir / "missing" / "x.png", f, 0.0, 1.0), Error);
}

TEST_CASE("CSV grid: nz rows of nx values, NaN spelled out") {
  Field2D f(3, 2);
  f.values = {1.5, 2.0, 3.0, std::numeric_limits<double>::quiet_NaN(), -4.0, 0.0};
  const auto dir = scratch();
  write_csv_grid(dir / "g.csv", f);
  std::ifstream in(dir / "g.csv");
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line))
    rows.push_back(line);
  REQUIRE(rows.size() == 2);
  CHECK(std::count(rows[0].begin(), rows[0].end(), ',') == 2);
  CHECK(rows[1].rfind("nan,", 0) == 0);
  std::istringstream first(rows[0]);
  std::string cell;
  std::getline(first, cell, ',');
  CHECK(std::stod(cell) == 1.5);
}

TEST_CASE("map writer produces csv, png and the scale") {
  Field2D f(4, 4, 0.0);
  f.values[5] = 1450;
  f.values[6] = 1540;
  f.values[7] = std::numeric_limits<double>::quiet_NaN();
  const auto dir = scratch();
  write_map(dir / "m", f);
  CHECK(fs::exists(dir / "m.csv"));
  CHECK(fs::exists(dir / "m.png"));
  const auto scale = slurp(dir / "m.scale.txt");
  CHECK(scale.find("0") != std::string::npos);
  CHECK(scale.find("1540") != std::string::npos);
}

TEST_CASE("log image PNG") {
  BeamformedImage img;
  img.grid = ImagingGrid::cartesian(0.0, 3e-3, 1e-3, 1e-3, 2e-3, 1e-3);
  img.intensity = Field2D(4, 2, -20.0);
  img.state = CompressionState::log_db;
  const auto dir = scratch();
  write_log_png(dir / "l.png", img, 40.0);
  CHECK(be32(slurp(dir / "l.png"), 16) == 4);
}

TEST_CASE("key-value files and float32 blobs") {
  const auto dir = scratch();
  {
    std::ofstream out(dir / "kv.txt");
    out << "# comment\n\nalpha = 1.5\n beta=two words \n";
  }
  const auto kv = read_key_values(dir / "kv.txt");
  CHECK(kv.size() == 2);
  CHECK(require_key(kv, "alpha") == "1.5");
  CHECK(require_key(kv, "beta") == "two words");
  CHECK_THROWS_AS(require_key(kv, "gamma"), Error);

  const std::vector<double> v{0.0, -1.25, 3.0e-7, 1540.0};
  write_float32_le(dir / "v.bin", v);
  CHECK(fs::file_size(dir / "v.bin") == 16);
  const auto back = read_float32_le(dir / "v.bin", 4);
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(back[i] == static_cast<double>(static_cast<float>(v[i])));
  CHECK_THROWS_AS(read_float32_le(dir / "v.bin", 5), Error);
  fs::remove_all(dir);
}
