#include "sosaf/image_io.hpp"

#include "sosaf/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>

namespace sosaf {

std::vector<std::uint8_t> to_gray8(const Field2D &field, double lo, double hi) {
  std::vector<std::uint8_t> out(field.size(), 0);
  const double span = hi - lo;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double v = field.values[i];
    if (std::isnan(v))
      continue;
    const double t = span > 0.0 ? (v - lo) / span : 0.0;
    out[i] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
  }
  return out;
}

void write_pgm(const std::filesystem::path &path, const Field2D &field, double lo, double hi) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorKind::io, "cannot write " + path.string());
  const auto gray = to_gray8(field, lo, hi);
  out << "P5\n" << field.nx << ' ' << field.nz << "\n255\n";
  out.write(reinterpret_cast<const char *>(gray.data()), static_cast<std::streamsize>(gray.size()));
  if (!out)
    throw Error(ErrorKind::io, "failed writing " + path.string());
}

void write_png(const std::filesystem::path &path, const Field2D &field, double lo, double hi) {
  if (field.nx == 0 || field.nz == 0)
    throw Error(ErrorKind::invalid_argument, "cannot write an empty image");
  const auto gray = to_gray8(field, lo, hi);
  std::unique_ptr<FILE, int (*)(FILE *)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp)
    throw Error(ErrorKind::io, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::io, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::io, "libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(field.nx), static_cast<png_uint_32>(field.nz),
               8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < field.nz; ++r)
    png_write_row(png, gray.data() + r * field.nx);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_csv_grid(const std::filesystem::path &path, const Field2D &field) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::io, "cannot write " + path.string());
  out.precision(10);
  for (std::size_t k = 0; k < field.nz; ++k) {
    for (std::size_t i = 0; i < field.nx; ++i) {
      if (i)
        out << ',';
      const double v = field(i, k);
      if (std::isnan(v))
        out << "nan";
      else
        out << v;
    }
    out << '\n';
  }
  if (!out)
    throw Error(ErrorKind::io, "failed writing " + path.string());
}

void write_map(const std::filesystem::path &stem, const Field2D &field) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : field.values)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!std::isfinite(lo))
    lo = hi = 0.0;
  auto with = [&](const char *ext) {
    auto p = stem;
    p += ext;
    return p;
  };
  write_csv_grid(with(".csv"), field);
  write_png(with(".png"), field, lo, hi);
  std::ofstream scale(with(".scale.txt"));
  scale.precision(17);
  scale << "min = " << lo << "\nmax = " << hi << '\n';
  if (!scale)
    throw Error(ErrorKind::io, "failed writing " + with(".scale.txt").string());
}

void write_log_png(const std::filesystem::path &path, const BeamformedImage &log_image,
                   double dynamic_range_db) {
  if (log_image.state != CompressionState::log_db)
    throw Error(ErrorKind::invalid_argument, "expected a log-compressed image");
  write_png(path, log_image.intensity, -dynamic_range_db, 0.0);
}

} // namespace sosaf
