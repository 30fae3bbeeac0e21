#pragma once

#include "sosaf/beamformer.hpp"
#include "sosaf/field.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace sosaf {

/// Maps [lo, hi] linearly onto 0..255 (clamped); NaN pixels become 0.
std::vector<std::uint8_t> to_gray8(const Field2D &field, double lo, double hi);

void write_pgm(const std::filesystem::path &path, const Field2D &field, double lo, double hi);
void write_png(const std::filesystem::path &path, const Field2D &field, double lo, double hi);

/// nz rows of nx comma-separated values; NaN written as "nan".
void write_csv_grid(const std::filesystem::path &path, const Field2D &field);

/// `<stem>.csv`, `<stem>.png` scaled to the finite min/max, and
/// `<stem>.scale.txt` recording that min/max.
void write_map(const std::filesystem::path &stem, const Field2D &field);

/// PNG of a log-compressed image over [-dynamic_range_db, 0].
void write_log_png(const std::filesystem::path &path, const BeamformedImage &log_image,
                   double dynamic_range_db);

} // namespace sosaf
