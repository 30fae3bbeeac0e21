#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sosaf {

enum class ErrorKind {
  invalid_geometry,
  degenerate_aperture,
  zero_length,
  invalid_sos,
  refraction_unsolvable,
  invalid_pulse,
  invalid_scene,
  configuration,
  invalid_argument,
  degenerate_metric,
  unresolved_target,
  degenerate_cnr,
  io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace sosaf
