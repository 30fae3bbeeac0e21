#include "sosaf/error.hpp"

namespace sosaf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::invalid_geometry: return "invalid-geometry";
  case ErrorKind::degenerate_aperture: return "degenerate-aperture";
  case ErrorKind::zero_length: return "zero-length";
  case ErrorKind::invalid_sos: return "invalid-sos";
  case ErrorKind::refraction_unsolvable: return "refraction-unsolvable";
  case ErrorKind::invalid_pulse: return "invalid-pulse";
  case ErrorKind::invalid_scene: return "invalid-scene";
  case ErrorKind::configuration: return "configuration";
  case ErrorKind::invalid_argument: return "invalid-argument";
  case ErrorKind::degenerate_metric: return "degenerate-metric";
  case ErrorKind::unresolved_target: return "unresolved-target";
  case ErrorKind::degenerate_cnr: return "degenerate-cnr";
  case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

} // namespace sosaf
