#include "vsheet/error.hpp"

namespace vsheet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::GridMismatch: return "grid mismatch";
    case ErrorKind::DegenerateFrequency: return "degenerate frequency";
    case ErrorKind::BandLimit: return "band limit violated";
    case ErrorKind::BackendCapacity: return "backend capacity exceeded";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Stability: return "stability error";
    case ErrorKind::TailTolerance: return "tail tolerance exceeded";
    case ErrorKind::SeriesDivergence: return "series divergence guard";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

}  // namespace vsheet
