#include "lfs/error.hpp"

namespace lfs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::NoSoi: return "NO_SOI";
    case ErrorCode::SamplingExhausted: return "SAMPLING_EXHAUSTED";
    case ErrorCode::PlacementFailed: return "PLACEMENT_FAILED";
    case ErrorCode::Schema: return "SCHEMA";
    case ErrorCode::Io: return "IO";
  }
  return "?";
}

}  // namespace lfs
