#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lfs {

enum class ErrorCode {
  InvalidConfig,
  NoSoi,
  SamplingExhausted,
  PlacementFailed,
  Schema,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lfs
