#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace modlab {

enum class ErrorCode {
  malformed_input,
  ambient_mismatch,
  context_mismatch,
  size_guard,
  precondition,
  parse_error,
  io_error,
  unknown_suite,
  invalid_property,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Largest module cardinality the enumeration routines accept. Read once from
// MODLAB_MAX_SIZE, default 2^20.
std::int64_t default_size_guard();
void set_default_size_guard(std::int64_t guard);

}  // namespace modlab
