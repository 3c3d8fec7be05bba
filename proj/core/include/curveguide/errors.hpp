#pragma once

#include <stdexcept>
#include <string>

namespace curveguide {

// Library-wide error taxonomy. The CLI maps Code to exit status:
// input/config problems exit 2, everything else exits 1.
class Error : public std::runtime_error {
 public:
  enum class Code {
    invalid_input,    // bad argument values, malformed config
    degenerate_input, // duplicate points, zero-length direction, ...
    out_of_range,     // query outside a curve/surface/plan domain
    ambiguous,        // e.g. a plane cutting a curve more than once
    empty_result,     // operation produced nothing to work with
    serialization,    // malformed artifact JSON
    internal          // invariant violation; a bug, not a user error
  };

  Error(Code code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Code code() const { return code_; }

  bool is_validation() const {
    return code_ == Code::invalid_input || code_ == Code::degenerate_input ||
           code_ == Code::out_of_range || code_ == Code::serialization;
  }

 private:
  Code code_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(Error::Code::invalid_input, msg);
}
[[noreturn]] inline void throw_degenerate(const std::string& msg) {
  throw Error(Error::Code::degenerate_input, msg);
}
[[noreturn]] inline void throw_out_of_range(const std::string& msg) {
  throw Error(Error::Code::out_of_range, msg);
}
[[noreturn]] inline void throw_ambiguous(const std::string& msg) {
  throw Error(Error::Code::ambiguous, msg);
}
[[noreturn]] inline void throw_empty(const std::string& msg) {
  throw Error(Error::Code::empty_result, msg);
}
[[noreturn]] inline void throw_serialization(const std::string& msg) {
  throw Error(Error::Code::serialization, msg);
}
[[noreturn]] inline void throw_internal(const std::string& msg) {
  throw Error(Error::Code::internal, msg);
}

}  // namespace curveguide
