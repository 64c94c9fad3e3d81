#pragma once

#include <stdexcept>
#include <string>

namespace gradplast {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonSkewInput : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct SingularBlock : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct InfeasibleBC : Error { using Error::Error; };
struct ZeroField : Error { using Error::Error; };
struct DegreeOverflow : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace gradplast
