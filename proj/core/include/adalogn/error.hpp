#pragma once

#include <stdexcept>

namespace adalogn {

/// Base of every domain error raised by the library. The CLI maps these to
/// exit status 1; anything else is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adalogn
